#pragma once
#include <span>
#include <vector>

#include <json.hpp>

#include "ensopt/linalg.hpp"

namespace ensopt {

struct GbtParams {
    int depth = 3;
    double learning_rate = 0.1;
    int n_estimators = 50;
    int min_samples_leaf = 5;

    nlohmann::json to_json() const;
    static GbtParams from_json(const nlohmann::json& j);
};

// Depth-limited CART regression tree, exact variance-reduction splits.
// Feature scan order and first-strict-improvement tie-breaking make fits
// deterministic.
class RegressionTree {
public:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };

    void fit(const Matrix& inputs, std::span<const double> targets, std::span<const int> rows, int max_depth,
             int min_samples_leaf);
    double predict_row(std::span<const double> input) const;
    const std::vector<Node>& nodes() const { return nodes_; }

    nlohmann::json to_json() const;
    static RegressionTree from_json(const nlohmann::json& j);

private:
    int build(const Matrix& inputs, std::span<const double> targets, std::vector<int>& rows, int begin, int end,
              int depth, int max_depth, int min_samples_leaf);

    std::vector<Node> nodes_;
};

// Least-squares gradient boosting: constant mean start, each stage fits a
// tree to the residuals and steps by the learning rate.
class BoostedRegressor {
public:
    void fit(const Matrix& inputs, std::span<const double> targets, std::span<const int> rows,
             const GbtParams& params);
    double predict_row(std::span<const double> input) const;

    double base_value() const { return base_; }
    int stages() const { return static_cast<int>(trees_.size()); }
    // Training MSE after each stage (stage 0 = the constant fit).
    const std::vector<double>& stage_mse() const { return stage_mse_; }

    nlohmann::json to_json() const;
    static BoostedRegressor from_json(const nlohmann::json& j);

private:
    double base_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<RegressionTree> trees_;
    std::vector<double> stage_mse_;
};

}  // namespace ensopt
