#pragma once
#include <memory>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ensopt/dataset.hpp"
#include "ensopt/gbt.hpp"
#include "ensopt/model.hpp"

namespace ensopt {

struct GeneratorConfig {
    uint64_t seed = 7;
    int n_train = 10000;
    int n_debias = 400;
    int p = 20;
    int d = 4;
    int n_groups = 5;
    // Noise sd as a fraction of the noiseless per-coordinate label std.
    double noise_scale = 0.1;
    double label_bound = 1.0;
    // Quantile of the raw train labels mapped to the label bound; the tail
    // above it is clipped.
    double map_quantile = 0.995;

    nlohmann::json to_json() const;
    static GeneratorConfig from_json(const nlohmann::json& j);
};

// Seeded synthetic draw: multivariate normal features (random SPD
// covariance G G^T + 0.1 I), a uniform categorical group column, and labels
// with a noisy linear dependence on the features, affinely mapped into
// [0, M]^d. The debias set comes from a disjoint seed stream of the same
// process and shares the train-derived affine map.
std::pair<Dataset, Dataset> generate(const GeneratorConfig& config);

// Constant predictor: the training-label mean vector.
class LabelMeanPredictor : public BasePredictor {
public:
    explicit LabelMeanPredictor(Vec mean) : mean_(std::move(mean)) {}
    int dim() const override { return static_cast<int>(mean_.size()); }
    Vec predict(std::span<const double>) const override { return mean_; }
    std::string kind() const override { return "label_mean"; }
    nlohmann::json to_json() const override;
    static std::shared_ptr<LabelMeanPredictor> from_json(const nlohmann::json& j);

private:
    Vec mean_;
};

// Fixed-vector predictor, mostly for tests and degenerate baselines.
class ConstantPredictor : public BasePredictor {
public:
    explicit ConstantPredictor(Vec value) : value_(std::move(value)) {}
    int dim() const override { return static_cast<int>(value_.size()); }
    Vec predict(std::span<const double>) const override { return value_; }
    std::string kind() const override { return "constant"; }
    nlohmann::json to_json() const override;
    static std::shared_ptr<ConstantPredictor> from_json(const nlohmann::json& j);

private:
    Vec value_;
};

// Boosted regressor on one label coordinate, the training-label mean on
// every other coordinate.
class CoordinateSpecialist : public BasePredictor {
public:
    CoordinateSpecialist(int coord, Vec means, BoostedRegressor booster)
        : coord_(coord), means_(std::move(means)), booster_(std::move(booster)) {}
    int dim() const override { return static_cast<int>(means_.size()); }
    Vec predict(std::span<const double> input) const override;
    std::string kind() const override { return "coordinate_specialist"; }
    int coordinate() const { return coord_; }
    nlohmann::json to_json() const override;
    static std::shared_ptr<CoordinateSpecialist> from_json(const nlohmann::json& j);

private:
    int coord_;
    Vec means_;
    BoostedRegressor booster_;
};

// Per-coordinate boosted regressors trained on one group's rows; the global
// label mean elsewhere. Group membership is read from the model input's
// trailing group column.
class GroupSpecialist : public BasePredictor {
public:
    GroupSpecialist(int group, Vec global_mean, std::vector<BoostedRegressor> boosters)
        : group_(group), global_mean_(std::move(global_mean)), boosters_(std::move(boosters)) {}
    int dim() const override { return static_cast<int>(global_mean_.size()); }
    Vec predict(std::span<const double> input) const override;
    std::string kind() const override { return "group_specialist"; }
    int group() const { return group_; }
    nlohmann::json to_json() const override;
    static std::shared_ptr<GroupSpecialist> from_json(const nlohmann::json& j);

private:
    int group_;
    Vec global_mean_;
    std::vector<BoostedRegressor> boosters_;
};

// Least-squares boosting on label coordinate `coord`, restricted to `rows`
// (all rows when empty).
BoostedRegressor train_gbt(const Dataset& train, int coord, std::span<const int> rows, const GbtParams& params);

std::vector<std::shared_ptr<const BasePredictor>> make_coordinate_specialists(const Dataset& train,
                                                                              const GbtParams& params);
std::vector<std::shared_ptr<const BasePredictor>> make_group_specialists(const Dataset& train,
                                                                         const GbtParams& params);

std::shared_ptr<const BasePredictor> base_predictor_from_json(const nlohmann::json& j);

}  // namespace ensopt
