#include "ensopt/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ensopt/errors.hpp"

namespace ensopt {

nlohmann::json GbtParams::to_json() const {
    return {{"depth", depth},
            {"learning_rate", learning_rate},
            {"n_estimators", n_estimators},
            {"min_samples_leaf", min_samples_leaf}};
}

GbtParams GbtParams::from_json(const nlohmann::json& j) {
    GbtParams p;
    p.depth = j.value("depth", p.depth);
    p.learning_rate = j.value("learning_rate", p.learning_rate);
    p.n_estimators = j.value("n_estimators", p.n_estimators);
    p.min_samples_leaf = j.value("min_samples_leaf", p.min_samples_leaf);
    return p;
}

namespace {
double mean_of(std::span<const double> targets, std::span<const int> rows) {
    double s = 0.0;
    for (int r : rows) s += targets[r];
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}
}  // namespace

void RegressionTree::fit(const Matrix& inputs, std::span<const double> targets, std::span<const int> rows,
                         int max_depth, int min_samples_leaf) {
    nodes_.clear();
    std::vector<int> work(rows.begin(), rows.end());
    if (work.empty()) throw ConfigError("regression tree: empty training set");
    build(inputs, targets, work, 0, static_cast<int>(work.size()), 0, max_depth, min_samples_leaf);
}

int RegressionTree::build(const Matrix& inputs, std::span<const double> targets, std::vector<int>& rows,
                          int begin, int end, int depth, int max_depth, int min_samples_leaf) {
    const int count = end - begin;
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0.0;
    for (int i = begin; i < end; ++i) sum += targets[rows[i]];
    const double node_mean = sum / count;
    nodes_[node_index].value = node_mean;

    if (depth >= max_depth || count < 2 * min_samples_leaf) return node_index;

    // Best split: maximize the reduction in summed squared error, which for
    // a fixed node is maximizing sumL^2/nL + sumR^2/nR.
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 0.0;
    const double parent_score = sum * sum / count;

    std::vector<std::pair<double, int>> order(count);
    for (int f = 0; f < inputs.cols(); ++f) {
        for (int i = 0; i < count; ++i) {
            const int r = rows[begin + i];
            order[i] = {inputs(r, f), r};
        }
        std::sort(order.begin(), order.end());

        double left_sum = 0.0;
        for (int i = 0; i + 1 < count; ++i) {
            left_sum += targets[order[i].second];
            if (order[i].first == order[i + 1].first) continue;  // no boundary between equal values
            const int nl = i + 1;
            const int nr = count - nl;
            if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
            const double right_sum = sum - left_sum;
            const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
            const double gain = score - parent_score;
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_feature = f;
                best_threshold = 0.5 * (order[i].first + order[i + 1].first);
            }
        }
    }

    if (best_feature < 0) return node_index;

    const auto mid = std::stable_partition(rows.begin() + begin, rows.begin() + end, [&](int r) {
        return inputs(r, best_feature) <= best_threshold;
    });
    const int split = static_cast<int>(mid - rows.begin());
    if (split == begin || split == end) return node_index;  // degenerate threshold, keep the leaf

    nodes_[node_index].feature = best_feature;
    nodes_[node_index].threshold = best_threshold;
    const int left = build(inputs, targets, rows, begin, split, depth + 1, max_depth, min_samples_leaf);
    nodes_[node_index].left = left;
    const int right = build(inputs, targets, rows, split, end, depth + 1, max_depth, min_samples_leaf);
    nodes_[node_index].right = right;
    return node_index;
}

double RegressionTree::predict_row(std::span<const double> input) const {
    int node = 0;
    while (nodes_[node].feature >= 0)
        node = input[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
    return nodes_[node].value;
}

nlohmann::json RegressionTree::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& n : nodes_) {
        if (n.feature < 0)
            arr.push_back({{"value", n.value}});
        else
            arr.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
    return arr;
}

RegressionTree RegressionTree::from_json(const nlohmann::json& j) {
    RegressionTree t;
    for (const auto& nj : j) {
        Node n;
        if (nj.contains("feature")) {
            n.feature = nj.at("feature").get<int>();
            n.threshold = nj.at("threshold").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
        } else {
            n.value = nj.at("value").get<double>();
        }
        t.nodes_.push_back(n);
    }
    if (t.nodes_.empty()) throw ConfigError("regression tree: empty node list");
    return t;
}

void BoostedRegressor::fit(const Matrix& inputs, std::span<const double> targets, std::span<const int> rows,
                           const GbtParams& params) {
    if (rows.empty()) throw ConfigError("boosted regressor: empty training mask");
    trees_.clear();
    stage_mse_.clear();
    learning_rate_ = params.learning_rate;
    base_ = mean_of(targets, rows);

    std::vector<double> residual(targets.size(), 0.0);
    double mse = 0.0;
    for (int r : rows) {
        residual[r] = targets[r] - base_;
        mse += residual[r] * residual[r];
    }
    mse /= static_cast<double>(rows.size());
    stage_mse_.push_back(mse);

    for (int stage = 0; stage < params.n_estimators; ++stage) {
        RegressionTree tree;
        tree.fit(inputs, residual, rows, params.depth, params.min_samples_leaf);
        mse = 0.0;
        for (int r : rows) {
            residual[r] -= learning_rate_ * tree.predict_row(inputs.row(r));
            mse += residual[r] * residual[r];
        }
        mse /= static_cast<double>(rows.size());
        stage_mse_.push_back(mse);
        trees_.push_back(std::move(tree));
    }
}

double BoostedRegressor::predict_row(std::span<const double> input) const {
    double value = base_;
    for (const auto& tree : trees_) value += learning_rate_ * tree.predict_row(input);
    return value;
}

nlohmann::json BoostedRegressor::to_json() const {
    nlohmann::json j;
    j["base"] = base_;
    j["learning_rate"] = learning_rate_;
    auto arr = nlohmann::json::array();
    for (const auto& t : trees_) arr.push_back(t.to_json());
    j["trees"] = std::move(arr);
    return j;
}

BoostedRegressor BoostedRegressor::from_json(const nlohmann::json& j) {
    BoostedRegressor b;
    b.base_ = j.at("base").get<double>();
    b.learning_rate_ = j.at("learning_rate").get<double>();
    for (const auto& tj : j.at("trees")) b.trees_.push_back(RegressionTree::from_json(tj));
    return b;
}

}  // namespace ensopt
