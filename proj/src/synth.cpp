#include "ensopt/synth.hpp"

#include <algorithm>
#include <cmath>

#include "ensopt/errors.hpp"
#include "ensopt/rng.hpp"

namespace ensopt {

nlohmann::json GeneratorConfig::to_json() const {
    return {{"seed", seed},       {"n_train", n_train},       {"n_debias", n_debias},
            {"p", p},             {"d", d},                   {"n_groups", n_groups},
            {"noise_scale", noise_scale}, {"label_bound", label_bound}, {"map_quantile", map_quantile}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    GeneratorConfig c;
    c.seed = j.value("seed", c.seed);
    c.n_train = j.value("n_train", c.n_train);
    c.n_debias = j.value("n_debias", c.n_debias);
    c.p = j.value("p", c.p);
    c.d = j.value("d", c.d);
    c.n_groups = j.value("n_groups", c.n_groups);
    c.noise_scale = j.value("noise_scale", c.noise_scale);
    c.label_bound = j.value("label_bound", c.label_bound);
    c.map_quantile = j.value("map_quantile", c.map_quantile);
    return c;
}

namespace {

Matrix gaussian_matrix(Rng& rng, int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
    return m;
}

// x = L z with L the Cholesky factor of the feature covariance.
Matrix draw_features(Rng& rng, int n, int p, const Matrix& chol_factor) {
    Matrix x(n, p);
    Vec z(p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) z[j] = rng.gaussian();
        for (int j = 0; j < p; ++j) {
            double s = 0.0;
            for (int k = 0; k <= j; ++k) s += chol_factor(j, k) * z[k];
            x(i, j) = s;
        }
    }
    return x;
}

Matrix noiseless_labels(const Matrix& x, const Matrix& weights) {
    Matrix y(x.rows(), weights.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < weights.cols(); ++j) {
            double s = 0.0;
            for (int k = 0; k < x.cols(); ++k) s += x(i, k) * weights(k, j);
            y(i, j) = s;
        }
    return y;
}

}  // namespace

std::pair<Dataset, Dataset> generate(const GeneratorConfig& config) {
    if (config.n_train <= 0 || config.n_debias <= 0 || config.p <= 0 || config.d <= 0 || config.n_groups <= 0)
        throw ConfigError("generator: all counts must be positive");
    if (config.label_bound <= 0.0) throw ConfigError("generator: label bound must be positive");

    // Stream 0 fixes the population structure; streams 1.. draw samples.
    Rng structure = Rng::stream(config.seed, 0);
    const Matrix g = gaussian_matrix(structure, config.p, config.p);
    Matrix sigma(config.p, config.p);
    for (int i = 0; i < config.p; ++i)
        for (int j = 0; j < config.p; ++j) {
            double s = 0.0;
            for (int k = 0; k < config.p; ++k) s += g(i, k) * g(j, k);
            sigma(i, j) = s;
        }
    for (int i = 0; i < config.p; ++i) sigma(i, i) += 0.1;
    const Matrix chol_factor = cholesky(sigma);
    const Matrix weights = gaussian_matrix(structure, config.p, config.d);

    auto draw_split = [&](int n, uint64_t feature_tag, uint64_t noise_tag, uint64_t group_tag) {
        Rng fr = Rng::stream(config.seed, feature_tag);
        Rng nr = Rng::stream(config.seed, noise_tag);
        Rng gr = Rng::stream(config.seed, group_tag);
        Matrix x = draw_features(fr, n, config.p, chol_factor);
        Matrix y = noiseless_labels(x, weights);
        std::vector<int> groups(n);
        for (int i = 0; i < n; ++i) groups[i] = gr.uniform_int(config.n_groups);
        return std::make_tuple(std::move(x), std::move(y), std::move(groups), std::move(nr));
    };

    auto [x_train, y_train, g_train, noise_train] = draw_split(config.n_train, 1, 2, 3);
    auto [x_debias, y_debias, g_debias, noise_debias] = draw_split(config.n_debias, 11, 12, 13);

    // Noise sd per coordinate from the noiseless train labels.
    Vec noise_sd(config.d, 0.0);
    {
        const Vec mean = column_means(y_train);
        for (int j = 0; j < config.d; ++j) {
            double var = 0.0;
            for (int i = 0; i < config.n_train; ++i) {
                const double e = y_train(i, j) - mean[j];
                var += e * e;
            }
            noise_sd[j] = config.noise_scale * std::sqrt(var / config.n_train);
        }
    }
    for (int i = 0; i < config.n_train; ++i)
        for (int j = 0; j < config.d; ++j) y_train(i, j) += noise_sd[j] * noise_train.gaussian();
    for (int i = 0; i < config.n_debias; ++i)
        for (int j = 0; j < config.d; ++j) y_debias(i, j) += noise_sd[j] * noise_debias.gaussian();

    // Affine map into [0, M]: train minimum to 0, a high train quantile to
    // M, tails clipped. Derived from the train split and shared by both.
    Vec flat;
    flat.reserve(static_cast<size_t>(config.n_train) * config.d);
    for (int i = 0; i < config.n_train; ++i)
        for (int j = 0; j < config.d; ++j) flat.push_back(y_train(i, j));
    std::sort(flat.begin(), flat.end());
    const double lo = flat.front();
    const size_t q_idx = std::min(flat.size() - 1, static_cast<size_t>(config.map_quantile * (flat.size() - 1)));
    const double hi = flat[q_idx];
    if (!(hi > lo)) throw NumericError("generator: degenerate label range");
    LabelAffine affine{config.label_bound / (hi - lo), -lo * config.label_bound / (hi - lo)};

    auto map_labels = [&](Matrix& y) {
        for (int i = 0; i < y.rows(); ++i)
            for (int j = 0; j < y.cols(); ++j) {
                const double v = affine.scale * y(i, j) + affine.shift;
                y(i, j) = std::clamp(v, 0.0, config.label_bound);
            }
    };
    map_labels(y_train);
    map_labels(y_debias);

    Dataset train(std::move(x_train), std::move(y_train), std::move(g_train), config.label_bound,
                  config.n_groups, config.seed, affine);
    Dataset debias(std::move(x_debias), std::move(y_debias), std::move(g_debias), config.label_bound,
                   config.n_groups, config.seed, affine);
    return {std::move(train), std::move(debias)};
}

nlohmann::json LabelMeanPredictor::to_json() const {
    return {{"kind", kind()}, {"mean", mean_}};
}

std::shared_ptr<LabelMeanPredictor> LabelMeanPredictor::from_json(const nlohmann::json& j) {
    return std::make_shared<LabelMeanPredictor>(j.at("mean").get<Vec>());
}

nlohmann::json ConstantPredictor::to_json() const {
    return {{"kind", kind()}, {"value", value_}};
}

std::shared_ptr<ConstantPredictor> ConstantPredictor::from_json(const nlohmann::json& j) {
    return std::make_shared<ConstantPredictor>(j.at("value").get<Vec>());
}

Vec CoordinateSpecialist::predict(std::span<const double> input) const {
    Vec out = means_;
    out[coord_] = booster_.predict_row(input);
    return out;
}

nlohmann::json CoordinateSpecialist::to_json() const {
    return {{"kind", kind()}, {"coord", coord_}, {"means", means_}, {"booster", booster_.to_json()}};
}

std::shared_ptr<CoordinateSpecialist> CoordinateSpecialist::from_json(const nlohmann::json& j) {
    return std::make_shared<CoordinateSpecialist>(j.at("coord").get<int>(), j.at("means").get<Vec>(),
                                                  BoostedRegressor::from_json(j.at("booster")));
}

Vec GroupSpecialist::predict(std::span<const double> input) const {
    const int group = static_cast<int>(input.back());
    if (group != group_) return global_mean_;
    Vec out(global_mean_.size());
    for (size_t j = 0; j < boosters_.size(); ++j) out[j] = boosters_[j].predict_row(input);
    return out;
}

nlohmann::json GroupSpecialist::to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& b : boosters_) arr.push_back(b.to_json());
    return {{"kind", kind()}, {"group", group_}, {"global_mean", global_mean_}, {"boosters", std::move(arr)}};
}

std::shared_ptr<GroupSpecialist> GroupSpecialist::from_json(const nlohmann::json& j) {
    std::vector<BoostedRegressor> boosters;
    for (const auto& bj : j.at("boosters")) boosters.push_back(BoostedRegressor::from_json(bj));
    return std::make_shared<GroupSpecialist>(j.at("group").get<int>(), j.at("global_mean").get<Vec>(),
                                             std::move(boosters));
}

BoostedRegressor train_gbt(const Dataset& train, int coord, std::span<const int> rows, const GbtParams& params) {
    if (coord < 0 || coord >= train.d()) throw ConfigError("train_gbt: coordinate outside [0, d)");
    std::vector<int> all;
    if (rows.empty()) {
        all.resize(train.n());
        for (int i = 0; i < train.n(); ++i) all[i] = i;
        rows = all;
    }
    Vec targets(train.n());
    for (int i = 0; i < train.n(); ++i) targets[i] = train.labels()(i, coord);

    // The trees see the p numeric features plus the trailing group column.
    Matrix inputs(train.n(), train.input_dim());
    for (int i = 0; i < train.n(); ++i) {
        const auto row = train.input_row(i);
        for (int j = 0; j < train.input_dim(); ++j) inputs(i, j) = row[j];
    }
    BoostedRegressor b;
    b.fit(inputs, targets, rows, params);
    return b;
}

std::vector<std::shared_ptr<const BasePredictor>> make_coordinate_specialists(const Dataset& train,
                                                                              const GbtParams& params) {
    const Vec means = column_means(train.labels());
    std::vector<std::shared_ptr<const BasePredictor>> models;
    for (int j = 0; j < train.d(); ++j)
        models.push_back(std::make_shared<CoordinateSpecialist>(j, means, train_gbt(train, j, {}, params)));
    return models;
}

std::vector<std::shared_ptr<const BasePredictor>> make_group_specialists(const Dataset& train,
                                                                         const GbtParams& params) {
    const Vec means = column_means(train.labels());
    std::vector<std::shared_ptr<const BasePredictor>> models;
    for (int g = 0; g < train.n_groups(); ++g) {
        std::vector<int> rows;
        for (int i = 0; i < train.n(); ++i)
            if (train.group_id()[i] == g) rows.push_back(i);
        if (rows.empty()) throw ConfigError("group specialists: group " + std::to_string(g) + " is empty");
        std::vector<BoostedRegressor> boosters;
        for (int j = 0; j < train.d(); ++j) boosters.push_back(train_gbt(train, j, rows, params));
        models.push_back(std::make_shared<GroupSpecialist>(g, means, std::move(boosters)));
    }
    return models;
}

std::shared_ptr<const BasePredictor> base_predictor_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "label_mean") return LabelMeanPredictor::from_json(j);
    if (kind == "constant") return ConstantPredictor::from_json(j);
    if (kind == "coordinate_specialist") return CoordinateSpecialist::from_json(j);
    if (kind == "group_specialist") return GroupSpecialist::from_json(j);
    throw ConfigError("base predictor: unknown kind '" + kind + "'");
}

}  // namespace ensopt
