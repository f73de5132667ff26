#include "ensopt/policy.hpp"

#include "ensopt/errors.hpp"

namespace ensopt {

InducedPolicy::InducedPolicy(const FeasibleRegion& region, const PatchedModel& model, std::string id)
    : region_(&region), model_(&model), id_(std::move(id)) {}

const Matrix& InducedPolicy::sample_actions() const {
    if (cached_version_ == model_->version()) return actions_;
    if (!model_->attached()) throw InvariantError("induced policy: model has no attached sample");
    const int n = model_->sample_size();
    const int d = model_->dim();
    actions_ = Matrix(n, d);
    for (int i = 0; i < n; ++i) {
        const OracleResult r = region_->solve(model_->sample_prediction(i));
        for (int j = 0; j < d; ++j) actions_(i, j) = r.action[j];
    }
    cached_version_ = model_->version();
    return actions_;
}

void InducedPolicy::refresh_rows(std::span<const int32_t> rows) const {
    if (cached_version_ < 0) {
        sample_actions();
        return;
    }
    for (int32_t i : rows) {
        const OracleResult r = region_->solve(model_->sample_prediction(i));
        for (int j = 0; j < model_->dim(); ++j) actions_(i, j) = r.action[j];
    }
    cached_version_ = model_->version();
}

Vec InducedPolicy::act(std::span<const double> input, const ReplayContext& ctx) const {
    const Vec pred = predict(*model_, input, ctx);
    return region_->solve(pred).action;
}

}  // namespace ensopt
