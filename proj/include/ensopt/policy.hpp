#pragma once
#include <string>

#include "ensopt/model.hpp"
#include "ensopt/oracle.hpp"

namespace ensopt {

// The policy a model induces through the optimization oracle:
// pi_h(x) = argmax_{a in Omega} a . h(x). Caches per-sample actions for the
// model's current version; any patch append invalidates the cache.
class InducedPolicy {
public:
    InducedPolicy(const FeasibleRegion& region, const PatchedModel& model, std::string id);

    const std::string& id() const { return id_; }
    const PatchedModel& model() const { return *model_; }

    // Actions over the attached sample (n x d), recomputed only when the
    // model version moved.
    const Matrix& sample_actions() const;
    std::span<const double> action_for_sample(int i) const { return sample_actions().row(i); }

    // Re-solves the given sample rows in place (used when a patch touched
    // only those rows); leaves the cache marked current.
    void refresh_rows(std::span<const int32_t> rows) const;

    // Action for a fresh input (full replay of the model's patch chain).
    Vec act(std::span<const double> input, const ReplayContext& ctx) const;

private:
    const FeasibleRegion* region_;
    const PatchedModel* model_;
    std::string id_;
    mutable Matrix actions_;
    mutable int cached_version_ = -1;
};

}  // namespace ensopt
