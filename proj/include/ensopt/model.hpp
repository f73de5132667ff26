#pragma once
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensopt/event.hpp"
#include "ensopt/linalg.hpp"

namespace ensopt {

class FeasibleRegion;

// Any map from model inputs (p numeric features + group id) to a length-d
// prediction.
class BasePredictor {
public:
    virtual ~BasePredictor() = default;
    virtual int dim() const = 0;
    virtual Vec predict(std::span<const double> input) const = 0;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

struct Patch {
    ConditioningEvent event;
    Vec delta;
    int round = 0;  // outer round whose model snapshots fix the event family
};

// A base predictor plus an ordered list of additive patches. Predictions
// are clamped into [0, M]^d after the base evaluation and after every patch
// application. The model carries its per-sample predictions for the sample
// it is attached to; those are the values the debiasing loop reads and
// updates, and the values out-of-sample replay must reproduce bit-for-bit
// on training points.
class PatchedModel {
public:
    PatchedModel() = default;
    PatchedModel(std::shared_ptr<const BasePredictor> base, double label_bound);

    int dim() const { return base_ ? base_->dim() : 0; }
    double label_bound() const { return bound_; }
    const BasePredictor& base() const { return *base_; }
    std::shared_ptr<const BasePredictor> base_ptr() const { return base_; }

    // Evaluates the base over every sample row and freezes the result as
    // the model's working predictions.
    void attach_sample(const Matrix& inputs);
    bool attached() const { return sample_preds_.rows() > 0; }
    int sample_size() const { return sample_preds_.rows(); }
    const Matrix& sample_predictions() const { return sample_preds_; }
    std::span<const double> sample_prediction(int i) const { return sample_preds_.row(i); }

    const std::vector<Patch>& patches() const { return patches_; }
    int version() const { return version_; }
    int max_round() const;

    // Shifts the working predictions on the patch's member rows by delta
    // (then clamps) and appends the patch. Bumps the version.
    void append_patch(Patch patch);

    // Clamped base prediction for an arbitrary input row.
    Vec base_prediction(std::span<const double> input) const;

    nlohmann::json to_json() const;
    // `base_factory` resolves a serialized base predictor by kind.
    static PatchedModel from_json(
        const nlohmann::json& j,
        const std::function<std::shared_ptr<const BasePredictor>(const nlohmann::json&)>& base_factory);

private:
    std::shared_ptr<const BasePredictor> base_;
    double bound_ = 1.0;
    std::vector<Patch> patches_;
    Matrix sample_preds_;
    int version_ = 0;
};

using PolicyFn = std::function<Vec(std::span<const double>)>;

// Everything descriptor replay may need: the optimization region for level
// sets of model-induced policies, the co-evolving sibling models for argmax
// regions (aligned patch rounds), and callables for opaque policies.
struct ReplayContext {
    const FeasibleRegion* region = nullptr;
    std::span<const PatchedModel> ensemble;  // empty: the model replays alone
    int self_index = 0;
    const std::map<std::string, PolicyFn>* opaque_policies = nullptr;
};

// Out-of-sample prediction: replays the patch chain round by round,
// re-deriving each round's event memberships from the model snapshots the
// round was frozen against. On a training row this reproduces the stored
// debiased prediction exactly.
Vec predict(const PatchedModel& model, std::span<const double> input, const ReplayContext& ctx);

inline void clamp_into(std::span<double> v, double bound) {
    for (double& x : v) {
        if (x < 0.0) x = 0.0;
        else if (x > bound) x = bound;
    }
}

}  // namespace ensopt
