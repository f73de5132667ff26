#include "ensopt/model.hpp"

#include <algorithm>

#include "ensopt/bucketing.hpp"
#include "ensopt/errors.hpp"
#include "ensopt/oracle.hpp"

namespace ensopt {

PatchedModel::PatchedModel(std::shared_ptr<const BasePredictor> base, double label_bound)
    : base_(std::move(base)), bound_(label_bound) {
    if (!base_) throw ConfigError("patched model: null base predictor");
    if (bound_ <= 0.0) throw ConfigError("patched model: label bound must be positive");
}

void PatchedModel::attach_sample(const Matrix& inputs) {
    sample_preds_ = Matrix(inputs.rows(), dim());
    for (int i = 0; i < inputs.rows(); ++i) {
        Vec pred = base_prediction(inputs.row(i));
        for (int j = 0; j < dim(); ++j) sample_preds_(i, j) = pred[j];
    }
}

int PatchedModel::max_round() const {
    int r = -1;
    for (const auto& p : patches_) r = std::max(r, p.round);
    return r;
}

void PatchedModel::append_patch(Patch patch) {
    if (!attached()) throw InvariantError("patched model: cannot patch before attaching a sample");
    if (static_cast<int>(patch.delta.size()) != dim())
        throw ConfigError("patched model: delta dimension mismatch");
    for (int32_t i : patch.event.members) {
        auto row = sample_preds_.row(i);
        for (int j = 0; j < dim(); ++j) row[j] += patch.delta[j];
        clamp_into(row, bound_);
    }
    patches_.push_back(std::move(patch));
    ++version_;
}

Vec PatchedModel::base_prediction(std::span<const double> input) const {
    Vec pred = base_->predict(input);
    if (static_cast<int>(pred.size()) != dim())
        throw NumericError("patched model: base predictor returned wrong dimension");
    clamp_into(pred, bound_);
    return pred;
}

nlohmann::json PatchedModel::to_json() const {
    nlohmann::json j;
    j["label_bound"] = bound_;
    j["base"] = base_->to_json();
    auto arr = nlohmann::json::array();
    for (const auto& p : patches_) {
        nlohmann::json pj;
        pj["round"] = p.round;
        pj["delta"] = p.delta;
        pj["descriptor"] = p.event.descriptor.to_json();
        pj["members"] = p.event.members;
        pj["mass"] = p.event.mass;
        arr.push_back(std::move(pj));
    }
    j["patches"] = std::move(arr);
    return j;
}

PatchedModel PatchedModel::from_json(
    const nlohmann::json& j,
    const std::function<std::shared_ptr<const BasePredictor>(const nlohmann::json&)>& base_factory) {
    PatchedModel m(base_factory(j.at("base")), j.at("label_bound").get<double>());
    for (const auto& pj : j.at("patches")) {
        Patch p;
        p.round = pj.at("round").get<int>();
        p.delta = pj.at("delta").get<Vec>();
        p.event.descriptor = EventDescriptor::from_json(pj.at("descriptor"));
        p.event.members = pj.at("members").get<std::vector<int32_t>>();
        p.event.mass = pj.at("mass").get<double>();
        m.patches_.push_back(std::move(p));
        ++m.version_;
    }
    return m;
}

namespace {

// Per-round snapshot of the quantities descriptor replay can reference.
struct RoundSnapshot {
    std::vector<Vec> actions;       // induced action per ensemble model
    std::vector<double> self_eval;  // action . prediction per model
    int argmax = 0;
};

bool descriptor_holds(const EventDescriptor& d, const RoundSnapshot& snap, int self_index,
                      const std::map<std::string, Vec>& opaque_actions) {
    switch (d.kind) {
        case DescriptorKind::AllPoints: return true;
        case DescriptorKind::ArgmaxRegion: return snap.argmax == d.model_index;
        case DescriptorKind::PolicyLevelSet: {
            const Vec* action = nullptr;
            if (d.policy_id == "self") {
                action = &snap.actions[self_index];
            } else if (d.policy_id.rfind("model:", 0) == 0) {
                const int idx = std::stoi(d.policy_id.substr(6));
                if (idx < 0 || idx >= static_cast<int>(snap.actions.size()))
                    throw ConfigError("replay: sibling model index out of range in descriptor");
                action = &snap.actions[idx];
            } else {
                auto it = opaque_actions.find(d.policy_id);
                if (it == opaque_actions.end())
                    throw ConfigError("replay: no callable registered for opaque policy '" + d.policy_id + "'");
                action = &it->second;
            }
            const Bucketing buckets = Bucketing::with_buckets(d.num_buckets);
            return buckets.bucket_of((*action)[d.coord]) == d.bucket;
        }
        case DescriptorKind::Intersection:
            for (const auto& part : d.parts)
                if (!descriptor_holds(part, snap, self_index, opaque_actions)) return false;
            return true;
    }
    return false;
}

}  // namespace

Vec predict(const PatchedModel& model, std::span<const double> input, const ReplayContext& ctx) {
    std::span<const PatchedModel> ensemble = ctx.ensemble;
    if (ensemble.empty()) ensemble = {&model, 1};
    const int self = ctx.ensemble.empty() ? 0 : ctx.self_index;
    if (self < 0 || self >= static_cast<int>(ensemble.size()) || &ensemble[self] != &model)
        throw ConfigError("replay: self_index does not locate the model in the ensemble");

    const int k = static_cast<int>(ensemble.size());
    std::vector<Vec> preds(k);
    for (int m = 0; m < k; ++m) preds[m] = ensemble[m].base_prediction(input);

    int last_round = -1;
    bool needs_region = false;
    bool needs_opaque = false;
    std::vector<bool> round_has_patch;
    for (int m = 0; m < k; ++m) {
        last_round = std::max(last_round, ensemble[m].max_round());
        round_has_patch.resize(static_cast<size_t>(last_round + 1), false);
        for (const auto& p : ensemble[m].patches()) {
            round_has_patch[p.round] = true;
            std::vector<const EventDescriptor*> stack{&p.event.descriptor};
            while (!stack.empty()) {
                const EventDescriptor* d = stack.back();
                stack.pop_back();
                if (d->kind == DescriptorKind::PolicyLevelSet) {
                    if (d->policy_id == "self" || d->policy_id.rfind("model:", 0) == 0)
                        needs_region = true;
                    else
                        needs_opaque = true;
                }
                if (d->kind == DescriptorKind::ArgmaxRegion) needs_region = true;
                for (const auto& part : d->parts) stack.push_back(&part);
            }
        }
    }
    if (last_round < 0) return preds[self];

    if (needs_region && !ctx.region)
        throw ConfigError("replay: patch descriptors reference induced policies but no region was supplied");
    if (needs_opaque && !ctx.opaque_policies)
        throw ConfigError("replay: patch descriptors reference opaque policies but none were supplied");

    std::map<std::string, Vec> opaque_actions;
    if (ctx.opaque_policies)
        for (const auto& [id, fn] : *ctx.opaque_policies) opaque_actions[id] = fn(input);

    for (int round = 0; round <= last_round; ++round) {
        if (!round_has_patch[round]) continue;
        // Snapshot the models as they stood when this round's families were
        // frozen, then apply the round's patches against that snapshot.
        RoundSnapshot snap;
        if (needs_region) {
            snap.actions.resize(k);
            snap.self_eval.resize(k);
            for (int m = 0; m < k; ++m) {
                snap.actions[m] = ctx.region->solve(preds[m]).action;
                snap.self_eval[m] = dot(snap.actions[m], preds[m]);
            }
            snap.argmax = 0;
            for (int m = 1; m < k; ++m)
                if (snap.self_eval[m] > snap.self_eval[snap.argmax]) snap.argmax = m;
        }
        for (int m = 0; m < k; ++m) {
            for (const auto& p : ensemble[m].patches()) {
                if (p.round != round) continue;
                if (descriptor_holds(p.event.descriptor, snap, m, opaque_actions)) {
                    for (size_t j = 0; j < preds[m].size(); ++j) preds[m][j] += p.delta[j];
                    clamp_into(preds[m], ensemble[m].label_bound());
                }
            }
        }
    }
    return preds[self];
}

}  // namespace ensopt
