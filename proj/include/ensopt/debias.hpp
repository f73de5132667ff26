#pragma once
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ensopt/dataset.hpp"
#include "ensopt/event.hpp"
#include "ensopt/model.hpp"

namespace ensopt {

// A consistency violation: the event, the conditional mean residual over
// its frozen members, and the mass-weighted sup-norm score the stopping
// rule compares against alpha.
struct ViolationReport {
    ConditioningEvent event;
    Vec bias;
    double mass = 0.0;
    double score = 0.0;
    int model_version = -1;  // version the statistics were computed against
};

struct PatchRecord {
    int round = 0;  // patch ordinal within the run
    std::string descriptor;
    double mass = 0.0;
    double score = 0.0;
    double sq_err_before = 0.0;
    double sq_err_after = 0.0;
};

struct DebiasTrace {
    std::vector<PatchRecord> records;
    double terminal_max_score = 0.0;

    int patch_count() const { return static_cast<int>(records.size()); }
    void save_csv(const std::filesystem::path& path) const;
};

// Conditional mean residual of the model over the event's frozen members.
ViolationReport event_bias(const Dataset& data, const PatchedModel& model, const ConditioningEvent& event);

// The event with the highest score if it exceeds alpha, else nothing. Ties
// resolve to the lexicographically smallest descriptor.
std::optional<ViolationReport> find_violation(const Dataset& data, const PatchedModel& model,
                                              std::span<const ConditioningEvent> events, double alpha);

// Shifts the model on the report's event by its bias (clamped) and returns
// the measured mean squared-error decrease. The report must have been
// computed against the model's current version.
double apply_patch(const Dataset& data, PatchedModel& model, const ViolationReport& report, int round);

// The iterative debiasing loop: scan, patch the worst violator, repeat
// until every event scores <= alpha. Every patch is recorded against the
// squared-error potential; exceeding the ceil(d M^2 / alpha^2)+1 patch
// bound is a hard invariant error. `round` tags the appended patches for
// replay and must exceed the model's current max round.
DebiasTrace update(const Dataset& data, PatchedModel& model, std::span<const ConditioningEvent> events,
                   double alpha, int round = 0);

struct ConsistencyRow {
    std::string descriptor;
    double mass = 0.0;
    double score = 0.0;
};

struct ConsistencyTable {
    std::vector<ConsistencyRow> rows;
    double max_score = 0.0;
    bool pass = false;

    void save_csv(const std::filesystem::path& path) const;
};

ConsistencyTable check_consistency(const Dataset& data, const PatchedModel& model,
                                   std::span<const ConditioningEvent> events, double alpha);

// Mean squared prediction error over the attached sample (the potential).
double mean_squared_error(const Dataset& data, const PatchedModel& model);

// Patch budget from the potential argument.
inline long long patch_budget(int d, double label_bound, double alpha) {
    return static_cast<long long>(std::ceil(d * label_bound * label_bound / (alpha * alpha))) + 1;
}

}  // namespace ensopt
