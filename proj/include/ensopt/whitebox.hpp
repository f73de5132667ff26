#pragma once
#include <vector>

#include "ensopt/bucketing.hpp"
#include "ensopt/dataset.hpp"
#include "ensopt/debias.hpp"
#include "ensopt/model.hpp"
#include "ensopt/oracle.hpp"
#include "ensopt/policy.hpp"

namespace ensopt {

// Per-sample self-assessed payoffs pi_{h_i}(x) . h_i(x) and the index of
// the most optimistic model (lowest index on ties).
struct SelfAssessment {
    Matrix scores;            // n x k
    std::vector<int> argmax;  // length n
};

SelfAssessment self_assessment(std::span<const PatchedModel> models, std::span<const InducedPolicy> policies);

// Partition of the sample by which model has the highest self-assessed
// payoff; empty cells are pruned.
std::vector<ConditioningEvent> max_model_level_sets(const SelfAssessment& assessment, int n);

// Per-model event family: own-policy level sets intersected with the
// argmax cells, empty intersections pruned.
std::vector<std::vector<ConditioningEvent>> white_box_event_family(std::span<const PatchedModel> models,
                                                                   std::span<const InducedPolicy> policies,
                                                                   const SelfAssessment& assessment,
                                                                   const Bucketing& bucketing);

struct EnsembleRoundMetrics {
    int round = 0;
    double predicted = 0.0;  // mean self-assessment of the selected model
    double realized = 0.0;   // mean realized payoff of the ensemble policy
};

struct RoundModelMetrics {
    int round = 0;
    int model = 0;
    double realized = 0.0;
    double self_assessed = 0.0;
    double selection_freq = 0.0;
};

struct VarianceRow {
    int round = 0;
    int sample_rank = 0;  // rank 0 = highest variance within the round
    double avg_variance = 0.0;
};

// k debiased models sharing one region and one bucketing; the ensemble
// policy follows the model with the highest self-assessment.
struct WhiteBoxEnsemble {
    std::vector<PatchedModel> models;
    Bucketing bucketing;
    double alpha = 0.0;
    int outer_rounds = 0;
};

struct WhiteBoxRun {
    WhiteBoxEnsemble ensemble;
    std::vector<DebiasTrace> traces;  // per model, patch records concatenated across rounds
    std::vector<EnsembleRoundMetrics> series;
    std::vector<RoundModelMetrics> model_series;
    std::vector<VarianceRow> variance_series;
    std::vector<ConsistencyTable> terminal_consistency;  // per model, terminal families
    // Terminal per-sample artifacts (k action matrices and the assessment).
    std::vector<Matrix> terminal_actions;
    SelfAssessment terminal_assessment;
    int total_patches = 0;
    int productive_invocations = 0;
    uint64_t oracle_solves = 0;
    double wall_seconds = 0.0;
};

struct WhiteBoxOptions {
    bool record_metrics = true;
};

// The outer ensembling loop: rebuild the per-model families from the
// current round's snapshots, run the debiasing update on every model, and
// stop once a fresh rebuild shows no violation anywhere.
WhiteBoxRun run_whitebox(std::vector<PatchedModel> models, const Dataset& data, const FeasibleRegion& region,
                         double alpha, const WhiteBoxOptions& options = {});

// Ensemble action at a fresh input: replay all constituents jointly, then
// follow the highest self-assessment.
Action ensemble_act(const WhiteBoxEnsemble& ensemble, const FeasibleRegion& region,
                    std::span<const double> input);

struct EnsembleMetrics {
    double realized_payoff = 0.0;
    double self_assessed_payoff = 0.0;
    std::vector<double> selection_freq;
    Vec per_sample_variance;          // coordinate-averaged variance across the k actions
    double mean_policy_variance = 0.0;
};

EnsembleMetrics ensemble_metrics(const WhiteBoxRun& run, const Dataset& data);

// Mean payoff of the phi-reassigned selection x -> pi_{h_phi(i*(x))}(x).
double swap_payoff(const WhiteBoxRun& run, const Dataset& data, std::span<const int> phi);

}  // namespace ensopt
