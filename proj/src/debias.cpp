#include "ensopt/debias.hpp"

#include <cmath>

#include "ensopt/errors.hpp"
#include "ensopt/io.hpp"

namespace ensopt {

ViolationReport event_bias(const Dataset& data, const PatchedModel& model, const ConditioningEvent& event) {
    if (event.members.empty()) throw InvariantError("event_bias: empty event (zero-mass events are pruned upstream)");
    const int d = data.d();
    ViolationReport report;
    report.event = event;
    report.mass = event.mass;
    report.model_version = model.version();
    report.bias.assign(d, 0.0);
    for (int32_t i : event.members) {
        if (i < 0 || i >= data.n()) throw InvariantError("event_bias: member index outside the sample");
        const auto pred = model.sample_prediction(i);
        const auto label = data.label_row(i);
        for (int j = 0; j < d; ++j) report.bias[j] += label[j] - pred[j];
    }
    for (auto& b : report.bias) b /= static_cast<double>(event.members.size());
    report.score = report.mass * norm_inf(report.bias);
    return report;
}

std::optional<ViolationReport> find_violation(const Dataset& data, const PatchedModel& model,
                                              std::span<const ConditioningEvent> events, double alpha) {
    std::optional<ViolationReport> best;
    for (const auto& event : events) {
        ViolationReport r = event_bias(data, model, event);
        if (r.score <= alpha) continue;
        if (!best || r.score > best->score ||
            (r.score == best->score && descriptor_less(r.event.descriptor, best->event.descriptor)))
            best = std::move(r);
    }
    return best;
}

double apply_patch(const Dataset& data, PatchedModel& model, const ViolationReport& report, int round) {
    if (report.model_version != model.version())
        throw InvariantError("apply_patch: stale violation report (model version moved)");
    const int d = model.dim();
    const int n = model.sample_size();

    // Only member rows change, so the drop is measured over them; the rest
    // of the sample cancels exactly.
    std::vector<Vec> before;
    before.reserve(report.event.members.size());
    for (int32_t i : report.event.members) {
        const auto row = model.sample_prediction(i);
        before.emplace_back(row.begin(), row.end());
    }

    Patch patch;
    patch.event = report.event;
    patch.delta = report.bias;
    patch.round = round;
    model.append_patch(std::move(patch));

    double drop = 0.0;
    for (size_t idx = 0; idx < report.event.members.size(); ++idx) {
        const int32_t i = report.event.members[idx];
        const auto after = model.sample_prediction(i);
        const auto label = data.label_row(i);
        for (int j = 0; j < d; ++j) {
            const double eb = before[idx][j] - label[j];
            const double ea = after[j] - label[j];
            drop += eb * eb - ea * ea;
        }
    }
    return drop / n;
}

DebiasTrace update(const Dataset& data, PatchedModel& model, std::span<const ConditioningEvent> events,
                   double alpha, int round) {
    if (alpha <= 0.0) throw ConfigError("update: alpha must be positive");
    if (round <= model.max_round())
        throw InvariantError("update: round must advance past the model's last patched round");

    DebiasTrace trace;
    const long long budget = patch_budget(data.d(), data.label_bound(), alpha);
    double sq_err = mean_squared_error(data, model);

    while (true) {
        auto violation = find_violation(data, model, events, alpha);
        if (!violation) break;
        if (trace.patch_count() >= budget)
            throw InvariantError("update: patch count exceeded the squared-error potential bound");

        PatchRecord rec;
        rec.round = trace.patch_count();
        rec.descriptor = violation->event.descriptor.label();
        rec.mass = violation->mass;
        rec.score = violation->score;
        rec.sq_err_before = sq_err;
        const double drop = apply_patch(data, model, *violation, round);
        sq_err -= drop;
        rec.sq_err_after = sq_err;
        trace.records.push_back(std::move(rec));
    }

    double max_score = 0.0;
    for (const auto& event : events) max_score = std::max(max_score, event_bias(data, model, event).score);
    trace.terminal_max_score = max_score;
    return trace;
}

ConsistencyTable check_consistency(const Dataset& data, const PatchedModel& model,
                                   std::span<const ConditioningEvent> events, double alpha) {
    ConsistencyTable table;
    for (const auto& event : events) {
        const ViolationReport r = event_bias(data, model, event);
        table.rows.push_back({r.event.descriptor.label(), r.mass, r.score});
        table.max_score = std::max(table.max_score, r.score);
    }
    table.pass = table.max_score <= alpha;
    return table;
}

double mean_squared_error(const Dataset& data, const PatchedModel& model) {
    double total = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        const auto pred = model.sample_prediction(i);
        const auto label = data.label_row(i);
        for (int j = 0; j < data.d(); ++j) {
            const double e = pred[j] - label[j];
            total += e * e;
        }
    }
    return total / data.n();
}

void DebiasTrace::save_csv(const std::filesystem::path& path) const {
    CsvWriter w(path);
    w.row({"round", "descriptor", "mass", "score", "sq_err_before", "sq_err_after"});
    for (const auto& r : records)
        w.row({std::to_string(r.round), r.descriptor, fmt_double(r.mass), fmt_double(r.score),
               fmt_double(r.sq_err_before), fmt_double(r.sq_err_after)});
}

void ConsistencyTable::save_csv(const std::filesystem::path& path) const {
    CsvWriter w(path);
    w.row({"descriptor", "mass", "score"});
    for (const auto& r : rows) w.row({r.descriptor, fmt_double(r.mass), fmt_double(r.score)});
}

}  // namespace ensopt
