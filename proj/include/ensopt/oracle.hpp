#pragma once
#include <atomic>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ensopt/linalg.hpp"

namespace ensopt {

class Dataset;

using Action = std::vector<double>;

enum class RegionKind { LinearCapped, CovarianceConstrained };

enum class SolveStatus { Optimal, Infeasible };

struct OracleResult {
    Action action;
    double objective = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    // Lagrange multiplier of the quadratic constraint (covariance regions
    // only); exposed for stationarity checks.
    double quad_multiplier = 0.0;
};

// One cap: sum of the named coordinates bounded by `bound`.
struct CoordinateCap {
    std::vector<int> coords;
    double bound = 1.0;
};

// Downstream feasible region Omega in [0,1]^d. Two built-in shapes:
//   LinearCapped:          box [0,1]^d plus coordinate-sum caps.
//   CovarianceConstrained: probability simplex with pi'C pi <= risk_bound.
// Both solvers are deterministic: fixed pivot order (Bland's rule) for the
// LP, fixed-iteration multiplier bisection with exact support enumeration
// for the quadratically constrained problem.
class FeasibleRegion {
public:
    static FeasibleRegion linear_capped(int d, std::vector<CoordinateCap> caps);
    static FeasibleRegion covariance_constrained(int d, Matrix covariance, double risk_bound);

    // Region config JSON: {"kind":"linear_capped","caps":[[[0,1],0.5],...]}
    // or {"kind":"covariance","risk_bound":r}. Covariance regions take C
    // from the dataset's labels; risk_bound <= 0 or missing selects the
    // default 2x the simplex-minimum of pi'C pi.
    static FeasibleRegion from_json(const nlohmann::json& j, const Dataset* labels_source);
    nlohmann::json to_json() const;

    RegionKind kind() const { return kind_; }
    int dim() const { return d_; }
    const std::vector<CoordinateCap>& caps() const { return caps_; }
    const Matrix& covariance() const { return cov_; }
    double risk_bound() const { return risk_bound_; }
    double simplex_min_risk() const { return min_risk_; }

    // argmax_{a in Omega} coeffs . a
    OracleResult solve(std::span<const double> coeffs) const;

    // (all constraints hold within 1e-8, worst violation).
    std::pair<bool, double> verify_feasibility(std::span<const double> action) const;

    // Cumulative solve() invocations; copies of a region share the counter.
    uint64_t solve_count() const { return solves_->load(); }

private:
    FeasibleRegion() : solves_(std::make_shared<std::atomic<uint64_t>>(0)) {}

    OracleResult solve_linear_capped(std::span<const double> coeffs) const;
    OracleResult solve_covariance(std::span<const double> coeffs) const;

    RegionKind kind_ = RegionKind::LinearCapped;
    int d_ = 0;
    std::vector<CoordinateCap> caps_;
    Matrix cov_;
    double risk_bound_ = 0.0;
    double min_risk_ = 0.0;
    std::shared_ptr<std::atomic<uint64_t>> solves_;
};

// Max KKT residual (primal feasibility, stationarity, dual feasibility,
// complementary slackness) of a covariance-region solve.
double covariance_kkt_residual(const FeasibleRegion& region, std::span<const double> coeffs,
                               const OracleResult& result);

constexpr double kFeasibilityTol = 1e-8;

}  // namespace ensopt
