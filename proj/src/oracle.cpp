#include "ensopt/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ensopt/dataset.hpp"
#include "ensopt/errors.hpp"

namespace ensopt {

namespace {

constexpr double kPivotTol = 1e-9;

// Inner problem of the covariance solver: maximize c.pi - lambda pi'C pi
// over the probability simplex, for fixed lambda > 0 and positive definite
// C. Exact active-set enumeration: for every support S solve the
// equality-constrained stationarity system and keep the best KKT-valid
// candidate. Supports are scanned in bitmask order, so ties resolve
// deterministically.
struct InnerQpResult {
    Vec pi;
    double value = 0.0;
    bool ok = false;
};

InnerQpResult inner_simplex_qp(std::span<const double> c, double lambda, const Matrix& cov) {
    const int d = static_cast<int>(c.size());
    InnerQpResult best;

    std::vector<int> support;
    std::vector<double> sys;
    Vec rhs, sol, pi(d), grad(d);

    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        support.clear();
        for (int j = 0; j < d; ++j)
            if (mask & (1u << j)) support.push_back(j);
        const int s = static_cast<int>(support.size());
        const int m = s + 1;

        // [ 2*lambda*C_SS  1 ] [pi_S]   [c_S]
        // [ 1^T            0 ] [mu  ] = [1  ]
        sys.assign(static_cast<size_t>(m) * m, 0.0);
        rhs.assign(m, 0.0);
        for (int a = 0; a < s; ++a) {
            for (int b = 0; b < s; ++b) sys[static_cast<size_t>(a) * m + b] = 2.0 * lambda * cov(support[a], support[b]);
            sys[static_cast<size_t>(a) * m + s] = 1.0;
            sys[static_cast<size_t>(s) * m + a] = 1.0;
            rhs[a] = c[support[a]];
        }
        rhs[s] = 1.0;
        if (!solve_linear(sys, rhs, m, sol)) continue;

        bool primal_ok = true;
        for (int a = 0; a < s; ++a)
            if (sol[a] < -1e-10) {
                primal_ok = false;
                break;
            }
        if (!primal_ok) continue;

        std::fill(pi.begin(), pi.end(), 0.0);
        for (int a = 0; a < s; ++a) pi[support[a]] = std::max(sol[a], 0.0);
        const double mu = sol[s];

        for (int j = 0; j < d; ++j) {
            double cp = 0.0;
            for (int b = 0; b < d; ++b) cp += cov(j, b) * pi[b];
            grad[j] = c[j] - 2.0 * lambda * cp;
        }
        bool dual_ok = true;
        for (int j = 0; j < d; ++j) {
            if (mask & (1u << j)) continue;
            if (grad[j] > mu + 1e-9) {
                dual_ok = false;
                break;
            }
        }
        if (!dual_ok) continue;

        double quad = 0.0;
        for (int a = 0; a < d; ++a) {
            double cp = 0.0;
            for (int b = 0; b < d; ++b) cp += cov(a, b) * pi[b];
            quad += pi[a] * cp;
        }
        const double value = dot(c, pi) - lambda * quad;
        if (!best.ok || value > best.value) {
            best.pi = pi;
            best.value = value;
            best.ok = true;
        }
    }
    return best;
}

double quad_form(const Matrix& cov, std::span<const double> pi) {
    double q = 0.0;
    const int d = cov.rows();
    for (int a = 0; a < d; ++a) {
        double cp = 0.0;
        for (int b = 0; b < d; ++b) cp += cov(a, b) * pi[b];
        q += pi[a] * cp;
    }
    return q;
}

}  // namespace

FeasibleRegion FeasibleRegion::linear_capped(int d, std::vector<CoordinateCap> caps) {
    if (d <= 0) throw ConfigError("region: dimension must be positive");
    for (const auto& cap : caps) {
        if (cap.coords.empty()) throw ConfigError("region: empty cap coordinate set");
        if (!(cap.bound > 0.0 && cap.bound <= d))
            throw ConfigError("region: cap value must lie in (0, d]");
        for (int c : cap.coords)
            if (c < 0 || c >= d) throw ConfigError("region: cap coordinate outside [0, d)");
    }
    FeasibleRegion r;
    r.kind_ = RegionKind::LinearCapped;
    r.d_ = d;
    r.caps_ = std::move(caps);
    return r;
}

FeasibleRegion FeasibleRegion::covariance_constrained(int d, Matrix covariance, double risk_bound) {
    if (d <= 0) throw ConfigError("region: dimension must be positive");
    if (covariance.rows() != d || covariance.cols() != d)
        throw ConfigError("region: covariance shape disagrees with dimension");
    if (d > 16) throw ConfigError("region: combinatorial covariance solver supports d <= 16");

    // Symmetrize, then check the eigenvalue floor; negative eigenvalues
    // beyond roundoff reject the matrix, small ones are projected to zero.
    Matrix sym(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sym(i, j) = 0.5 * (covariance(i, j) + covariance(j, i));
    Vec eigs;
    Matrix vecs;
    sym_eigen(sym, eigs, vecs);
    const double scale = std::max(1.0, std::abs(eigs.back()));
    if (eigs.front() < -1e-8 * scale)
        throw ConfigError("region: covariance is not positive semidefinite");
    const double floor = 1e-12 * scale;
    if (eigs.front() < floor) {
        for (auto& e : eigs) e = std::max(e, floor);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double v = 0.0;
                for (int k = 0; k < d; ++k) v += vecs(i, k) * eigs[k] * vecs(j, k);
                sym(i, j) = v;
            }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const double v = 0.5 * (sym(i, j) + sym(j, i));
                sym(i, j) = v;
                sym(j, i) = v;
            }
    }

    FeasibleRegion r;
    r.kind_ = RegionKind::CovarianceConstrained;
    r.d_ = d;
    r.cov_ = std::move(sym);
    r.risk_bound_ = risk_bound;

    // Nonemptiness: the simplex minimum of pi'C pi must not exceed the
    // risk bound.
    const Vec zero(d, 0.0);
    const auto min_point = inner_simplex_qp(zero, 1.0, r.cov_);
    if (!min_point.ok) throw NumericError("region: simplex risk minimization failed");
    r.min_risk_ = quad_form(r.cov_, min_point.pi);
    if (risk_bound < r.min_risk_ - 1e-10)
        throw ConfigError("region: risk bound below the simplex minimum of pi'C pi (empty region)");
    return r;
}

FeasibleRegion FeasibleRegion::from_json(const nlohmann::json& j, const Dataset* labels_source) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear_capped") {
        if (!labels_source) throw ConfigError("region config: dataset required to fix the dimension");
        std::vector<CoordinateCap> caps;
        for (const auto& item : j.at("caps")) {
            CoordinateCap cap;
            cap.coords = item.at(0).get<std::vector<int>>();
            cap.bound = item.at(1).get<double>();
            caps.push_back(std::move(cap));
        }
        return linear_capped(labels_source->d(), std::move(caps));
    }
    if (kind == "covariance") {
        if (!labels_source) throw ConfigError("region config: dataset required for the label covariance");
        Matrix cov = ensopt::covariance(labels_source->labels());
        double risk = j.contains("risk_bound") ? j.at("risk_bound").get<double>() : 0.0;
        if (risk <= 0.0) {
            // Default: twice the simplex minimum of pi'C pi. The reference
            // experiments never pin this constant; it is config-exposed.
            FeasibleRegion probe = covariance_constrained(labels_source->d(), cov, 1e18);
            risk = 2.0 * probe.simplex_min_risk();
        }
        return covariance_constrained(labels_source->d(), std::move(cov), risk);
    }
    throw ConfigError("region config: unknown kind '" + kind + "'");
}

nlohmann::json FeasibleRegion::to_json() const {
    nlohmann::json j;
    if (kind_ == RegionKind::LinearCapped) {
        j["kind"] = "linear_capped";
        auto arr = nlohmann::json::array();
        for (const auto& cap : caps_) arr.push_back({cap.coords, cap.bound});
        j["caps"] = std::move(arr);
    } else {
        j["kind"] = "covariance";
        j["risk_bound"] = risk_bound_;
        auto rows = nlohmann::json::array();
        for (int i = 0; i < d_; ++i) {
            auto row = nlohmann::json::array();
            for (int jj = 0; jj < d_; ++jj) row.push_back(cov_(i, jj));
            rows.push_back(std::move(row));
        }
        j["covariance"] = std::move(rows);
    }
    return j;
}

OracleResult FeasibleRegion::solve(std::span<const double> coeffs) const {
    if (static_cast<int>(coeffs.size()) != d_)
        throw ConfigError("oracle: coefficient length disagrees with region dimension");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw NumericError("oracle: non-finite coefficient");
    solves_->fetch_add(1, std::memory_order_relaxed);
    return kind_ == RegionKind::LinearCapped ? solve_linear_capped(coeffs) : solve_covariance(coeffs);
}

// Dense-tableau primal simplex with Bland's rule. Rows: one per cap plus
// one upper bound per coordinate; the all-slack basis is feasible, so no
// phase one is needed.
OracleResult FeasibleRegion::solve_linear_capped(std::span<const double> coeffs) const {
    const int d = d_;
    const int m = static_cast<int>(caps_.size()) + d;
    const int n = d + m;  // structural + slack variables
    const int width = n + 1;

    std::vector<double> tab(static_cast<size_t>(m + 1) * width, 0.0);
    auto at = [&](int r, int c) -> double& { return tab[static_cast<size_t>(r) * width + c]; };

    for (size_t r = 0; r < caps_.size(); ++r) {
        for (int c : caps_[r].coords) at(static_cast<int>(r), c) = 1.0;
        at(static_cast<int>(r), d + static_cast<int>(r)) = 1.0;
        at(static_cast<int>(r), n) = caps_[r].bound;
    }
    for (int i = 0; i < d; ++i) {
        const int r = static_cast<int>(caps_.size()) + i;
        at(r, i) = 1.0;
        at(r, d + r) = 1.0;
        at(r, n) = 1.0;
    }
    for (int j = 0; j < d; ++j) at(m, j) = -coeffs[j];

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = d + i;

    const int max_pivots = 2000 + 50 * n;
    for (int iter = 0;; ++iter) {
        if (iter > max_pivots)
            throw NumericError("oracle: simplex did not converge within the pivot budget");
        int enter = -1;
        for (int j = 0; j < n; ++j)
            if (at(m, j) < -kPivotTol) {
                enter = j;
                break;  // Bland: smallest eligible index
            }
        if (enter < 0) break;

        int leave = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < m; ++r) {
            const double a = at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = at(r, n) / a;
            if (leave < 0 || ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 && basis[r] < basis[leave])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw NumericError("oracle: unbounded pivot in a box-bounded problem");

        const double piv = at(leave, enter);
        for (int c = 0; c <= n; ++c) at(leave, c) /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (int c = 0; c <= n; ++c) at(r, c) -= f * at(leave, c);
        }
        basis[leave] = enter;
    }

    OracleResult res;
    res.action.assign(d, 0.0);
    for (int r = 0; r < m; ++r)
        if (basis[r] < d) res.action[basis[r]] = std::clamp(at(r, n), 0.0, 1.0);
    res.objective = dot(coeffs, res.action);
    res.status = SolveStatus::Optimal;
    return res;
}

OracleResult FeasibleRegion::solve_covariance(std::span<const double> coeffs) const {
    const int d = d_;
    OracleResult res;
    res.status = SolveStatus::Optimal;

    // Unconstrained-by-risk case: the best simplex vertex.
    int best_vertex = 0;
    for (int j = 1; j < d; ++j)
        if (coeffs[j] > coeffs[best_vertex]) best_vertex = j;
    if (cov_(best_vertex, best_vertex) <= risk_bound_ + 1e-12) {
        res.action.assign(d, 0.0);
        res.action[best_vertex] = 1.0;
        res.objective = coeffs[best_vertex];
        res.quad_multiplier = 0.0;
        return res;
    }

    // Bisection on the risk multiplier. pi(lambda)'C pi(lambda) is
    // non-increasing in lambda, so we bracket the risk bound and keep the
    // feasible-side iterate.
    auto eval = [&](double lambda) {
        auto inner = inner_simplex_qp(coeffs, lambda, cov_);
        if (!inner.ok) throw NumericError("oracle: inner simplex QP produced no valid support");
        return inner.pi;
    };

    double lo = 0.0;
    double hi = 1.0;
    Vec pi_hi = eval(hi);
    int expansions = 0;
    while (quad_form(cov_, pi_hi) > risk_bound_ && expansions < 60) {
        lo = hi;
        hi *= 2.0;
        pi_hi = eval(hi);
        ++expansions;
    }
    if (quad_form(cov_, pi_hi) > risk_bound_) {
        // Risk bound sits at (or numerically below) the simplex minimum;
        // the iterate is the near-minimum-risk point, feasible to within
        // the verification tolerance.
        res.action = pi_hi;
        res.objective = dot(coeffs, pi_hi);
        res.quad_multiplier = hi;
        return res;
    }

    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Vec pi_mid = eval(mid);
        if (quad_form(cov_, pi_mid) > risk_bound_) {
            lo = mid;
        } else {
            hi = mid;
            pi_hi = pi_mid;
        }
    }

    res.action = pi_hi;
    res.objective = dot(coeffs, pi_hi);
    res.quad_multiplier = hi;
    return res;
}

std::pair<bool, double> FeasibleRegion::verify_feasibility(std::span<const double> action) const {
    if (static_cast<int>(action.size()) != d_) return {false, std::numeric_limits<double>::infinity()};
    double worst = 0.0;
    for (double a : action) {
        worst = std::max(worst, -a);
        worst = std::max(worst, a - 1.0);
    }
    if (kind_ == RegionKind::LinearCapped) {
        for (const auto& cap : caps_) {
            double s = 0.0;
            for (int c : cap.coords) s += action[c];
            worst = std::max(worst, s - cap.bound);
        }
    } else {
        double s = 0.0;
        for (double a : action) s += a;
        worst = std::max(worst, std::abs(s - 1.0));
        worst = std::max(worst, quad_form(cov_, action) - risk_bound_);
    }
    return {worst <= kFeasibilityTol, std::max(worst, 0.0)};
}

double covariance_kkt_residual(const FeasibleRegion& region, std::span<const double> coeffs,
                               const OracleResult& result) {
    const int d = region.dim();
    const Matrix& cov = region.covariance();
    const auto& pi = result.action;
    const double lambda = result.quad_multiplier;

    double res = 0.0;
    double sum = 0.0;
    for (double a : pi) {
        sum += a;
        res = std::max(res, -a);
    }
    res = std::max(res, std::abs(sum - 1.0));
    const double quad = quad_form(cov, pi);
    res = std::max(res, quad - region.risk_bound());
    res = std::max(res, std::abs(lambda * (quad - region.risk_bound())));

    Vec grad(d);
    for (int j = 0; j < d; ++j) {
        double cp = 0.0;
        for (int b = 0; b < d; ++b) cp += cov(j, b) * pi[b];
        grad[j] = coeffs[j] - 2.0 * lambda * cp;
    }
    double mu = 0.0;
    int support = 0;
    for (int j = 0; j < d; ++j)
        if (pi[j] > 1e-7) {
            mu += grad[j];
            ++support;
        }
    if (support == 0) return std::numeric_limits<double>::infinity();
    mu /= support;
    for (int j = 0; j < d; ++j) {
        if (pi[j] > 1e-7)
            res = std::max(res, std::abs(grad[j] - mu));
        else
            res = std::max(res, grad[j] - mu);
    }
    return std::max(res, 0.0);
}

}  // namespace ensopt
