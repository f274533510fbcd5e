#include "drstack/eu_game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drstack::eu {

namespace {

[[noreturn]] void domain_fail(const std::string& what) { throw std::domain_error(what); }

void require_dr_range(double p_dr, double p_max) {
    if (!(p_dr >= 0.0)) domain_fail("p_dr must be >= 0, got " + std::to_string(p_dr));
    if (!(p_dr < p_max))
        domain_fail("p_dr must be strictly below p_max (" + std::to_string(p_dr) +
                    " >= " + std::to_string(p_max) + ")");
}

/// Reduced leader objective, the per-(EU, interval) summand.
double leader_objective(double p_dr, double lambda_dr, double p_max) {
    const double gap = p_max - p_dr;
    return lambda_dr * p_dr - p_max * p_dr / (gap * gap);
}

}  // namespace

double dr_upper_bound(double alpha, double base_load_kw) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        domain_fail("willingness must lie in [0,1], got " + std::to_string(alpha));
    if (!(base_load_kw >= 0.0))
        domain_fail("base load must be >= 0, got " + std::to_string(base_load_kw));
    return alpha * base_load_kw;
}

double inconvenience_cost(double p_dr_kw, double p_max_kw) {
    require_dr_range(p_dr_kw, p_max_kw);
    return p_dr_kw / (p_max_kw - p_dr_kw);
}

double eu_profit(double lambda_eu, double p_dr_kw, double p_max_kw, double duration_h) {
    return lambda_eu * p_dr_kw * duration_h - inconvenience_cost(p_dr_kw, p_max_kw);
}

double marginal_leader_value(double p_dr_kw, double lambda_dr, double p_max_kw) {
    require_dr_range(p_dr_kw, p_max_kw);
    const double gap = p_max_kw - p_dr_kw;
    return lambda_dr - p_max_kw * (p_max_kw + p_dr_kw) / (gap * gap * gap);
}

double best_response(double lambda_dr, double p_max_kw, double tol) {
    if (!(lambda_dr >= 0.0)) domain_fail("lambda_dr must be >= 0");
    if (!(p_max_kw >= 0.0)) domain_fail("p_max must be >= 0");
    if (!(tol > 0.0)) domain_fail("tol must be > 0");
    if (p_max_kw == 0.0) return 0.0;
    // Inclusive participation threshold: marginal value at 0 is
    // lambda_dr - 1/p_max.
    if (lambda_dr <= 1.0 / p_max_kw) return 0.0;

    // f' is strictly decreasing, positive at 0 and -inf at p_max, so the
    // bracket [lo, hi) always contains the unique root. hi itself is never
    // evaluated.
    double lo = 0.0;
    double hi = p_max_kw;
    const double width_tol = tol * p_max_kw;
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // ran out of representable points
        if (marginal_leader_value(mid, lambda_dr, p_max_kw) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double root = 0.5 * (lo + hi);
    if (!(root < p_max_kw)) root = std::nextafter(p_max_kw, 0.0);
    return root;
}

double recover_eu_price(double p_dr_kw, double p_max_kw) {
    require_dr_range(p_dr_kw, p_max_kw);
    const double gap = p_max_kw - p_dr_kw;
    return p_max_kw / (gap * gap);
}

double brute_force_best_response(double lambda_dr, double p_max_kw, std::int64_t n_points) {
    if (!(lambda_dr >= 0.0)) domain_fail("lambda_dr must be >= 0");
    if (!(p_max_kw >= 0.0)) domain_fail("p_max must be >= 0");
    if (n_points < 2) domain_fail("n_points must be >= 2");
    if (p_max_kw == 0.0) return 0.0;

    double best_value = leader_objective(0.0, lambda_dr, p_max_kw);
    double best_p = 0.0;
    for (std::int64_t k = 1; k < n_points; ++k) {
        const double p = p_max_kw * static_cast<double>(k) / static_cast<double>(n_points);
        const double v = leader_objective(p, lambda_dr, p_max_kw);
        if (v > best_value) {
            best_value = v;
            best_p = p;
        }
    }
    return best_p;
}

double KktRecord::max_residual() const {
    return std::max({std::abs(stationarity_residual), compl_lower_residual,
                     compl_upper_residual, bound_residual});
}

KktRecord verify_kkt(double lambda_dr, const EuResponse& response) {
    (void)lambda_dr;
    const double p_max = response.p_max_kw;
    const double p_dr = response.p_dr_kw;
    const double lambda_eu = response.lambda_eu;

    if (!std::isfinite(p_max) || !std::isfinite(p_dr) || !std::isfinite(lambda_eu) ||
        p_max < 0.0 || p_dr < 0.0 || lambda_eu < 0.0 || (p_max == 0.0 && p_dr != 0.0) ||
        (p_max > 0.0 && p_dr >= p_max))
        throw std::invalid_argument("verify_kkt: response violates EuResponse invariants");

    KktRecord rec;
    rec.big_m = p_max;
    if (p_max == 0.0) {
        // Feasible set is the single point 0; the system is vacuous.
        return rec;
    }

    if (p_dr > 0.0) {
        rec.mu_lower = 0.0;
        rec.psi = 1;
    } else {
        rec.mu_lower = std::max(0.0, 1.0 / p_max - lambda_eu);
        rec.psi = rec.mu_lower > 0.0 ? 0 : 1;
    }
    rec.mu_upper = 0.0;
    rec.xi = 1;

    rec.stationarity_residual =
        lambda_eu - recover_eu_price(p_dr, p_max) + rec.mu_lower - rec.mu_upper;
    rec.compl_lower_residual = std::abs(p_dr * rec.mu_lower);
    rec.compl_upper_residual = std::abs((p_max - p_dr) * rec.mu_upper);

    // Box constraints of the big-M system, each as max(0, violation).
    double worst = 0.0;
    auto box = [&worst](double low, double value, double high) {
        worst = std::max({worst, low - value, value - high});
    };
    box(0.0, p_dr, rec.psi * rec.big_m);
    box(0.0, rec.mu_lower, (1 - rec.psi) * rec.big_m);
    box(0.0, p_max - p_dr, rec.xi * rec.big_m);
    box(0.0, rec.mu_upper, (1 - rec.xi) * rec.big_m);
    rec.bound_residual = worst;

    return rec;
}

}  // namespace drstack::eu
