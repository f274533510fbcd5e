#pragma once

// Lower-layer end-user game: per-interval best response of one EU to the
// provider's DR price, the recovered EU-facing price, and a verifier for
// the first-order optimality system of the reduced problem.
//
// The EU maximizes  lambda_eu * P - P / (p_max - P)  over P in [0, p_max);
// eliminating lambda_eu through the provider's bilevel reduction leaves the
// single-variable concave objective
//
//     f(P) = lambda_dr * P - p_max * P / (p_max - P)^2
//
// whose unique maximizer is the root of f' when lambda_dr exceeds the
// participation threshold 1/p_max, and 0 otherwise. All functions here are
// pure; per-interval and per-EU problems are independent.

#include <cstdint>
#include <string>

namespace drstack::eu {

/// Capacity bound alpha * base_load. alpha outside [0,1] or a negative
/// base load is a domain error.
double dr_upper_bound(double alpha, double base_load_kw);

/// Discomfort p_dr / (p_max - p_dr), charged once per interval. Diverges
/// as p_dr approaches p_max; requires 0 <= p_dr < p_max.
double inconvenience_cost(double p_dr_kw, double p_max_kw);

/// EU profit in cents: energy revenue minus inconvenience.
double eu_profit(double lambda_eu, double p_dr_kw, double p_max_kw, double duration_h);

/// Derivative of the reduced leader objective f at p_dr:
///   lambda_dr - p_max * (p_max + p_dr) / (p_max - p_dr)^3
/// Strictly decreasing in p_dr on [0, p_max).
double marginal_leader_value(double p_dr_kw, double lambda_dr, double p_max_kw);

/// Unique maximizer of f over [0, p_max). Returns 0 exactly when p_max = 0
/// or lambda_dr <= 1/p_max (the threshold is inclusive); otherwise bisects
/// the first-order condition to absolute width tol * p_max. The result is
/// always strictly below p_max.
double best_response(double lambda_dr, double p_max_kw, double tol = 1e-10);

/// EU-facing price implied by an interior solution:
///   p_max / (p_max - p_dr)^2
/// At the interior optimum for lambda_dr this satisfies
/// lambda_eu / lambda_dr = (p_max - p_dr) / (p_max + p_dr) <= 1.
double recover_eu_price(double p_dr_kw, double p_max_kw);

/// Grid-search oracle for best_response: evaluates f on n_points uniform
/// samples p_max * k / n_points, k = 0..n_points-1, and returns the argmax
/// (ties to the smaller p_dr). Independent of the bisection path.
double brute_force_best_response(double lambda_dr, double p_max_kw, std::int64_t n_points);

/// One EU's solved response at one interval.
struct EuResponse {
    std::string eu_id;
    std::size_t t = 0;
    double p_max_kw = 0.0;
    double p_dr_kw = 0.0;
    double lambda_eu = 0.0;   // cents/kWh
    double eu_profit = 0.0;   // cents
};

/// Duals, binaries, and residuals of the big-M optimality system at one
/// response. psi/xi switch the complementarity pairs; M equals p_max. At an
/// interior point the valid assignment is psi = 1, xi = 1, mu_upper = 0,
/// mu_lower = 0; at p_dr = 0 with mu_lower > 0 the lower pair flips to
/// psi = 0.
struct KktRecord {
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    int psi = 1;
    int xi = 1;
    double big_m = 0.0;
    double stationarity_residual = 0.0;   // lambda_eu - p_max/(p_max-P)^2 + mu_lower - mu_upper
    double compl_lower_residual = 0.0;    // |P * mu_lower|
    double compl_upper_residual = 0.0;    // |(p_max - P) * mu_upper|
    double bound_residual = 0.0;          // worst violation of the box constraints

    double max_residual() const;
};

/// Builds the dual/binary assignment described above for the given response
/// and reports every residual of the optimality system. The response must
/// satisfy the EuResponse range invariants; violating them is a contract
/// error. lambda_dr is accepted for symmetry with the solve path; the
/// system itself only involves the EU-facing price.
KktRecord verify_kkt(double lambda_dr, const EuResponse& response);

}  // namespace drstack::eu
