#pragma once

// Upper layer: the utility's profit components and the outer price search.
// The UC pays each provider a DR price, loses bill revenue on curtailed
// load, and saves generation cost; its per-interval profit is
//
//     R_EB - C_UC + dCg
//
// and the event objective separates over intervals, so each interval is
// optimized independently. Three search modes share one price lattice
// {0, step, 2*step, ...} capped at max_price:
//
//   paper      - all providers' prices move up in lockstep; the sweep stops
//                the first time the profit changes by at most epsilon.
//   grid       - exhaustive Cartesian scan over per-provider prices; the
//                exact argmax at lattice resolution (oracle mode).
//   coordinate - cyclic per-provider 1D scans until a full cycle improves
//                the profit by at most epsilon.
//
// Ties always resolve to the lexicographically smallest price vector, so
// serial and parallel scans agree bitwise.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "drstack/model.hpp"
#include "drstack/provider.hpp"

namespace drstack::uc {

/// Thrown when a candidate price vector produces a non-finite profit.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UcIntervalResult {
    std::size_t t = 0;
    std::vector<double> lambda_dr;   // by program declaration order
    std::vector<provider::ProgramResponse> program_responses;
    double delta_cg = 0.0;       // cents
    double bill_revenue = 0.0;   // cents
    double dr_payment = 0.0;     // cents
    double uc_profit = 0.0;      // cents
    std::int64_t iterations = 1;
    bool converged = true;
};

struct EuKktEntry {
    std::string eu_id;
    std::string program_id;
    std::size_t t = 0;
    eu::KktRecord record;
};

struct EquilibriumResult {
    std::string scenario_name;
    SolveMode mode = SolveMode::paper;
    std::vector<UcIntervalResult> intervals;
    double total_uc_profit = 0.0;
    std::int64_t iterations = 0;
    bool converged = true;
    std::vector<EuKktEntry> kkt_reports;
};

/// Quadratic cost c0 + c1*p + c2*p^2 of supplying p_g_kw from non-DR
/// resources, charged once per interval.
double generation_cost(double p_g_kw, const UtilityParams& params);

/// Closed-form saving (c1 + 2*c2*p_pre)*D - c2*D^2 from shaving D off the
/// pre-event supply; equals the cost difference with c0 cancelled.
/// total_dr above p_pre is a domain error.
double operation_cost_reduction(double p_pre_kw, double total_dr_kw,
                                const UtilityParams& params);

/// Billing revenue at t over all programs: rate * (base - dr) * duration.
/// responses must be in scenario program order.
double bill_revenue(const Scenario& s, const std::vector<provider::ProgramResponse>& responses,
                    std::size_t t);

/// Total DR payment at t: lambda_dr * aggregate_dr * duration per program.
double dr_payment(const std::vector<provider::ProgramResponse>& responses, std::size_t t);

/// Solves every program at its price and composes the profit components.
/// lambda_dr_vector holds one nonnegative price per program in declaration
/// order.
UcIntervalResult uc_profit_interval(const Scenario& s,
                                    const std::vector<double>& lambda_dr_vector, std::size_t t);

/// Runs the configured search for interval t and returns the full result at
/// the selected price vector. threads parallelizes the grid scan only; the
/// result is identical for any thread count.
UcIntervalResult optimize_prices(const Scenario& s, std::size_t t, SolveMode mode,
                                 unsigned threads = 1);

/// Optimizes every interval independently, sums profits, and attaches a
/// KKT report for every EU response. The scenario must validate cleanly.
EquilibriumResult run_event(const Scenario& s, unsigned threads = 1);

}  // namespace drstack::uc
