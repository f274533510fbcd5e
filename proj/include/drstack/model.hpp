#pragma once

// Shared domain types for the three-layer demand-response pricing game:
// a utility company (UC) buys aggregated DR from third-party providers,
// each provider buys DR provision from its end users (EUs).
//
// Unit system, fixed across the whole library:
//   power     kW
//   price     cents/kWh
//   duration  hours
//   money     cents
// Interval-local inconvenience and generation-cost terms are charged once
// per interval; all revenue/payment terms are energy-based (kW x h).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drstack {

enum class IntervalLabel { peak, off_peak, super_off_peak };

std::string_view to_string(IntervalLabel label);
std::optional<IntervalLabel> parse_interval_label(std::string_view text);

struct TimeInterval {
    IntervalLabel label = IntervalLabel::peak;
    double hours = 1.0;

    bool operator==(const TimeInterval&) const = default;
};

/// Ordered intervals of one DR event. Index t refers to positions here.
struct TimeGrid {
    std::vector<TimeInterval> intervals;

    std::size_t size() const { return intervals.size(); }
    double duration(std::size_t t) const { return intervals[t].hours; }

    bool operator==(const TimeGrid&) const = default;
};

/// One DR participant. base_load_kw is indexed by interval and must match
/// the scenario's grid size. willingness (alpha) scales base load into the
/// per-interval DR capacity; it lives in [0, 1].
struct EndUser {
    std::string id;
    std::string program_id;
    std::vector<double> base_load_kw;
    double willingness = 0.0;

    bool operator==(const EndUser&) const = default;
};

enum class ProgramKind { residential, business };

std::string_view to_string(ProgramKind kind);
std::optional<ProgramKind> parse_program_kind(std::string_view text);

/// One provider-run DR program and its member EUs. retail_rate_c_per_kwh is
/// the tariff the UC bills this program's EUs, indexed by interval.
struct DrProgram {
    std::string id;
    ProgramKind kind = ProgramKind::residential;
    std::vector<double> retail_rate_c_per_kwh;
    std::vector<std::string> eu_ids;

    bool operator==(const DrProgram&) const = default;
};

/// Quadratic generation-cost coefficients and the pre-event supply level.
/// c0 only shifts the absolute cost; it cancels out of cost reductions.
struct UtilityParams {
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> pre_dr_supply_kw;

    bool operator==(const UtilityParams&) const = default;
};

enum class SolveMode { paper, grid, coordinate };

std::string_view to_string(SolveMode mode);
std::optional<SolveMode> parse_solve_mode(std::string_view text);

struct AlgorithmConfig {
    SolveMode mode = SolveMode::paper;
    double price_step = 0.01;   // cents/kWh
    double epsilon = 0.001;     // cents, sweep convergence threshold
    double max_price = 0.0;     // cents/kWh cap; loader fills a default
    double solver_tol = 1e-10;  // relative bisection tolerance
    std::int64_t oracle_grid_points = 10000;
    // Report the price at which the sweep's stopping rule first fired
    // instead of the best price seen so far (paper mode only). Not part
    // of the file schema.
    bool faithful_stop = false;

    bool operator==(const AlgorithmConfig&) const = default;
};

/// Full case definition. EUs are stored flat; membership is the pair of
/// EndUser::program_id and DrProgram::eu_ids, which must agree.
struct Scenario {
    std::string name;
    TimeGrid time_grid;
    std::vector<DrProgram> programs;
    std::vector<EndUser> eus;
    UtilityParams utility;
    AlgorithmConfig algorithm;

    const DrProgram* find_program(std::string_view id) const;
    const EndUser* find_eu(std::string_view id) const;
    /// Members of a program in eu_ids declaration order; unresolved ids are
    /// skipped (validation reports them).
    std::vector<const EndUser*> members_of(const DrProgram& program) const;

    bool operator==(const Scenario&) const = default;
};

/// Default price cap used when a scenario does not set one: ten times the
/// largest retail rate in the scenario.
double default_max_price(const Scenario& s);

struct ValidationIssue {
    std::string entity;   // "eu:<id>", "program:<id>", "time_grid", ...
    std::string message;

    bool operator==(const ValidationIssue&) const = default;
};

/// Checks every structural invariant of the scenario. Pure and total:
/// never throws, returns one issue per violated invariant.
std::vector<ValidationIssue> validate_scenario(const Scenario& s);

}  // namespace drstack
