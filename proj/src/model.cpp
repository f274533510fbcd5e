#include "drstack/model.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace drstack {

std::string_view to_string(IntervalLabel label) {
    switch (label) {
        case IntervalLabel::peak: return "peak";
        case IntervalLabel::off_peak: return "off-peak";
        case IntervalLabel::super_off_peak: return "super-off-peak";
    }
    return "peak";
}

std::optional<IntervalLabel> parse_interval_label(std::string_view text) {
    if (text == "peak") return IntervalLabel::peak;
    if (text == "off-peak") return IntervalLabel::off_peak;
    if (text == "super-off-peak") return IntervalLabel::super_off_peak;
    return std::nullopt;
}

std::string_view to_string(ProgramKind kind) {
    return kind == ProgramKind::business ? "business" : "residential";
}

std::optional<ProgramKind> parse_program_kind(std::string_view text) {
    if (text == "residential") return ProgramKind::residential;
    if (text == "business") return ProgramKind::business;
    return std::nullopt;
}

std::string_view to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::paper: return "paper";
        case SolveMode::grid: return "grid";
        case SolveMode::coordinate: return "coordinate";
    }
    return "paper";
}

std::optional<SolveMode> parse_solve_mode(std::string_view text) {
    if (text == "paper") return SolveMode::paper;
    if (text == "grid") return SolveMode::grid;
    if (text == "coordinate") return SolveMode::coordinate;
    return std::nullopt;
}

const DrProgram* Scenario::find_program(std::string_view id) const {
    for (const auto& p : programs)
        if (p.id == id) return &p;
    return nullptr;
}

const EndUser* Scenario::find_eu(std::string_view id) const {
    for (const auto& eu : eus)
        if (eu.id == id) return &eu;
    return nullptr;
}

std::vector<const EndUser*> Scenario::members_of(const DrProgram& program) const {
    std::vector<const EndUser*> members;
    members.reserve(program.eu_ids.size());
    for (const auto& id : program.eu_ids)
        if (const EndUser* eu = find_eu(id)) members.push_back(eu);
    return members;
}

double default_max_price(const Scenario& s) {
    double max_rate = 0.0;
    for (const auto& p : s.programs)
        for (double r : p.retail_rate_c_per_kwh) max_rate = std::max(max_rate, r);
    return max_rate > 0.0 ? 10.0 * max_rate : 10.0;
}

namespace {

void issue(std::vector<ValidationIssue>& out, std::string entity, std::string message) {
    out.push_back({std::move(entity), std::move(message)});
}

bool finite(double x) { return std::isfinite(x); }

void check_per_interval(std::vector<ValidationIssue>& out, const std::string& entity,
                        const char* field, const std::vector<double>& values,
                        std::size_t n_intervals, bool strictly_positive) {
    if (values.size() != n_intervals) {
        issue(out, entity, std::string(field) + " has " + std::to_string(values.size()) +
                               " entries, expected one per interval (" +
                               std::to_string(n_intervals) + ")");
        return;
    }
    for (std::size_t t = 0; t < values.size(); ++t) {
        const double v = values[t];
        if (!finite(v)) {
            issue(out, entity, std::string(field) + "[" + std::to_string(t) + "] is not finite");
        } else if (strictly_positive ? !(v > 0.0) : !(v >= 0.0)) {
            issue(out, entity, std::string(field) + "[" + std::to_string(t) + "] = " +
                                   std::to_string(v) +
                                   (strictly_positive ? " must be > 0" : " must be >= 0"));
        }
    }
}

}  // namespace

std::vector<ValidationIssue> validate_scenario(const Scenario& s) {
    std::vector<ValidationIssue> out;
    const std::size_t n = s.time_grid.size();

    if (n == 0) issue(out, "time_grid", "must contain at least one interval");
    for (std::size_t t = 0; t < n; ++t) {
        const double h = s.time_grid.intervals[t].hours;
        if (!finite(h) || !(h > 0.0))
            issue(out, "time_grid",
                  "interval " + std::to_string(t) + " duration must be a positive number of hours");
    }

    std::unordered_map<std::string, int> program_count;
    for (const auto& p : s.programs) ++program_count[p.id];
    std::unordered_map<std::string, int> eu_count;
    for (const auto& eu : s.eus) ++eu_count[eu.id];

    for (const auto& [id, count] : program_count)
        if (count > 1) issue(out, "program:" + id, "duplicate program id");
    for (const auto& [id, count] : eu_count)
        if (count > 1) issue(out, "eu:" + id, "duplicate eu id");

    for (const auto& p : s.programs) {
        const std::string entity = "program:" + p.id;
        if (p.eu_ids.empty()) issue(out, entity, "must have at least one member EU");
        check_per_interval(out, entity, "retail_rate", p.retail_rate_c_per_kwh, n, false);
        std::unordered_set<std::string> seen;
        for (const auto& eu_id : p.eu_ids) {
            if (!seen.insert(eu_id).second) {
                issue(out, entity, "member '" + eu_id + "' listed more than once");
                continue;
            }
            const EndUser* eu = s.find_eu(eu_id);
            if (!eu)
                issue(out, entity, "member '" + eu_id + "' does not resolve to any EU");
            else if (eu->program_id != p.id)
                issue(out, entity,
                      "member '" + eu_id + "' declares program_id '" + eu->program_id + "'");
        }
    }

    for (const auto& eu : s.eus) {
        const std::string entity = "eu:" + eu.id;
        if (!finite(eu.willingness) || eu.willingness < 0.0 || eu.willingness > 1.0)
            issue(out, entity, "willingness " + std::to_string(eu.willingness) +
                                   " outside the [0,1] bound");
        check_per_interval(out, entity, "base_load", eu.base_load_kw, n, false);
        const DrProgram* p = s.find_program(eu.program_id);
        if (!p) {
            issue(out, entity, "program_id '" + eu.program_id + "' does not resolve");
        } else {
            bool listed = false;
            for (const auto& id : p->eu_ids) listed = listed || id == eu.id;
            if (!listed)
                issue(out, entity, "not listed in the member set of program '" + p->id + "'");
        }
    }

    if (!finite(s.utility.c0)) issue(out, "utility", "c0 is not finite");
    if (!finite(s.utility.c1)) issue(out, "utility", "c1 is not finite");
    if (!finite(s.utility.c2)) issue(out, "utility", "c2 is not finite");
    check_per_interval(out, "utility", "pre_dr_supply", s.utility.pre_dr_supply_kw, n, true);

    const AlgorithmConfig& a = s.algorithm;
    if (!finite(a.price_step) || !(a.price_step > 0.0))
        issue(out, "algorithm", "price_step must be > 0");
    if (!finite(a.epsilon) || !(a.epsilon > 0.0)) issue(out, "algorithm", "epsilon must be > 0");
    if (!finite(a.max_price) || !(a.max_price > 0.0))
        issue(out, "algorithm", "max_price must be > 0");
    if (!finite(a.solver_tol) || !(a.solver_tol > 0.0) || a.solver_tol > 1e-4)
        issue(out, "algorithm", "solver_tol must lie in (0, 1e-4]");
    if (a.oracle_grid_points < 1) issue(out, "algorithm", "oracle_grid_points must be positive");

    return out;
}

}  // namespace drstack
