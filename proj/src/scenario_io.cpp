#include "drstack/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace drstack::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream oss;
    oss << "scenario document has " << issues.size() << " issue(s):";
    for (const auto& issue : issues) oss << "\n  - " << issue;
    return oss.str();
}

/// Collects schema problems during the strict walk; throws once at the end
/// so one load reports every issue it can find.
struct SchemaWalk {
    std::vector<std::string> issues;

    void add(const std::string& path, const std::string& message) {
        issues.push_back(path + ": " + message);
    }

    bool check_object(const json& node, const std::string& path,
                      std::initializer_list<const char*> required,
                      std::initializer_list<const char*> optional = {}) {
        if (!node.is_object()) {
            add(path, "expected an object");
            return false;
        }
        bool ok = true;
        for (const char* key : required) {
            if (!node.contains(key)) {
                add(path, std::string("missing required key '") + key + "'");
                ok = false;
            }
        }
        for (const auto& [key, value] : node.items()) {
            (void)value;
            bool known = false;
            for (const char* k : required) known = known || key == k;
            for (const char* k : optional) known = known || key == k;
            if (!known) add(path, "unknown key '" + key + "'");
        }
        return ok;
    }

    double number(const json& node, const std::string& path, double fallback = 0.0) {
        if (!node.is_number()) {
            add(path, "expected a number");
            return fallback;
        }
        const double v = node.get<double>();
        if (!std::isfinite(v)) add(path, "number must be finite");
        return v;
    }

    std::string text(const json& node, const std::string& path) {
        if (!node.is_string()) {
            add(path, "expected a string");
            return {};
        }
        return node.get<std::string>();
    }

    std::vector<double> number_array(const json& node, const std::string& path) {
        std::vector<double> out;
        if (!node.is_array()) {
            add(path, "expected an array of numbers");
            return out;
        }
        out.reserve(node.size());
        for (std::size_t i = 0; i < node.size(); ++i)
            out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }
};

Scenario parse_document(const json& doc, SchemaWalk& walk) {
    Scenario s;
    if (!walk.check_object(doc, "$",
                           {"schema_version", "name", "time_grid", "utility", "programs"},
                           {"algorithm"}))
        return s;

    if (!doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<std::int64_t>() != 1)
        walk.add("$.schema_version", "must be the integer 1");

    s.name = walk.text(doc["name"], "$.name");

    if (doc["time_grid"].is_array()) {
        for (std::size_t t = 0; t < doc["time_grid"].size(); ++t) {
            const std::string path = "$.time_grid[" + std::to_string(t) + "]";
            const json& node = doc["time_grid"][t];
            if (!walk.check_object(node, path, {"label", "hours"})) continue;
            TimeInterval interval;
            const std::string label = walk.text(node["label"], path + ".label");
            if (auto parsed = parse_interval_label(label))
                interval.label = *parsed;
            else
                walk.add(path + ".label",
                         "'" + label + "' is not one of peak | off-peak | super-off-peak");
            interval.hours = walk.number(node["hours"], path + ".hours", 1.0);
            s.time_grid.intervals.push_back(interval);
        }
    } else {
        walk.add("$.time_grid", "expected an array");
    }

    if (walk.check_object(doc["utility"], "$.utility", {"c0", "c1", "c2", "pre_dr_supply"})) {
        s.utility.c0 = walk.number(doc["utility"]["c0"], "$.utility.c0");
        s.utility.c1 = walk.number(doc["utility"]["c1"], "$.utility.c1");
        s.utility.c2 = walk.number(doc["utility"]["c2"], "$.utility.c2");
        s.utility.pre_dr_supply_kw =
            walk.number_array(doc["utility"]["pre_dr_supply"], "$.utility.pre_dr_supply");
    }

    if (doc["programs"].is_array()) {
        for (std::size_t i = 0; i < doc["programs"].size(); ++i) {
            const std::string path = "$.programs[" + std::to_string(i) + "]";
            const json& node = doc["programs"][i];
            if (!walk.check_object(node, path, {"id", "kind", "retail_rate", "eus"})) continue;
            DrProgram program;
            program.id = walk.text(node["id"], path + ".id");
            const std::string kind = walk.text(node["kind"], path + ".kind");
            if (auto parsed = parse_program_kind(kind))
                program.kind = *parsed;
            else
                walk.add(path + ".kind", "'" + kind + "' is not residential | business");
            program.retail_rate_c_per_kwh =
                walk.number_array(node["retail_rate"], path + ".retail_rate");

            if (node["eus"].is_array()) {
                for (std::size_t j = 0; j < node["eus"].size(); ++j) {
                    const std::string eu_path = path + ".eus[" + std::to_string(j) + "]";
                    const json& eu_node = node["eus"][j];
                    if (!walk.check_object(eu_node, eu_path, {"id", "base_load", "willingness"}))
                        continue;
                    EndUser eu;
                    eu.id = walk.text(eu_node["id"], eu_path + ".id");
                    eu.program_id = program.id;
                    eu.base_load_kw = walk.number_array(eu_node["base_load"],
                                                        eu_path + ".base_load");
                    eu.willingness =
                        walk.number(eu_node["willingness"], eu_path + ".willingness");
                    program.eu_ids.push_back(eu.id);
                    s.eus.push_back(std::move(eu));
                }
            } else {
                walk.add(path + ".eus", "expected an array");
            }
            s.programs.push_back(std::move(program));
        }
    } else {
        walk.add("$.programs", "expected an array");
    }

    if (doc.contains("algorithm")) {
        const json& node = doc["algorithm"];
        if (walk.check_object(node, "$.algorithm", {},
                              {"mode", "price_step", "epsilon", "max_price", "solver_tol",
                               "oracle_grid_points"})) {
            if (node.contains("mode")) {
                const std::string mode = walk.text(node["mode"], "$.algorithm.mode");
                if (auto parsed = parse_solve_mode(mode))
                    s.algorithm.mode = *parsed;
                else
                    walk.add("$.algorithm.mode",
                             "'" + mode + "' is not paper | grid | coordinate");
            }
            if (node.contains("price_step"))
                s.algorithm.price_step =
                    walk.number(node["price_step"], "$.algorithm.price_step", 0.01);
            if (node.contains("epsilon"))
                s.algorithm.epsilon = walk.number(node["epsilon"], "$.algorithm.epsilon", 0.001);
            if (node.contains("max_price"))
                s.algorithm.max_price = walk.number(node["max_price"], "$.algorithm.max_price");
            if (node.contains("solver_tol"))
                s.algorithm.solver_tol =
                    walk.number(node["solver_tol"], "$.algorithm.solver_tol", 1e-10);
            if (node.contains("oracle_grid_points")) {
                if (node["oracle_grid_points"].is_number_integer())
                    s.algorithm.oracle_grid_points =
                        node["oracle_grid_points"].get<std::int64_t>();
                else
                    walk.add("$.algorithm.oracle_grid_points", "expected an integer");
            }
        }
    }
    if (s.algorithm.max_price <= 0.0) s.algorithm.max_price = default_max_price(s);
    return s;
}

}  // namespace

ScenarioIoError::ScenarioIoError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

Scenario load_scenario_text(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioIoError({std::string(source) + ": syntax error at byte " +
                               std::to_string(e.byte) + ": " + e.what()});
    }

    SchemaWalk walk;
    Scenario s = parse_document(doc, walk);
    if (!walk.issues.empty()) throw ScenarioIoError(std::move(walk.issues));

    std::vector<std::string> issues;
    for (const auto& v : validate_scenario(s)) issues.push_back(v.entity + ": " + v.message);
    if (!issues.empty()) throw ScenarioIoError(std::move(issues));
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioIoError({"cannot open scenario file: " + path.string()});
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_scenario_text(buffer.str(), path.string());
}

namespace {

/// All numeric checks run before any document node is built, so a failed
/// save allocates nothing.
void require_saveable(const Scenario& s) {
    auto finite = [](double v, const char* what) {
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string("save_scenario: non-finite ") + what);
    };
    for (const auto& interval : s.time_grid.intervals) finite(interval.hours, "interval hours");
    finite(s.utility.c0, "c0");
    finite(s.utility.c1, "c1");
    finite(s.utility.c2, "c2");
    for (double v : s.utility.pre_dr_supply_kw) finite(v, "pre_dr_supply");
    for (const auto& program : s.programs) {
        for (double v : program.retail_rate_c_per_kwh) finite(v, "retail_rate");
        for (const auto& eu_id : program.eu_ids) {
            const EndUser* eu = s.find_eu(eu_id);
            if (!eu)
                throw std::invalid_argument("save_scenario: program '" + program.id +
                                            "' references unknown EU '" + eu_id + "'");
            for (double v : eu->base_load_kw) finite(v, "base_load");
            finite(eu->willingness, "willingness");
        }
    }
    finite(s.algorithm.price_step, "price_step");
    finite(s.algorithm.epsilon, "epsilon");
    finite(s.algorithm.max_price, "max_price");
    finite(s.algorithm.solver_tol, "solver_tol");
}

}  // namespace

std::string save_scenario(const Scenario& s) {
    require_saveable(s);

    ordered_json doc;
    doc["schema_version"] = 1;
    doc["name"] = s.name;

    doc["time_grid"] = ordered_json::array();
    for (const auto& interval : s.time_grid.intervals)
        doc["time_grid"].push_back(
            {{"label", to_string(interval.label)}, {"hours", interval.hours}});

    doc["utility"] = {{"c0", s.utility.c0}, {"c1", s.utility.c1}, {"c2", s.utility.c2}};
    auto& supply = doc["utility"]["pre_dr_supply"] = ordered_json::array();
    for (double v : s.utility.pre_dr_supply_kw) supply.push_back(v);

    doc["programs"] = ordered_json::array();
    for (const auto& program : s.programs) {
        ordered_json node;
        node["id"] = program.id;
        node["kind"] = to_string(program.kind);
        auto& rates = node["retail_rate"] = ordered_json::array();
        for (double v : program.retail_rate_c_per_kwh) rates.push_back(v);
        auto& eus = node["eus"] = ordered_json::array();
        for (const auto& eu_id : program.eu_ids) {
            const EndUser* eu = s.find_eu(eu_id);
            ordered_json eu_node;
            eu_node["id"] = eu->id;
            auto& base = eu_node["base_load"] = ordered_json::array();
            for (double v : eu->base_load_kw) base.push_back(v);
            eu_node["willingness"] = eu->willingness;
            eus.push_back(std::move(eu_node));
        }
        doc["programs"].push_back(std::move(node));
    }

    doc["algorithm"] = {
        {"mode", to_string(s.algorithm.mode)},
        {"price_step", s.algorithm.price_step},
        {"epsilon", s.algorithm.epsilon},
        {"max_price", s.algorithm.max_price},
        {"solver_tol", s.algorithm.solver_tol},
        {"oracle_grid_points", s.algorithm.oracle_grid_points},
    };

    return doc.dump(2) + "\n";
}

namespace {

struct EuSpec {
    const char* id;
    std::vector<double> base;
    double alpha;
};

void add_program(Scenario& s, const char* id, ProgramKind kind, std::vector<double> rates,
                 const std::vector<EuSpec>& members) {
    DrProgram program;
    program.id = id;
    program.kind = kind;
    program.retail_rate_c_per_kwh = std::move(rates);
    for (const auto& m : members) {
        program.eu_ids.push_back(m.id);
        s.eus.push_back({m.id, id, m.base, m.alpha});
    }
    s.programs.push_back(std::move(program));
}

void set_willingness(Scenario& s, std::string_view eu_id, double alpha) {
    for (auto& eu : s.eus)
        if (eu.id == eu_id) {
            eu.willingness = alpha;
            return;
        }
    throw std::logic_error("builtin preset: unknown EU id");
}

// Both presets use a two-interval event (one off-peak hour, one peak hour).
// Retail rates and pre-event supply are illustrative; willingness values,
// base loads, and generation-cost coefficients follow the case data.

Scenario make_ieee34() {
    Scenario s;
    s.time_grid.intervals = {{IntervalLabel::off_peak, 1.0}, {IntervalLabel::peak, 1.0}};
    s.utility.c0 = 0.0;
    s.utility.c1 = -1088.2;
    s.utility.c2 = 0.2024;
    s.utility.pre_dr_supply_kw = {2920.0, 2960.0};

    add_program(s, "business", ProgramKind::business, {3.6, 7.7},
                {{"eu17", {230, 230}, 0.03},
                 {"eu18", {230, 230}, 0.05},
                 {"eu19", {230, 230}, 0.08},
                 {"eu20", {230, 230}, 0.10},
                 {"eu21", {230, 230}, 0.12},
                 {"eu22", {230, 230}, 0.15},
                 {"eu23", {230, 230}, 0.17}});
    add_program(s, "residential", ProgramKind::residential, {4.2, 8.4},
                {{"eu28", {75, 75}, 0.20},
                 {"eu29", {75, 75}, 0.22},
                 {"eu30", {75, 75}, 0.25},
                 {"eu31", {57, 57}, 0.29},
                 {"eu32", {57, 57}, 0.30},
                 {"eu33", {57, 57}, 0.33},
                 {"eu34", {57, 57}, 0.35}});

    s.algorithm.mode = SolveMode::grid;
    s.algorithm.price_step = 0.01;
    s.algorithm.epsilon = 0.001;
    s.algorithm.max_price = 15.0;
    return s;
}

Scenario make_ieee69() {
    Scenario s;
    s.time_grid.intervals = {{IntervalLabel::off_peak, 1.0}, {IntervalLabel::peak, 1.0}};
    s.utility.c0 = 0.0;
    s.utility.c1 = -14.3;
    s.utility.c2 = 0.004506;
    s.utility.pre_dr_supply_kw = {3140.0, 3695.0};

    add_program(s, "residential-1", ProgramKind::residential, {3.5, 5.5},
                {{"eu28", {26, 26}, 0.15},
                 {"eu29", {26, 26}, 0.24},
                 {"eu33", {14, 14}, 0.28},
                 {"eu34", {19.5, 19.5}, 0.21},
                 {"eu35", {6, 6}, 0.32}});
    add_program(s, "residential-2", ProgramKind::residential, {3.5, 5.5},
                {{"eu36", {26, 26}, 0.46},
                 {"eu37", {26, 26}, 0.51},
                 {"eu39", {24, 24}, 0.55},
                 {"eu40", {24, 24}, 0.59},
                 {"eu41", {1.2, 1.2}, 0.70},
                 {"eu43", {6, 6}, 0.64},
                 {"eu45", {39.22, 39.22}, 0.40},
                 {"eu46", {39.22, 39.22}, 0.36}});
    add_program(s, "business", ProgramKind::business, {2.9, 5.0},
                {{"eu48", {79, 79}, 0.03},
                 {"eu49", {384.7, 384.7}, 0.02},
                 {"eu50", {384.7, 384.7}, 0.01}});

    s.algorithm.mode = SolveMode::grid;
    s.algorithm.price_step = 0.02;
    s.algorithm.epsilon = 0.001;
    s.algorithm.max_price = 6.0;
    return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"ieee34-s1", "ieee34-s2", "ieee69-s1", "ieee69-s2"};
}

Scenario builtin_scenario(std::string_view name) {
    if (name == "ieee34-s1") {
        Scenario s = make_ieee34();
        s.name = "ieee34-s1";
        return s;
    }
    if (name == "ieee34-s2") {
        Scenario s = make_ieee34();
        s.name = "ieee34-s2";
        set_willingness(s, "eu18", 0.08);
        set_willingness(s, "eu30", 0.40);
        return s;
    }
    if (name == "ieee69-s1") {
        Scenario s = make_ieee69();
        s.name = "ieee69-s1";
        return s;
    }
    if (name == "ieee69-s2") {
        Scenario s = make_ieee69();
        s.name = "ieee69-s2";
        set_willingness(s, "eu34", 0.30);
        set_willingness(s, "eu36", 0.57);
        set_willingness(s, "eu50", 0.06);
        return s;
    }
    throw std::invalid_argument("unknown builtin scenario '" + std::string(name) +
                                "'; available: ieee34-s1, ieee34-s2, ieee69-s1, ieee69-s2");
}

Scenario resolve_scenario(std::string_view spec) {
    constexpr std::string_view prefix = "builtin:";
    if (spec.starts_with(prefix)) return builtin_scenario(spec.substr(prefix.size()));
    return load_scenario_file(std::filesystem::path(std::string(spec)));
}

}  // namespace drstack::io
