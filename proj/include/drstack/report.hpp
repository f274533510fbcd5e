#pragma once

// Result projection and file emission. Emitters do no math beyond number
// formatting: every emitted value is a field of the equilibrium result.
// Output is byte-stable across runs; numbers carry 6 significant digits.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "drstack/model.hpp"
#include "drstack/uc_game.hpp"

namespace drstack::report {

enum class Format { csv, json };

/// 6 significant digits, shortest form (printf %g).
std::string format_number(double v);

struct ReportBundle {
    std::string scenario_name;
    std::vector<std::string> interval_columns;   // one per interval, label-based

    struct EuRow {
        std::string eu_id;
        std::string program_id;
        std::vector<double> dr_kw;       // by interval
        std::vector<double> lambda_eu;   // by interval
    };
    struct ProviderRow {
        std::string program_id;
        std::vector<double> lambda_dr;   // by interval
    };
    struct KktRow {
        std::string eu_id;
        double stationarity = 0.0;       // max |residual| over intervals
        double complementarity = 0.0;
        double bounds = 0.0;
    };
    struct SeriesRow {
        std::string scenario;
        std::string interval;   // interval column or "total"
        std::string entity;     // "eu:<id>" | "program:<id>" | "uc"
        std::string metric;     // "profit_c" | "aggregate_dr_kw"
        double value = 0.0;
    };

    std::vector<EuRow> eu_rows;
    std::vector<ProviderRow> provider_rows;
    std::vector<KktRow> kkt_rows;
    std::vector<SeriesRow> series;
};

ReportBundle build_report(const Scenario& s, const uc::EquilibriumResult& result);

/// Writes eu_table, provider_table, and kkt_report under dir.
void emit_tables(const ReportBundle& bundle, Format format,
                 const std::filesystem::path& dir);

/// Writes one series file combining every bundle, keyed by scenario name.
void emit_series(std::span<const ReportBundle> bundles, Format format,
                 const std::filesystem::path& dir);

/// Direction of change between two runs with identical structure.
/// |after - before| <= 1e-9 counts as unchanged.
struct DirectionRow {
    std::string entity;
    std::string metric;
    std::string interval;
    double before = 0.0;
    double after = 0.0;
    int direction = 0;   // -1 decreased, 0 unchanged, +1 increased
};

struct ComparisonReport {
    std::string scenario_a;
    std::string scenario_b;
    std::vector<DirectionRow> rows;

    const DirectionRow* find(std::string_view entity, std::string_view metric,
                             std::string_view interval) const;
};

ComparisonReport compare_results(const Scenario& sa, const uc::EquilibriumResult& ra,
                                 const Scenario& sb, const uc::EquilibriumResult& rb);

void emit_comparison(const ComparisonReport& report, Format format,
                     const std::filesystem::path& dir);

}  // namespace drstack::report
