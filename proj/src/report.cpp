#include "drstack/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace drstack::report {

namespace {

using nlohmann::ordered_json;

/// Number as emitted in files, parsed back so JSON output carries the same
/// 6-significant-digit value as CSV.
double rounded_value(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

std::vector<std::string> interval_column_names(const TimeGrid& grid) {
    std::map<std::string_view, int> label_count;
    for (const auto& interval : grid.intervals) ++label_count[to_string(interval.label)];
    std::vector<std::string> names;
    names.reserve(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) {
        const std::string_view label = to_string(grid.intervals[t].label);
        if (label_count[label] > 1)
            names.push_back(std::string(label) + "_t" + std::to_string(t));
        else
            names.push_back(std::string(label));
    }
    return names;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("failed while writing: " + path.string());
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct TableWriter {
    Format format;
    std::vector<std::string> columns;
    std::string csv;
    ordered_json rows = ordered_json::array();

    explicit TableWriter(Format f, std::vector<std::string> cols)
        : format(f), columns(std::move(cols)) {
        if (format == Format::csv) {
            for (std::size_t i = 0; i < columns.size(); ++i)
                csv += (i ? "," : "") + csv_escape(columns[i]);
            csv += '\n';
        }
    }

    void row(const std::vector<std::string>& text_fields,
             const std::vector<double>& number_fields) {
        if (format == Format::csv) {
            std::size_t col = 0;
            for (const auto& f : text_fields) csv += (col++ ? "," : "") + csv_escape(f);
            for (double v : number_fields) csv += (col++ ? "," : "") + format_number(v);
            csv += '\n';
        } else {
            ordered_json node;
            std::size_t col = 0;
            for (const auto& f : text_fields) node[columns[col++]] = f;
            for (double v : number_fields) node[columns[col++]] = rounded_value(v);
            rows.push_back(std::move(node));
        }
    }

    void save(const std::filesystem::path& dir, const std::string& stem) const {
        if (format == Format::csv)
            write_file(dir / (stem + ".csv"), csv);
        else
            write_file(dir / (stem + ".json"), rows.dump(2) + "\n");
    }
};

int direction_of(double before, double after) {
    constexpr double deadband = 1e-9;
    if (after - before > deadband) return 1;
    if (before - after > deadband) return -1;
    return 0;
}

const char* direction_word(int d) {
    return d > 0 ? "increased" : (d < 0 ? "decreased" : "unchanged");
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ReportBundle build_report(const Scenario& s, const uc::EquilibriumResult& result) {
    const std::size_t n = s.time_grid.size();
    if (result.intervals.size() != n)
        throw std::invalid_argument("build_report: result does not match scenario grid");

    ReportBundle bundle;
    bundle.scenario_name = result.scenario_name;
    bundle.interval_columns = interval_column_names(s.time_grid);

    // eu_id -> (row data, per-interval profit) in program declaration order.
    struct EuAccum {
        ReportBundle::EuRow row;
        std::vector<double> profit;
    };
    std::vector<EuAccum> eus;
    for (std::size_t p = 0; p < s.programs.size(); ++p) {
        ReportBundle::ProviderRow prow;
        prow.program_id = s.programs[p].id;
        prow.lambda_dr.resize(n);
        double provider_total = 0.0;
        std::vector<double> provider_profit(n);
        std::vector<double> aggregate(n);

        const std::size_t eu_base = eus.size();
        for (const auto& eu_id : s.programs[p].eu_ids) {
            EuAccum acc;
            acc.row.eu_id = eu_id;
            acc.row.program_id = s.programs[p].id;
            acc.row.dr_kw.resize(n);
            acc.row.lambda_eu.resize(n);
            acc.profit.resize(n);
            eus.push_back(std::move(acc));
        }

        for (std::size_t t = 0; t < n; ++t) {
            const auto& resp = result.intervals[t].program_responses.at(p);
            prow.lambda_dr[t] = resp.lambda_dr;
            provider_profit[t] = resp.provider_profit;
            provider_total += resp.provider_profit;
            aggregate[t] = resp.aggregate_dr_kw;
            for (std::size_t j = 0; j < resp.eu_responses.size(); ++j) {
                EuAccum& acc = eus.at(eu_base + j);
                const auto& r = resp.eu_responses[j];
                acc.row.dr_kw[t] = r.p_dr_kw;
                acc.row.lambda_eu[t] = r.lambda_eu;
                acc.profit[t] = r.eu_profit;
            }
        }

        for (std::size_t t = 0; t < n; ++t) {
            bundle.series.push_back({bundle.scenario_name, bundle.interval_columns[t],
                                     "program:" + prow.program_id, "aggregate_dr_kw",
                                     aggregate[t]});
            bundle.series.push_back({bundle.scenario_name, bundle.interval_columns[t],
                                     "program:" + prow.program_id, "profit_c",
                                     provider_profit[t]});
        }
        bundle.series.push_back({bundle.scenario_name, "total", "program:" + prow.program_id,
                                 "profit_c", provider_total});
        bundle.provider_rows.push_back(std::move(prow));
    }

    for (auto& acc : eus) {
        double total = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            total += acc.profit[t];
            bundle.series.push_back({bundle.scenario_name, bundle.interval_columns[t],
                                     "eu:" + acc.row.eu_id, "profit_c", acc.profit[t]});
        }
        bundle.series.push_back(
            {bundle.scenario_name, "total", "eu:" + acc.row.eu_id, "profit_c", total});
        bundle.eu_rows.push_back(std::move(acc.row));
    }

    for (std::size_t t = 0; t < n; ++t)
        bundle.series.push_back({bundle.scenario_name, bundle.interval_columns[t], "uc",
                                 "profit_c", result.intervals[t].uc_profit});
    bundle.series.push_back(
        {bundle.scenario_name, "total", "uc", "profit_c", result.total_uc_profit});

    std::map<std::string, ReportBundle::KktRow> kkt;
    for (const auto& entry : result.kkt_reports) {
        auto& row = kkt.try_emplace(entry.eu_id, ReportBundle::KktRow{entry.eu_id}).first->second;
        row.stationarity =
            std::max(row.stationarity, std::abs(entry.record.stationarity_residual));
        row.complementarity =
            std::max({row.complementarity, entry.record.compl_lower_residual,
                      entry.record.compl_upper_residual});
        row.bounds = std::max(row.bounds, entry.record.bound_residual);
    }
    for (const auto& row : bundle.eu_rows) {
        auto it = kkt.find(row.eu_id);
        if (it != kkt.end()) bundle.kkt_rows.push_back(it->second);
    }
    return bundle;
}

void emit_tables(const ReportBundle& bundle, Format format,
                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::vector<std::string> eu_cols = {"eu_id"};
    for (const auto& c : bundle.interval_columns) eu_cols.push_back("dr_kw_" + c);
    for (const auto& c : bundle.interval_columns) eu_cols.push_back("lambda_eu_" + c);
    TableWriter eu_table(format, eu_cols);
    for (const auto& row : bundle.eu_rows) {
        std::vector<double> numbers = row.dr_kw;
        numbers.insert(numbers.end(), row.lambda_eu.begin(), row.lambda_eu.end());
        eu_table.row({row.eu_id}, numbers);
    }
    eu_table.save(dir, "eu_table");

    std::vector<std::string> provider_cols = {"program_id"};
    for (const auto& c : bundle.interval_columns) provider_cols.push_back("lambda_dr_" + c);
    TableWriter provider_table(format, provider_cols);
    for (const auto& row : bundle.provider_rows) provider_table.row({row.program_id}, row.lambda_dr);
    provider_table.save(dir, "provider_table");

    TableWriter kkt_table(format,
                          {"eu_id", "stationarity", "complementarity", "bounds", "max"});
    for (const auto& row : bundle.kkt_rows)
        kkt_table.row({row.eu_id}, {row.stationarity, row.complementarity, row.bounds,
                                    std::max({row.stationarity, row.complementarity, row.bounds})});
    kkt_table.save(dir, "kkt_report");
}

void emit_series(std::span<const ReportBundle> bundles, Format format,
                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    TableWriter table(format, {"scenario", "interval", "entity", "metric", "value"});
    for (const auto& bundle : bundles)
        for (const auto& row : bundle.series)
            table.row({row.scenario, row.interval, row.entity, row.metric}, {row.value});
    table.save(dir, "series");
}

const DirectionRow* ComparisonReport::find(std::string_view entity, std::string_view metric,
                                           std::string_view interval) const {
    for (const auto& row : rows)
        if (row.entity == entity && row.metric == metric && row.interval == interval)
            return &row;
    return nullptr;
}

ComparisonReport compare_results(const Scenario& sa, const uc::EquilibriumResult& ra,
                                 const Scenario& sb, const uc::EquilibriumResult& rb) {
    const std::size_t n = sa.time_grid.size();
    if (sa.time_grid != sb.time_grid || sa.programs.size() != sb.programs.size())
        throw std::invalid_argument("compare: scenarios have different structure");
    for (std::size_t p = 0; p < sa.programs.size(); ++p)
        if (sa.programs[p].id != sb.programs[p].id ||
            sa.programs[p].eu_ids != sb.programs[p].eu_ids)
            throw std::invalid_argument("compare: program structure differs between scenarios");

    const auto columns = interval_column_names(sa.time_grid);
    ComparisonReport report;
    report.scenario_a = ra.scenario_name;
    report.scenario_b = rb.scenario_name;

    auto add = [&report](std::string entity, std::string metric, std::string interval,
                         double before, double after) {
        report.rows.push_back({std::move(entity), std::move(metric), std::move(interval),
                               before, after, direction_of(before, after)});
    };

    for (std::size_t p = 0; p < sa.programs.size(); ++p) {
        const std::string entity = "program:" + sa.programs[p].id;
        double agg_a = 0.0, agg_b = 0.0, prof_a = 0.0, prof_b = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const auto& respa = ra.intervals[t].program_responses.at(p);
            const auto& respb = rb.intervals[t].program_responses.at(p);
            add(entity, "lambda_dr", columns[t], respa.lambda_dr, respb.lambda_dr);
            add(entity, "aggregate_dr_kw", columns[t], respa.aggregate_dr_kw,
                respb.aggregate_dr_kw);
            add(entity, "profit_c", columns[t], respa.provider_profit, respb.provider_profit);
            agg_a += respa.aggregate_dr_kw;
            agg_b += respb.aggregate_dr_kw;
            prof_a += respa.provider_profit;
            prof_b += respb.provider_profit;
        }
        add(entity, "aggregate_dr_kw", "total", agg_a, agg_b);
        add(entity, "profit_c", "total", prof_a, prof_b);

        for (std::size_t j = 0; j < sa.programs[p].eu_ids.size(); ++j) {
            const std::string eu_entity = "eu:" + sa.programs[p].eu_ids[j];
            double dr_a = 0.0, dr_b = 0.0, eu_prof_a = 0.0, eu_prof_b = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                const auto& ea = ra.intervals[t].program_responses.at(p).eu_responses.at(j);
                const auto& eb = rb.intervals[t].program_responses.at(p).eu_responses.at(j);
                add(eu_entity, "dr_kw", columns[t], ea.p_dr_kw, eb.p_dr_kw);
                add(eu_entity, "profit_c", columns[t], ea.eu_profit, eb.eu_profit);
                dr_a += ea.p_dr_kw;
                dr_b += eb.p_dr_kw;
                eu_prof_a += ea.eu_profit;
                eu_prof_b += eb.eu_profit;
            }
            add(eu_entity, "dr_kw", "total", dr_a, dr_b);
            add(eu_entity, "profit_c", "total", eu_prof_a, eu_prof_b);
        }
    }

    for (std::size_t t = 0; t < n; ++t)
        add("uc", "profit_c", columns[t], ra.intervals[t].uc_profit, rb.intervals[t].uc_profit);
    add("uc", "profit_c", "total", ra.total_uc_profit, rb.total_uc_profit);
    return report;
}

void emit_comparison(const ComparisonReport& report, Format format,
                     const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    TableWriter table(format, {"entity", "metric", "interval", "before", "after", "direction"});
    if (format == Format::csv) {
        for (const auto& row : report.rows) {
            table.csv += csv_escape(row.entity) + "," + csv_escape(row.metric) + "," +
                         csv_escape(row.interval) + "," + format_number(row.before) + "," +
                         format_number(row.after) + "," + direction_word(row.direction) + "\n";
        }
    } else {
        for (const auto& row : report.rows) {
            ordered_json node;
            node["entity"] = row.entity;
            node["metric"] = row.metric;
            node["interval"] = row.interval;
            node["before"] = rounded_value(row.before);
            node["after"] = rounded_value(row.after);
            node["direction"] = direction_word(row.direction);
            table.rows.push_back(std::move(node));
        }
    }
    table.save(dir, "compare");
}

}  // namespace drstack::report
