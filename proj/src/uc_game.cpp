#include "drstack/uc_game.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace drstack::uc {

namespace {

// Shared arithmetic cores. The sweep tables and the final full solve must
// produce bitwise-identical money terms, so both paths route through these.
inline double cost_reduction_core(double p_pre, double total_dr, double c1, double c2) {
    return (c1 + 2.0 * c2 * p_pre) * total_dr - c2 * total_dr * total_dr;
}

inline double program_bill_term(double rate, double base_total, double dr, double duration) {
    return rate * (base_total - dr) * duration;
}

inline double program_payment_term(double lambda, double dr, double duration) {
    return lambda * dr * duration;
}

std::string format_prices(const std::vector<double>& prices) {
    std::ostringstream oss;
    oss << "[";
    for (std::size_t i = 0; i < prices.size(); ++i) oss << (i ? ", " : "") << prices[i];
    oss << "]";
    return oss.str();
}

/// Per-interval sweep state: the price lattice and, for every program and
/// lattice index, the aggregate DR, bill revenue, and DR payment terms.
struct SweepTables {
    std::vector<double> prices;
    std::vector<std::vector<double>> dr;    // [program][price index]
    std::vector<std::vector<double>> reb;   // bill revenue terms
    std::vector<std::vector<double>> pay;   // DR payment terms
    double p_pre = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    std::size_t axis_size() const { return prices.size(); }
    std::size_t n_programs() const { return dr.size(); }

    double profit_at(const std::vector<std::size_t>& k) const {
        double reb_sum = 0.0;
        double pay_sum = 0.0;
        double total_dr = 0.0;
        for (std::size_t i = 0; i < dr.size(); ++i) {
            reb_sum += reb[i][k[i]];
            pay_sum += pay[i][k[i]];
            total_dr += dr[i][k[i]];
        }
        if (total_dr > p_pre)
            throw std::domain_error("aggregate DR " + std::to_string(total_dr) +
                                    " kW exceeds pre-DR supply " + std::to_string(p_pre) + " kW");
        const double profit = reb_sum - pay_sum + cost_reduction_core(p_pre, total_dr, c1, c2);
        if (!std::isfinite(profit)) {
            std::vector<double> at;
            at.reserve(k.size());
            for (std::size_t i = 0; i < k.size(); ++i) at.push_back(prices[k[i]]);
            throw NumericError("non-finite UC profit at prices " + format_prices(at));
        }
        return profit;
    }

    std::vector<double> price_vector(const std::vector<std::size_t>& k) const {
        std::vector<double> out(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) out[i] = prices[k[i]];
        return out;
    }
};

std::vector<double> make_price_lattice(double price_step, double max_price) {
    const double points = max_price / price_step;
    if (!(points < 1e7))
        throw std::invalid_argument("price lattice has over 1e7 points per program (step " +
                                    std::to_string(price_step) + ", cap " +
                                    std::to_string(max_price) + "); raise price_step");
    // Absorb one ulp of k*step drift so the nominal cap point stays in.
    const auto n = static_cast<std::size_t>(std::floor(points + 1e-9)) + 1;
    std::vector<double> prices(n);
    for (std::size_t k = 0; k < n; ++k) prices[k] = static_cast<double>(k) * price_step;
    return prices;
}

SweepTables build_tables(const Scenario& s, std::size_t t) {
    SweepTables tables;
    tables.prices = make_price_lattice(s.algorithm.price_step, s.algorithm.max_price);
    tables.p_pre = s.utility.pre_dr_supply_kw.at(t);
    tables.c1 = s.utility.c1;
    tables.c2 = s.utility.c2;

    const double duration = s.time_grid.duration(t);
    const std::size_t n = tables.prices.size();
    tables.dr.assign(s.programs.size(), std::vector<double>(n));
    tables.reb.assign(s.programs.size(), std::vector<double>(n));
    tables.pay.assign(s.programs.size(), std::vector<double>(n));

    for (std::size_t i = 0; i < s.programs.size(); ++i) {
        const DrProgram& program = s.programs[i];
        const auto members = s.members_of(program);
        const double rate = program.retail_rate_c_per_kwh.at(t);
        for (std::size_t k = 0; k < n; ++k) {
            const auto resp = provider::solve_program(program, members, tables.prices[k], t,
                                                      duration, s.algorithm);
            tables.dr[i][k] = resp.aggregate_dr_kw;
            tables.reb[i][k] =
                program_bill_term(rate, resp.base_total_kw, resp.aggregate_dr_kw, duration);
            tables.pay[i][k] =
                program_payment_term(tables.prices[k], resp.aggregate_dr_kw, duration);
        }
    }
    return tables;
}

struct SweepOutcome {
    std::vector<std::size_t> chosen;
    std::int64_t iterations = 0;
    bool converged = true;
};

SweepOutcome sweep_paper(const SweepTables& tables, double epsilon, bool faithful_stop) {
    const std::size_t axes = tables.n_programs();
    const std::size_t n = tables.axis_size();
    SweepOutcome out;
    out.iterations = 1;   // seeded profit of 0 before the first price
    out.converged = false;

    double prev = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    std::size_t stop_k = n - 1;
    std::vector<std::size_t> k(axes, 0);
    for (std::size_t step = 0; step < n; ++step) {
        std::fill(k.begin(), k.end(), step);
        const double profit = tables.profit_at(k);
        ++out.iterations;
        if (profit > best) {
            best = profit;
            best_k = step;
        }
        if (std::abs(profit - prev) <= epsilon) {
            out.converged = true;
            stop_k = step;
            break;
        }
        prev = profit;
    }

    out.chosen.assign(axes, faithful_stop ? stop_k : best_k);
    return out;
}

SweepOutcome sweep_coordinate(const SweepTables& tables, double epsilon) {
    constexpr int kMaxCycles = 200;
    const std::size_t axes = tables.n_programs();
    const std::size_t n = tables.axis_size();
    SweepOutcome out;
    out.converged = false;

    std::vector<std::size_t> k(axes, 0);
    double current = tables.profit_at(k);
    out.iterations = 1;

    for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
        const double cycle_start = current;
        for (std::size_t axis = 0; axis < axes; ++axis) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t best_k = 0;
            for (std::size_t cand = 0; cand < n; ++cand) {
                k[axis] = cand;
                const double profit = tables.profit_at(k);
                ++out.iterations;
                if (profit > best) {
                    best = profit;
                    best_k = cand;
                }
            }
            k[axis] = best_k;
            current = best;
        }
        if (current - cycle_start <= epsilon) {
            out.converged = true;
            break;
        }
    }
    out.chosen = k;
    return out;
}

void decode_flat(std::uint64_t flat, const std::vector<std::uint64_t>& radix,
                 std::vector<std::size_t>& k) {
    for (std::size_t i = radix.size(); i-- > 0;) {
        k[i] = static_cast<std::size_t>(flat % radix[i]);
        flat /= radix[i];
    }
}

/// Advances the odometer (last axis fastest); matches flat-index order.
void advance(std::vector<std::size_t>& k, const std::vector<std::uint64_t>& radix) {
    for (std::size_t i = k.size(); i-- > 0;) {
        if (++k[i] < radix[i]) return;
        k[i] = 0;
    }
}

SweepOutcome sweep_grid(const SweepTables& tables, unsigned threads) {
    const std::size_t axes = tables.n_programs();
    const std::size_t n = tables.axis_size();

    // Exhaustive enumeration is an oracle for desk-scale cases; refuse
    // lattices that would take hours instead of silently hanging.
    constexpr std::uint64_t kMaxCombos = 2'000'000'000ull;
    std::vector<std::uint64_t> radix(axes, n);
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < axes; ++i) {
        if (combos > kMaxCombos / n)
            throw std::invalid_argument(
                "grid mode: " + std::to_string(axes) + " programs x " + std::to_string(n) +
                " lattice points exceed the enumeration budget; raise price_step, lower "
                "max_price, or use coordinate mode");
        combos *= n;
    }

    struct ChunkResult {
        bool found = false;
        double profit = -std::numeric_limits<double>::infinity();
        std::uint64_t flat = 0;
        std::vector<std::size_t> k;
        std::exception_ptr error;
    };

    const unsigned worker_count =
        static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), combos));
    std::vector<ChunkResult> results(worker_count);

    auto scan_chunk = [&](unsigned w) {
        ChunkResult& r = results[w];
        try {
            const std::uint64_t begin = combos * w / worker_count;
            const std::uint64_t end = combos * (w + 1) / worker_count;
            std::vector<std::size_t> k(axes);
            decode_flat(begin, radix, k);
            for (std::uint64_t flat = begin; flat < end; ++flat) {
                const double profit = tables.profit_at(k);
                // Strict improvement keeps the lowest flat index, which is
                // the lexicographically smallest price vector.
                if (!r.found || profit > r.profit) {
                    r.found = true;
                    r.profit = profit;
                    r.flat = flat;
                    r.k = k;
                }
                advance(k, radix);
            }
        } catch (...) {
            r.error = std::current_exception();
        }
    };

    if (worker_count == 1) {
        scan_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned w = 0; w < worker_count; ++w) pool.emplace_back(scan_chunk, w);
        for (auto& th : pool) th.join();
    }

    SweepOutcome out;
    out.iterations = static_cast<std::int64_t>(combos);
    out.converged = true;
    bool found = false;
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_flat = 0;
    for (const auto& r : results) {
        if (r.error) std::rethrow_exception(r.error);
        if (!r.found) continue;
        if (!found || r.profit > best || (r.profit == best && r.flat < best_flat)) {
            found = true;
            best = r.profit;
            best_flat = r.flat;
            out.chosen = r.k;
        }
    }
    return out;
}

}  // namespace

double generation_cost(double p_g_kw, const UtilityParams& params) {
    if (!(p_g_kw >= 0.0)) throw std::domain_error("generation_cost: p_g must be >= 0");
    return params.c0 + params.c1 * p_g_kw + params.c2 * p_g_kw * p_g_kw;
}

double operation_cost_reduction(double p_pre_kw, double total_dr_kw,
                                const UtilityParams& params) {
    if (!(total_dr_kw >= 0.0))
        throw std::domain_error("operation_cost_reduction: total_dr must be >= 0");
    if (total_dr_kw > p_pre_kw)
        throw std::domain_error("operation_cost_reduction: total DR " +
                                std::to_string(total_dr_kw) + " kW exceeds pre-DR supply " +
                                std::to_string(p_pre_kw) + " kW");
    return cost_reduction_core(p_pre_kw, total_dr_kw, params.c1, params.c2);
}

double bill_revenue(const Scenario& s, const std::vector<provider::ProgramResponse>& responses,
                    std::size_t t) {
    if (responses.size() != s.programs.size())
        throw std::invalid_argument("bill_revenue: one response per program required");
    const double duration = s.time_grid.duration(t);
    double total = 0.0;
    for (std::size_t i = 0; i < responses.size(); ++i)
        total += program_bill_term(s.programs[i].retail_rate_c_per_kwh.at(t),
                                   responses[i].base_total_kw, responses[i].aggregate_dr_kw,
                                   duration);
    return total;
}

double dr_payment(const std::vector<provider::ProgramResponse>& responses, std::size_t t) {
    double total = 0.0;
    for (const auto& resp : responses) {
        if (resp.t != t) throw std::invalid_argument("dr_payment: response interval mismatch");
        total += program_payment_term(resp.lambda_dr, resp.aggregate_dr_kw, resp.duration_h);
    }
    return total;
}

UcIntervalResult uc_profit_interval(const Scenario& s,
                                    const std::vector<double>& lambda_dr_vector, std::size_t t) {
    if (lambda_dr_vector.size() != s.programs.size())
        throw std::invalid_argument("uc_profit_interval: one price per program required");
    const double duration = s.time_grid.duration(t);

    UcIntervalResult result;
    result.t = t;
    result.lambda_dr = lambda_dr_vector;
    result.program_responses.reserve(s.programs.size());
    double total_dr = 0.0;
    for (std::size_t i = 0; i < s.programs.size(); ++i) {
        const auto members = s.members_of(s.programs[i]);
        auto resp = provider::solve_program(s.programs[i], members, lambda_dr_vector[i], t,
                                            duration, s.algorithm);
        total_dr += resp.aggregate_dr_kw;
        result.program_responses.push_back(std::move(resp));
    }

    result.bill_revenue = bill_revenue(s, result.program_responses, t);
    result.dr_payment = dr_payment(result.program_responses, t);
    result.delta_cg = operation_cost_reduction(s.utility.pre_dr_supply_kw.at(t), total_dr,
                                               s.utility);
    result.uc_profit = result.bill_revenue - result.dr_payment + result.delta_cg;
    if (!std::isfinite(result.uc_profit))
        throw NumericError("non-finite UC profit at prices " + format_prices(lambda_dr_vector));
    return result;
}

UcIntervalResult optimize_prices(const Scenario& s, std::size_t t, SolveMode mode,
                                 unsigned threads) {
    const SweepTables tables = build_tables(s, t);

    SweepOutcome outcome;
    switch (mode) {
        case SolveMode::paper:
            outcome = sweep_paper(tables, s.algorithm.epsilon, s.algorithm.faithful_stop);
            break;
        case SolveMode::grid:
            outcome = sweep_grid(tables, threads);
            break;
        case SolveMode::coordinate:
            outcome = sweep_coordinate(tables, s.algorithm.epsilon);
            break;
    }

    UcIntervalResult result = uc_profit_interval(s, tables.price_vector(outcome.chosen), t);
    result.iterations = outcome.iterations;
    result.converged = outcome.converged;
    return result;
}

EquilibriumResult run_event(const Scenario& s, unsigned threads) {
    const auto issues = validate_scenario(s);
    if (!issues.empty())
        throw std::invalid_argument("run_event: scenario has " + std::to_string(issues.size()) +
                                    " validation issue(s); first: " + issues.front().entity +
                                    ": " + issues.front().message);

    EquilibriumResult result;
    result.scenario_name = s.name;
    result.mode = s.algorithm.mode;
    result.intervals.reserve(s.time_grid.size());

    for (std::size_t t = 0; t < s.time_grid.size(); ++t) {
        auto interval = optimize_prices(s, t, s.algorithm.mode, threads);
        result.total_uc_profit += interval.uc_profit;
        result.iterations += interval.iterations;
        result.converged = result.converged && interval.converged;
        for (const auto& resp : interval.program_responses)
            for (const auto& eu_resp : resp.eu_responses)
                result.kkt_reports.push_back({eu_resp.eu_id, resp.program_id, t,
                                              eu::verify_kkt(resp.lambda_dr, eu_resp)});
        result.intervals.push_back(std::move(interval));
    }
    return result;
}

}  // namespace drstack::uc
