#include "drstack/provider.hpp"

#include <stdexcept>

namespace drstack::provider {

ProgramResponse solve_program(const DrProgram& program,
                              const std::vector<const EndUser*>& members, double lambda_dr,
                              std::size_t t, double duration_h, const AlgorithmConfig& cfg) {
    if (!(lambda_dr >= 0.0)) throw std::domain_error("solve_program: lambda_dr must be >= 0");
    if (members.empty()) throw std::domain_error("solve_program: program has no members");

    ProgramResponse resp;
    resp.program_id = program.id;
    resp.t = t;
    resp.duration_h = duration_h;
    resp.lambda_dr = lambda_dr;
    resp.eu_responses.reserve(members.size());

    for (const EndUser* member : members) {
        const double base = member->base_load_kw.at(t);
        const double p_max = eu::dr_upper_bound(member->willingness, base);
        eu::EuResponse r;
        r.eu_id = member->id;
        r.t = t;
        r.p_max_kw = p_max;
        r.p_dr_kw = eu::best_response(lambda_dr, p_max, cfg.solver_tol);
        if (r.p_dr_kw > 0.0) {
            r.lambda_eu = eu::recover_eu_price(r.p_dr_kw, p_max);
            r.eu_profit = eu::eu_profit(r.lambda_eu, r.p_dr_kw, p_max, duration_h);
        } else {
            // Reservation price as a diagnostic for non-participants.
            r.lambda_eu = p_max > 0.0 ? 1.0 / p_max : 0.0;
            r.eu_profit = 0.0;
        }
        resp.base_total_kw += base;
        resp.aggregate_dr_kw += r.p_dr_kw;
        resp.eu_responses.push_back(std::move(r));
    }
    resp.provider_profit = provider_profit(resp);
    return resp;
}

double provider_profit(const ProgramResponse& resp) {
    double total = 0.0;
    for (const auto& r : resp.eu_responses)
        total += (resp.lambda_dr - r.lambda_eu) * r.p_dr_kw * resp.duration_h;
    return total;
}

}  // namespace drstack::provider
