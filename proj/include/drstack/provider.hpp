#pragma once

// Middle layer: one DR provider aggregates its members' best responses at a
// given UC price and books the margin between what the UC pays it and what
// it pays the EUs. The per-EU problems are separable, so a program solve is
// just the union of independent single-EU solves.

#include <vector>

#include "drstack/eu_game.hpp"
#include "drstack/model.hpp"

namespace drstack::provider {

struct ProgramResponse {
    std::string program_id;
    std::size_t t = 0;
    double duration_h = 1.0;
    double lambda_dr = 0.0;   // cents/kWh, price the UC pays this provider
    std::vector<eu::EuResponse> eu_responses;   // in program declaration order
    double aggregate_dr_kw = 0.0;               // sum of member p_dr
    double base_total_kw = 0.0;                 // sum of member base loads at t
    double provider_profit = 0.0;               // cents
};

/// Solves every member EU at lambda_dr for interval t and aggregates.
/// Members below the participation threshold are reported with p_dr = 0 and
/// their reservation price 1/p_max as lambda_eu (0 when p_max = 0).
ProgramResponse solve_program(const DrProgram& program,
                              const std::vector<const EndUser*>& members, double lambda_dr,
                              std::size_t t, double duration_h, const AlgorithmConfig& cfg);

/// Margin sum((lambda_dr - lambda_eu) * p_dr * duration) over members.
/// Nonnegative at solver-produced responses.
double provider_profit(const ProgramResponse& resp);

}  // namespace drstack::provider
