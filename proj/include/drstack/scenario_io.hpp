#pragma once

// Scenario (de)serialization and the built-in case studies. The on-disk
// form is a strict JSON document: unknown keys are rejected, every number
// must be finite, and saving is canonical (fixed key order, stable number
// rendering) so identical scenarios serialize to identical bytes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drstack/model.hpp"

namespace drstack::io {

/// Carries every problem found while parsing/validating one document.
class ScenarioIoError : public std::runtime_error {
public:
    explicit ScenarioIoError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

Scenario load_scenario_text(std::string_view text, std::string_view source = "<text>");
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical serialization; throws on non-finite numbers or dangling
/// program membership.
std::string save_scenario(const Scenario& s);

std::vector<std::string> builtin_scenario_names();

/// Reconstructions of the four bundled case studies:
/// ieee34-s1 / ieee34-s2 / ieee69-s1 / ieee69-s2. Willingness parameters,
/// base loads, and cost coefficients follow the published case data; the
/// time grid, retail rates, and pre-event supply are illustrative values
/// chosen to produce interior equilibria (see README).
Scenario builtin_scenario(std::string_view name);

/// Accepts either "builtin:NAME" or a filesystem path.
Scenario resolve_scenario(std::string_view spec);

}  // namespace drstack::io
