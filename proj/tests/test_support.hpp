#pragma once

// Shared test fixtures: a platform-independent RNG (std distributions are
// not bit-stable across standard libraries) and small synthetic scenarios.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

#include "drstack/model.hpp"

namespace drstack::test {

/// splitmix64; identical sequences on every platform.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

/// One interval, one program, one EU with capacity 400 kW. Tuned so the
/// profit curve has a single sharp interior peak near 2 c/kWh.
inline Scenario single_provider_scenario() {
    Scenario s;
    s.name = "synth-single";
    s.time_grid.intervals = {{IntervalLabel::peak, 1.0}};
    s.utility = {0.0, 0.0, 0.001, {24000.0}};
    s.programs = {{"p1", ProgramKind::business, {5.0}, {"a1"}}};
    s.eus = {{"a1", "p1", {500.0}, 0.8}};
    s.algorithm.mode = SolveMode::paper;
    s.algorithm.price_step = 0.01;
    s.algorithm.epsilon = 0.001;
    s.algorithm.max_price = 4.0;
    return s;
}

/// Two programs (three EUs total), one interval, interior optimum in both
/// price coordinates.
inline Scenario two_provider_scenario() {
    Scenario s;
    s.name = "synth-two";
    s.time_grid.intervals = {{IntervalLabel::peak, 1.0}};
    s.utility = {0.0, 0.0, 0.001, {24000.0}};
    s.programs = {{"pa", ProgramKind::business, {5.0}, {"a1", "a2"}},
                  {"pb", ProgramKind::residential, {4.0}, {"b1"}}};
    s.eus = {{"a1", "pa", {500.0}, 0.8},
             {"a2", "pa", {200.0}, 0.5},
             {"b1", "pb", {300.0}, 0.5}};
    s.algorithm.mode = SolveMode::coordinate;
    s.algorithm.price_step = 0.01;
    s.algorithm.epsilon = 0.001;
    s.algorithm.max_price = 4.0;
    return s;
}

/// Fresh directory under the system temp root.
inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto dir = std::filesystem::temp_directory_path() /
                     ("drstack_" + tag + "_" + std::to_string(++counter));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::string out;
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) return out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

}  // namespace drstack::test
