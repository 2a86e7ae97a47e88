#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpslab/grid.hpp"
#include "rpslab/paths.hpp"
#include "rpslab/potential.hpp"
#include "rpslab/propagator.hpp"
#include "rpslab/spectral.hpp"

namespace rps {

struct SolverConfig {
    int k_max = 3;
    double tol = 1e-6;
    SolverOptions options;
};

struct SweepConfig {
    RVec amplitudes;          // ionization-sweep amplitudes
    int pairs = 0;            // Brownian contrast pairs (0: none)
    std::string component = "D.x";
    double q = 1.1;
    int K = 256;
};

struct KernelConfig {
    std::size_t slices = 64;
    double dt = 0.05;
    RVec epsilons{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    std::string component = "gamma"; // which path channel the perturbation enters
    int max_iter = 60;
};

/// Everything a subcommand needs, parsed and validated up front.
struct RunConfig {
    nlohmann::json echo;   // canonical form of the input (sorted keys)
    std::uint64_t seed = 0;
    Grid grid;
    PotentialProfile profile;
    ParamPath path;
    EvolveConfig evolve;
    SolverConfig solver;
    SweepConfig sweep;
    KernelConfig kernel;
    double memory_cap_bytes = 4e9;
    std::string path_file; // set when the path came from a CSV
};

/// Parses INI-style text (sections, key = value). `seed` overrides [run] seed.
RunConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt);
RunConfig load_config(const std::filesystem::path& file,
                      std::optional<std::uint64_t> seed = std::nullopt);

/// One path channel from a generator spec such as "h12 amplitude=0.1 q=1.1 K=256 seed=4".
PathComponent parse_component(const std::string& spec, double T, double dt, std::uint64_t seed,
                              const std::string& field);

} // namespace rps
