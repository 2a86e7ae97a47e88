#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpslab/config.hpp"
#include "rpslab/duhamel.hpp"
#include "rpslab/fit.hpp"
#include "rpslab/propagator.hpp"

namespace rps {

std::string code_version();
std::string sha256_hex(const std::string& data);
/// Content hash of (canonical config, subcommand, extra arguments, code version).
std::string compute_run_id(const nlohmann::json& echo, const std::string& subcommand,
                           const std::vector<std::string>& extra = {});
/// $RPSLAB_OUTPUT_ROOT, or ./runs.
std::filesystem::path output_root();

struct RunOptions {
    int workers = 1;
    bool sweep = false;
    std::filesystem::path output_root;
    std::vector<std::string> args; // subcommand operands (path file, run dirs, export kind)
};

struct RunManifest {
    std::string run_id;
    std::string subcommand;
    nlohmann::json config;
    std::string started;
    std::string finished;
    std::filesystem::path dir;
    std::vector<std::string> outputs;
    nlohmann::json flags = nlohmann::json::object();
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Subcommands: bound-states, paths-gen, paths-norms, evolve, nls, modulation, kernel-norm,
/// ionization-sweep, report, export.
RunManifest run_experiment(const std::string& subcommand, const RunConfig& cfg, const RunOptions& opt);

/// Rough upper bound of the working set in bytes; run_experiment refuses runs above the cap.
double estimate_memory(const std::string& subcommand, const RunConfig& cfg);

/// Runs f(0..count-1) on up to `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& f);

// Shared experiment kernels (also used by the acceptance gate).

/// h12 synthesis shifted to start at 0 and rescaled to sup-norm `sup`.
PathComponent matched_h12(double sup, double q, int K, std::uint64_t seed, double T, double dt);
/// Brownian path rescaled to sup-norm `sup`.
PathComponent matched_brownian(double sup, std::uint64_t seed, double T, double dt);
/// Path whose only nonzero channel is D along `axis`.
ParamPath position_path(int dim, const PathComponent& c, int axis = 0);

struct IonizationPoint {
    double amplitude = 0.0;
    double tail_min = 0.0;
    double transfer = 0.0;
    double max_boundary = 0.0;
    bool breach = false;
};
struct IonizationSweep {
    std::vector<IonizationPoint> points;
    double stationary_tail_min = 0.0;
    double spearman = 0.0;
    double threshold = 0.0; // largest amplitude with tail_min ≥ 0.5 (0 if none)
};
IonizationSweep ionization_sweep(const EvolveConfig& base, const RVec& amplitudes, double q, int K,
                                 std::uint64_t seed, int workers);

struct ContrastPair {
    double h12_tail = 0.0;
    double brownian_tail = 0.0;
    bool breach = false;
};
std::vector<ContrastPair> brownian_contrast(const EvolveConfig& base, double sup, int pairs, double q,
                                            int K, std::uint64_t seed, int workers);

struct KernelSweep {
    RVec eps;
    RVec norms;
    LinearFit fit;
    bool converged = true;
    double zero_norm = 0.0;
};
/// Perturbation π = ε·u(t) in one channel (gamma, alpha or beta), u(t) = sin(πt/T), sup u = 1.
ParamPath kernel_perturbation(int dim, double eps, const std::string& component, double T, double dt);
KernelSweep kernel_norm_sweep(const Grid& grid, const PotentialProfile& profile, const KernelConfig& kc,
                              std::uint64_t seed);

void write_diagnostics_csv(const std::filesystem::path& file, const TrajectoryBundle& run);
/// Tidy CSV for one figure; fitted parameters go in '#' comment lines.
std::filesystem::path export_plot_data(const std::filesystem::path& run_dir, const std::string& kind,
                                       const std::filesystem::path& out = {});

} // namespace rps
