#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rpslab/grid.hpp"

namespace rps {

enum class Modality { bv, h12c, brownian, composite, smooth };
std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

/// One scalar channel sampled on t_j = j·dt, j = 0..n.
struct PathComponent {
    RVec values;
    double dt = 0.0;
    Modality tag = Modality::smooth;

    std::size_t count() const { return values.size(); }
    double T() const { return dt * (values.empty() ? 0.0 : double(values.size() - 1)); }
    // Linear interpolation, or the right-continuous step value for BV data.
    double at(double t) const;
};

std::size_t sample_count(double T, double dt);

PathComponent gen_bv_step_path(std::vector<std::pair<double, double>> jumps, double T, double dt);
PathComponent gen_h12_path(double amplitude, double q, int K, std::uint64_t seed, double T,
                           double dt);
PathComponent gen_brownian_path(double sigma2, std::uint64_t seed, double T, double dt);
PathComponent constant_path(double value, double T, double dt);
PathComponent sampled_path(RVec values, double dt, Modality tag = Modality::smooth);

/// Jump list after merging duplicate times (what gen_bv_step_path actually uses).
std::vector<std::pair<double, double>> merge_jumps(std::vector<std::pair<double, double>> jumps);

/// Rough parameter path π = (D, v, β, α) with γ = D + 2∫v (trapezoid).
struct ParamPath {
    int dim = 1;
    double dt = 0.0;
    std::array<PathComponent, 3> D;
    std::array<PathComponent, 3> v;
    PathComponent beta;
    PathComponent alpha;
    std::array<RVec, 3> gamma;
    nlohmann::json metadata = nlohmann::json::object();

    static ParamPath zero(int dim, double T, double dt);

    std::size_t count() const { return beta.count(); }
    double T() const { return beta.T(); }
    double time(std::size_t j) const { return dt * static_cast<double>(j); }

    /// Recompute γ from D and v; throws if the channels disagree in length or step.
    void finalize();
    /// Shift D so that γ(0) = 0 (the Galilean normalization).
    void normalize_origin();

    Vec3 D_at(double t) const;
    Vec3 v_at(double t) const;
    Vec3 gamma_at(double t) const;
    double beta_at(double t) const { return beta.at(t); }
    double alpha_at(double t) const { return alpha.at(t); }
    FrameParams frame_at(double t) const;
    double max_abs_beta() const;
    bool finite() const;
};

// CSV columns t, D_x.., v_x.., beta, alpha; metadata goes to <csv>.json.
void write_path_csv(const std::filesystem::path& csv, const ParamPath& p);
ParamPath read_path_csv(const std::filesystem::path& csv);

} // namespace rps
