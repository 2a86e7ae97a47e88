#pragma once

#include <filesystem>
#include <string>

#include "rpslab/grid.hpp"

namespace rps {

// <stem>.bin: little-endian float64 (re, im) pairs, row-major.
// <stem>.json: {dim, n, L, frame, time, run_id}.
void write_snapshot(const std::filesystem::path& stem, const ComplexField& field,
                    const std::string& run_id);
ComplexField read_snapshot(const std::filesystem::path& stem, std::string* run_id = nullptr);

} // namespace rps
