#include "rpslab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rpslab/errors.hpp"

namespace rps {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
    auto p = stem;
    p += ext;
    return p;
}

void to_le(double* d, std::size_t count) {
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned char b[8];
            std::memcpy(b, &d[i], 8);
            for (int j = 0; j < 4; ++j) std::swap(b[j], b[7 - j]);
            std::memcpy(&d[i], b, 8);
        }
    }
}

} // namespace

void write_snapshot(const std::filesystem::path& stem, const ComplexField& field,
                    const std::string& run_id) {
    std::vector<double> buf(2 * field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        buf[2 * i] = field.values[i].real();
        buf[2 * i + 1] = field.values[i].imag();
    }
    to_le(buf.data(), buf.size());
    {
        std::ofstream out(with_ext(stem, ".bin"), std::ios::binary);
        if (!out) throw DataError("cannot open " + with_ext(stem, ".bin").string());
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    nlohmann::json j{{"dim", field.grid.dim},   {"n", field.grid.n},
                     {"L", field.grid.L},       {"frame", to_string(field.frame)},
                     {"time", field.time},      {"run_id", run_id}};
    std::ofstream js(with_ext(stem, ".json"));
    js << j.dump(2) << "\n";
}

ComplexField read_snapshot(const std::filesystem::path& stem, std::string* run_id) {
    std::ifstream js(with_ext(stem, ".json"));
    if (!js) throw DataError("missing snapshot sidecar " + with_ext(stem, ".json").string());
    nlohmann::json j;
    js >> j;
    Grid g(j.at("dim").get<int>(), j.at("n").get<int>(), j.at("L").get<double>());
    ComplexField f(g, frame_from_string(j.at("frame").get<std::string>()),
                   j.at("time").get<double>());
    if (run_id) *run_id = j.value("run_id", "");
    std::vector<double> buf(2 * g.size());
    std::ifstream in(with_ext(stem, ".bin"), std::ios::binary);
    if (!in) throw DataError("missing snapshot data " + with_ext(stem, ".bin").string());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double)))
        throw DataError("snapshot data is truncated");
    to_le(buf.data(), buf.size());
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = cplx(buf[2 * i], buf[2 * i + 1]);
    return f;
}

} // namespace rps
