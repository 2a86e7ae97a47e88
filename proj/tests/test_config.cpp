#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rpslab/config.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/experiments.hpp"

using namespace rps;
namespace fs = std::filesystem;

namespace {

const char* kFree = R"(
[run]
seed = 4
[grid]
dim = 1
n = 128
L = 16
[path]
T = 0.5
dt = 0.01
D_x = sine amplitude=0.1 omega=2
[evolve]
dt = 0.01
T = 0.5
record_stride = 5
snapshot_stride = 25
)";

fs::path fresh_root(const std::string& name) {
    const auto d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("config parses and echoes canonically") {
    const auto c = parse_config(kFree);
    CHECK(c.seed == 4);
    CHECK(c.grid.n == 128);
    CHECK(c.evolve.steps() == 50);
    CHECK(c.path.D[0].values[25] == doctest::Approx(0.1 * std::sin(0.5)));
    // reordered sections, comments and spacing give the same echo
    const auto d = parse_config("# c\n[evolve]\nT=0.5\nrecord_stride=5\ndt=0.01\nsnapshot_stride = 25\n"
                                "[path]\nD_x = sine amplitude=0.1 omega=2\ndt=0.01\nT=0.5\n"
                                "[grid]\nL=16\nn=128\ndim=1\n[run]\nseed=4\n");
    CHECK(c.echo.dump() == d.echo.dump());
    CHECK(compute_run_id(c.echo, "evolve") == compute_run_id(d.echo, "evolve"));
    CHECK(compute_run_id(c.echo, "evolve") != compute_run_id(c.echo, "nls"));
    CHECK(parse_config(kFree, 5).seed == 5);
}

TEST_CASE("schema errors name the field") {
    auto msg = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            return std::string(e.kind()) + ":" + e.what();
        }
        return std::string("no error");
    };
    CHECK(msg("[grid]\nbogus = 1\n").find("grid.bogus") != std::string::npos);
    CHECK(msg("[nosuch]\nx=1\n").find("nosuch") != std::string::npos);
    CHECK(msg("[grid]\nn = abc\n").find("grid.n") != std::string::npos);
    CHECK(msg("[path]\nT=1\ndt=0.1\nD_x = wiggle amplitude=1\n").find("path.D_x") != std::string::npos);
    CHECK(msg("[path]\nT=1\ndt=0.1\nD_x = h12 amplitude=1 q=0.4\n") != "no error");
    CHECK(msg("[grid]\nbogus = 1\n").rfind("schema:", 0) == 0);
}

TEST_CASE("path component grammar") {
    const auto bv = parse_component("bv jumps=0.25:1;0.5:-0.5", 1.0, 0.125, 1, "x");
    CHECK(bv.tag == Modality::bv);
    CHECK(bv.values.back() == doctest::Approx(0.5));
    const auto h1 = parse_component("h12 amplitude=0.2 q=1.1 K=16", 1.0, 0.01, 3, "x");
    const auto h2 = parse_component("h12 amplitude=0.2 q=1.1 K=16", 1.0, 0.01, 3, "x");
    CHECK(h1.values == h2.values);
    const auto c = parse_component("constant value=2", 1.0, 0.5, 1, "x");
    CHECK(c.values == RVec{2.0, 2.0, 2.0});
}

TEST_CASE("evolve run: manifest lists every output, rerun gives the same id and bytes") {
    const auto root = fresh_root("rpslab_test_runs");
    RunOptions opt;
    opt.output_root = root;
    const auto cfg = parse_config(kFree);
    const auto m1 = run_experiment("evolve", cfg, opt);
    for (const auto& f : m1.outputs) CHECK(fs::exists(m1.dir / f));
    CHECK(fs::exists(m1.dir / "diagnostics.csv"));
    CHECK(fs::exists(m1.dir / "snap_00001.bin"));
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto csv1 = slurp(m1.dir / "diagnostics.csv");
    const auto m2 = run_experiment("evolve", cfg, opt);
    CHECK(m1.run_id == m2.run_id);
    CHECK(csv1 == slurp(m2.dir / "diagnostics.csv"));

    const auto out = export_plot_data(m1.dir, "decay_fit");
    CHECK(slurp(out).rfind("# slope", 0) == 0);
    CHECK_THROWS_AS(export_plot_data(root / "missing", "decay_fit"), DataError);
    CHECK_THROWS_AS(export_plot_data(m1.dir, "nonsense"), ConfigError);
    fs::remove_all(root);
}

TEST_CASE("memory cap is refused before anything is written") {
    const auto root = fresh_root("rpslab_test_cap");
    RunOptions opt;
    opt.output_root = root;
    auto cfg = parse_config("[run]\nmemory_cap_gb = 0.001\n[grid]\ndim = 3\nn = 128\nL = 10\n");
    CHECK_THROWS_AS(run_experiment("evolve", cfg, opt), ResourceError);
    CHECK_FALSE(fs::exists(root));
}

TEST_CASE("kernel-norm sweep writes a slope") {
    const auto root = fresh_root("rpslab_test_kernel");
    RunOptions opt;
    opt.output_root = root;
    opt.sweep = true;
    const auto cfg = parse_config("[grid]\ndim=1\nn=32\nL=4\n[potential]\nkind=gaussian\ndepth=2\nwidth=1\n"
                                  "[kernel]\nslices=8\ndt=0.05\nepsilons=0.01,0.1\nmax_iter=20\n");
    const auto m = run_experiment("kernel-norm", cfg, opt);
    CHECK(m.summary.at("zero_norm").get<double>() == 0.0);
    CHECK(m.summary.at("slope").get<double>() > 0.3);
    const auto out = export_plot_data(m.dir, "slope_sweep");
    CHECK(fs::exists(out));
    fs::remove_all(root);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
        if (i == 7) throw DataError("x");
    }));
}
