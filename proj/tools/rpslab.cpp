#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rpslab/config.hpp"
#include "rpslab/errors.hpp"
#include "rpslab/experiments.hpp"

namespace {

int fail(const std::string& kind, const std::string& message) {
    nlohmann::json j{{"error", {{"kind", kind}, {"message", message}}}};
    std::cerr << j.dump() << '\n';
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rpslab: Schrodinger evolution under rough moving potentials"};
    app.require_subcommand(1);

    std::string config_file;
    std::optional<std::uint64_t> seed;
    int workers = 1;
    app.add_option("--config", config_file, "INI run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override [run] seed");
    app.add_option("--workers", workers, "parallel child runs in sweeps")->check(CLI::PositiveNumber);

    std::string sub;
    rps::RunOptions opt;
    std::vector<std::string> operands;

    auto plain = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        c->callback([&sub, name] { sub = name; });
        return c;
    };
    plain("bound-states", "solve for the bound states of the configured potential");
    plain("evolve", "linear evolution along the configured path");
    plain("nls", "nonlinear evolution and Strichartz comparison");
    plain("modulation", "integral-form modulation equation vs direct projection");
    plain("ionization-sweep", "amplitude sweep and Brownian contrast");
    auto* kn = plain("kernel-norm", "norm of the perturbed Duhamel kernel");
    kn->add_flag("--sweep", opt.sweep, "run the epsilon sweep from [kernel]");
    auto* rep = plain("report", "collect manifests of finished runs");
    rep->add_option("runs", operands, "run directories")->required();
    auto* ex = plain("export", "write plot data for a finished run");
    ex->add_option("run", operands, "run directory and kind (decay_fit, ionization_curve, slope_sweep, norm_ratio)")
        ->required()
        ->expected(2);

    auto* paths = app.add_subcommand("paths", "path generation and norms");
    paths->require_subcommand(1);
    paths->add_subcommand("gen", "write the configured path as CSV")->callback([&] { sub = "paths-gen"; });
    auto* pn = paths->add_subcommand("norms", "norm report for a path CSV or the configured path");
    pn->add_option("file", operands, "path CSV");
    pn->callback([&] { sub = "paths-norms"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what());
    }

    try {
        const rps::RunConfig cfg = config_file.empty() ? rps::parse_config("", seed) : rps::load_config(config_file, seed);
        opt.workers = workers;
        opt.args = operands;
        const rps::RunManifest man = rps::run_experiment(sub, cfg, opt);
        nlohmann::json out{{"run_id", man.run_id}, {"dir", man.dir.string()}, {"flags", man.flags}};
        std::cout << out.dump() << '\n';
        return 0;
    } catch (const rps::Error& e) {
        return fail(e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}
