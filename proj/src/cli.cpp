#include "lfdd/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "lfdd/checks.hpp"
#include "lfdd/config.hpp"
#include "lfdd/errors.hpp"
#include "lfdd/io.hpp"
#include "lfdd/spectral.hpp"

namespace lfdd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::string format = "csv";
    std::vector<std::string> overrides;
    std::string level = "fast";
    std::string fault;
};

json load_with_overrides(const Options& o) {
    json cfg = o.config_path.empty() ? json::object() : load_config(o.config_path);
    for (const auto& s : o.overrides) apply_override(cfg, s);
    return cfg;
}

json effective_config(const json& cfg, const Options& o, const Problem& p) {
    json resolved = {{"n_nodes", p.sim.grid.n_nodes()},
                     {"x_left", p.sim.grid.x_left()},
                     {"x_right", p.sim.grid.x_right()},
                     {"rho", p.sim.material.rho()},
                     {"bc", {{"left", to_string(p.sim.bc.left)}, {"right", to_string(p.sim.bc.right)}}},
                     {"classify_tol", p.classify_tol}};
    if (p.has_time) {
        resolved["integrator"] = to_string(p.sim.integrator);
        resolved["dt"] = p.sim.dt;
        resolved["t_end"] = p.sim.t_end;
        resolved["record_every"] = p.sim.record_every;
        resolved["snapshot_every"] = p.sim.snapshot_every;
        resolved["cfl_safety"] = p.sim.cfl_safety;
    }
    if (!p.scenario.empty()) resolved["scenario"] = p.scenario;
    return {{"config", cfg}, {"overrides", o.overrides}, {"resolved", resolved}};
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const json cfg = load_with_overrides(o);
    const Problem p = build_problem(cfg, true);
    const RunResult r = run(p.sim);
    const SimRecord& rec = r.record;

    fs::create_directories(o.out_dir);
    const json eff = effective_config(cfg, o, p);
    write_json(fs::path(o.out_dir) / "effective_config.json", eff);
    if (o.format == "json") {
        write_json(fs::path(o.out_dir) / "record.json", {{"effective_config", eff}, {"record", record_json(rec)}});
    } else {
        write_record_csv(fs::path(o.out_dir) / "record.csv", rec);
    }
    for (const Snapshot& s : rec.snapshots) {
        const std::string stem = "snapshot_" + std::to_string(s.step);
        if (o.format == "json") {
            write_json(fs::path(o.out_dir) / (stem + ".json"), snapshot_json(s.state, p.sim.grid, p.sim.material));
        } else {
            write_snapshot_csv(fs::path(o.out_dir) / (stem + ".csv"), s.state, p.sim.grid, p.sim.material);
        }
    }

    double max_res = 0.0;
    for (double x : rec.max_residual) max_res = std::max(max_res, x);
    out << "E(0)                    = " << format_double(rec.energy.front()) << '\n'
        << "E(t_end)                = " << format_double(rec.energy.back()) << '\n'
        << "E(t_end)/E(0)           = "
        << format_double(rec.energy.front() > 0.0 ? rec.energy.back() / rec.energy.front() : 1.0) << '\n'
        << "cumulative dissipation  = " << format_double(rec.cumulative_dissipation.back()) << '\n'
        << "max constraint residual = " << format_double(max_res) << '\n'
        << "steps                   = " << rec.steps.back() << '\n';
    return kExitOk;
}

int cmd_eigen(const Options& o, std::ostream& out, std::ostream& err) {
    const json cfg = load_with_overrides(o);
    const Problem p = build_problem(cfg, false);
    const ModeSet ms = analyze(p.sim.grid, p.sim.material, p.sim.bc, p.alpha, p.classify_tol);

    fs::create_directories(o.out_dir);
    const json eff = effective_config(cfg, o, p);
    write_json(fs::path(o.out_dir) / "effective_config.json", eff);
    if (o.format == "json") {
        json j = modes_json(ms);
        j["effective_config"] = eff;
        write_json(fs::path(o.out_dir) / "modes.json", j);
    } else {
        write_modes_csv(fs::path(o.out_dir) / "modes.csv", ms);
    }
    const CaseSummary s = summarize(ms);
    out << "modes = " << ms.size() << ", Case1 = " << s.case1 << ", Case2 = " << s.case2 << '\n';
    if (ms.repeated_eigenvalue_flag) {
        err << "warning: repeated eigenvalues detected; the no-repeated-eigenvalue assumption behind the "
               "Case 1 / Case 2 dichotomy does not hold for this problem\n";
    }
    return kExitOk;
}

int cmd_scenarios(const Options& o, std::ostream& out) {
    const auto list = list_scenarios();
    if (o.format == "json") {
        json j = json::array();
        for (const auto& s : list) j.push_back({{"name", s.name}, {"description", s.description}});
        out << j.dump(2) << '\n';
    } else {
        for (const auto& s : list) out << std::left << std::setw(26) << s.name << s.description << '\n';
    }
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    CheckOptions opts;
    opts.level = o.level == "full" ? CheckLevel::Full : CheckLevel::Fast;
    if (o.fault == "corrupt-b") opts.build_b = corrupted_b_builder();
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_checks(opts);
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        out << (r.passed ? "[PASS] " : "[FAIL] ") << std::left << std::setw(46) << r.name
            << " measured=" << std::setw(24) << format_double(r.measured) << (r.lower_bound ? " min=" : " tol=")
            << format_double(r.tolerance) << '\n';
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << results.size() - failed << "/" << results.size() << " checks passed in " << std::fixed
        << std::setprecision(1) << secs << " s\n";
    return failed == 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linearized field dislocation dynamics on a 1-D slab", "lfdd"};
    app.require_subcommand(1);
    Options o;

    auto add_io = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        sub->add_option("--set", o.overrides, "override key=value (dotted key, repeatable)");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "time integration");
    add_io(simulate);
    CLI::App* eigen = app.add_subcommand("eigen", "modal analysis and Case 1 / Case 2 classification");
    add_io(eigen);
    CLI::App* scenarios = app.add_subcommand("scenarios", "list the preset scenarios");
    scenarios->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    CLI::App* check = app.add_subcommand("check", "run the property and oracle checks");
    check->add_option("--level", o.level, "fast or full")->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
    check->add_option("--inject-fault", o.fault, "test hook: corrupt-b")->check(CLI::IsMember({"corrupt-b"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try {
        if (*simulate) return cmd_simulate(o, out);
        if (*eigen) return cmd_eigen(o, out, err);
        if (*scenarios) return cmd_scenarios(o, out);
        return cmd_check(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const InputError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalError& e) {
        err << "numerical failure";
        if (e.step() >= 0) err << " at step " << e.step();
        err << ": " << e.what() << '\n';
        return kExitNumericalError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumericalError;
    }
}

}  // namespace lfdd
