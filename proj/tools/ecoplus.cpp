#include "ecoplus/csv.hpp"
#include "ecoplus/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ecoplus;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string model = "cpem";
    std::string strategies = "ecoplus,vm";
    std::string vd_list;
    double tm = 0.0;
    double tm_max = 0.0;
    double dt = 0.0;
    int segments = 0;
    std::string out_dir;
    std::string dump_mps;
    bool check = false;
};

Config load_config(const CommonArgs& args) {
    Config cfg = args.config_path.empty() ? Config::defaults() : Config::load(args.config_path);
    if (args.dt > 0.0) cfg.experiment.dt = args.dt;
    return cfg;
}

std::vector<StrategyKind> parse_strategies(const std::string& list) {
    std::vector<StrategyKind> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const std::string token = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!token.empty()) out.push_back(strategy_from_name(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty strategy list");
    return out;
}

std::vector<double> parse_doubles(const std::string& list, const std::vector<double>& fallback) {
    if (list.empty()) return fallback;
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const std::string token = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!token.empty()) out.push_back(std::stod(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path path = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::create_directories(path);
    return path;
}

int cmd_solve(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const ModelKind model = model_from_name(args.model);
    const std::vector<StrategyKind> strategies = parse_strategies(args.strategies);
    const StrategyKind strategy = strategies.front();
    const double vd = args.vd_list.empty() ? cfg.boundary.vd : std::stod(args.vd_list);
    const double tm = args.tm > 0.0 ? args.tm : cfg.boundary.tm;

    Trajectory leader;
    const Trajectory* leader_ptr = nullptr;
    ScenarioFamily family = ScenarioFamily::Single;
    if (cfg.safety.enabled) {
        family = ScenarioFamily::Leading;
        leader = build_leading_profile(cfg, model);
        leader_ptr = &leader;
    }
    const ScenarioSpec spec = make_scenario(cfg, model, family, vd, tm, leader_ptr);
    const int segments = args.segments > 0 ? args.segments : cfg.pwa.segments;
    const PwaSegments pwa = build_pwa(spec.coeffs, cfg.limits.v_max, segments);

    SolutionBundle bundle;
    if (strategy == StrategyKind::DcSurrogate) {
        DcOptions dc_opts;
        dc_opts.v_max = cfg.limits.v_max;
        dc_opts.a_min = cfg.limits.u_min;
        dc_opts.a_max = cfg.limits.u_max;
        const RateFn rate = model == ModelKind::Cpem
                                ? make_cpem_rate(cfg.cpem, cfg.road.slope)
                                : make_kmmk_rate(cfg.kmmk, spec.coeffs, cfg.road.slope);
        const QuadraticSurrogate surrogate =
            fit_surrogate(rate, [](double, double) { return true; }, dc_opts);
        bundle = dc_solve(spec, surrogate, dc_opts, pwa);
    } else if (strategy == StrategyKind::EcoPlus) {
        if (!args.dump_mps.empty()) {
            const fs::path path(args.dump_mps);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            std::ofstream os(path);
            build_problem(spec, strategy, pwa).write_mps(os);
        }
        bundle = solve_ecoplus(spec, pwa);
    } else {
        ConvexProgram prog = build_problem(spec, strategy, pwa);
        for (const auto& warning : prog.build_warnings) std::cerr << "warning: " << warning << "\n";
        if (!args.dump_mps.empty()) {
            const fs::path path(args.dump_mps);
            if (path.has_parent_path()) fs::create_directories(path.parent_path());
            std::ofstream os(path);
            prog.write_mps(os);
        }
        SolveResult res = solve(prog);
        if (res.status != SolveStatus::Optimal) {
            std::cerr << "solve failed: " << to_string(res.status) << " " << res.message << "\n";
            return 2;
        }
        bundle = extract_solution(prog, res, spec, strategy, pwa);
    }
    if (bundle.status != SolveStatus::Optimal) {
        std::cerr << "solve failed: " << to_string(bundle.status) << " " << bundle.diagnostics << "\n";
        return 2;
    }

    const ConsumptionReport consumption = evaluate_consumption(cfg, model, bundle.trajectory);
    const fs::path out = ensure_out_dir(args.out_dir) /
                         ("trajectory_" + std::string(strategy_name(strategy)) + "_" +
                          std::string(model_name(model)) + ".csv");
    write_trajectory_csv(out.string(), bundle.trajectory, &consumption.rates);

    std::cout << "strategy " << strategy_name(strategy) << " tm " << format_g9(tm) << " objective "
              << format_g9(bundle.objective) << " consumption " << format_g9(consumption.total)
              << (model == ModelKind::Cpem ? " kWh" : " mL") << " -> " << out.string() << "\n";

    const ValidationReport audit =
        validate_trajectory(bundle.trajectory, spec.boundary, spec.road, spec.limits, spec.coeffs,
                            spec.safety ? &*spec.safety : nullptr, 1e-6);
    if (args.check && !audit.pass) {
        std::cerr << "validation failed:";
        for (const auto& name : audit.failures()) std::cerr << " " << name;
        std::cerr << "\n";
        return 3;
    }
    return 0;
}

int run_report(const CommonArgs& args, ScenarioFamily family) {
    const Config cfg = load_config(args);
    ExperimentConfig exp;
    exp.family = family;
    exp.model = model_from_name(args.model);
    exp.strategies = parse_strategies(args.strategies);
    exp.vd_list = parse_doubles(args.vd_list, {cfg.boundary.vd});
    exp.pwa_segments = args.segments;
    exp.tm_max = args.tm_max;
    const ScenarioReport report = run_scenario(cfg, exp);

    const fs::path out = ensure_out_dir(args.out_dir);
    for (const auto& vr : report.by_vd) {
        std::ostringstream name;
        name << "sweep_" << family_name(family) << "_" << model_name(exp.model) << "_vd"
             << format_g9(vr.vd) << ".csv";
        std::ofstream os(out / name.str());
        write_sweep_csv(os, vr.curve);
    }
    write_summary(std::cout, report);
    if (args.check && report.audit_failures > 0) {
        std::cerr << "audit failures: " << report.audit_failures << "\n";
        return 3;
    }
    return 0;
}

int cmd_pwa_study(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const ModelKind model = model_from_name(args.model);
    const double vd = args.vd_list.empty() ? 6.0 : std::stod(args.vd_list);

    ExperimentConfig exp;
    exp.model = model;
    exp.strategies = {StrategyKind::EcoPlus};
    exp.tm_max = args.tm_max;
    exp.pwa_segments = args.segments > 0 ? args.segments : cfg.pwa.segments;
    const TradeoffCurve coarse = tradeoff_sweep(cfg, exp, vd);
    exp.pwa_segments = cfg.pwa.oracle_segments;
    const TradeoffCurve fine = tradeoff_sweep(cfg, exp, vd);

    {
        const ResistanceCoefficients coeffs = model_coefficients(cfg, model);
        const PwaSegments seg = build_pwa(coeffs, cfg.limits.v_max,
                                          args.segments > 0 ? args.segments : cfg.pwa.segments);
        std::ofstream os(ensure_out_dir(args.out_dir) / "pwa_segments.csv");
        write_pwa_csv(os, seg);
    }

    const auto coarse_series = coarse.series(StrategyKind::EcoPlus);
    const auto fine_series = fine.series(StrategyKind::EcoPlus);

    const fs::path out = ensure_out_dir(args.out_dir) / "pwa_study.csv";
    std::ofstream os(out);
    os << "tm,objective_k,objective_oracle,rel_diff_pct,ms_k,ms_oracle\n";
    double sum_rel = 0.0, sum_ms_k = 0.0, sum_ms_oracle = 0.0;
    int points = 0;
    std::size_t fi = 0;
    for (const SweepRecord* crec : coarse_series) {
        while (fi < fine_series.size() && fine_series[fi]->grid_index < crec->grid_index) ++fi;
        if (fi >= fine_series.size()) break;
        if (fine_series[fi]->grid_index != crec->grid_index) continue;
        const SweepRecord* frec = fine_series[fi];
        const double rel = relative_difference(crec->objective, frec->objective);
        os << format_g9(crec->tm) << ',' << format_g9(crec->objective) << ','
           << format_g9(frec->objective) << ',' << format_g9(rel) << ',' << format_g9(crec->solve_ms)
           << ',' << format_g9(frec->solve_ms) << "\n";
        sum_rel += rel;
        sum_ms_k += crec->solve_ms;
        sum_ms_oracle += frec->solve_ms;
        ++points;
    }
    if (points == 0) {
        std::cerr << "pwa-study: no common feasible travel times\n";
        return 2;
    }
    std::cout << "pwa-study points " << points << " mean_rel_diff "
              << format_g9(sum_rel / points) << "% mean_ms_k " << format_g9(sum_ms_k / points)
              << " mean_ms_oracle " << format_g9(sum_ms_oracle / points) << "\n";
    if (args.check && !(sum_ms_k < sum_ms_oracle)) {
        std::cerr << "pwa-study: coarse solves were not faster on average\n";
        return 3;
    }
    return 0;
}

int cmd_validate(const CommonArgs& args, const std::string& trajectory_path) {
    const Config cfg = load_config(args);
    const ModelKind model = model_from_name(args.model);
    const Trajectory traj = read_trajectory_csv(trajectory_path);
    BoundarySpec boundary = cfg.boundary;
    if (!args.vd_list.empty()) boundary.vd = std::stod(args.vd_list);
    if (args.tm > 0.0) boundary.tm = args.tm;
    else boundary.tm = traj.horizon * traj.dt;
    const ResistanceCoefficients coeffs = model_coefficients(cfg, model);
    const ValidationReport report =
        validate_trajectory(traj, boundary, cfg.road, cfg.limits, coeffs, nullptr, 1e-6);
    if (report.pass) {
        std::cout << "valid\n";
        return 0;
    }
    std::cerr << "invalid:";
    for (const auto& name : report.failures()) std::cerr << " " << name;
    std::cerr << "\n";
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory optimization toolkit for intersection approaches"};
    app.require_subcommand(0, 1);

    CommonArgs args;
    bool echo_config = false;
    app.add_flag("--echo-config", echo_config, "print the effective configuration and exit");
    app.add_option("--config", args.config_path, "configuration file")->capture_default_str();

    auto add_common = [&args](CLI::App* cmd, bool with_tm) {
        cmd->add_option("--config", args.config_path, "configuration file");
        cmd->add_option("--model", args.model, "consumption model: cpem or kmmk");
        cmd->add_option("--strategy", args.strategies, "comma-separated strategies");
        cmd->add_option("--vd", args.vd_list, "terminal velocities (comma separated)");
        if (with_tm) cmd->add_option("--tm", args.tm, "travel time [s]");
        cmd->add_option("--tm-max", args.tm_max, "sweep upper travel time [s]");
        cmd->add_option("--dt", args.dt, "discretization step [s]");
        cmd->add_option("--segments", args.segments, "PWA segment count");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_flag("--check", args.check, "nonzero exit on failed audits");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one scenario and dump the trajectory");
    add_common(solve_cmd, true);
    solve_cmd->add_option("--dump-mps", args.dump_mps, "write the assembled program in MPS layout");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "tradeoff curves over travel time");
    add_common(sweep_cmd, false);
    CLI::App* scenario_cmd = app.add_subcommand("scenario", "leading-vehicle or comfort study");
    add_common(scenario_cmd, false);
    std::string family = "leading";
    scenario_cmd->add_option("--family", family, "leading or comfort");
    CLI::App* pwa_cmd = app.add_subcommand("pwa-study", "coarse vs fine PWA fidelity and runtime");
    add_common(pwa_cmd, false);
    CLI::App* validate_cmd = app.add_subcommand("validate", "re-check a trajectory CSV");
    add_common(validate_cmd, true);
    std::string trajectory_path;
    validate_cmd->add_option("--trajectory", trajectory_path, "trajectory csv path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (echo_config && app.get_subcommands().empty()) {
            std::cout << load_config(args).render();
            return 0;
        }
        if (solve_cmd->parsed()) return cmd_solve(args);
        if (sweep_cmd->parsed()) return run_report(args, ScenarioFamily::Single);
        if (scenario_cmd->parsed()) return run_report(args, family_from_name(family));
        if (pwa_cmd->parsed()) return cmd_pwa_study(args);
        if (validate_cmd->parsed()) return cmd_validate(args, trajectory_path);
        std::cout << app.help();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
