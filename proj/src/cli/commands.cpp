#include "hyobs/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hyobs/cli/benchmark.hpp"
#include "hyobs/cli/config.hpp"
#include "hyobs/cli/report.hpp"

namespace hyobs::cli {

namespace {

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

lmi::SolverOptions solver_options(const CommandOptions& opts) {
    lmi::SolverOptions o;
    if (opts.tolerance) {
        if (!(*opts.tolerance > 0.0) || !(*opts.tolerance < 1.0)) {
            throw UsageError("--tolerance must lie in (0, 1)");
        }
        o.tolerance = *opts.tolerance;
    }
    return o;
}

ProblemConfig load_with_overrides(const CommandOptions& opts) {
    if (opts.config.empty()) {
        throw UsageError("--config is required");
    }
    ProblemConfig config = load_config(opts.config);
    DesignSection& d = config.design;
    if (opts.delta) {
        if (!(*opts.delta > 0.0)) throw UsageError("--delta must be positive");
        d.delta = opts.delta;
        d.delta_grid.clear();
    }
    if (opts.eta) {
        if (!(*opts.eta > 0.0)) throw UsageError("--eta must be positive");
        d.eta = opts.eta;
        d.eta_grid.clear();
    }
    if (opts.grid) {
        if (d.delta_grid.empty()) d.delta_grid = logspace(1e-3, 1.0, 12);
        if (d.eta_grid.empty()) d.eta_grid = logspace(1e-6, 1e-1, 8);
        d.delta.reset();
        d.eta.reset();
    }
    if (opts.seed && config.simulation) {
        config.simulation->sampling.seed = *opts.seed;
    }
    return config;
}

std::vector<double> delta_values(const DesignSection& d) { return d.delta ? std::vector<double>{*d.delta} : d.delta_grid; }
std::vector<double> eta_values(const DesignSection& d) { return d.eta ? std::vector<double>{*d.eta} : d.eta_grid; }

std::filesystem::path prepare_out(const CommandOptions& opts) {
    std::filesystem::path out(opts.out);
    std::filesystem::create_directories(out);
    return out;
}

int exit_for(lmi::SolveStatus s) {
    switch (s) {
        case lmi::SolveStatus::optimal:
        case lmi::SolveStatus::feasible: return kExitOk;
        case lmi::SolveStatus::infeasible: return kExitInfeasible;
        case lmi::SolveStatus::numerical_failure: return kExitNumericalFailure;
    }
    return kExitNumericalFailure;
}

// A grid with no success is "infeasible" only when every point was proven infeasible.
int exit_for_grid(const std::vector<lmi::SolveStatus>& statuses) {
    for (auto s : statuses) {
        if (s == lmi::SolveStatus::optimal || s == lmi::SolveStatus::feasible) return kExitOk;
    }
    for (auto s : statuses) {
        if (s != lmi::SolveStatus::infeasible) return kExitNumericalFailure;
    }
    return kExitInfeasible;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct SimulationRun {
    HybridArc arc;  // error coordinates
    HybridState initial;
    std::optional<GesEnvelope> envelope;
    CostEvaluation cost;
    std::optional<MonotonicityReport> monotonicity;
    std::optional<double> cost_bound;
};

SimulationRun run_simulation(const ProblemConfig& config, const GainsFile& gains) {
    const SimulationSection& s = *config.simulation;
    const SamplingSequence sampling = generate_sampling(s.sampling, config.timing, s.horizon);
    const double tau0 = s.initial.tau.value_or(sampling.times().front());
    SimulationOptions so;
    so.dense_points = s.dense_points;
    SimulationRun run;
    if (s.initial.form == InitialCondition::Form::plant_observer) {
        PlantInit init{s.initial.z, s.initial.zhat, s.initial.theta, tau0};
        run.arc = to_error_coordinates(simulate_plant(config.plant, gains.gains, init, sampling, s.horizon, so),
                                       config.plant);
    } else {
        ErrorInit init{s.initial.eps, s.initial.theta_tilde, tau0};
        run.arc = simulate_error(config.plant, gains.gains, init, sampling, s.horizon, so);
    }
    run.initial = run.arc.error_state(run.arc.intervals.front().points.front(), config.plant.C());
    if (distance_to_attractor(run.initial, config.timing) > 0.0) {
        run.envelope = fit_ges_envelope(run.arc, config.plant, config.timing);
    }
    run.cost = evaluate_cost(run.arc, config.design.weights());
    if (gains.certificate) {
        run.monotonicity = check_lyapunov_monotonicity(run.arc, config.plant, *gains.certificate, config.timing);
        run.cost_bound = evaluate_V(*gains.certificate, run.initial, config.timing);
    }
    return run;
}

Json simulation_summary(const SimulationRun& run) {
    Json doc;
    doc["jumps"] = run.arc.jumps.size();
    doc["flow_intervals"] = run.arc.intervals.size();
    doc["envelope"] = run.envelope ? to_json(*run.envelope) : Json(nullptr);
    doc["cost"] = to_json(run.cost);
    if (run.monotonicity) doc["lyapunov_monotonicity"] = to_json(*run.monotonicity);
    if (run.cost_bound) {
        doc["cost_bound"] = *run.cost_bound;
        doc["cost_within_bound"] = run.cost.total <= *run.cost_bound;
    }
    return doc;
}

void write_arc_files(const std::filesystem::path& dir, const std::string& stem, const SimulationRun& run,
                     const ProblemConfig& config, const LyapunovCertificate* cert) {
    std::ostringstream arc;
    write_arc_csv(arc, run.arc, config.plant, config.timing, cert);
    write_text_file(dir / (stem + "arc.csv"), arc.str());
    std::ostringstream jumps;
    write_jumps_csv(jumps, run.arc);
    write_text_file(dir / (stem + "jumps.csv"), jumps.str());
}

// min over the analysis conditions of the distance to the boundary.
double certificate_margin(const CertificateReport& r) {
    return std::min({-r.flow_vertex_eigs[0], -r.flow_vertex_eigs[1], -r.jump_eig});
}

struct VerifyScan {
    Json table = Json::array();
    std::optional<VerifyOutcome> best;
    std::vector<lmi::SolveStatus> statuses;
};

VerifyScan scan_verify(const ProblemConfig& config, const ObserverGains& gains, const std::vector<double>& deltas,
                       const std::vector<double>& etas, const lmi::SolverOptions& options) {
    VerifyScan scan;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (double delta : deltas) {
        for (double eta : etas) {
            VerifyOutcome v = verify_gains(config.plant, gains, config.timing, delta, eta, options);
            Json row;
            row["delta"] = delta;
            row["eta"] = eta;
            row["status"] = lmi::to_string(v.status);
            row["found"] = v.found();
            row["margin"] = v.found() ? Json(certificate_margin(*v.report)) : Json(nullptr);
            row["diagnostics"] = v.diagnostics;
            scan.table.push_back(std::move(row));
            scan.statuses.push_back(v.status);
            if (v.found() && certificate_margin(*v.report) > best_margin) {
                best_margin = certificate_margin(*v.report);
                scan.best = std::move(v);
            }
        }
    }
    return scan;
}

Json verify_best_json(const VerifyScan& scan) {
    if (!scan.best) return nullptr;
    Json doc;
    doc["certificate"] = to_json(*scan.best->certificate);
    doc["margin"] = certificate_margin(*scan.best->report);
    doc["report"] = to_json(*scan.best->report);
    doc["residuals"] = to_json(scan.best->residuals);
    return doc;
}

}  // namespace

int cmd_design(const CommandOptions& opts, std::ostream& log) {
    const ProblemConfig config = load_with_overrides(opts);
    const lmi::SolverOptions options = solver_options(opts);
    const auto out = prepare_out(opts);
    Json report = report_header("design", config);
    report["solver_tolerance"] = options.tolerance;

    std::optional<DesignResult> result;
    int code = kExitOk;
    if (config.design.has_grid()) {
        GridReport grid = grid_search(config.plant, config.timing, config.design.weights(),
                                      delta_values(config.design), eta_values(config.design), options);
        report["grid"] = to_json(grid.table);
        std::vector<lmi::SolveStatus> statuses;
        for (const auto& e : grid.table) statuses.push_back(e.status);
        code = exit_for_grid(statuses);
        result = std::move(grid.best);
        log << "grid of " << grid.table.size() << " points: " << (result ? "best objective " : "no feasible point");
        if (result) log << format_real(result->objective);
        log << "\n";
    } else {
        DesignOutcome d = design_optimal(config.plant, config.timing, config.design.weights(), *config.design.delta,
                                         *config.design.eta, options);
        report["status"] = lmi::to_string(d.status);
        report["solver_diagnostics"] = d.diagnostics;
        if (!d.result) report["residuals"] = to_json(d.residuals);
        code = exit_for(d.status);
        result = std::move(d.result);
        log << "design: " << lmi::to_string(d.status) << "\n";
    }
    report["result"] = result ? to_json(*result) : Json(nullptr);
    if (result) {
        write_json_file((out / "gains.json").string(), to_json(GainsFile{result->gains, result->certificate}));
        log << "trace(P1) = " << format_real(result->trace_P1) << "\n";
    }
    write_json_file((out / "report.json").string(), report);
    return code;
}

int cmd_verify(const CommandOptions& opts, std::ostream& log) {
    const ProblemConfig config = load_with_overrides(opts);
    if (opts.gains.empty()) throw UsageError("--gains is required");
    const GainsFile gains = load_gains(opts.gains, config.plant);
    const lmi::SolverOptions options = solver_options(opts);
    const auto out = prepare_out(opts);

    const VerifyScan scan = scan_verify(config, gains.gains, delta_values(config.design), eta_values(config.design),
                                        options);
    Json report = report_header("verify", config);
    report["solver_tolerance"] = options.tolerance;
    report["gains"] = to_json(GainsFile{gains.gains, std::nullopt});
    report["grid"] = scan.table;
    report["best"] = verify_best_json(scan);
    write_json_file((out / "report.json").string(), report);
    if (scan.best) {
        write_json_file((out / "gains.json").string(), to_json(GainsFile{gains.gains, *scan.best->certificate}));
        log << "certificate found, margin " << format_real(certificate_margin(*scan.best->report)) << "\n";
    } else {
        log << "no certificate found on " << scan.statuses.size() << " grid points\n";
    }
    return exit_for_grid(scan.statuses);
}

int cmd_simulate(const CommandOptions& opts, std::ostream& log) {
    const ProblemConfig config = load_with_overrides(opts);
    if (!config.simulation) throw ConfigError("/simulation", "required field is missing");
    if (opts.gains.empty()) throw UsageError("--gains is required");
    const GainsFile gains = load_gains(opts.gains, config.plant);
    const auto out = prepare_out(opts);

    const SimulationRun run = run_simulation(config, gains);
    write_arc_files(out, "", run, config, gains.certificate ? &*gains.certificate : nullptr);
    Json report = report_header("simulate", config);
    report["gains"] = to_json(gains);
    report["simulation"] = simulation_summary(run);
    write_json_file((out / "report.json").string(), report);
    log << "simulated " << run.arc.jumps.size() << " jumps";
    if (run.envelope) log << ", fitted lambda " << format_real(run.envelope->lambda);
    log << "\n";
    return kExitOk;
}

namespace {

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

bool gains_within(const Matrix& got, const Matrix& want, double rel) {
    for (Eigen::Index i = 0; i < want.size(); ++i) {
        if (!within_rel(got(i), want(i), rel)) return false;
    }
    return true;
}

struct Checks {
    std::ostream& log;
    Json list = Json::array();
    bool all = true;

    void add(const std::string& name, bool pass, const std::string& detail, double tolerance) {
        log << (pass ? "PASS " : "FAIL ") << name << " (" << detail << ")\n";
        list.push_back({{"check", name}, {"passed", pass}, {"detail", detail}, {"tolerance", tolerance}});
        all = all && pass;
    }
};

// Short form for console lines; files keep 17 digits.
std::string show(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string matrix_text(const Matrix& m) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (i) s += ", ";
        s += show(m(i));
    }
    return s + "]";
}

}  // namespace

int cmd_reproduce(const CommandOptions& opts, std::ostream& log) {
    ProblemConfig config = benchmark_config();
    if (opts.seed) config.simulation->sampling.seed = *opts.seed;
    const lmi::SolverOptions options = solver_options(opts);
    const auto out = prepare_out(opts);
    const double delta = *config.design.delta;
    const double eta = *config.design.eta;

    Json report = report_header("reproduce", config);
    report["solver_tolerance"] = options.tolerance;
    Checks checks{log};
    int code = kExitOk;
    auto stage_failed = [&](const std::string& stage, int c) {
        log << "stage " << stage << " failed\n";
        if (code == kExitOk) code = c;
    };

    std::ostringstream table;
    table << "case,alpha1,alpha2,status,trace_P1,trace_P1_reference,L1,L2,H,F1,F2,L1_reference,L2_reference,"
             "H_reference,F1_reference,F2_reference\n";
    Json designs;
    for (const BenchmarkCase& bc : benchmark_cases()) {
        const Matrix& pl = bc.reference.L();
        const Matrix& ph = bc.reference.H();
        const Matrix& pf = bc.reference.F();
        std::string status = "reference";
        std::optional<DesignResult> r;
        if (bc.designed) {
            DesignWeights w = config.design.weights();
            w.alpha1 = bc.alpha1;
            w.alpha2 = bc.alpha2;
            DesignOutcome d = design_optimal(config.plant, config.timing, w, delta, eta, options);
            status = lmi::to_string(d.status);
            designs[bc.name] = {{"status", status},
                                {"alpha1", bc.alpha1},
                                {"alpha2", bc.alpha2},
                                {"solver_diagnostics", d.diagnostics},
                                {"result", d.result ? to_json(*d.result) : Json(nullptr)}};
            log << "design case " << bc.name << ": " << status << "\n";
            if (!d.result) stage_failed("design case " + bc.name, exit_for(d.status));
            r = std::move(d.result);
        }
        auto cell = [&](auto get) { return r ? format_real(get(*r)) : std::string(); };
        table << bc.name << "," << format_real(bc.alpha1) << "," << format_real(bc.alpha2) << "," << status << ","
              << cell([](const DesignResult& x) { return x.trace_P1; }) << ","
              << (bc.reference_trace_P1 ? format_real(*bc.reference_trace_P1) : "") << ","
              << cell([](const DesignResult& x) { return x.gains.L()(0); }) << ","
              << cell([](const DesignResult& x) { return x.gains.L()(1); }) << ","
              << cell([](const DesignResult& x) { return x.gains.H()(0); }) << ","
              << cell([](const DesignResult& x) { return x.gains.F()(0); }) << ","
              << cell([](const DesignResult& x) { return x.gains.F()(1); }) << "," << format_real(pl(0)) << ","
              << format_real(pl(1)) << "," << format_real(ph(0)) << "," << format_real(pf(0)) << ","
              << format_real(pf(1)) << "\n";

        if (!bc.designed) continue;
        const std::string trace_name = "case " + bc.name + " trace(P1) within 1% of " +
                                       show(*bc.reference_trace_P1);
        checks.add(trace_name, r && within_rel(r->trace_P1, *bc.reference_trace_P1, 0.01),
                   r ? "got " + show(r->trace_P1) : "no design", 0.01);
        if (bc.name == "III") {
            const bool ok = r && gains_within(r->gains.L(), pl, 0.05) && gains_within(r->gains.F(), pf, 0.05) &&
                            gains_within(r->gains.H(), ph, 0.05);
            checks.add("case III gains within 5% elementwise", ok,
                       r ? "L " + matrix_text(r->gains.L()) + ", H " + matrix_text(r->gains.H()) + ", F " +
                               matrix_text(r->gains.F())
                         : "no design",
                       0.05);
        } else if (bc.name == "II") {
            checks.add("case II F within 5% elementwise", r && gains_within(r->gains.F(), pf, 0.05),
                       r ? "F " + matrix_text(r->gains.F()) : "no design", 0.05);
        } else if (bc.name == "I") {
            const bool ok = r && std::max(r->gains.L().cwiseAbs().maxCoeff(), r->gains.H().cwiseAbs().maxCoeff()) >= 1e3;
            checks.add("case I gains of magnitude at least 1e3", ok,
                       r ? "L " + matrix_text(r->gains.L()) + ", H " + matrix_text(r->gains.H()) : "no design", 1e3);
        }
    }
    report["designs"] = std::move(designs);
    write_text_file(out / "gains_table.csv", table.str());

    Json verifications;
    for (const std::string name : {"III", "IV", "V"}) {
        const BenchmarkCase& bc = benchmark_case(name);
        VerifyOutcome v = verify_gains(config.plant, bc.reference, config.timing, delta, eta, options);
        Json row;
        row["status"] = lmi::to_string(v.status);
        row["found"] = v.found();
        row["diagnostics"] = v.diagnostics;
        if (v.found()) {
            row["certificate"] = to_json(*v.certificate);
            row["report"] = to_json(*v.report);
        }
        verifications[name] = std::move(row);
        log << "verify case " << name << ": " << (v.found() ? "certificate found" : lmi::to_string(v.status)) << "\n";
    }
    report["verifications"] = std::move(verifications);

    Json simulations;
    std::map<std::string, SimulationRun> runs;
    for (const std::string name : {"III", "IV", "V"}) {
        const BenchmarkCase& bc = benchmark_case(name);
        SimulationRun run = run_simulation(config, GainsFile{bc.reference, std::nullopt});
        write_arc_files(out, "trajectory_" + name + "_", run, config, nullptr);
        simulations[name] = simulation_summary(run);
        runs.emplace(name, std::move(run));
    }
    report["simulations"] = std::move(simulations);

    const auto lambda = [&](const std::string& n) { return runs.at(n).envelope->lambda; };
    checks.add("case III fitted decay rate positive", lambda("III") > 0.0, "lambda " + show(lambda("III")), 0.0);
    checks.add("case V fitted decay rate below case III", lambda("V") < lambda("III"),
               "lambda V " + show(lambda("V")) + ", III " + show(lambda("III")), 0.0);
    const JumpSizeComparison cmp = compare_jump_sizes(runs.at("III").arc, runs.at("IV").arc, 1);
    {
        std::ostringstream detail;
        detail << cmp.strictly_smaller << " of " << cmp.matched << " jumps";
        if (cmp.first_violation_t) detail << ", first violation at t = " << show(*cmp.first_violation_t);
        checks.add("case III jumps in eps2 strictly smaller than case IV", cmp.all_strictly_smaller(), detail.str(),
                   0.0);
        Json jc;
        jc["matched"] = cmp.matched;
        jc["strictly_smaller"] = cmp.strictly_smaller;
        jc["t"] = cmp.times;
        jc["case_III"] = cmp.lhs;
        jc["case_IV"] = cmp.rhs;
        report["jump_size_comparison_eps2"] = std::move(jc);
    }
    report["checks"] = checks.list;
    report["all_checks_passed"] = checks.all;
    write_json_file((out / "report.json").string(), report);

    if (code == kExitOk && !checks.all) code = kExitChecksFailed;
    return code;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid observer design, certification and simulation for sampled LTI plants", "hyobs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    CommandOptions opts;

    auto add_common = [&](CLI::App* sub, bool gains) {
        sub->add_option("--config", opts.config, "problem configuration (JSON)")->required();
        if (gains) sub->add_option("--gains", opts.gains, "gains file (JSON)")->required();
        sub->add_option("--out", opts.out, "output directory")->capture_default_str();
        sub->add_option("--seed", opts.seed, "sampling seed, overrides the configuration");
        sub->add_option("--delta", opts.delta, "fixed delta, overrides the configuration");
        sub->add_option("--eta", opts.eta, "fixed eta, overrides the configuration");
        sub->add_flag("--grid", opts.grid, "search the delta/eta grid");
        sub->add_option("--tolerance", opts.tolerance, "solver tolerance");
    };
    CLI::App* design = app.add_subcommand("design", "solve the guaranteed-cost design");
    add_common(design, false);
    CLI::App* verify = app.add_subcommand("verify", "search a Lyapunov certificate for given gains");
    add_common(verify, true);
    CLI::App* simulate = app.add_subcommand("simulate", "simulate the error dynamics for given gains");
    add_common(simulate, true);
    CLI::App* reproduce = app.add_subcommand("reproduce", "run the built-in benchmark end to end");
    reproduce->add_option("--out", opts.out, "output directory")->capture_default_str();
    reproduce->add_option("--seed", opts.seed, "sampling seed");
    reproduce->add_option("--tolerance", opts.tolerance, "solver tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*design) return cmd_design(opts, out);
        if (*verify) return cmd_verify(opts, out);
        if (*simulate) return cmd_simulate(opts, out);
        return cmd_reproduce(opts, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SimulationError& e) {
        err << "simulation failed: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
}

}  // namespace hyobs::cli
