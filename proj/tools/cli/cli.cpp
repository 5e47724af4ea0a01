#include "cli.hpp"

#include "config.hpp"
#include "plot.hpp"

#include "ellipsoid_lab/diagnostics.hpp"
#include "ellipsoid_lab/errors.hpp"
#include "ellipsoid_lab/gram.hpp"
#include "ellipsoid_lab/io.hpp"
#include "ellipsoid_lab/parallel.hpp"
#include "ellipsoid_lab/sampling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace ellipsoid_lab::cli {
namespace {

const std::map<std::string, FitMethod> kMethods = {{"identity_perturbation", FitMethod::identity_perturbation},
                                                   {"least_norm", FitMethod::least_norm}};
const std::map<std::string, OutputFormat> kFormats = {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}};
const std::map<std::string, LeastNormObjective> kObjectives = {
    {"frobenius", LeastNormObjective::frobenius},
    {"frobenius_from_identity", LeastNormObjective::frobenius_from_identity}};

nlohmann::json json_real(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double rate(std::size_t hits, std::size_t n) {
    return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

// Runs `body`, mapping library exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn body) {
    try {
        return body();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DegenerateInputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitFailure;
    }
}

// Raw phase flags; merged over the config file by merge_phase_config.
struct PhaseFlags {
    ExperimentConfig cfg;
    std::string config_path;
    std::string method;
    std::string objective;
    std::string format;
};

void add_phase_options(CLI::App& cmd, PhaseFlags& f) {
    cmd.add_option("--config", f.config_path, "Flat JSON config file; flags override its keys");
    cmd.add_option("--d-values", f.cfg.d_values, "Dimensions")->delimiter(',');
    cmd.add_option("--m-values", f.cfg.m_values, "Explicit point counts")->delimiter(',');
    cmd.add_option("--m-fractions", f.cfg.m_fractions, "Point counts as fractions of d^2/4")->delimiter(',');
    cmd.add_option("--trials", f.cfg.trials, "Trials per cell");
    cmd.add_option("--master-seed", f.cfg.master_seed, "Master seed");
    cmd.add_option("--method", f.method, "identity_perturbation | least_norm")->check(CLI::IsMember(kMethods));
    cmd.add_option("--least-norm-objective", f.objective, "frobenius | frobenius_from_identity")
        ->check(CLI::IsMember(kObjectives));
    cmd.add_option("--max-residual", f.cfg.fit_options.tolerances.max_residual, "Fit residual tolerance");
    cmd.add_option("--pd-tolerance", f.cfg.fit_options.tolerances.pd_tolerance, "PD tolerance");
    cmd.add_option("--n-u", f.cfg.n_u, "Probe directions (recorded for diagnostics)");
    cmd.add_option("--output", f.cfg.output_path, "Records file; summary is written alongside");
    cmd.add_option("--format", f.format, "csv | json")->check(CLI::IsMember(kFormats));
    cmd.add_option("--threads", f.cfg.workers, "Worker threads (0 = auto)");
    cmd.add_flag("--record-wall-time", f.cfg.record_wall_time, "Write measured wall_ms");
}

// Config file first, then every flag that was given explicitly.
ExperimentConfig merge_phase_config(const CLI::App& cmd, const PhaseFlags& f, int flag_verbosity,
                                    bool verbosity_given, int& verbosity) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    int file_verbosity = 0;
    if (!f.config_path.empty()) {
        load_config_file(f.config_path, cfg, seen, file_verbosity);
    }
    verbosity = verbosity_given ? flag_verbosity : file_verbosity;
    auto given = [&](const char* flag) { return cmd.count(flag) > 0; };
    if (given("--d-values")) cfg.d_values = f.cfg.d_values;
    if (given("--m-values")) {
        cfg.m_values = f.cfg.m_values;
        if (!given("--m-fractions")) cfg.m_fractions.clear();
    }
    if (given("--m-fractions")) {
        cfg.m_fractions = f.cfg.m_fractions;
        if (!given("--m-values")) cfg.m_values.clear();
    }
    if (given("--trials")) cfg.trials = f.cfg.trials;
    if (given("--master-seed")) cfg.master_seed = f.cfg.master_seed;
    if (given("--method")) cfg.method = kMethods.at(f.method);
    if (given("--least-norm-objective")) cfg.fit_options.least_norm_objective = kObjectives.at(f.objective);
    if (given("--max-residual")) cfg.fit_options.tolerances.max_residual = f.cfg.fit_options.tolerances.max_residual;
    if (given("--pd-tolerance")) cfg.fit_options.tolerances.pd_tolerance = f.cfg.fit_options.tolerances.pd_tolerance;
    if (given("--n-u")) cfg.n_u = f.cfg.n_u;
    if (given("--output")) cfg.output_path = f.cfg.output_path;
    if (given("--format")) cfg.format = kFormats.at(f.format);
    if (given("--threads")) cfg.workers = f.cfg.workers;
    if (given("--record-wall-time")) cfg.record_wall_time = f.cfg.record_wall_time;
    return cfg;
}

}  // namespace

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.d < 2) throw UsageError("--d must be >= 2");
        if (args.m < 1) throw UsageError("--m must be >= 1");
        const SampleSet s = draw_sample_set(args.d, args.m, args.seed);
        FitOptions options;
        options.least_norm_objective = args.objective;
        const FitResult r = fit(s, args.method, options);

        const bool finite = r.delta.allFinite() && r.delta.size() > 0;
        const double dmin = finite ? r.delta.minCoeff() : NAN;
        const double dmax = finite ? r.delta.maxCoeff() : NAN;
        const double dmean = finite ? r.delta.mean() : NAN;
        const double dabs = finite ? r.delta.cwiseAbs().maxCoeff() : NAN;

        if (args.format == OutputFormat::json) {
            nlohmann::json doc = {{"method", std::string(to_string(r.method))},
                                  {"d", args.d},
                                  {"m", args.m},
                                  {"seed", args.seed},
                                  {"success", r.success},
                                  {"status", std::string(to_string(r.status))},
                                  {"delta_min", json_real(dmin)},
                                  {"delta_max", json_real(dmax)},
                                  {"delta_mean", json_real(dmean)},
                                  {"delta_abs_max", json_real(dabs)},
                                  {"k_norm", json_real(r.K_norm)},
                                  {"n_min_eig", json_real(r.N_min_eig)},
                                  {"m_min_eig", json_real(r.M_min_eig)},
                                  {"max_residual", json_real(r.max_residual)},
                                  {"condition_estimate", json_real(r.condition_estimate)}};
            out << doc.dump(2) << '\n';
        } else {
            out << "method," << to_string(r.method) << '\n'
                << "d," << args.d << '\n'
                << "m," << args.m << '\n'
                << "seed," << args.seed << '\n'
                << "success," << (r.success ? 1 : 0) << '\n'
                << "status," << to_string(r.status) << '\n'
                << "delta_min," << format_real(dmin) << '\n'
                << "delta_max," << format_real(dmax) << '\n'
                << "delta_mean," << format_real(dmean) << '\n'
                << "delta_abs_max," << format_real(dabs) << '\n'
                << "k_norm," << format_real(r.K_norm) << '\n'
                << "n_min_eig," << format_real(r.N_min_eig) << '\n'
                << "m_min_eig," << format_real(r.M_min_eig) << '\n'
                << "max_residual," << format_real(r.max_residual) << '\n'
                << "condition_estimate," << format_real(r.condition_estimate) << '\n';
        }
        return r.success ? kExitOk : kExitFailure;
    });
}

int cmd_phase(const ExperimentConfig& cfg, int verbosity, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (cfg.output_path.empty()) {
            throw UsageError("phase needs an output path (--output or config key 'output')");
        }
        validate(cfg);
        if (verbosity > 0) {
            err << "phase: " << grid_cells(cfg).size() << " cells x " << cfg.trials << " trials on "
                << resolve_worker_count(cfg.workers) << " worker(s)\n";
        }
        const PhaseSweepResult result = run_phase_sweep(cfg);
        out << "records: " << cfg.output_path << '\n' << "summary: " << summary_path_for(cfg.output_path) << '\n';
        for (std::size_t d : cfg.d_values) {
            if (const auto m_star = estimate_transition(result.table, d)) {
                const double dd = static_cast<double>(d);
                out << "d=" << d << " m_star=" << format_real(*m_star)
                    << " m_star/(d^2/4)=" << format_real(*m_star / (dd * dd / 4.0)) << '\n';
            } else {
                out << "d=" << d << " m_star=none\n";
            }
        }
        return kExitOk;
    });
}

int cmd_diagnose(const DiagnoseArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.d < 2) throw UsageError("--d must be >= 2");
        if (args.m < 1) throw UsageError("--m must be >= 1");
        if (args.seeds < 1) throw UsageError("--seeds must be >= 1");

        std::vector<SeedDiagnostics> rows;
        for (std::size_t k = 0; k < args.seeds; ++k) {
            ProbeOptions probes;
            probes.n_u = args.n_u;
            probes.seed = derived_seed(args.master_seed, args.d, args.m, k) ^ 0x5eedULL;
            rows.push_back(diagnose_sample(args.d, args.m, derived_seed(args.master_seed, args.d, args.m, k), probes));
        }

        std::size_t e1 = 0, e2 = 0, e3 = 0, quad = 0, a_prime = 0, a_star = 0, fits = 0;
        for (const auto& r : rows) {
            e1 += r.events.e1_pass;
            e2 += r.events.e2_pass;
            e3 += r.events.e3_pass;
            quad += r.max_random_quad_form < 0.5;
            a_prime += r.norms.a_prime_norm <= 0.25;
            a_star += r.norms.a_star_norm <= 0.25;
            fits += r.fit_success;
        }
        const std::size_t n = rows.size();

        if (args.format == OutputFormat::json) {
            nlohmann::json doc;
            doc["d"] = args.d;
            doc["m"] = args.m;
            doc["rows"] = nlohmann::json::array();
            for (std::size_t k = 0; k < n; ++k) {
                const auto& r = rows[k];
                doc["rows"].push_back({{"index", k},
                                       {"seed", r.seed},
                                       {"a_norm", json_real(r.norms.a_norm)},
                                       {"a_prime_norm", json_real(r.norms.a_prime_norm)},
                                       {"a_star_norm", json_real(r.norms.a_star_norm)},
                                       {"e1", r.events.e1_pass},
                                       {"eps_max", json_real(r.events.eps_max)},
                                       {"e2", r.events.e2_pass},
                                       {"delta_max", json_real(r.events.delta_max)},
                                       {"e3", r.events.e3_pass},
                                       {"m_inv_one_dev", json_real(r.events.m_inv_one_dev)},
                                       {"m_inv_one_ratio", json_real(r.events.m_inv_one_ratio)},
                                       {"max_quad_form", json_real(r.max_random_quad_form)},
                                       {"eigvec_quad_form", json_real(r.eigenvector_quad_form.value_or(NAN))},
                                       {"max_heavy_count", r.max_heavy_count},
                                       {"max_light_norm_sq", json_real(r.max_light_norm_sq)},
                                       {"fit_success", r.fit_success}});
            }
            doc["aggregate"] = {{"seeds", n},
                                {"e1_rate", rate(e1, n)},
                                {"e2_rate", rate(e2, n)},
                                {"e3_rate", rate(e3, n)},
                                {"quad_form_rate", rate(quad, n)},
                                {"a_prime_quarter_rate", rate(a_prime, n)},
                                {"a_star_quarter_rate", rate(a_star, n)},
                                {"fit_success_rate", rate(fits, n)}};
            out << doc.dump(2) << '\n';
            return kExitOk;
        }

        out << "index,seed,a_norm,a_prime_norm,a_star_norm,e1,eps_max,e2,delta_max,e3,m_inv_one_dev,"
               "m_inv_one_ratio,max_quad_form,eigvec_quad_form,max_heavy_count,max_light_norm_sq,fit_success\n";
        for (std::size_t k = 0; k < n; ++k) {
            const auto& r = rows[k];
            out << k << ',' << r.seed << ',' << format_real(r.norms.a_norm) << ','
                << format_real(r.norms.a_prime_norm) << ',' << format_real(r.norms.a_star_norm) << ','
                << r.events.e1_pass << ',' << format_real(r.events.eps_max) << ',' << r.events.e2_pass << ','
                << format_real(r.events.delta_max) << ',' << r.events.e3_pass << ','
                << format_real(r.events.m_inv_one_dev) << ',' << format_real(r.events.m_inv_one_ratio) << ','
                << format_real(r.max_random_quad_form) << ',' << format_real(r.eigenvector_quad_form.value_or(NAN))
                << ',' << r.max_heavy_count << ',' << format_real(r.max_light_norm_sq) << ',' << r.fit_success
                << '\n';
        }
        out << "\naggregate,value\n"
            << "seeds," << n << '\n'
            << "e1_rate," << format_real(rate(e1, n)) << '\n'
            << "e2_rate," << format_real(rate(e2, n)) << '\n'
            << "e3_rate," << format_real(rate(e3, n)) << '\n'
            << "quad_form_rate," << format_real(rate(quad, n)) << '\n'
            << "a_prime_quarter_rate," << format_real(rate(a_prime, n)) << '\n'
            << "a_star_quarter_rate," << format_real(rate(a_star, n)) << '\n'
            << "fit_success_rate," << format_real(rate(fits, n)) << '\n';
        return kExitOk;
    });
}

int cmd_moments(const MomentsArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (args.d < 1) throw UsageError("--d must be >= 1");
        if (args.m < 1) throw UsageError("--m must be >= 1");
        const TraceMoment tm =
            trace_moment(args.d, args.m, args.t, args.trials, args.seed, resolve_worker_count(args.threads));
        out << "d," << args.d << '\n'
            << "m," << args.m << '\n'
            << "t," << args.t << '\n'
            << "trials," << args.trials << '\n'
            << "mean_trace," << format_real(tm.mean_trace) << '\n'
            << "standard_error," << format_real(tm.standard_error) << '\n'
            << "bound," << format_real(tm.bound) << '\n'
            << "ratio," << format_real(tm.ratio) << '\n';
        return kExitOk;
    });
}

int cmd_plot(const std::string& summary_path, const std::string& image_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        plot_summary(summary_path, image_path);
        out << "wrote " << image_path << " and " << image_path << ".json\n";
        return kExitOk;
    });
}

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Identity-perturbation ellipsoid fitting lab", "ellipsoid_lab"};
    app.require_subcommand(1);
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Increase verbosity");

    // fit
    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one random sample set and print its certificates");
    fit_cmd->add_option("--d", fit_args.d, "Dimension")->required();
    fit_cmd->add_option("--m", fit_args.m, "Number of points")->required();
    fit_cmd->add_option("--seed", fit_args.seed, "Sample seed");
    std::string fit_method = "identity_perturbation";
    std::string fit_objective = "frobenius";
    std::string fit_format = "csv";
    fit_cmd->add_option("--method", fit_method, "identity_perturbation | least_norm")
        ->check(CLI::IsMember(kMethods));
    fit_cmd->add_option("--least-norm-objective", fit_objective, "frobenius | frobenius_from_identity")
        ->check(CLI::IsMember(kObjectives));
    fit_cmd->add_option("--format", fit_format, "csv | json")->check(CLI::IsMember(kFormats));

    // phase
    PhaseFlags phase_flags;
    auto* phase_cmd = app.add_subcommand("phase", "Monte Carlo success-rate sweep over a (d, m) grid");
    add_phase_options(*phase_cmd, phase_flags);

    // diagnose
    DiagnoseArgs diag_args;
    auto* diag_cmd = app.add_subcommand("diagnose", "Check the high-probability events on random instances");
    diag_cmd->add_option("--d", diag_args.d, "Dimension")->required();
    diag_cmd->add_option("--m", diag_args.m, "Number of points")->required();
    diag_cmd->add_option("--seeds", diag_args.seeds, "Number of independent sample sets");
    diag_cmd->add_option("--n-u", diag_args.n_u, "Random probe directions per sample set");
    diag_cmd->add_option("--master-seed", diag_args.master_seed, "Master seed");
    std::string diag_format = "csv";
    diag_cmd->add_option("--format", diag_format, "csv | json")->check(CLI::IsMember(kFormats));

    // moments
    MomentsArgs mom_args;
    auto* mom_cmd = app.add_subcommand("moments", "Monte Carlo mean of tr((A')^t) against its bound");
    mom_cmd->add_option("--d", mom_args.d, "Dimension")->required();
    mom_cmd->add_option("--m", mom_args.m, "Number of points")->required();
    mom_cmd->add_option("--t", mom_args.t, "Even power, 2..8");
    mom_cmd->add_option("--trials", mom_args.trials, "Monte Carlo trials");
    mom_cmd->add_option("--seed", mom_args.seed, "Seed");
    mom_cmd->add_option("--threads", mom_args.threads, "Worker threads (0 = auto)");

    // plot
    std::string summary_path;
    std::string image_path;
    auto* plot_cmd = app.add_subcommand("plot", "Render a phase summary CSV as an SVG diagram");
    plot_cmd->add_option("--summary", summary_path, "Summary CSV from `phase`")->required();
    plot_cmd->add_option("--output", image_path, "Output SVG path")->required();

    std::vector<const char*> raw;
    raw.reserve(argv.size());
    for (const auto& a : argv) {
        raw.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (fit_cmd->parsed()) {
        fit_args.method = kMethods.at(fit_method);
        fit_args.objective = kObjectives.at(fit_objective);
        fit_args.format = kFormats.at(fit_format);
        return cmd_fit(fit_args, out, err);
    }
    if (diag_cmd->parsed()) {
        diag_args.format = kFormats.at(diag_format);
        return cmd_diagnose(diag_args, out, err);
    }
    if (mom_cmd->parsed()) {
        return cmd_moments(mom_args, out, err);
    }
    if (plot_cmd->parsed()) {
        return cmd_plot(summary_path, image_path, out, err);
    }

    return guarded(err, [&] {
        int phase_verbosity = verbosity;
        const ExperimentConfig cfg = merge_phase_config(*phase_cmd, phase_flags, verbosity, app.count("-v") > 0,
                                                        phase_verbosity);
        return cmd_phase(cfg, phase_verbosity, out, err);
    });
}

ExperimentConfig resolve_phase_config(const std::vector<std::string>& args) {
    CLI::App app{"phase", "phase"};
    PhaseFlags flags;
    add_phase_options(app, flags);
    std::vector<const char*> raw{"phase"};
    for (const auto& a : args) raw.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    int verbosity = 0;
    return merge_phase_config(app, flags, 0, false, verbosity);
}

}  // namespace ellipsoid_lab::cli
