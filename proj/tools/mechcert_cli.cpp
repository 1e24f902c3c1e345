// mechcert: certificates, bounds, simulations and sweeps from the command line.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 domain or mathematical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechcert/mechcert.hpp"

namespace fs = std::filesystem;
using namespace mechcert;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config_path;
    std::uint64_t seed = 42;
    std::string out_dir = ".";
    bool bits = false;
};

std::string num(double v) { return csv::format_number(v); }

/// Entropy/information value in the display unit.
std::string info(double nats, bool bits) { return num(bits ? to_bits(nats) : nats); }

void print_kv(const std::string& key, const std::string& value) { std::cout << key << " = " << value << '\n'; }

struct CalibrationOptions {
    CalibrationSpec spec;
    std::optional<double> h_mu;
    std::optional<double> sigma_f2;

    void attach(CLI::App* app) {
        app->add_option("--k", spec.k, "arm count")->capture_default_str();
        app->add_option("--n", spec.n, "horizon in cycles")->capture_default_str();
        app->add_option("--sigma", spec.sigma, "reward noise std")->capture_default_str();
        app->add_option("--kappa-mu", spec.kappa_mu, "occupancy-weighted sensitivity")->capture_default_str();
        app->add_option("--d-f", spec.d_f, "effective residual dimension")->capture_default_str();
        app->add_option("--b-mu", spec.b_mu, "occupancy-weighted bias")->capture_default_str();
        app->add_option("--h-mu", h_mu, "prior entropy in nats (default ln k)");
        app->add_option("--sigma-f2", sigma_f2, "residual variance (default canonical)");
    }

    [[nodiscard]] CalibrationSpec resolved() const {
        auto s = spec;
        s.h_mu = h_mu;
        s.sigma_f2 = sigma_f2;
        return s;
    }
};

fs::path prepare_out(const Globals& g, const std::string& file) {
    std::error_code ec;
    fs::create_directories(g.out_dir, ec);
    if (ec) {
        throw UsageError("cannot create output directory '" + g.out_dir + "': " + ec.message());
    }
    return fs::path(g.out_dir) / file;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot open '" + path.string() + "' for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw UsageError("failed writing '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------

struct CertifyCmd {
    CLI::App* app = nullptr;
    CalibrationOptions cal;
    std::optional<double> target;
    std::string report_path;

    void attach(CLI::App& root) {
        app = root.add_subcommand("certify", "composite model-quality certificate");
        cal.attach(app);
        app->add_option("--target", target, "information working point in nats (default H(mu)/N)");
        app->add_option("--report", report_path, "also write the report as key = value lines");
    }

    int run(const Globals& g) const {
        const auto p = CalibrationParams::create(cal.resolved());
        const auto r = certify(p, target);
        std::ostringstream os;
        auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
        kv("units", g.bits ? "bits" : "nats");
        kv("sigma_f2", num(r.sigma_f2));
        kv("capacity", info(r.capacity_at_bias, g.bits));
        kv("residual_entropy_floor", info(r.residual_entropy_floor, g.bits));
        kv("target", info(r.target, g.bits));
        kv("critical_bias", csv::format_number(r.critical_bias, "unreachable"));
        kv("bias_ratio", r.critical_bias ? csv::format_number(r.bias_ratio, "inf") : "inf");
        kv("margin", r.critical_bias ? csv::format_number(r.margin, "inf") : "0");
        kv("regime", to_string(r.regime));
        kv("sample_ratio", csv::format_number(r.sample_ratio, "inf"));
        kv("lb_envelope", num(r.lb_envelope));
        kv("ub_envelope", num(r.ub_envelope));
        kv("capacity_exceeds_prior_entropy", r.capacity_exceeds_prior_entropy ? "true" : "false");
        std::cout << os.str();
        if (!report_path.empty()) {
            write_file(report_path, os.str());
        }
        if (!r.critical_bias) {
            std::cerr << "target unreachable: even a zero-bias model carries only "
                      << num(channel_capacity(0.0, p)) << " nats, below the target " << num(r.target) << '\n';
            return kExitDomain;
        }
        return 0;
    }
};

struct SimulateCmd {
    CLI::App* app = nullptr;
    ExperimentConfig config;
    int table = 1;

    void attach(CLI::App& root) {
        app = root.add_subcommand("simulate", "Monte Carlo regret tables");
        app->add_option("--table", table, "1: regret vs information at fixed N; 2: regret vs N")
            ->check(CLI::IsMember({1, 2}))
            ->capture_default_str();
        app->add_option("--trials", config.trials, "Monte Carlo trials per cell")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--k", config.k, "arm count")->capture_default_str();
        app->add_option("--n", config.n, "horizon for table 1")->capture_default_str();
        app->add_option("--p-opt", config.p_opt, "attainment of the optimal arm")->capture_default_str();
        app->add_option("--p-bsa", config.p_bsa, "attainment of the other arms and the fixed dose")
            ->capture_default_str();
        app->add_option("--strength", config.prior_strength, "hybrid prior pseudo-count scale")
            ->capture_default_str();
        app->add_option("--grid", config.r_mech_grid, "information grid (nats) for table 1")->delimiter(',');
        app->add_option("--n-values", config.n_grid, "horizons for table 2")->delimiter(',');
        app->add_option("--r-mech", config.table2_r_mech, "information level (nats) for table 2")
            ->capture_default_str();
        app->add_option("--workers", config.workers, "worker threads")->check(CLI::PositiveNumber);
    }

    int run(const Globals& g) {
        config.seed = g.seed;
        config.validate();
        std::ostringstream csv;
        if (table == 1) {
            const auto path = prepare_out(g, "table1.csv");
            const auto rows = table1_experiment(config);
            write_table1_csv(csv, rows);
            write_file(path, csv.str());
            std::printf("%-7s %-7s %-18s %-18s %-18s %-9s %-9s %-9s\n", "r_mech", "h_mech", "hybrid", "uninformed",
                        "bsa", "uninf/hyb", "lb_pred", "bsa/hyb");
            for (const auto& r : rows) {
                std::printf("%-7.3g %-7.3g %7.3f +- %-7.3f %7.3f +- %-7.3f %7.3f +- %-7.3f %-9.3g %-9.3g %-9.3g\n",
                            r.r_mech, r.h_mech, r.hyb.mean, r.hyb.ci96_halfwidth, r.uninf.mean,
                            r.uninf.ci96_halfwidth, r.bsa.mean, r.bsa.ci96_halfwidth, r.ratio_uninf_hyb,
                            r.lb_prediction, r.ratio_bsa_hyb);
            }
        } else {
            const auto path = prepare_out(g, "table2.csv");
            const auto rows = table2_experiment(config);
            write_table2_csv(csv, rows);
            write_file(path, csv.str());
            std::printf("%-6s %-18s %-18s %-9s\n", "n", "hybrid", "uninformed", "ratio");
            for (const auto& r : rows) {
                std::printf("%-6d %7.3f +- %-7.3f %7.3f +- %-7.3f %-9.4g\n", r.n, r.hyb.mean, r.hyb.ci96_halfwidth,
                            r.uninf.mean, r.uninf.ci96_halfwidth, r.ratio);
            }
        }
        return 0;
    }
};

struct BurninCmd {
    CLI::App* app = nullptr;
    BurnInParams params;

    void attach(CLI::App& root) {
        app = root.add_subcommand("burnin", "burn-in lower bound for a confident-but-wrong prior");
        app->add_option("--eps", params.epsilon, "prior mass on the true optimum")->capture_default_str();
        app->add_option("--delta", params.delta, "identification failure probability")->capture_default_str();
        app->add_option("--gap", params.gap, "sub-optimality gap")->capture_default_str();
        app->add_option("--k", params.k, "arm count")->capture_default_str();
    }

    int run(const Globals& g) const {
        const auto r = burn_in_lower_bound(params);
        print_kv("units", g.bits ? "bits" : "nats");
        print_kv("epsilon_k", num(r.epsilon_k));
        print_kv("kl", info(r.kl, g.bits));
        print_kv("burn_in_cycles", num(r.bound));
        print_kv("degenerate", r.degenerate ? "true" : "false");
        print_kv("assumption_violated", r.assumption_violated ? "true" : "false");
        return 0;
    }
};

struct ShiftCmd {
    CLI::App* app = nullptr;
    CLI::App* impossibility = nullptr;
    std::optional<double> r_train;
    std::optional<int> k;
    std::optional<double> delta_pi;
    std::string joint_path;
    std::vector<int> subset;

    void attach(CLI::App& root) {
        app = root.add_subcommand("shift", "retention and impossibility under distribution shift");
        app->add_option("--r-train", r_train, "training mechanistic information (nats)");
        app->add_option("--k", k, "arm count");
        app->add_option("--delta-pi", delta_pi, "KL shift of the test joint (nats)");
        impossibility = app->add_subcommand("impossibility", "adversarial test joint from a training joint");
        impossibility->add_option("--joint", joint_path, "training joint CSV")->required();
        impossibility->add_option("--subset", subset, "arms keeping their conditional (default first k/2)")
            ->delimiter(',');
    }

    int run(const Globals& g) const {
        if (impossibility->parsed()) {
            return run_impossibility(g);
        }
        if (!r_train || !k || !delta_pi) {
            throw UsageError("shift needs --r-train, --k and --delta-pi (or the impossibility subcommand)");
        }
        const auto r = check_retention(*r_train, *k, *delta_pi);
        print_kv("units", g.bits ? "bits" : "nats");
        print_kv("threshold", info(r.threshold, g.bits));
        print_kv("r_min", r.r_min ? info(*r.r_min, g.bits) : "out_of_scope");
        if (*r_train > 0.0) {
            print_kv("perturbation_bound", info(retention_perturbation_bound(*r_train, *k), g.bits));
            print_kv("half_r_train", info(0.5 * *r_train, g.bits));
        }
        print_kv("retention", to_string(r.retained));
        return 0;
    }

    int run_impossibility(const Globals& g) const {
        std::ifstream in(joint_path);
        if (!in) {
            throw UsageError("cannot open joint file '" + joint_path + "'");
        }
        const auto p = read_joint_csv(in);
        const auto s = subset.empty() ? default_subset(p.k()) : subset;
        const auto r = verify_impossibility(p, s);
        std::ostringstream q;
        write_joint_csv(q, r.q);
        write_file(prepare_out(g, "impossibility_q.csv"), q.str());
        print_kv("units", g.bits ? "bits" : "nats");
        print_kv("h_cond_p", info(r.h_cond_p, g.bits));
        print_kv("h_cond_q", info(r.h_cond_q, g.bits));
        print_kv("mi_p", info(r.mi_p, g.bits));
        print_kv("mi_q", info(r.mi_q, g.bits));
        print_kv("kl_q_p", r.kl_q_p ? info(*r.kl_q_p, g.bits) : "inf");
        print_kv("kl_p_q", r.kl_p_q ? info(*r.kl_p_q, g.bits) : "inf");
        print_kv("residual_a", num(r.residual_a));
        print_kv("residual_b", num(r.residual_b));
        print_kv("residual_c", num(r.residual_c));
        return 0;
    }
};

struct PriorCmd {
    CLI::App* app = nullptr;
    int k = 8;
    double r_mech = 0.0;
    int recommended = 0;
    std::string joint_out;

    void attach(CLI::App& root) {
        app = root.add_subcommand("prior", "two-level hybrid prior carrying a given information");
        app->add_option("--k", k, "arm count")->capture_default_str();
        app->add_option("--r-mech", r_mech, "mechanistic information (nats)")->capture_default_str();
        app->add_option("--recommended", recommended, "recommended arm index")->capture_default_str();
        app->add_option("--joint-out", joint_out, "write the uniform-row symmetric joint as CSV");
    }

    int run(const Globals& g) const {
        const auto prior = solve_prior_for_r_mech(k, r_mech, recommended);
        print_kv("units", g.bits ? "bits" : "nats");
        print_kv("beta", num(prior.beta));
        print_kv("alpha", num(prior.alpha));
        print_kv("entropy", info(two_level_entropy(k, prior.beta), g.bits));
        if (!joint_out.empty()) {
            std::ostringstream os;
            write_joint_csv(os, JointDistribution::symmetric_two_level(k, prior.beta));
            write_file(joint_out, os.str());
        }
        return 0;
    }
};

struct SweepCmd {
    CLI::App* app = nullptr;
    CalibrationOptions cal;
    std::string param;
    std::vector<double> values;
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<int> steps;
    bool table = false;
    std::vector<std::string> grid;
    std::vector<double> x_values;
    std::vector<double> y_values;
    std::vector<int> k_values;

    void attach(CLI::App& root) {
        app = root.add_subcommand("sweep", "sensitivity sweeps of the certificate");
        cal.attach(app);
        app->add_option("--param", param, "1-D sweep parameter: sigma, kappa_mu, d_f, k, p_opt, b_mu");
        app->add_option("--values", values, "explicit 1-D sweep values")->delimiter(',');
        app->add_option("--min", lo, "1-D grid lower bound");
        app->add_option("--max", hi, "1-D grid upper bound");
        app->add_option("--steps", steps, "points per axis (default 50 for 1-D, 60 for 2-D)")
            ->check(CLI::PositiveNumber);
        app->add_flag("--table", table, "all six 1-D sweeps over the default ranges");
        app->add_option("--grid", grid, "2-D sweep axes X,Y")->delimiter(',')->expected(2);
        app->add_option("--x-values", x_values, "explicit 2-D x values")->delimiter(',');
        app->add_option("--y-values", y_values, "explicit 2-D y values")->delimiter(',');
        app->add_option("--k-values", k_values, "arm counts for the critical-bias K sweep")->delimiter(',');
    }

    std::vector<double> axis_values(SweepParameter p, const std::vector<double>& explicit_values, int n) const {
        return explicit_values.empty() ? default_sweep_values(p, n) : explicit_values;
    }

    int run(const Globals& g) const {
        const int modes = static_cast<int>(!param.empty()) + static_cast<int>(table) +
                          static_cast<int>(!grid.empty()) + static_cast<int>(!k_values.empty());
        if (modes != 1) {
            throw UsageError("sweep needs exactly one of --param, --table, --grid or --k-values");
        }
        const auto base = cal.resolved();
        std::ostringstream os;
        if (!param.empty() || table) {
            std::vector<std::vector<Sweep1dRow>> sweeps;
            if (table) {
                sweeps = sensitivity_table(base, steps.value_or(kDefaultSteps1d));
            } else {
                const auto p = parse_sweep_parameter(param);
                std::vector<double> v = values;
                if (v.empty() && (lo || hi)) {
                    if (!lo || !hi) {
                        throw UsageError("--min and --max must be given together");
                    }
                    v = linear_grid(*lo, *hi, steps.value_or(kDefaultSteps1d));
                }
                if (v.empty()) {
                    v = default_sweep_values(p, steps.value_or(kDefaultSteps1d));
                }
                sweeps.push_back(sweep_1d({p, v, base}));
            }
            write_sweep1d_header(os);
            for (const auto& rows : sweeps) {
                write_sweep1d_rows(os, rows);
            }
            write_file(prepare_out(g, "sweep1d.csv"), os.str());
            std::printf("%-9s %-8s %-8s %-8s %-8s %s\n", "param", "C_min", "C_max", "Bcrit_min", "Bcrit_max",
                        "all_data_efficient");
            for (const auto& rows : sweeps) {
                const auto s = summarize_sweep(rows);
                std::printf("%-9s %-8.3f %-8.3f %-8.3f %-8.3f %s\n", to_string(s.parameter), s.c_min, s.c_max,
                            s.b_crit_min, s.b_crit_max, s.all_data_efficient ? "true" : "false");
            }
        } else if (!grid.empty()) {
            const auto px = parse_sweep_parameter(grid.at(0));
            const auto py = parse_sweep_parameter(grid.at(1));
            const int n = steps.value_or(kDefaultSteps2d);
            const auto rows = sweep_2d({px, axis_values(px, x_values, n)}, {py, axis_values(py, y_values, n)}, base);
            write_sweep2d_csv(os, px, py, rows);
            write_file(prepare_out(g, "sweep2d.csv"), os.str());
            std::printf("cells = %zu\n", rows.size());
        } else {
            const auto rows = k_sweep(base, k_values, base.n);
            write_ksweep_csv(os, rows);
            write_file(prepare_out(g, "ksweep.csv"), os.str());
            std::cout << os.str();
        }
        return 0;
    }
};

/// Applies config-file entries to options not given on the command line.
/// Keys resolve against the selected subcommand chain, deepest first, then
/// the global options.
void apply_config(CLI::App& root, const std::vector<CLI::App*>& chain, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file '" + path + "'");
    }
    const auto entries = config::parse(in);
    for (const auto& e : entries) {
        if (e.key == "config") {
            throw UsageError("config line " + std::to_string(e.line) + ": 'config' cannot be nested");
        }
        CLI::Option* opt = nullptr;
        for (auto it = chain.rbegin(); it != chain.rend() && !opt; ++it) {
            opt = (*it)->get_option_no_throw("--" + e.key);
        }
        if (!opt) {
            opt = root.get_option_no_throw("--" + e.key);
        }
        if (!opt) {
            throw UsageError("config line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
        }
        if (opt->count() > 0) {
            continue;  // command-line flags win
        }
        opt->add_result(e.value);
        opt->run_callback();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certificates, bounds and simulations for hybrid mechanistic priors"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "flat key = value file; command-line flags override it");
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory for CSV files")->capture_default_str();
    app.add_flag("--bits", g.bits, "display entropies in bits (files stay in nats)");

    CertifyCmd certify_cmd;
    SimulateCmd simulate_cmd;
    BurninCmd burnin_cmd;
    ShiftCmd shift_cmd;
    PriorCmd prior_cmd;
    SweepCmd sweep_cmd;
    certify_cmd.attach(app);
    simulate_cmd.attach(app);
    burnin_cmd.attach(app);
    shift_cmd.attach(app);
    prior_cmd.attach(app);
    sweep_cmd.attach(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        std::vector<CLI::App*> chain;
        for (CLI::App* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front(); sub;
             sub = sub->get_subcommands().empty() ? nullptr : sub->get_subcommands().front()) {
            chain.push_back(sub);
        }
        if (!g.config_path.empty()) {
            apply_config(app, chain, g.config_path);
        }
        if (certify_cmd.app->parsed()) return certify_cmd.run(g);
        if (simulate_cmd.app->parsed()) return simulate_cmd.run(g);
        if (burnin_cmd.app->parsed()) return burnin_cmd.run(g);
        if (shift_cmd.app->parsed()) return shift_cmd.run(g);
        if (prior_cmd.app->parsed()) return prior_cmd.run(g);
        if (sweep_cmd.app->parsed()) return sweep_cmd.run(g);
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
