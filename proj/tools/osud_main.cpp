// Command-line surface: constants, solvers, experiment runs, curve exports,
// and the verification suite. Exit codes: 0 success, 1 bound/criterion
// failure, 2 configuration error, 3 numeric error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "osud/adaptive.hpp"
#include "osud/clairvoyant.hpp"
#include "osud/hill_kertz.hpp"
#include "osud/json_io.hpp"
#include "osud/maxvariant.hpp"
#include "osud/mc.hpp"
#include "osud/nonadaptive.hpp"
#include "osud/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCriterion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

struct RatioConfig {
    std::string algo = "nonadaptive";
    std::string dist_spec = "uniform";
    long n = 10;
    double p = 0.5;
    double zeta = 0.0;
    double q = -1.0;  // <0: use the algorithm's own quantile choice
    double a1 = 1.0, a2 = -1.0, beta = 200.0;
    long trials = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    double tol = 1e-9;
    std::string out;
    std::string schedule_path;
};

void apply_config_file(RatioConfig& cfg, const std::string& path) {
    auto j = osud::io::load_json_file(path);
    if (j.value("schema_version", 1) != 1)
        throw std::invalid_argument("unsupported schema_version in " + path);
    if (j.contains("algo")) cfg.algo = j["algo"].get<std::string>();
    if (j.contains("dist")) cfg.dist_spec = j["dist"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<long>();
    if (j.contains("p")) cfg.p = j["p"].get<double>();
    if (j.contains("zeta")) cfg.zeta = j["zeta"].get<double>();
    if (j.contains("q")) cfg.q = j["q"].get<double>();
    if (j.contains("a1")) cfg.a1 = j["a1"].get<double>();
    if (j.contains("a2")) cfg.a2 = j["a2"].get<double>();
    if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<long>();
    if (j.contains("seed")) {
        cfg.seed = j["seed"].get<std::uint64_t>();
        cfg.seed_given = true;
    }
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
}

struct RatioReport {
    std::string algo;
    long n;
    double p, zeta, q;
    double alg_value, opt_value, ratio, bound;
    std::optional<double> mc_estimate, mc_std_error;
    long trials;
    std::uint64_t seed;
};

void write_report(const RatioReport& r, const std::string& path) {
    auto ends_with = [](const std::string& s, const std::string& suffix) {
        return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(path, ".json")) {
        nlohmann::json j{{"schema_version", 1}, {"algo", r.algo},   {"n", r.n},
                         {"p", r.p},            {"zeta", r.zeta},   {"q", r.q},
                         {"alg_value", r.alg_value}, {"opt_value", r.opt_value},
                         {"ratio", r.ratio},    {"bound", r.bound}, {"trials", r.trials},
                         {"seed", r.seed}};
        if (r.mc_estimate) {
            j["mc_estimate"] = *r.mc_estimate;
            j["mc_std_error"] = *r.mc_std_error;
        }
        osud::io::save_json_file(path, j);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "algo,n,p,zeta,q,alg_value,opt_value,ratio,bound,mc_estimate,mc_std_error,trials,seed\n";
    out << r.algo << "," << r.n << "," << num(r.p) << "," << num(r.zeta) << "," << num(r.q) << ","
        << num(r.alg_value) << "," << num(r.opt_value) << "," << num(r.ratio) << "," << num(r.bound)
        << "," << (r.mc_estimate ? num(*r.mc_estimate) : "") << ","
        << (r.mc_std_error ? num(*r.mc_std_error) : "") << "," << r.trials << "," << r.seed << "\n";
}

int cmd_ratio(const RatioConfig& cfg) {
    using namespace osud;
    if (cfg.trials > 0 && !cfg.seed_given)
        throw std::invalid_argument("--seed is required when --trials is set");
    RatioReport report{};
    report.algo = cfg.algo;
    report.n = cfg.n;
    report.p = cfg.p;
    report.zeta = cfg.zeta;
    report.trials = cfg.trials;
    report.seed = cfg.seed;
    bool upper_bound_check = false;  // hard-instance family certifies an upper bound

    if (cfg.algo == "nonadaptive") {
        Instance inst(cfg.n, io::parse_distribution(cfg.dist_spec), cfg.p, cfg.zeta);
        double q = cfg.q > 0.0 ? cfg.q : nonadaptive::optimal_quantile(cfg.n, cfg.p);
        report.q = q;
        report.alg_value = nonadaptive::alg_value(inst, q);
        report.opt_value = clairvoyant::opt_value_quantile_form(inst);
        report.bound = nonadaptive::eta_bound(cfg.n, cfg.p, q);
        if (cfg.trials > 0) {
            auto est = mc::estimate(inst, mc::fixed_quantile_policy(q), cfg.trials, cfg.seed,
                                    cfg.workers);
            report.mc_estimate = est.sum_objective.mean;
            report.mc_std_error = est.sum_objective.std_error;
        }
    } else if (cfg.algo == "adaptive") {
        Instance inst(cfg.n, io::parse_distribution(cfg.dist_spec), cfg.p, cfg.zeta);
        auto schedule = cfg.schedule_path.empty()
                            ? adaptive::solve_schedule(cfg.n, cfg.p, cfg.zeta)
                            : io::schedule_from_json(io::load_json_file(cfg.schedule_path));
        report.q = schedule.breakpoints[1];
        report.alg_value = adaptive::alg_value(inst, schedule);
        report.opt_value = clairvoyant::opt_value_quantile_form(inst);
        report.bound = cfg.n >= 2 ? adaptive::guarantee(cfg.n, cfg.p) : 1.0;
        if (cfg.trials > 0) {
            auto est = mc::estimate(inst, adaptive::make_policy(schedule), cfg.trials, cfg.seed,
                                    cfg.workers);
            report.mc_estimate = est.sum_objective.mean;
            report.mc_std_error = est.sum_objective.std_error;
        }
    } else if (cfg.algo == "hard-instance") {
        double a2 = cfg.a2 >= 0.0 ? cfg.a2 : cfg.p * (M_E - 2.0) * cfg.a1;
        auto hard = nonadaptive::hard_instance_report(cfg.a1, a2, cfg.beta, cfg.p, cfg.n);
        report.q = hard.lambda_star / static_cast<double>(cfg.n);
        report.alg_value = hard.alg_sup_value;
        report.opt_value = hard.opt_value;
        report.bound = osud::kOneMinusInvE + 0.01;
        upper_bound_check = true;
    } else if (cfg.algo == "max") {
        Instance inst(cfg.n, io::parse_distribution(cfg.dist_spec), cfg.p, cfg.zeta);
        auto lb = maxvariant::cr_lower_bound_max(cfg.n, cfg.p);
        double q = cfg.q > 0.0 ? cfg.q : lb.lambda / static_cast<double>(cfg.n);
        auto mv = maxvariant::make_report(inst, q);
        report.q = q;
        report.alg_value = mv.alg_value;
        report.opt_value = mv.opt_value;
        report.bound = mv.lower_bound;
        if (cfg.trials > 0) {
            auto est = mc::estimate(inst, mc::fixed_quantile_policy(q), cfg.trials, cfg.seed,
                                    cfg.workers);
            report.mc_estimate = est.max_objective.mean;
            report.mc_std_error = est.max_objective.std_error;
        }
    } else {
        throw std::invalid_argument("unknown --algo: " + cfg.algo);
    }
    report.ratio = report.alg_value / report.opt_value;
    std::cout << "algo=" << report.algo << " n=" << report.n << " p=" << num(report.p)
              << " zeta=" << num(report.zeta) << " q=" << num(report.q) << "\n"
              << "alg_value=" << num(report.alg_value) << " opt_value=" << num(report.opt_value)
              << " ratio=" << num(report.ratio) << " bound=" << num(report.bound) << "\n";
    if (report.mc_estimate)
        std::cout << "mc_estimate=" << num(*report.mc_estimate)
                  << " mc_std_error=" << num(*report.mc_std_error) << " trials=" << report.trials
                  << " seed=" << report.seed << "\n";
    if (!cfg.out.empty()) write_report(report, cfg.out);
    bool ok = upper_bound_check ? report.ratio <= report.bound + cfg.tol
                                : report.ratio >= report.bound - cfg.tol;
    std::cout << (ok ? "bound check: ok" : "bound check: VIOLATED") << "\n";
    return ok ? kExitOk : kExitCriterion;
}

int cmd_constants(const std::vector<double>& p_values) {
    using namespace osud;
    double theta = hill_kertz::theta_star(1e-10);
    std::cout << "theta_star=" << num(theta)
              << " residual=" << num(hill_kertz::integral_equation_residual(theta)) << "\n";
    std::cout << "one_minus_inv_e=" << num(kOneMinusInvE) << "\n";
    std::vector<double> grid = p_values;
    if (grid.empty()) grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    for (double p : grid) {
        double lam = hill_kertz::lambda(p);
        std::cout << "p=" << num(p) << " lambda=" << num(lam)
                  << " ratio=" << num(-std::expm1(-lam))
                  << " residual=" << num(hill_kertz::lambda_residual(lam, p)) << "\n";
    }
    return kExitOk;
}

int cmd_curves(const std::string& out_dir, double p_fixed) {
    using namespace osud;
    {
        std::ofstream out(out_dir + "/lambda_curve.csv");
        if (!out) throw std::runtime_error("cannot write lambda_curve.csv");
        out << "p,lambda,ratio\n";
        for (int k = 1; k <= 99; ++k) {
            double p = k / 100.0;
            double lam = hill_kertz::lambda(p);
            out << num(p) << "," << num(lam) << "," << num(-std::expm1(-lam)) << "\n";
        }
    }
    {
        std::ofstream out(out_dir + "/theta_convergence.csv");
        if (!out) throw std::runtime_error("cannot write theta_convergence.csv");
        out << "n,theta_n,guarantee\n";
        for (long n : {2L, 3L, 5L, 8L, 12L, 20L, 35L, 60L, 100L, 200L, 400L, 700L, 1000L}) {
            auto schedule = adaptive::solve_schedule(n, p_fixed, 0.0);
            out << n << "," << num(schedule.theta) << "," << num(adaptive::guarantee(n, p_fixed))
                << "\n";
        }
    }
    {
        std::ofstream out(out_dir + "/eta_table.csv");
        if (!out) throw std::runtime_error("cannot write eta_table.csv");
        const std::vector<double> ps{0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
        out << "n";
        for (double p : ps) out << ",eta_p" << num(p);
        out << "\n";
        for (long n = 1; n <= 10000; n = std::max(n + 1, (n * 5) / 3)) {
            out << n;
            for (double p : ps)
                out << "," << num(nonadaptive::eta_bound(n, p, nonadaptive::optimal_quantile(n, p)));
            out << "\n";
        }
    }
    std::cout << "wrote lambda_curve.csv, theta_convergence.csv, eta_table.csv to " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_ode(const std::string& out_path, int grid) {
    using namespace osud;
    double theta = hill_kertz::theta_star(1e-10);
    auto y = hill_kertz::solve_y(theta, grid);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "t,y,dy\n";
    for (std::size_t k = 0; k < y.grid().size(); ++k)
        out << num(y.grid()[k]) << "," << num(y.values()[k]) << "," << num(y.rhs(y.values()[k]))
            << "\n";
    std::cout << "theta_star=" << num(theta) << " points=" << y.grid().size() << " wrote "
              << out_path << "\n";
    return kExitOk;
}

int cmd_schedule(long n, double p, double zeta, const std::string& out_path) {
    using namespace osud;
    auto schedule = adaptive::solve_schedule(n, p, zeta);
    osud::io::save_json_file(out_path, osud::io::schedule_to_json(schedule));
    std::cout << "theta_n=" << num(schedule.theta) << " eps_1=" << num(schedule.breakpoints[1])
              << " wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_verify(const osud::verify::Options& options, bool timings) {
    auto results = osud::verify::run_suite(options);
    osud::verify::print_results(results, std::cout, timings);
    if (osud::verify::all_passed(results)) {
        std::cout << "all checks passed\n";
        return kExitOk;
    }
    std::cout << "FAILED:";
    for (const auto& r : results)
        if (!r.passed) std::cout << " " << r.name;
    std::cout << "\n";
    return kExitCriterion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online selection with uncertain disruption: solvers and experiments"};
    app.require_subcommand(1);

    auto* constants = app.add_subcommand("constants", "print the solved constants");
    std::vector<double> const_p;
    constants->add_option("--p", const_p, "disruption probabilities for the lambda table");

    auto* ratio = app.add_subcommand("ratio", "evaluate a policy against the benchmark");
    RatioConfig cfg;
    std::string config_path;
    ratio->add_option("--config", config_path, "JSON config file (flags override)");
    auto* algo_opt = ratio->add_option("--algo", cfg.algo, "nonadaptive|adaptive|hard-instance|max");
    auto* dist_opt = ratio->add_option("--dist", cfg.dist_spec,
                                       "uniform[:a,b]|pointmass:v|truncexp:r,c|power:k|@file.json");
    auto* n_opt = ratio->add_option("--n", cfg.n, "horizon");
    auto* p_opt = ratio->add_option("--p", cfg.p, "disruption probability");
    auto* zeta_opt = ratio->add_option("--zeta", cfg.zeta, "recovery fraction");
    auto* q_opt = ratio->add_option("--q", cfg.q, "fixed quantile (default: optimal)");
    auto* a1_opt = ratio->add_option("--a1", cfg.a1, "hard-instance spike weight");
    auto* a2_opt = ratio->add_option("--a2", cfg.a2, "hard-instance plateau weight");
    auto* beta_opt = ratio->add_option("--beta", cfg.beta, "hard-instance plateau width");
    auto* trials_opt = ratio->add_option("--trials", cfg.trials, "Monte Carlo trials (0 = none)");
    auto* seed_opt = ratio->add_option("--seed", cfg.seed, "seed (required with --trials)");
    auto* workers_opt = ratio->add_option("--workers", cfg.workers, "Monte Carlo worker threads");
    auto* tol_opt = ratio->add_option("--tol", cfg.tol, "bound-check tolerance");
    auto* out_opt = ratio->add_option("--out", cfg.out, "write report (.csv or .json)");
    ratio->add_option("--schedule", cfg.schedule_path,
                      "reuse a saved adaptive schedule instead of solving");

    auto* curves = app.add_subcommand("curves", "emit plot-ready CSV tables");
    std::string out_dir = ".";
    double curve_p = 0.5;
    curves->add_option("--out-dir", out_dir, "output directory");
    curves->add_option("--p", curve_p, "p for the theta convergence table");

    auto* ode = app.add_subcommand("ode", "export the solved threshold curve");
    std::string ode_out = "ode_solution.csv";
    int ode_grid = 16384;
    ode->add_option("--out", ode_out, "output CSV path");
    ode->add_option("--grid", ode_grid, "grid size");

    auto* schedule = app.add_subcommand("schedule", "solve and save an adaptive schedule");
    long sched_n = 100;
    double sched_p = 0.5, sched_zeta = 0.0;
    std::string sched_out = "schedule.json";
    schedule->add_option("--n", sched_n, "horizon");
    schedule->add_option("--p", sched_p, "disruption probability");
    schedule->add_option("--zeta", sched_zeta, "recovery fraction");
    schedule->add_option("--out", sched_out, "output JSON path");

    auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
    osud::verify::Options verify_options;
    verify_cmd->add_flag("--quick", verify_options.quick, "reduced smoke-level suite");
    verify_cmd->add_option("--workers", verify_options.workers, "Monte Carlo worker threads");
    verify_cmd->add_option("--seed", verify_options.seed, "suite seed");
    bool verify_timings = false;
    verify_cmd->add_flag("--timings", verify_timings, "append per-check runtimes");
    std::string fault;
    verify_cmd->add_option("--inject-fault", fault, "negative control (theta-star)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (constants->parsed()) return cmd_constants(const_p);
        if (ratio->parsed()) {
            if (!config_path.empty()) {
                RatioConfig from_file;
                apply_config_file(from_file, config_path);
                // flags win over file values
                if (!*algo_opt) cfg.algo = from_file.algo;
                if (!*dist_opt) cfg.dist_spec = from_file.dist_spec;
                if (!*n_opt) cfg.n = from_file.n;
                if (!*p_opt) cfg.p = from_file.p;
                if (!*zeta_opt) cfg.zeta = from_file.zeta;
                if (!*q_opt) cfg.q = from_file.q;
                if (!*a1_opt) cfg.a1 = from_file.a1;
                if (!*a2_opt) cfg.a2 = from_file.a2;
                if (!*beta_opt) cfg.beta = from_file.beta;
                if (!*trials_opt) cfg.trials = from_file.trials;
                if (!*seed_opt) {
                    cfg.seed = from_file.seed;
                    cfg.seed_given = from_file.seed_given;
                } else {
                    cfg.seed_given = true;
                }
                if (!*workers_opt) cfg.workers = from_file.workers;
                if (!*tol_opt) cfg.tol = from_file.tol;
                if (!*out_opt) cfg.out = from_file.out;
            } else {
                cfg.seed_given = seed_opt->count() > 0;
            }
            return cmd_ratio(cfg);
        }
        if (curves->parsed()) return cmd_curves(out_dir, curve_p);
        if (ode->parsed()) return cmd_ode(ode_out, ode_grid);
        if (schedule->parsed()) return cmd_schedule(sched_n, sched_p, sched_zeta, sched_out);
        if (verify_cmd->parsed()) {
            if (!fault.empty()) {
                if (fault == "theta-star")
                    verify_options.inject_theta_fault = true;
                else
                    throw std::invalid_argument("unknown fault: " + fault);
            }
            return cmd_verify(verify_options, verify_timings);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
