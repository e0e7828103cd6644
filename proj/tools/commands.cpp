#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace biharm::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kMinRate = 1.8;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::vector<double> probe_grid(double left, double right, std::size_t probes) {
    std::vector<double> xs(probes);
    for (std::size_t i = 0; i < probes; ++i) {
        xs[i] = i + 1 == probes ? right
                                : left + (right - left) * static_cast<double>(i) / static_cast<double>(probes - 1);
    }
    return xs;
}

std::string solution_csv(const TransmissionSolution& sol, std::size_t probes) {
    std::ostringstream out;
    out << "side,x,index,value,order\n";
    for (const Side side : {Side::minus, Side::plus}) {
        const SubproblemSolution& u = sol.side(side);
        for (const double x : probe_grid(u.left(), u.right(), probes)) {
            for (int order = 0; order <= 3; ++order) {
                const Vector v = u.evaluate(order, x);
                for (Eigen::Index i = 0; i < v.size(); ++i) {
                    out << to_string(side) << ',' << fmt(x) << ',' << i << ',' << fmt(v(i)) << ',' << order << '\n';
                }
            }
        }
    }
    return out.str();
}

struct Check {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

ojson checks_json(const std::vector<Check>& checks) {
    ojson out = ojson::array();
    for (const auto& c : checks) {
        out.push_back({{"name", c.name}, {"value", number_or_null(c.value)}, {"threshold", c.threshold},
                       {"pass", c.pass}});
    }
    return out;
}

Check at_most(const std::string& name, double value, double threshold) {
    return {name, value, threshold, value <= threshold};
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw InputError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const TransmissionSolution sol = solve_transmission(cfg.problem, cfg.options);
    ojson report = ojson::parse(sol.report.to_json());
    report["route"] = sol.interface.route;
    report["n_x"] = cfg.options.n_x;
    if (cfg.exact) {
        const ErrorMetrics e = compare(field_of(sol), field_of(*cfg.exact), cfg.geom, cfg.options.probes);
        report["exact_error"] = e.sup;
        report["exact_relative_error"] = e.relative_sup;
    }
    write_atomic(cfg.out_dir / "solution.csv", solution_csv(sol, cfg.options.probes));
    write_atomic(cfg.out_dir / "residuals.json", report.dump(2) + "\n");
    if (!sol.report.all_within_budget()) {
        log << "residual budgets exceeded:";
        for (const auto& key : sol.report.failures()) {
            log << ' ' << key;
        }
        log << '\n';
        return kBudgetFailure;
    }
    log << "solve: all residual budgets met (" << cfg.out_dir.string() << ")\n";
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const TransmissionSolution sol = solve_transmission(cfg.problem, cfg.options);
    const OperatorDiagnostics diag = diagnose(sol.ops());
    std::vector<Check> checks;
    checks.push_back(at_most("route_gap", sol.route_gap, kRouteBudget));
    checks.push_back(at_most("det_gap", diag.det_gap, 1e-10));
    checks.push_back(at_most("block_identity", diag.block_identity, 1e-10));
    checks.push_back(at_most("adjugate", diag.adjugate, 1e-10));
    checks.push_back(at_most("spectral_mapping", diag.spectral_mapping, 1e-11));
    checks.push_back(at_most("max_commutator", diag.max_commutator, 1e-11));
    checks.push_back(at_most("reconstruction", sol.ops().generator->section().reconstruction_error(), 1e-10));
    checks.push_back(at_most("square_root", sol.ops().generator->square_error(), 1e-10));
    checks.push_back({"residual_budgets", static_cast<double>(sol.report.failures().size()), 0.0,
                      sol.report.all_within_budget()});

    // Oracle agreement: the gap must shrink under refinement like the oracle's h^2 error.
    const std::size_t n1 = std::max<std::size_t>(33, cfg.options.n_x);
    const std::size_t n2 = 2 * n1 - 1;
    const SectionOperator& section = cfg.generator->section();
    const FieldFn rep = field_of(sol);
    const double g1 = compare(rep, field_of(direct_solve(section, cfg.geom, cfg.k, cfg.problem.forcing,
                                                         cfg.problem.bc, n1)),
                              cfg.geom, cfg.options.probes)
                          .relative_sup;
    const double g2 = compare(rep, field_of(direct_solve(section, cfg.geom, cfg.k, cfg.problem.forcing,
                                                         cfg.problem.bc, n2)),
                              cfg.geom, cfg.options.probes)
                          .relative_sup;
    const double oracle_rate = g2 > 0.0 && g1 > 0.0 ? std::log(g1 / g2) / std::log(static_cast<double>(n2 - 1) /
                                                                                     static_cast<double>(n1 - 1))
                                                   : std::numeric_limits<double>::infinity();
    checks.push_back({"oracle_gap_rate", oracle_rate, kMinRate, g2 <= 1e-9 || oracle_rate >= kMinRate});

    ojson out;
    out["route"] = sol.interface.route;
    out["n_x"] = cfg.options.n_x;
    out["oracle_gap"] = {{"n_x", {n1, n2}}, {"relative_sup", {g1, g2}}};
    if (cfg.exact) {
        const ErrorMetrics e = compare(rep, field_of(*cfg.exact), cfg.geom, cfg.options.probes);
        out["exact_error"] = e.sup;
        if (cfg.exact->zero_forcing()) {
            checks.push_back(at_most("exact_error", e.relative_sup, 1e-9));
        } else {
            const ConvergenceTable t =
                convergence_study(*cfg.exact, Method::representation, cfg.convergence.levels, cfg.options.probes);
            out["forced_rate"] = number_or_null(t.fitted_rate);
            out["forced_floor"] = t.floor;
            checks.push_back({"forced_rate", t.fitted_rate, kMinRate, t.floor || t.fitted_rate >= kMinRate});
        }
    }
    out["diagnostics"] = {{"max_commutator", diag.max_commutator},
                          {"spectral_mapping", diag.spectral_mapping},
                          {"block_identity", diag.block_identity},
                          {"det_gap", diag.det_gap},
                          {"det_factorization", diag.det_factorization},
                          {"adjugate", diag.adjugate}};
    out["report"] = ojson::parse(sol.report.to_json());
    out["checks"] = checks_json(checks);
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        if (!c.pass) {
            log << "verify: check " << c.name << " failed (" << c.value << " vs " << c.threshold << ")\n";
        }
    }
    out["all_pass"] = all;
    write_atomic(cfg.out_dir / "verify.json", out.dump(2) + "\n");
    if (all) {
        log << "verify: all " << checks.size() << " checks passed\n";
    }
    return all ? kOk : kBudgetFailure;
}

int cmd_scan_symbols(const RunConfig& cfg, std::ostream& log) {
    const std::vector<double> grid = log_grid(cfg.scan.lo, cfg.scan.hi, cfg.scan.n);
    ojson sets = ojson::array();
    bool all = true;
    for (const auto& ctx : cfg.scan.parameter_sets) {
        const PositivityScan scan = positivity_scan(ctx, grid);
        all = all && scan.all_positive;
        sets.push_back({{"c", ctx.c},
                        {"d", ctx.d},
                        {"k_minus", ctx.k_minus},
                        {"k_plus", ctx.k_plus},
                        {"min", scan.min},
                        {"argmin", scan.argmin},
                        {"all_positive", scan.all_positive}});
    }
    ojson out;
    out["grid"] = {{"lo", cfg.scan.lo}, {"hi", cfg.scan.hi}, {"n", cfg.scan.n}};
    out["sets"] = sets;
    out["all_positive"] = all;
    write_atomic(cfg.out_dir / "scan.json", out.dump(2) + "\n");
    log << "scan-symbols: all_positive = " << (all ? "true" : "false") << '\n';
    return all ? kOk : kBudgetFailure;
}

int cmd_convergence(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.exact) {
        throw ConfigError("convergence needs a manufactured forcing with a known exact solution");
    }
    if (cfg.convergence.levels.size() < 3) {
        throw ConfigError("convergence needs at least 3 refinement levels");
    }
    const ConvergenceTable t =
        convergence_study(*cfg.exact, cfg.convergence.method, cfg.convergence.levels, cfg.options.probes);
    write_atomic(cfg.out_dir / "rates.csv", t.to_csv());
    if (t.floor) {
        log << "convergence: errors at the linear-algebra floor, rate undefined (floor)\n";
        return kOk;
    }
    log << "convergence: fitted rate " << t.fitted_rate << '\n';
    return t.fitted_rate >= kMinRate ? kOk : kBudgetFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Biharmonic transmission solver on a two-piece cylinder"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::string route;
    std::size_t n_x = 0;
    std::uint64_t seed = 0;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--route", route, "interface route: block, calculus or both");
        sub->add_option("--nx", n_x, "grid points per interval");
        sub->add_option("--seed", seed, "seed for random boundary data");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve and write fields plus residual report");
    CLI::App* verify = app.add_subcommand("verify", "solve, compare against the oracle and check identities");
    CLI::App* scan = app.add_subcommand("scan-symbols", "positivity scan of the determinant symbol");
    CLI::App* conv = app.add_subcommand("convergence", "refinement study against a manufactured solution");
    for (CLI::App* sub : {solve, verify, scan, conv}) {
        add_common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    CLI::App* active = app.get_subcommands().front();
    Overrides overrides;
    if (active->count("--route")) {
        overrides.route = route;
    }
    if (active->count("--nx")) {
        overrides.n_x = n_x;
    }
    if (active->count("--seed")) {
        overrides.seed = seed;
    }
    if (active->count("--out")) {
        overrides.out_dir = out_dir;
    }

    try {
        const RunConfig cfg = load_config(config_path, overrides);
        if (active == solve) {
            return cmd_solve(cfg, out);
        }
        if (active == verify) {
            return cmd_verify(cfg, out);
        }
        if (active == scan) {
            return cmd_scan_symbols(cfg, out);
        }
        return cmd_convergence(cfg, out);
    } catch (const SymmetryError& e) {
        err << "hypothesis violation: " << e.what() << '\n';
        return kHypothesisViolation;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violation: " << e.what() << '\n';
        return kHypothesisViolation;
    } catch (const Anomaly& e) {
        err << "anomaly: " << e.what() << '\n';
        return kBudgetFailure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kConfigError;
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ResolutionError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidGeometry& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DimensionMismatch& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace biharm::cli
