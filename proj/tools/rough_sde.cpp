#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "roughsde/bv_function.hpp"
#include "roughsde/csv_io.hpp"
#include "roughsde/errors.hpp"
#include "roughsde/fbm.hpp"
#include "roughsde/frac_calc.hpp"
#include "roughsde/grid_path.hpp"
#include "roughsde/lamperti.hpp"
#include "roughsde/parallel.hpp"
#include "roughsde/rng.hpp"
#include "roughsde/variability.hpp"
#include "roughsde/zaehle.hpp"

namespace {

using namespace roughsde;

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Config echo + result summary; overwritten on every run.
class Manifest {
public:
    void add(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
    }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

    void write(const std::string& dir) const {
        std::ofstream out(join_path(dir, "manifest.txt"));
        if (!out) throw std::runtime_error("cannot write manifest.txt in " + dir);
        for (const auto& [k, v] : lines_) out << k << "=" << v << "\n";
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

std::string emit(const std::string& dir, const std::string& sub,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows,
                 const std::string& tag = "") {
    CsvTable t;
    t.header = header;
    t.rows = rows;
    const std::string name = sub + (tag.empty() ? "" : "-" + tag) + "-" + utc_timestamp() + ".csv";
    write_csv(t, join_path(dir, name));
    return name;
}

SmoothFn make_F(const std::string& name) {
    SmoothFn F;
    if (name == "square") {
        F.value = [](double x) { return x * x; };
        F.deriv = [](double x) { return 2.0 * x; };
    } else if (name == "identity") {
        F.value = [](double x) { return x; };
        F.deriv = [](double) { return 1.0; };
    } else if (name == "sine") {
        F.value = [](double x) { return std::sin(x); };
        F.deriv = [](double x) { return std::cos(x); };
    } else {
        throw std::invalid_argument("unknown test function: " + name);
    }
    return F;
}

struct Opts {
    std::string sigma_spec;
    double H = 0.75;
    double T = 1.0;
    std::size_t n = 1024;
    std::vector<std::size_t> n_list;
    std::uint64_t seed = 1;
    std::size_t seeds = 20;
    double x0 = 0.0;
    std::vector<double> eps_list;
    std::optional<double> theta;
    double beta = 0.3;
    double var_eps = 0.05;
    std::size_t M = 400;
    std::string out = ".";
    double alpha = 0.25;        // experiment preset parameter
    double alpha_holder = 0.7;  // verify-bound path Holder order
    double alpha_var = 0.74;    // check-variability functional order
    std::size_t n_exp = 4096;   // experiment finest grid
    std::string F_name = "square";
    std::string preset;
};

void echo_common(Manifest& m, const std::string& sub, const Opts& o) {
    m.add("subcommand", sub);
    m.add("H", o.H);
    m.add("T", o.T);
    m.add("seed", o.seed);
    m.add("out", o.out);
    m.add("threads", static_cast<std::uint64_t>(thread_count()));
}

int cmd_gen_path(const Opts& o) {
    Grid grid(o.T, o.n);
    GridPath path = sample_fbm(o.H, grid, o.seed);
    const std::string name = "gen-path-" + utc_timestamp() + ".csv";
    write_path_csv(path, join_path(o.out, name));
    Manifest m;
    echo_common(m, "gen-path", o);
    m.add("n", static_cast<std::uint64_t>(o.n));
    m.add("csv", name);
    m.write(o.out);
    std::cout << "wrote " << name << "\n";
    return 0;
}

int cmd_transform(const Opts& o) {
    BVFunction sigma = parse_bv_spec(o.sigma_spec);
    LampertiTransform L(sigma, o.x0);
    const auto [lo, hi] = L.covered_x();
    std::vector<std::vector<std::string>> rows;
    const std::size_t rows_n = std::max<std::size_t>(o.n, 2);
    for (std::size_t k = 0; k <= rows_n; ++k) {
        const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(rows_n);
        rows.push_back({format_double(x), format_double(L.lambda_at(x))});
    }
    const std::string name = emit(o.out, "transform", {"x", "lambda"}, rows);
    Manifest m;
    echo_common(m, "transform", o);
    m.add("sigma", sigma.describe());
    m.add("base_point", o.x0);
    m.add("rows", static_cast<std::uint64_t>(rows_n + 1));
    m.add("csv", name);
    m.write(o.out);
    std::cout << "wrote " << name << "\n";
    return 0;
}

int cmd_solve(const Opts& o) {
    BVFunction sigma = parse_bv_spec(o.sigma_spec);
    Grid grid(o.T, o.n);
    GridPath Y = sample_fbm(o.H, grid, o.seed);
    SolveOptions sopt;
    sopt.eps_list = o.eps_list;
    sopt.theta = o.theta;
    sopt.beta = o.beta;
    sopt.with_residual = o.theta.has_value();
    SolveResult res = solve(sigma, Y, o.x0, sopt);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < Y.values.size(); ++k) {
        rows.push_back({format_double(grid.time(k)), format_double(Y.values[k]),
                        format_double(res.X.values[k])});
    }
    const std::string name = emit(o.out, "solve", {"t", "Y", "X"}, rows);

    Manifest m;
    echo_common(m, "solve", o);
    m.add("sigma", sigma.describe());
    m.add("n", static_cast<std::uint64_t>(o.n));
    m.add("x0", o.x0);
    m.add("lambda_defect", res.lambda_defect);
    m.add("csv", name);
    if (!res.tau.empty()) {
        std::vector<std::vector<std::string>> trows;
        for (const TauEntry& e : res.tau) {
            trows.push_back({format_double(e.eps), format_double(e.time),
                             e.reached ? "1" : "0", std::to_string(e.first_flagged_node)});
        }
        const std::string tname =
            emit(o.out, "solve", {"eps", "time", "reached", "node"}, trows, "tau");
        m.add("csv_tau", tname);
    }
    if (res.residual) {
        m.add("residual", *res.residual);
        m.add("theta_used", res.theta_used);
    }
    m.write(o.out);
    std::cout << "wrote " << name << " (lambda_defect=" << format_double(res.lambda_defect)
              << ")\n";
    return 0;
}

int cmd_verify_ito(const Opts& o) {
    SmoothFn F = make_F(o.F_name);
    const double theta = o.theta ? *o.theta : default_theta(o.H, o.beta);
    std::vector<std::size_t> ns = o.n_list.empty() ? std::vector<std::size_t>{1024, 4096}
                                                   : o.n_list;
    std::vector<std::vector<std::string>> rows;
    double prev = 0.0;
    bool decreasing = true;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        Grid grid(o.T, ns[i]);
        std::vector<double> res(o.seeds);
        for (std::size_t k = 0; k < o.seeds; ++k) {
            GridPath X = sample_fbm(o.H, grid, derive_seed(o.seed, k));
            res[k] = ito_residual(F, X, FractionalOrder(theta));
        }
        const double med = median(res);
        rows.push_back({std::to_string(ns[i]), format_double(med),
                        std::to_string(o.seeds)});
        if (i > 0 && med >= prev) decreasing = false;
        prev = med;
    }
    const std::string name = emit(o.out, "verify-ito", {"n", "median_residual", "seeds"}, rows);
    Manifest m;
    echo_common(m, "verify-ito", o);
    m.add("F", o.F_name);
    m.add("theta", theta);
    m.add("seeds", static_cast<std::uint64_t>(o.seeds));
    m.add("decreasing", decreasing ? "1" : "0");
    m.add("csv", name);
    m.write(o.out);
    std::cout << "wrote " << name << "\n";
    return 0;
}

int cmd_verify_bound(const Opts& o) {
    BVFunction sigma = parse_bv_spec(o.sigma_spec);
    Grid grid(o.T, o.n);
    const double theta = o.theta ? *o.theta : 0.3;
    const double p = 1.0;
    std::vector<std::vector<std::string>> rows;
    std::size_t fails = 0;
    for (std::size_t k = 0; k < o.seeds; ++k) {
        GridPath X = sample_fbm(o.H, grid, derive_seed(o.seed, k));
        std::vector<double> comp(X.values.size());
        for (std::size_t j = 0; j < comp.size(); ++j) comp[j] = sigma(X.values[j]);
        GridPath composite(grid, std::move(comp));
        const double lhs = gagliardo_seminorm(composite, FractionalOrder(theta), p).value;
        const double rhs =
            composite_bound_rhs(sigma, X, FractionalOrder(theta), p, o.alpha_holder, nullptr);
        const bool pass = lhs <= rhs + 1e-6;
        if (!pass) ++fails;
        rows.push_back({std::to_string(k), format_double(lhs), format_double(rhs),
                        pass ? "1" : "0"});
    }
    const std::string name = emit(o.out, "verify-bound", {"replica", "lhs", "rhs", "pass"}, rows);
    Manifest m;
    echo_common(m, "verify-bound", o);
    m.add("sigma", sigma.describe());
    m.add("n", static_cast<std::uint64_t>(o.n));
    m.add("theta", theta);
    m.add("alpha", o.alpha_holder);
    m.add("seeds", static_cast<std::uint64_t>(o.seeds));
    m.add("failures", static_cast<std::uint64_t>(fails));
    m.add("csv", name);
    m.write(o.out);
    if (fails > 0) {
        std::cerr << "[audit] gagliardo composite bound violated on " << fails << " of "
                  << o.seeds << " replicas\n";
        return 4;
    }
    std::cout << "wrote " << name << " (0 violations)\n";
    return 0;
}

int cmd_verify_mollifier(const Opts& o) {
    BVFunction sigma = parse_bv_spec(o.sigma_spec);
    Grid grid(o.T, o.n);
    const double theta = o.theta ? *o.theta : 0.3;
    const std::vector<int> chain{4, 16, 64, 256};
    Mollifier moll;
    bool dominated = true;
    std::vector<std::vector<std::string>> rows;
    for (int nm : chain) {
        MollifiedFunction sn = mollify(sigma, nm, moll);
        std::vector<double> vals(o.seeds);
        for (std::size_t k = 0; k < o.seeds; ++k) {
            GridPath X = sample_fbm(o.H, grid, derive_seed(o.seed, k));
            std::vector<double> diff(X.values.size());
            for (std::size_t j = 0; j < diff.size(); ++j) {
                const double s = sigma(X.values[j]);
                const double s_n = sn(X.values[j]);
                if (s_n < s - 1e-10) dominated = false;
                diff[j] = s_n - s;
            }
            vals[k] = gagliardo_seminorm(GridPath(grid, std::move(diff)),
                                         FractionalOrder(theta), 1.0)
                          .value;
        }
        rows.push_back({std::to_string(nm), format_double(median(vals))});
    }
    const std::string name = emit(o.out, "verify-mollifier", {"n_mollify", "median_seminorm"},
                                  rows);
    Manifest m;
    echo_common(m, "verify-mollifier", o);
    m.add("sigma", sigma.describe());
    m.add("n", static_cast<std::uint64_t>(o.n));
    m.add("theta", theta);
    m.add("seeds", static_cast<std::uint64_t>(o.seeds));
    m.add("dominated", dominated ? "1" : "0");
    m.add("csv", name);
    m.write(o.out);
    if (!dominated) {
        std::cerr << "[audit] mollifier domination sigma_n >= sigma failed\n";
        return 4;
    }
    std::cout << "wrote " << name << "\n";
    return 0;
}

int cmd_check_variability(const Opts& o) {
    Grid grid(o.T, o.n);
    VariabilityParams params(o.alpha_var, o.beta, o.var_eps);
    DriverSpec driver;
    driver.H = o.H;
    driver.seed = o.seed;
    const std::vector<double> ys = default_y_grid(driver, grid);
    VariabilityReport rep = estimate_assumption(driver, params, ys, o.M, grid);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < rep.y.size(); ++j) {
        rows.push_back({format_double(rep.y[j]), format_double(rep.mean_integral[j]),
                        format_double(rep.std_error[j])});
    }
    rows.push_back({"sup", format_double(rep.sup), rep.stable ? "stable" : "unstable"});
    const std::string name =
        emit(o.out, "check-variability", {"y", "mean_integral", "stderr"}, rows);
    Manifest m;
    echo_common(m, "check-variability", o);
    m.add("n", static_cast<std::uint64_t>(o.n));
    m.add("alpha", o.alpha_var);
    m.add("beta", o.beta);
    m.add("var_eps", o.var_eps);
    m.add("M", static_cast<std::uint64_t>(o.M));
    m.add("q", params.q());
    m.add("sup", rep.sup);
    m.add("argmax_y", rep.y[rep.argmax]);
    m.add("stable", rep.stable ? "1" : "0");
    m.add("sup_doubled", rep.sup_doubled);
    m.add("mean_of_sup", rep.mean_of_sup);
    m.add("csv", name);
    m.write(o.out);
    std::cout << "wrote " << name << " (sup=" << format_double(rep.sup)
              << " stable=" << (rep.stable ? "1" : "0") << ")\n";
    return 0;
}

int cmd_experiment(const Opts& o) {
    BVFunction sigma;
    if (o.preset == "step") {
        if (!(o.alpha > 0.0) || !(o.alpha < 1.0)) {
            throw std::invalid_argument("step preset needs alpha in (0,1)");
        }
        sigma = BVFunction::step(1.0 / o.alpha, 1.0 / (1.0 - o.alpha));
    } else if (o.preset == "power") {
        sigma = BVFunction::power(o.alpha);
    } else {
        sigma = BVFunction::cantor(o.alpha);
    }

    std::vector<std::size_t> ns = o.n_list;
    if (ns.empty()) {
        if (o.n_exp % 4 != 0 || o.n_exp < 32) {
            throw std::invalid_argument("experiment needs n divisible by 4 and >= 32");
        }
        ns = {o.n_exp / 4, o.n_exp / 2, o.n_exp};
    }

    std::vector<std::vector<std::string>> rows;
    double prev = 0.0;
    double defect_sup = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        Grid grid(o.T, ns[i]);
        std::vector<double> res(o.seeds);
        for (std::size_t k = 0; k < o.seeds; ++k) {
            GridPath Y = sample_fbm(o.H, grid, derive_seed(o.seed, k));
            SolveOptions sopt;
            sopt.eps_list = o.eps_list;
            sopt.theta = o.theta;
            sopt.beta = o.beta;
            sopt.with_residual = true;
            SolveResult r = solve(sigma, Y, o.x0, sopt);
            res[k] = r.residual.value_or(0.0);
            defect_sup = std::max(defect_sup, r.lambda_defect);
        }
        const double med = median(res);
        rows.push_back({std::to_string(ns[i]), format_double(med),
                        i == 0 ? "" : format_double(prev / med)});
        prev = med;
    }
    const std::string name =
        emit(o.out, "experiment", {"n", "median_sde_residual", "ratio_vs_prev"}, rows,
             o.preset);
    Manifest m;
    echo_common(m, "experiment", o);
    m.add("preset", o.preset);
    m.add("sigma", sigma.describe());
    m.add("alpha", o.alpha);
    m.add("x0", o.x0);
    m.add("seeds", static_cast<std::uint64_t>(o.seeds));
    m.add("lambda_defect_sup", defect_sup);
    m.add("csv", name);
    m.write(o.out);
    std::cout << "wrote " << name << "\n";
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Pathwise solver for dX = sigma(X) dY with BV sigma and Holder drivers"};
    app.require_subcommand(1);
    Opts o;

    auto add_driver = [&](CLI::App* c) {
        c->add_option("--H", o.H, "Hurst exponent of the fBm driver");
        c->add_option("--T", o.T, "time horizon");
        c->add_option("--seed", o.seed, "base seed");
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output directory"); };

    CLI::App* gen = app.add_subcommand("gen-path", "sample an fBm path to CSV");
    add_driver(gen);
    add_out(gen);
    gen->add_option("--n", o.n, "grid steps");

    CLI::App* tr = app.add_subcommand("transform", "dump the Lamperti transform table");
    tr->add_option("--sigma", o.sigma_spec, "coefficient spec, e.g. step:4,1.333")->required();
    tr->add_option("--x0", o.x0, "base point of the transform");
    tr->add_option("--n", o.n, "number of table rows minus one");
    add_out(tr);

    CLI::App* sv = app.add_subcommand("solve", "solve dX = sigma(X) dY pathwise");
    sv->add_option("--sigma", o.sigma_spec, "coefficient spec")->required();
    add_driver(sv);
    add_out(sv);
    sv->add_option("--n", o.n, "grid steps");
    sv->add_option("--x0", o.x0, "initial value");
    sv->add_option("--eps-list", o.eps_list, "tau thresholds")->delimiter(',');
    sv->add_option("--theta", o.theta, "pairing order; enables the residual check");
    sv->add_option("--beta", o.beta, "admissibility margin for the default order");

    CLI::App* vi = app.add_subcommand("verify-ito", "chain-rule residual refinement table");
    add_driver(vi);
    add_out(vi);
    vi->add_option("--F", o.F_name, "test function: square, identity, sine");
    vi->add_option("--n-list", o.n_list, "grid sizes")->delimiter(',');
    vi->add_option("--seeds", o.seeds, "replica count");
    vi->add_option("--theta", o.theta, "pairing order");
    vi->add_option("--beta", o.beta, "admissibility margin for the default order");

    CLI::App* vb = app.add_subcommand("verify-bound", "composite Gagliardo bound ensemble");
    vb->add_option("--sigma", o.sigma_spec, "coefficient spec")->required();
    add_driver(vb);
    add_out(vb);
    vb->add_option("--n", o.n, "grid steps");
    vb->add_option("--seeds", o.seeds, "replica count");
    vb->add_option("--theta", o.theta, "seminorm order (default 0.3)");
    vb->add_option("--alpha", o.alpha_holder, "Holder order of the path factor");

    CLI::App* vm = app.add_subcommand("verify-mollifier",
                                      "smoothing convergence table for sigma_n");
    vm->add_option("--sigma", o.sigma_spec, "coefficient spec")->required();
    add_driver(vm);
    add_out(vm);
    vm->add_option("--n", o.n, "grid steps");
    vm->add_option("--seeds", o.seeds, "replica count");
    vm->add_option("--theta", o.theta, "seminorm order (default 0.3)");

    CLI::App* cv = app.add_subcommand("check-variability",
                                      "Monte Carlo audit of the variability assumption");
    add_driver(cv);
    add_out(cv);
    cv->add_option("--n", o.n, "grid steps");
    cv->add_option("--alpha", o.alpha_var, "Holder order in the functional");
    cv->add_option("--beta", o.beta, "integrand exponent");
    cv->add_option("--var-eps", o.var_eps, "variability margin eps");
    cv->add_option("--M", o.M, "replica count (doubled internally)");

    CLI::App* ex = app.add_subcommand("experiment", "preset end-to-end convergence study");
    ex->add_option("preset", o.preset, "step, power, or cantor")
        ->required()
        ->check(CLI::IsMember({"step", "power", "cantor"}));
    add_driver(ex);
    add_out(ex);
    ex->add_option("--alpha", o.alpha,
                   "preset parameter: step jump ratio alpha, power exponent gamma, "
                   "cantor floor eps0");
    ex->add_option("--n", o.n_exp, "finest grid; chain is n/4, n/2, n");
    ex->add_option("--n-list", o.n_list, "explicit grid chain")->delimiter(',');
    ex->add_option("--seeds", o.seeds, "replica count");
    ex->add_option("--x0", o.x0, "initial value");
    ex->add_option("--eps-list", o.eps_list, "tau thresholds")->delimiter(',');
    ex->add_option("--theta", o.theta, "pairing order override");
    ex->add_option("--beta", o.beta, "admissibility margin for the default order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::filesystem::create_directories(o.out);
        if (gen->parsed()) return cmd_gen_path(o);
        if (tr->parsed()) return cmd_transform(o);
        if (sv->parsed()) return cmd_solve(o);
        if (vi->parsed()) return cmd_verify_ito(o);
        if (vb->parsed()) return cmd_verify_bound(o);
        if (vm->parsed()) return cmd_verify_mollifier(o);
        if (cv->parsed()) return cmd_check_variability(o);
        if (ex->parsed()) return cmd_experiment(o);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const InfeasibleIntegrand& e) {
        std::cerr << "[audit] " << e.what() << "\n";
        return 4;
    } catch (const InternalError& e) {
        std::cerr << "[audit] " << e.what() << "\n";
        return 4;
    } catch (const NonIntegrableCoefficient& e) {
        std::cerr << "[precondition] " << e.what() << "\n";
        return 3;
    } catch (const RangeError& e) {
        std::cerr << "[precondition] " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "[precondition] " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "[precondition] " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "[audit] unexpected failure: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
