// besselsg command-line driver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "besselsg/besselsg.hpp"

namespace fs = std::filesystem;
using namespace besselsg;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path out_path(const std::string& given, const std::string& fallback) {
    return given.empty() ? default_output_dir() / fallback : fs::path(given);
}

GridFunction load_f(const MeasureContext& ctx, const std::string& path, const std::string& left,
                    const std::string& right) {
    return read_grid_function(ctx, path, parse_extension(left), parse_extension(right));
}

std::vector<double> x_points(const std::string& spec, const GridFunction& f) {
    if (!spec.empty()) return parse_points(spec);
    std::vector<double> xs;
    for (double y : f.grid().nodes())
        if (y > 0.0 && (xs.empty() || xs.back() != y)) xs.push_back(y);
    return xs;
}

void add_f_options(CLI::App* sub, std::string& f, std::string& left, std::string& right) {
    sub->add_option("--f", f, "input function: CSV of (node, value); repeated nodes are jumps")->required();
    sub->add_option("--left-ext", left, "extension below the first node: zero, constant, log-linear")
        ->capture_default_str();
    sub->add_option("--right-ext", right, "extension beyond the last node: zero, constant, log-linear, none")
        ->capture_default_str();
}

BMOLattice parse_family(const std::string& spec, const GridFunction& f) {
    // "lattice" or "lattice:refine=2,rmin=0.01,rmax=10,lo=0,hi=10"
    const auto colon = spec.find(':');
    if (spec.substr(0, colon) != "lattice") throw UsageError("family spec must start with 'lattice'");
    int refine = 1;
    std::vector<std::pair<std::string, double>> kv;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw UsageError("bad family item '" + item + "'");
            kv.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
        }
    }
    for (const auto& [k, v] : kv)
        if (k == "refine") refine = static_cast<int>(v);
    BMOLattice L = default_bmo_lattice(f, refine);
    for (const auto& [k, v] : kv) {
        if (k == "refine") continue;
        if (k == "rmin") L.r_min = v;
        else if (k == "rmax") L.r_max = v;
        else if (k == "lo") L.lo = v;
        else if (k == "hi") L.hi = v;
        else throw UsageError("unknown family key '" + k + "'");
    }
    return L;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson and heat semigroups of the Bessel operator on (0, inf) with measure y^(2 lambda) dy.\n"
                 "Outputs default to $" + std::string(output_dir_env) + " (or the working directory)."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "besselsg 0.1.0");

    double lambda = 1.0;
    std::string kind_s = "poisson";
    std::string f_path, left_ext = "constant", right_ext = "zero", out, xgrid;

    // kernel-eval
    auto* ke = app.add_subcommand("kernel-eval", "Evaluate a kernel at one point or a CSV batch.\n"
                                                 "Batch output columns: t,x,y,value,est_error");
    double kt = 1.0, kx = 1.0, ky = 1.0;
    int korder = 16;
    double ktol = 1e-10;
    std::string kkind = "poisson", kpoints;
    ke->add_option("--lambda", lambda, "lambda > 0")->required();
    ke->add_option("--t", kt, "time");
    ke->add_option("--x", kx, "first space variable");
    ke->add_option("--y", ky, "second space variable");
    ke->add_option("--kind", kkind, "poisson, heat, poisson-dt, poisson-dx, poisson-dxdt, poisson-dydt")
        ->capture_default_str();
    ke->add_option("--points", kpoints, "CSV with columns t,x,y (batch mode)");
    ke->add_option("--out", out, "batch output CSV (default kernel_eval.csv)");
    ke->add_option("--order", korder, "theta rule order")->capture_default_str();
    ke->add_option("--tol", ktol, "relative accuracy demanded of the quadrature")->capture_default_str();

    // apply
    auto* ap = app.add_subcommand("apply", "Sample P_t f or W_t f on an output grid.\nOutput columns: x,value,est_error");
    double at = 1.0;
    ap->add_option("--lambda", lambda)->required();
    ap->add_option("--kind", kind_s, "poisson or heat")->capture_default_str();
    ap->add_option("--t", at, "time")->required();
    add_f_options(ap, f_path, left_ext, right_ext);
    ap->add_option("--x-grid", xgrid, "output points: log:lo:hi:n, linear:lo:hi:n or a comma list (default: f's nodes)");
    ap->add_option("--out", out, "output CSV (default apply.csv)");

    // maximal
    auto* mx = app.add_subcommand("maximal", "Discrete maximal function sup_j |P_{t_j} f(x)|, t_j = tmax q^j.\n"
                                             "Output columns: x,value,t_at,stability_gap");
    double tmax = 64.0, q = 0.8;
    int count = 60, refine = 2, slots = 16;
    mx->add_option("--lambda", lambda)->required();
    mx->add_option("--kind", kind_s)->capture_default_str();
    add_f_options(mx, f_path, left_ext, right_ext);
    mx->add_option("--tmax", tmax)->capture_default_str();
    mx->add_option("--q", q, "ratio in (0, 1)")->capture_default_str();
    mx->add_option("--count", count, "number of anchor times")->capture_default_str();
    mx->add_option("--refine", refine, "interior samples per slot")->capture_default_str();
    mx->add_option("--x-grid", xgrid);
    mx->add_option("--out", out, "output CSV (default maximal.csv)");

    // oscillation and variation
    double rho = 3.0;
    auto add_operator = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("--lambda", lambda)->required();
        s->add_option("--kind", kind_s)->capture_default_str();
        add_f_options(s, f_path, left_ext, right_ext);
        s->add_option("--tmax", tmax, "largest anchor time; anchors tmax 2^-j")->capture_default_str();
        s->add_option("--slots", slots)->capture_default_str();
        s->add_option("--refine", refine)->capture_default_str();
        s->add_option("--x-grid", xgrid);
        s->add_option("--out", out, std::string("output CSV (default ") + name + ".csv)");
        return s;
    };
    auto* os = add_operator("oscillation", "Oscillation operator over dyadic slots.\nOutput columns: x,value,stability_gap");
    auto* va = add_operator("variation", "rho-variation operator.\nOutput columns: x,value,stability_gap");
    va->add_option("--rho", rho, "rho > 2")->capture_default_str();

    // cz-decompose
    auto* cz = app.add_subcommand("cz-decompose",
                                  "Dyadic Calderon-Zygmund decomposition f = g + sum b_j at height eta.\n"
                                  "Writes <prefix>g.csv (node,value), <prefix>bad_<j>.csv (node,value) and\n"
                                  "<prefix>intervals.csv (j,left,right,mean)");
    double eta = 1.0;
    cz->add_option("--lambda", lambda)->required();
    cz->add_option("--eta", eta, "threshold > 0")->required();
    add_f_options(cz, f_path, left_ext, right_ext);
    cz->add_option("--out", out, "output prefix (default <output dir>/cz_)");

    // bmo-norm
    auto* bm = app.add_subcommand("bmo-norm", "BMO seminorm over an interval lattice.\n"
                                              "Prints: bmo,argmax_left,argmax_right,intervals");
    std::string family = "lattice";
    bm->add_option("--lambda", lambda)->required();
    add_f_options(bm, f_path, left_ext, right_ext);
    bm->add_option("--family", family, "lattice[:refine=k,rmin=..,rmax=..,lo=..,hi=..]")->capture_default_str();

    // atom
    auto* at_cmd = app.add_subcommand("atom", "Generate an H^1 atom on an interval.\nOutput columns: node,value");
    std::vector<double> interval;
    std::string shape = "haar";
    std::uint64_t seed = 0;
    at_cmd->add_option("--lambda", lambda)->required();
    at_cmd->add_option("--interval", interval, "center,radius")->required()->expected(2)->delimiter(',');
    at_cmd->add_option("--shape", shape, "haar, bump-pair or random")->capture_default_str();
    at_cmd->add_option("--seed", seed)->capture_default_str();
    at_cmd->add_option("--out", out, "output CSV (default atom.csv)");

    // verify
    auto* ve = app.add_subcommand("verify", "Run acceptance experiments; exit status 1 if any fails.\n"
                                            "Writes <name>.csv per experiment and summary.json.");
    bool all = false;
    std::vector<std::string> experiments;
    std::vector<double> lambdas;
    std::string config_path, out_dir;
    int workers = 0;
    std::optional<std::uint64_t> vseed;
    ve->add_flag("--all", all, "run every experiment");
    ve->add_option("--experiment", experiments, "experiment names (comma separated)")->delimiter(',');
    ve->add_option("--lambda", lambdas, "override the lambda set (comma separated)")->delimiter(',');
    ve->add_option("--config", config_path, "JSON run configuration");
    ve->add_option("--seed", vseed);
    ve->add_option("--out-dir", out_dir, "output directory");
    ve->add_option("--workers", workers, "parallel experiments");
    ve->add_option("--kind", kind_s, "semigroup for the operator experiments");
    ve->add_option("--rho", rho, "rho for the variation experiments");
    ve->add_flag("--list", "list experiment names and exit");

    // profile
    auto* pr = app.add_subcommand("profile", "Wall time of the hot paths.\n"
                                             "Output columns: section,parameter,calls,seconds,us_per_call");
    std::optional<std::string> sections;
    pr->add_option("--config", config_path, "JSON run configuration");
    pr->add_option("--sections", sections, "comma list of theta-quad, halfline-quad, variation-dp, cz ('' for none)");
    pr->add_option("--out", out, "output CSV (default profile.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const auto kind = [&] { return parse_semigroup_kind(kind_s); };

        if (ke->parsed()) {
            const MeasureContext ctx(lambda);
            const auto rule = theta_rule(ctx, korder, ktol);
            auto eval = [&](double t, double x, double y) -> Estimate {
                const KernelPoint p{t, x, y};
                if (kkind == "poisson") return poisson_kernel(ctx, p, rule);
                if (kkind == "heat") return heat_kernel(ctx, p, rule);
                if (kkind == "poisson-dt") return poisson_kernel_dt(ctx, p, rule);
                if (kkind == "poisson-dx") return poisson_kernel_dx(ctx, p, rule);
                if (kkind == "poisson-dxdt") return poisson_kernel_dxdt(ctx, p, rule);
                if (kkind == "poisson-dydt") return poisson_kernel_dydt(ctx, p, rule);
                throw UsageError("unknown kernel kind '" + kkind + "'");
            };
            if (kpoints.empty()) {
                const auto e = eval(kt, kx, ky);
                std::printf("%s,%s\n", format_double(e.value).c_str(), format_double(e.error).c_str());
                return 0;
            }
            const auto in = read_csv(kpoints);
            CsvTable t{{"t", "x", "y", "value", "est_error"}, {}};
            for (const auto& r : in.rows) {
                if (r.size() < 3) throw invalid_argument(kpoints + ": need t,x,y columns");
                const auto e = eval(r[0], r[1], r[2]);
                t.rows.push_back({r[0], r[1], r[2], e.value, e.error});
            }
            write_csv(out_path(out, "kernel_eval.csv"), t);
            return 0;
        }

        if (ap->parsed()) {
            const MeasureContext ctx(lambda);
            const auto f = load_f(ctx, f_path, left_ext, right_ext);
            const auto xs = x_points(xgrid, f);
            CsvTable t{{"x", "value", "est_error"}, {}};
            for (double x : xs) {
                const auto e = apply_point(ctx, kind(), f, at, x);
                t.rows.push_back({x, e.value, e.error});
            }
            write_csv(out_path(out, "apply.csv"), t);
            return 0;
        }

        if (mx->parsed()) {
            const MeasureContext ctx(lambda);
            const auto f = load_f(ctx, f_path, left_ext, right_ext);
            const auto grid = TimeGrid::geometric(tmax, q, count, refine);
            CsvTable t{{"x", "value", "t_at", "stability_gap"}, {}};
            for (double x : x_points(xgrid, f)) {
                const auto m = maximal(ctx, kind(), f, x, grid);
                t.rows.push_back({x, m.value, m.t_at, m.stability_gap});
            }
            write_csv(out_path(out, "maximal.csv"), t);
            return 0;
        }

        if (os->parsed() || va->parsed()) {
            const MeasureContext ctx(lambda);
            const auto f = load_f(ctx, f_path, left_ext, right_ext);
            const auto grid = TimeGrid::dyadic(tmax, slots, refine);
            CsvTable t{{"x", "value", "stability_gap"}, {}};
            for (double x : x_points(xgrid, f)) {
                const auto v = os->parsed() ? oscillation_operator(ctx, kind(), f, x, grid)
                                            : variation_operator(ctx, kind(), f, x, grid, rho);
                t.rows.push_back({x, v.value, v.stability_gap});
            }
            write_csv(out_path(out, os->parsed() ? "oscillation.csv" : "variation.csv"), t);
            return 0;
        }

        if (cz->parsed()) {
            const MeasureContext ctx(lambda);
            const auto f = load_f(ctx, f_path, left_ext, right_ext);
            const auto res = cz_decompose(ctx, f, eta);
            const std::string prefix = out.empty() ? (default_output_dir() / "cz_").string() : out;
            write_csv(prefix + "g.csv", grid_function_table(res.good));
            CsvTable iv{{"j", "left", "right", "mean"}, {}};
            for (std::size_t j = 0; j < res.bad_parts.size(); ++j) {
                const auto& bp = res.bad_parts[j];
                write_csv(prefix + "bad_" + std::to_string(j) + ".csv", grid_function_table(bp.b));
                iv.rows.push_back({static_cast<double>(j), bp.interval.left, bp.interval.right,
                                   mean_on_interval(ctx, f, bp.interval)});
            }
            write_csv(prefix + "intervals.csv", iv);
            const auto r = cz_check(ctx, f, res);
            std::printf("parts=%zu sup_ratio=%.6g sup_bound=%.6g bad_l1_ratio=%.6g measure_ratio=%.6g overlap=%d "
                        "reconstruction=%.3g\n",
                        res.bad_parts.size(), r.sup_ratio, res.sup_bound, r.bad_l1_ratio, r.measure_ratio, r.overlap,
                        r.reconstruction);
            return 0;
        }

        if (bm->parsed()) {
            const MeasureContext ctx(lambda);
            const auto f = load_f(ctx, f_path, left_ext, right_ext);
            const auto r = bmo_norm(ctx, f, lattice_intervals(parse_family(family, f)));
            std::printf("bmo,argmax_left,argmax_right,intervals\n%s,%s,%s,%zu\n", format_double(r.value).c_str(),
                        format_double(r.argmax.left).c_str(), format_double(r.argmax.right).c_str(), r.intervals);
            return 0;
        }

        if (at_cmd->parsed()) {
            const MeasureContext ctx(lambda);
            const auto a = make_atom(ctx, interval_normalize(interval[0], interval[1]), parse_atom_shape(shape), seed);
            write_csv(out_path(out, "atom.csv"), grid_function_table(a.profile));
            const auto r = validate_atom(ctx, a);
            std::printf("interval=[%s,%s] valid=%d size_slack=%.3g mean_slack=%.3g\n",
                        format_double(a.interval.left).c_str(), format_double(a.interval.right).c_str(), r.ok(),
                        r.size_slack, r.mean_slack);
            return 0;
        }

        if (ve->parsed()) {
            if (ve->count("--list")) {
                for (const auto& e : experiment_registry()) std::printf("%2d %s\n", e.criterion, e.name.c_str());
                return 0;
            }
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
            if (config_path.empty()) cfg.output_dir = default_output_dir() / "verify";
            if (!lambdas.empty()) cfg.lambdas = lambdas;
            if (!experiments.empty()) cfg.experiments = experiments;
            if (all) cfg.experiments.clear();
            if (!all && cfg.experiments.empty() && config_path.empty())
                throw UsageError("select experiments with --all or --experiment (see verify --list)");
            if (vseed) cfg.seed = *vseed;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (workers > 0) cfg.workers = workers;
            if (ve->count("--kind")) cfg.kind = kind();
            if (ve->count("--rho")) cfg.rho = rho;
            try {
                select_experiments(cfg.experiments);
            } catch (const invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto reports = run_suite(cfg, [](const ExperimentReport& r) {
                const Check* bad = r.first_failure();
                std::printf("%-4s %2d %-20s %8.2fs", r.passed ? "PASS" : "FAIL", r.criterion, r.name.c_str(),
                            r.runtime_s);
                if (!r.error.empty()) std::printf("  error: %s", r.error.c_str());
                else if (bad) std::printf("  %s: %.6g %s %.6g", bad->what.c_str(), bad->lhs, bad->op.c_str(), bad->rhs);
                std::printf("\n");
                std::fflush(stdout);
            });
            const auto failed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.passed; });
            const bool ok = failed == 0;
            if (ok)
                std::printf("all passed: %zu experiment(s), summary in %s\n", reports.size(),
                            (cfg.output_dir / "summary.json").string().c_str());
            else
                std::printf("FAILURES: %td of %zu experiment(s), summary in %s\n", failed, reports.size(),
                            (cfg.output_dir / "summary.json").string().c_str());
            return ok ? 0 : 1;
        }

        if (pr->parsed()) {
            RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
            std::vector<std::string> sel = profile_sections();
            if (sections) {
                sel.clear();
                std::stringstream ss(*sections);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) sel.push_back(item);
            }
            const auto rows = emit_profile(cfg, sel);
            const fs::path p = out_path(out, "profile.csv");
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            std::ofstream o(p);
            write_profile(o, rows);
            write_profile(std::cout, rows);
            return 0;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
