// Command line front end.  Every subcommand resolves a RunConfig (defaults,
// then --config file, then flags), runs library calls, and emits a CSV or
// text report whose leading '#' lines echo the numerics-relevant settings.
// Exit codes: 0 success, 1 computation error, 2 usage error.

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rsmoments/coeffs.hpp"
#include "rsmoments/config.hpp"
#include "rsmoments/constants.hpp"
#include "rsmoments/errterm.hpp"
#include "rsmoments/fourier.hpp"
#include "rsmoments/moments.hpp"
#include "rsmoments/radicals.hpp"

using namespace rsmoments;

namespace {

// bad invocations (as opposed to computations that fail); mapped to exit 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> xs;
    if (count <= 1) {
        xs.push_back(lo);
        return xs;
    }
    for (int i = 0; i < count; ++i)
        xs.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    return xs;
}

CoeffTable load_table(const RunConfig& cfg, std::uint64_t need) {
    const std::string dir = resolve_cache_dir(cfg);
    const std::string path = find_cache_at_least(dir, cfg.kappa, need);
    if (path.empty())
        throw UsageError("no coefficient cache holding n >= " + std::to_string(need) +
                         " under " + dir + "; run `rsmoments coeffs --n " +
                         std::to_string(need) + "` first");
    return compute_coeffs(load_fourier(path, cfg.kappa), cfg.threads);
}

// overrides if given, else a sidecar, else a fresh rho=2 fit over the top
// three octaves of the table
CalibrationConstants resolve_calibration(const RunConfig& cfg, const CoeffTable& ct,
                                         const std::string& sidecar) {
    if (cfg.A.has_value() != cfg.Z0.has_value())
        throw UsageError("calibration overrides need both a= and z0=");
    if (cfg.A) return user_calibration(*cfg.A, *cfg.Z0);
    if (!sidecar.empty()) return load_calibration(sidecar);
    const double n = static_cast<double>(ct.size());
    return calibrate(ct, 2, log_spaced(n / 8 + 0.37, n - 0.63, 4096));
}

void emit(const std::vector<std::string>& lines, const std::string& out_path) {
    if (out_path.empty()) {
        for (const auto& l : lines) std::cout << l << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw std::runtime_error("write failed for " + out_path);
}

std::vector<std::string> report_rows(const RunConfig& cfg, const std::string& header,
                                     const std::vector<MomentReport>& reps) {
    std::vector<std::string> lines = config_echo(cfg);
    if (cfg.format == "text") {
        for (const auto& r : reps) {
            lines.push_back("k: " + std::to_string(r.k));
            lines.push_back("T1: " + fmt_double(r.T1));
            lines.push_back("T2: " + fmt_double(r.T2));
            if (r.has_y) lines.push_back("y: " + fmt_double(r.y));
            if (r.regime_warning) lines.push_back("warning: outside the stated y regime");
            lines.push_back("integral: " + fmt_double(r.integral));
            lines.push_back("prediction: " + fmt_double(r.prediction));
            lines.push_back("ratio: " + fmt_double(r.ratio));
            lines.push_back("nodes: " + std::to_string(r.nodes));
            lines.push_back("seconds: " + fmt_double(r.seconds));
            lines.push_back("");
        }
        if (!reps.empty()) lines.pop_back();
        return lines;
    }
    lines.push_back(header);
    for (const auto& r : reps)
        lines.push_back(csv_row({std::to_string(r.k), fmt_double(r.T1), fmt_double(r.T2),
                                 fmt_double(r.has_y ? r.y : 0.0), fmt_double(r.integral),
                                 fmt_double(r.prediction), fmt_double(r.ratio),
                                 std::to_string(r.nodes), fmt_double(r.seconds)}));
    return lines;
}

constexpr const char* kMomentHeader = "k,T1,T2,y,integral,prediction,ratio,nodes,seconds";

int run_tau(const RunConfig& cfg, const std::vector<std::uint64_t>& ns,
            const std::string& out_path) {
    std::uint64_t need = 0;
    for (std::uint64_t n : ns) {
        if (n == 0) throw UsageError("tau: --n must be >= 1");
        need = std::max(need, n);
    }
    const std::string cached = find_cache_at_least(resolve_cache_dir(cfg), cfg.kappa, need);
    FourierTable t = cached.empty() ? compute_fourier(need, {}, cfg.threads)
                                    : load_fourier(cached, cfg.kappa);
    // bare oracle rows, no config echo: the values are exact integers and
    // the spec'd example output is the row alone
    std::vector<std::string> lines;
    for (std::uint64_t n : ns) lines.push_back(std::to_string(n) + "," + t.at(n).get_str());
    emit(lines, out_path);
    return 0;
}

int run_coeffs(const RunConfig& cfg, const std::string& out_path) {
    if (cfg.N == 0) throw UsageError("coeffs: --n must be >= 1");
    const std::string dir = resolve_cache_dir(cfg);
    std::filesystem::create_directories(dir);
    FourierTable t = compute_fourier(cfg.N, {}, cfg.threads);
    const std::string path = cache_file_path(dir, cfg.kappa, cfg.N);
    save_fourier(t, path);
    std::vector<std::string> lines = config_echo(cfg);
    lines.push_back("path,n,kappa");
    lines.push_back(csv_row({path, std::to_string(cfg.N), std::to_string(cfg.kappa)}));
    emit(lines, out_path);
    return 0;
}

int run_constants(const RunConfig& cfg, int k, std::uint64_t trunc,
                  const std::string& out_path) {
    if (k < 3 || k > 5) throw UsageError("constants: --k must be 3, 4 or 5");
    if (trunc == 0) throw UsageError("constants: --trunc must be >= 1");
    CoeffTable ct = load_table(cfg, trunc);
    SeriesValue b = B_k(k, trunc, ct);
    std::vector<std::string> lines = config_echo(cfg);
    lines.push_back("k,l,N,s_kl,tail,B_k");
    for (int l = 1; l <= k - 1; ++l) {
        SeriesValue s = s_kl(k, l, trunc, ct);
        lines.push_back(csv_row({std::to_string(k), std::to_string(l), std::to_string(trunc),
                                 fmt_double(s.value), fmt_double(s.tail_estimate),
                                 fmt_double(b.value)}));
    }
    emit(lines, out_path);
    return 0;
}

int run_delta(const RunConfig& cfg, double x1, double x2, int grid, double y,
              const std::string& sidecar, const std::string& out_path) {
    if (!(x1 >= 1.0) || !(x2 > x1)) throw UsageError("delta: need 1 <= x1 < x2");
    if (grid < 1) throw UsageError("delta: --grid must be >= 1");
    if (y < 0) throw UsageError("delta: --y must be >= 0");
    CoeffTable ct = load_table(cfg, static_cast<std::uint64_t>(std::ceil(std::max(x2, y))));
    CalibrationConstants cal = resolve_calibration(cfg, ct, sidecar);
    std::vector<std::string> lines = config_echo(cfg);
    lines.push_back("# A=" + fmt_double(cal.A) + " Z0=" + fmt_double(cal.Z0) + " method=" +
                    (cal.method == CalibrationMethod::fitted ? "fitted" : "user"));
    lines.push_back("x,D0,D1,delta1,R1,R2");
    for (double x : log_spaced(x1, x2, grid)) {
        const double d1 = delta1(ct, cal, x);
        const double r1 = y >= 1.0 ? voronoi_R1(ct, x, y) : 0.0;
        lines.push_back(csv_row({fmt_double(x), fmt_double(riesz_mean(ct, x, 0)),
                                 fmt_double(riesz_mean(ct, x, 1)), fmt_double(d1),
                                 fmt_double(r1), fmt_double(d1 - r1)}));
    }
    emit(lines, out_path);
    if (!out_path.empty()) save_calibration(cal, out_path + ".cal");
    return 0;
}

int run_moment(const RunConfig& cfg, int k, double t1, double t2, double y, int grid,
               const std::string& sidecar, const std::string& out_path) {
    if (!(t1 >= 1.0) || !(t2 > t1)) throw UsageError("moment: need 1 <= t1 < t2");
    if (grid < 1) throw UsageError("moment: --grid must be >= 1");
    if (y < 0) throw UsageError("moment: --y must be >= 0");
    CoeffTable ct = load_table(cfg, static_cast<std::uint64_t>(std::ceil(std::max(t2, y))));
    CalibrationConstants cal = resolve_calibration(cfg, ct, sidecar);
    std::vector<MomentReport> reps;
    if (y >= 1.0) {
        // the remainder moments live on dyadic windows [T, 2T]
        if (grid == 1 && std::abs(t2 - 2.0 * t1) > 1e-9 * t1)
            throw UsageError("moment: with --y the window is dyadic; use --t2 = 2*t1 "
                             "or --grid > 1");
        for (double T : log_spaced(t1, t2 / 2.0, grid))
            reps.push_back(moment_R2(ct, cal, k, T, y, cfg.threads));
    } else if (k >= 3 && k <= 5) {
        const std::uint64_t trunc = std::min<std::uint64_t>(ct.size(), 1000);
        const double bk = B_k(k, trunc, ct).value;
        if (grid == 1) {
            reps.push_back(verify_theorem(k, ct, cal, bk, t1, t2, cfg.threads));
        } else {
            for (double T : log_spaced(t1, t2 / 2.0, grid))
                reps.push_back(verify_theorem(k, ct, cal, bk, T, 2.0 * T, cfg.threads));
        }
    } else {
        const double s = second_moment_constant(ct.size(), ct).value;
        const double c2 = (2.0 / 13.0) * std::pow(2.0 * M_PI, -4.0) * s;
        auto window = [&](double a, double b) {
            MomentReport r = integrate_delta1_power(ct, cal, k, a, b, cfg.threads);
            if (k == 2) {
                r.prediction = c2 * (std::pow(b, 3.25) - std::pow(a, 3.25));
                r.ratio = r.integral / r.prediction;
            }
            reps.push_back(r);
        };
        if (grid == 1) {
            window(t1, t2);
        } else {
            for (double T : log_spaced(t1, t2 / 2.0, grid)) window(T, 2.0 * T);
        }
    }
    emit(report_rows(cfg, kMomentHeader, reps), out_path);
    return 0;
}

int run_oracle_count(const RunConfig& cfg, std::uint64_t rs_m, double delta, double c,
                     const std::vector<std::uint64_t>& blocks, const std::vector<int>& signs,
                     const std::string& out_path) {
    std::vector<std::string> lines = config_echo(cfg);
    lines.push_back("query-params,count");
    std::string params;
    std::uint64_t count = 0;
    if (rs_m > 0) {
        if (!(delta > 0)) throw UsageError("oracle-count: --delta must be > 0");
        count = count_rs(rs_m, delta, c, cfg.budget, cfg.threads);
        params = "rs;M=" + std::to_string(rs_m) + ";delta=" + fmt_double(delta) +
                 ";c=" + fmt_double(c);
    } else {
        if (blocks.empty()) throw UsageError("oracle-count: give --rs-m or --blocks");
        if (signs.size() + 1 != blocks.size())
            throw UsageError("oracle-count: --signs needs one entry fewer than --blocks");
        for (int s : signs)
            if (s != 0 && s != 1) throw UsageError("oracle-count: --signs entries are 0 or 1");
        if (!(delta > 0)) throw UsageError("oracle-count: --delta must be > 0");
        CountQuery q;
        q.N = blocks;
        q.signs = signs;
        q.delta = delta;
        count = count_near_solutions(q, cfg.budget, cfg.threads);
        params = "near;blocks=";
        for (std::size_t i = 0; i < blocks.size(); ++i)
            params += (i ? ":" : "") + std::to_string(blocks[i]);
        params += ";signs=";
        for (std::size_t i = 0; i < signs.size(); ++i)
            params += (i ? ":" : "") + std::to_string(signs[i]);
        params += ";delta=" + fmt_double(delta);
    }
    lines.push_back(csv_row({params, std::to_string(count)}));
    emit(lines, out_path);
    return 0;
}

int run_calibrate(const RunConfig& cfg, int rho, int samples, const std::string& out_path) {
    if (rho != 2 && rho != 3) throw UsageError("calibrate: --rho must be 2 or 3");
    if (samples < 8) throw UsageError("calibrate: --samples must be >= 8");
    CoeffTable ct = load_table(cfg, cfg.N);
    const double n = static_cast<double>(ct.size());
    CalibrationConstants cal = calibrate(ct, rho, log_spaced(n / 8 + 0.37, n - 0.63, samples));
    std::vector<std::string> lines = config_echo(cfg);
    lines.push_back("A=" + fmt_double(cal.A));
    lines.push_back("Z0=" + fmt_double(cal.Z0));
    lines.push_back("method=fitted");
    lines.push_back("rho=" + std::to_string(cal.rho));
    lines.push_back("residual=" + fmt_double(cal.residual));
    lines.push_back("a_stderr=" + fmt_double(cal.a_stderr));
    lines.push_back("z0_stderr=" + fmt_double(cal.z0_stderr));
    emit(lines, out_path);
    return 0;
}

int run_experiment(const RunConfig& cfg, const std::string& name, int k, double t1, double t2,
                   int grid, double y, double factor, const std::string& sidecar,
                   const std::string& out_path) {
    if (name == "oscillatory") {
        std::vector<std::string> lines = config_echo(cfg);
        lines.push_back("alpha,beta,T,kind,integral,bound,ratio,exact");
        for (double alpha : {0.0, 0.25, 1.0})
            for (double beta : {1.0, 4.0, 16.0})
                for (double T : {1e2, 1e4})
                    for (OscKind kind : {OscKind::cosine, OscKind::sine}) {
                        OscillatoryBound ob = oscillatory_bound(alpha, beta, T, kind);
                        lines.push_back(csv_row(
                            {fmt_double(alpha), fmt_double(beta), fmt_double(T),
                             kind == OscKind::cosine ? "cos" : "sin", fmt_double(ob.integral),
                             fmt_double(ob.bound), fmt_double(ob.ratio),
                             ob.exact ? "1" : "0"}));
                    }
        emit(lines, out_path);
        return 0;
    }
    if (name == "theorem") {
        if (!(t1 >= 1.0) || !(t2 >= t1)) throw UsageError("experiment: need 1 <= t1 <= t2");
        CoeffTable ct = load_table(cfg, static_cast<std::uint64_t>(std::ceil(2.0 * t2)));
        CalibrationConstants cal = resolve_calibration(cfg, ct, sidecar);
        const std::uint64_t trunc = std::min<std::uint64_t>(ct.size(), 1000);
        std::vector<MomentReport> reps;
        for (int kk : {3, 4, 5}) {
            const double bk = B_k(kk, trunc, ct).value;
            for (double T : log_spaced(t1, t2, grid))
                reps.push_back(verify_theorem(kk, ct, cal, bk, T, 2.0 * T, cfg.threads));
        }
        emit(report_rows(cfg, kMomentHeader, reps), out_path);
        return 0;
    }
    if (name == "r2-scaling") {
        if (!(t1 >= 1.0)) throw UsageError("experiment: need t1 >= 1");
        if (!(factor > 1.0)) throw UsageError("experiment: --factor must be > 1");
        const double y0 = y > 0 ? y : std::pow(t1, 1.0 / 12.0);
        CoeffTable ct = load_table(
            cfg, static_cast<std::uint64_t>(std::ceil(std::max(2.0 * t1, factor * y0))));
        CalibrationConstants cal = resolve_calibration(cfg, ct, sidecar);
        MomentReport lo = moment_R2(ct, cal, k, t1, y0, cfg.threads);
        MomentReport hi = moment_R2(ct, cal, k, t1, factor * y0, cfg.threads);
        std::vector<std::string> lines = report_rows(cfg, kMomentHeader, {lo, hi});
        lines.push_back("# two-point ratio=" + fmt_double(lo.integral / hi.integral) +
                        " law=" + fmt_double(std::pow(factor, 0.75)));
        emit(lines, out_path);
        return 0;
    }
    throw UsageError("experiment: --name must be theorem, r2-scaling or oscillatory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"moment laboratory for the cusp-form Rankin-Selberg error term"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file, out_path, sidecar;
    RunConfig flags; // shadow values; presence decides whether they override
    app.add_option("--config", config_file, "key=value config file");
    auto* opt_n = app.add_option("--n", flags.N, "coefficient bound");
    auto* opt_cache = app.add_option("--cache", flags.cache_dir, "cache directory");
    auto* opt_kappa = app.add_option("--kappa", flags.kappa, "weight (12)");
    double a_flag = 0, z0_flag = 0;
    auto* opt_a = app.add_option("--a", a_flag, "main-term coefficient override");
    auto* opt_z0 = app.add_option("--z0", z0_flag, "linear-term override");
    auto* opt_threads = app.add_option("--threads", flags.threads, "worker count, 0 = cores");
    auto* opt_budget = app.add_option("--budget", flags.budget, "enumeration tuple budget");
    auto* opt_format = app.add_option("--format", flags.format, "csv or text")
                           ->check(CLI::IsMember({"csv", "text"}));
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--calibration", sidecar, "calibration sidecar to reuse");

    auto* cmd_tau = app.add_subcommand("tau", "exact Fourier coefficients, rows n,a(n)");
    std::vector<std::uint64_t> tau_ns;
    cmd_tau->add_option("--n", tau_ns, "indices to print")->required();

    auto* cmd_coeffs = app.add_subcommand("coeffs", "build and cache the coefficient table");

    auto* cmd_constants =
        app.add_subcommand("constants", "truncated series s_{k;l} and B_k, CSV");
    int con_k = 3;
    std::uint64_t con_trunc = 1000;
    cmd_constants->add_option("--k", con_k, "moment order, 3..5")->required();
    cmd_constants->add_option("--trunc", con_trunc, "series truncation")->required();

    auto* cmd_delta = app.add_subcommand("delta", "error-term samples, CSV x,D0,D1,delta1,R1,R2");
    double dx1 = 1, dx2 = 2, dy = 0;
    int dgrid = 100;
    cmd_delta->add_option("--x1", dx1, "range start")->required();
    cmd_delta->add_option("--x2", dx2, "range end")->required();
    cmd_delta->add_option("--grid", dgrid, "sample count, log spaced");
    cmd_delta->add_option("--y", dy, "expansion truncation for R1/R2");

    auto* cmd_moment = app.add_subcommand("moment", "integral of delta_1^k (or the remainder)");
    int mk = 2, mgrid = 1;
    double mt1 = 0, mt2 = 0, my = 0;
    cmd_moment->add_option("--k", mk, "power, 1..6")->required();
    cmd_moment->add_option("--t1", mt1, "range start")->required();
    cmd_moment->add_option("--t2", mt2, "range end")->required();
    cmd_moment->add_option("--y", my, "truncation; > 0 switches to the remainder moment");
    cmd_moment->add_option("--grid", mgrid, "number of dyadic windows between t1 and t2");
    std::string mreport;
    cmd_moment->add_option("--report", mreport, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));

    auto* cmd_count = app.add_subcommand("oracle-count", "exact solution counting, CSV");
    std::uint64_t rs_m = 0;
    double oc_delta = 0, oc_c = 0.25;
    std::vector<std::uint64_t> oc_blocks;
    std::vector<int> oc_signs;
    cmd_count->add_option("--rs-m", rs_m, "quadruple count over (M,2M]");
    cmd_count->add_option("--delta", oc_delta, "inequality threshold");
    cmd_count->add_option("--c", oc_c, "exponent for --rs-m mode");
    cmd_count->add_option("--blocks", oc_blocks, "dyadic block starts N_j")->delimiter(',');
    cmd_count->add_option("--signs", oc_signs, "sign pattern, 0=plus, 1=minus")->delimiter(',');

    auto* cmd_cal = app.add_subcommand("calibrate", "fit the main-term constants, sidecar form");
    int cal_rho = 2, cal_samples = 4096;
    cmd_cal->add_option("--rho", cal_rho, "Riesz order, 2 or 3");
    cmd_cal->add_option("--samples", cal_samples, "fit sample count");

    auto* cmd_exp = app.add_subcommand("experiment", "canned scaling experiments");
    std::string exp_name;
    int ek = 2, egrid = 3;
    double et1 = 1e4, et2 = 1e6, ey = 0, efactor = 4096;
    cmd_exp->add_option("--name", exp_name, "theorem | r2-scaling | oscillatory")->required();
    cmd_exp->add_option("--k", ek, "power for r2-scaling");
    cmd_exp->add_option("--t1", et1, "first window start");
    cmd_exp->add_option("--t2", et2, "last window start (theorem)");
    cmd_exp->add_option("--grid", egrid, "window count per k (theorem)");
    cmd_exp->add_option("--y", ey, "base truncation (r2-scaling), default t1^{1/12}");
    cmd_exp->add_option("--factor", efactor, "truncation multiplier (r2-scaling)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_file.empty()) cfg = load_config_file(config_file, cfg);
        if (*opt_n) cfg.N = flags.N;
        if (*opt_cache) cfg.cache_dir = flags.cache_dir;
        if (*opt_kappa) cfg.kappa = flags.kappa;
        if (*opt_a) cfg.A = a_flag;
        if (*opt_z0) cfg.Z0 = z0_flag;
        if (*opt_threads) cfg.threads = flags.threads;
        if (*opt_budget) cfg.budget = flags.budget;
        if (*opt_format) cfg.format = flags.format;
        if (cmd_moment->parsed() && !mreport.empty()) cfg.format = mreport;

        if (cmd_tau->parsed()) return run_tau(cfg, tau_ns, out_path);
        if (cmd_coeffs->parsed()) return run_coeffs(cfg, out_path);
        if (cmd_constants->parsed()) return run_constants(cfg, con_k, con_trunc, out_path);
        if (cmd_delta->parsed()) return run_delta(cfg, dx1, dx2, dgrid, dy, sidecar, out_path);
        if (cmd_moment->parsed())
            return run_moment(cfg, mk, mt1, mt2, my, mgrid, sidecar, out_path);
        if (cmd_count->parsed())
            return run_oracle_count(cfg, rs_m, oc_delta, oc_c, oc_blocks, oc_signs, out_path);
        if (cmd_cal->parsed()) return run_calibrate(cfg, cal_rho, cal_samples, out_path);
        if (cmd_exp->parsed())
            return run_experiment(cfg, exp_name, ek, et1, et2, egrid, ey, efactor, sidecar,
                                  out_path);
        throw UsageError("no subcommand"); // unreachable: require_subcommand(1)
    } catch (const UsageError& e) {
        std::cerr << "rsmoments: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "rsmoments: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "rsmoments: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rsmoments: error: " << e.what() << '\n';
        return 1;
    }
}
