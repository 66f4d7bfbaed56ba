// Command-line front end: eval, compare, scan, counterexample, mc-verify and
// sde-verify subcommands emitting machine-readable JSON reports (CSV tables
// for scans on request).
//
// run_command() is the whole implementation; the binary in tools/ is a thin
// wrapper around it, and the test suites call it in-process. Reports carry no
// volatile fields by default (wall_time_ms stays null unless --timing is
// given), so a seeded command is byte-reproducible.
//
// Exit codes: 0 success, 1 verification/self-test failure, 2 invalid shape
// parameter, 3 parse error.

#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wishart/charfn.hpp"
#include "wishart/distribution.hpp"
#include "wishart/gindikin.hpp"
#include "wishart/linalg.hpp"
#include "wishart/process.hpp"
#include "wishart/rng.hpp"
#include "wishart/version.hpp"

namespace wishart::cli {

using Json = nlohmann::ordered_json;

struct CommandResult {
    int exit_code;
    std::string out;
    std::string err;
};

struct CliParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Scalar tokens are plain decimals, or the literal sqrt3/2 (optionally
// signed) so the golden counterexample point loses no precision on the way in.
inline double parse_scalar(std::string tok) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.erase(0, 1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
    if (tok.empty()) throw CliParseError("empty numeric token");

    double sign = 1.0;
    std::string body = tok;
    if (body.front() == '+' || body.front() == '-') {
        if (body.front() == '-') sign = -1.0;
        body.erase(0, 1);
    }
    if (body == "sqrt3/2") return sign * (std::sqrt(3.0) / 2.0);

    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw CliParseError("cannot parse number '" + tok + "'");
    return v;
}

inline long long parse_int(const std::string& tok) {
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw CliParseError("cannot parse integer '" + tok + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& tok) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw CliParseError("cannot parse seed '" + tok + "'");
    return static_cast<std::uint64_t>(v);
}

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

struct MatrixInput {
    std::string diag_csv;
    std::string entries_csv;
    std::vector<std::string> scaled;  // m, value
    std::vector<std::string> random;  // m, seed, max-norm
};

inline void add_matrix_options(CLI::App* sub, MatrixInput& mi) {
    sub->add_option("--diag", mi.diag_csv, "diagonal matrix from comma-separated values");
    sub->add_option("--entries", mi.entries_csv,
                    "full row-major entry list (must be symmetric)");
    sub->add_option("--scaled-identity", mi.scaled, "scalar multiple of I: <m> <value>")
        ->expected(2);
    sub->add_option("--random", mi.random,
                    "random symmetric matrix: <m> <seed> <max-norm>")
        ->expected(3);
}

inline SymMatrix build_matrix(const MatrixInput& mi, Json& echo) {
    const int sources = (!mi.diag_csv.empty() ? 1 : 0) + (!mi.entries_csv.empty() ? 1 : 0) +
                        (!mi.scaled.empty() ? 1 : 0) + (!mi.random.empty() ? 1 : 0);
    if (sources != 1)
        throw CliParseError("exactly one of --diag/--entries/--scaled-identity/--random "
                            "must be given");

    if (!mi.diag_csv.empty()) {
        std::vector<double> d;
        for (const std::string& tok : split_csv(mi.diag_csv)) d.push_back(parse_scalar(tok));
        echo = Json{{"kind", "diag"}, {"values", d}};
        return SymMatrix::diagonal(d);
    }
    if (!mi.entries_csv.empty()) {
        std::vector<double> e;
        for (const std::string& tok : split_csv(mi.entries_csv)) e.push_back(parse_scalar(tok));
        const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(e.size()))));
        if (static_cast<size_t>(m) * m != e.size())
            throw CliParseError("--entries needs m*m values, got " + std::to_string(e.size()));
        echo = Json{{"kind", "entries"}, {"dim", m}, {"values", e}};
        try {
            return SymMatrix::from_row_major(m, e, 1e-12);
        } catch (const std::invalid_argument& ex) {
            throw CliParseError(ex.what());
        }
    }
    if (!mi.scaled.empty()) {
        const int m = static_cast<int>(parse_int(mi.scaled[0]));
        const double s = parse_scalar(mi.scaled[1]);
        echo = Json{{"kind", "scaled-identity"}, {"dim", m}, {"scale", s}};
        return SymMatrix::scaled_identity(m, s);
    }
    const int m = static_cast<int>(parse_int(mi.random[0]));
    const std::uint64_t seed = parse_u64(mi.random[1]);
    const double max_norm = parse_scalar(mi.random[2]);
    echo = Json{{"kind", "random"}, {"dim", m}, {"seed", seed}, {"max_norm", max_norm}};
    wishart::detail::check_dim(m);
    Rng rng(seed);
    SymMatrix v(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) v.set(i, j, max_norm * (2.0 * rng.uniform() - 1.0));
    return v;
}

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json transform_json(const TransformResult& r) {
    return Json{{"value", complex_json(r.value)},
                {"method", method_name(r.method)},
                {"quad_error", r.quad_error},
                {"winding", r.winding}};
}

inline Json mc_json(const MCEstimate& e) {
    return Json{{"value", complex_json(e.value)},
                {"std_error", e.std_error},
                {"n_samples", e.n_samples},
                {"seed", e.seed}};
}

inline Json make_report(const std::string& command, const std::vector<std::string>& argv) {
    Json report;
    report["command"] = command;
    report["argv"] = argv;
    report["version"] = kVersion;
    report["parameters"] = Json::object();
    report["results"] = Json::array();
    report["seeds"] = Json::object();
    report["wall_time_ms"] = nullptr;
    return report;
}

inline double default_tol() {
    if (const char* env = std::getenv("WISHART_DEFAULT_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v >= 1e-13) return v;
    }
    return kDefaultQuadTol;
}

inline std::string format_g17(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double z_score(double diff, double se) {
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(diff) / se;
}

}  // namespace detail

inline CommandResult run_command(const std::vector<std::string>& args) {
    std::ostringstream out, err;

    CLI::App app{"Wishart characteristic function toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    bool timing = false;
    app.add_flag("--timing", timing, "report wall time (makes output non-reproducible)");

    const double tol_default = detail::default_tol();

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "evaluate the characteristic function");
    detail::MatrixInput eval_m;
    detail::add_matrix_options(eval, eval_m);
    double eval_alpha = 0.0;
    std::string eval_method = "quadrature";
    double eval_tol = tol_default;
    int eval_steps = 64;
    bool eval_json = false;
    eval->add_option("--alpha", eval_alpha, "shape parameter")->required();
    eval->add_option("--method", eval_method, "naive|quadrature|spectral|path")
        ->check(CLI::IsMember({"naive", "quadrature", "spectral", "path"}));
    eval->add_option("--tol", eval_tol, "quadrature tolerance");
    eval->add_option("--steps", eval_steps, "path-tracking grid size");
    eval->add_flag("--json", eval_json, "JSON output (the default)");

    // ---- compare ----
    auto* compare = app.add_subcommand("compare", "run all four methods and diff them");
    detail::MatrixInput cmp_m;
    detail::add_matrix_options(compare, cmp_m);
    double cmp_alpha = 0.0;
    double cmp_tol = tol_default;
    bool cmp_json = false;
    compare->add_option("--alpha", cmp_alpha, "shape parameter")->required();
    compare->add_option("--tol", cmp_tol, "quadrature tolerance");
    compare->add_flag("--json", cmp_json, "JSON output (the default)");

    // ---- scan ----
    auto* scan = app.add_subcommand("scan", "scan s -> Phi(s*v) along a ray");
    detail::MatrixInput scan_m;
    detail::add_matrix_options(scan, scan_m);
    double scan_alpha = 0.0;
    double scan_smax = 2.0;
    int scan_points = 101;
    bool scan_csv = false;
    bool scan_json = false;
    scan->add_option("--alpha", scan_alpha, "shape parameter")->required();
    scan->add_option("--s-max", scan_smax, "scan endpoint");
    scan->add_option("--points", scan_points, "number of scan points (>= 2)");
    scan->add_flag("--csv", scan_csv, "emit a CSV table instead of JSON");
    scan->add_flag("--json", scan_json, "JSON output (the default)");

    // ---- counterexample ----
    auto* counter = app.add_subcommand(
        "counterexample", "reproduce the m=3 branch counterexample (self-test)");

    // ---- mc-verify ----
    auto* mcv = app.add_subcommand("mc-verify",
                                   "Monte Carlo estimate vs quadrature evaluator");
    detail::MatrixInput mcv_m;
    detail::add_matrix_options(mcv, mcv_m);
    double mcv_alpha = 0.0;
    long long mcv_n = 100000;
    std::uint64_t mcv_seed = 1;
    double mcv_tol = tol_default;
    bool mcv_json = false;
    mcv->add_option("--alpha", mcv_alpha, "shape parameter")->required();
    mcv->add_option("--n", mcv_n, "number of Monte Carlo samples");
    mcv->add_option("--seed", mcv_seed, "RNG seed");
    mcv->add_option("--tol", mcv_tol, "quadrature tolerance");
    mcv->add_flag("--json", mcv_json, "JSON output (the default)");

    // ---- sde-verify ----
    auto* sde = app.add_subcommand("sde-verify",
                                   "Euler-Maruyama Laplace transform vs closed form");
    detail::MatrixInput sde_m;
    detail::add_matrix_options(sde, sde_m);
    double sde_alpha = 0.0;
    int sde_steps = 1000;
    int sde_paths = 10000;
    std::uint64_t sde_seed = 1;
    bool sde_json = false;
    sde->add_option("--alpha", sde_alpha, "shape parameter")->required();
    sde->add_option("--steps", sde_steps, "Euler steps on [0, 1]");
    sde->add_option("--paths", sde_paths, "number of simulated paths");
    sde->add_option("--seed", sde_seed, "RNG seed");
    sde->add_flag("--json", sde_json, "JSON output (the default)");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        // Rewrite the sqrt3/2 literal before CLI11 sees it: a leading dash
        // would otherwise be taken for an option name. 17 significant digits
        // round-trip to the same double, so no precision is lost.
        std::vector<std::string> rewritten = args;
        for (std::string& tok : rewritten) {
            if (tok == "sqrt3/2" || tok == "+sqrt3/2")
                tok = detail::format_g17(std::sqrt(3.0) / 2.0);
            else if (tok == "-sqrt3/2")
                tok = detail::format_g17(-std::sqrt(3.0) / 2.0);
        }
        std::vector<std::string> reversed(rewritten.rbegin(), rewritten.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return {0, out.str(), err.str()};
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return {0, out.str(), err.str()};
    } catch (const CLI::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return {3, out.str(), err.str()};
    }

    const auto started = std::chrono::steady_clock::now();
    auto finish = [&](Json& report, int code) -> CommandResult {
        if (timing) {
            const auto elapsed = std::chrono::duration<double, std::milli>(
                                     std::chrono::steady_clock::now() - started)
                                     .count();
            report["wall_time_ms"] = elapsed;
        }
        out << report.dump(2) << "\n";
        return {code, out.str(), err.str()};
    };

    try {
        if (eval->parsed()) {
            Json echo;
            const SymMatrix v = detail::build_matrix(eval_m, echo);
            const ShapeParam p(eval_alpha, v.dim());
            TransformResult r{Complex(0.0, 0.0), Method::naive, 0.0, 0};
            if (eval_method == "naive")
                r = naive_cf(v, p);
            else if (eval_method == "quadrature")
                r = cf_quadrature(StripPoint::fourier(v), p, eval_tol);
            else if (eval_method == "spectral")
                r = cf_spectral(StripPoint::fourier(v), p);
            else
                r = cf_path(v, p, eval_steps);

            Json report = detail::make_report("eval", args);
            report["parameters"] = Json{{"matrix", echo},
                                        {"alpha", eval_alpha},
                                        {"method", eval_method},
                                        {"tol", eval_tol}};
            report["results"].push_back(detail::transform_json(r));
            return finish(report, 0);
        }

        if (compare->parsed()) {
            Json echo;
            const SymMatrix v = detail::build_matrix(cmp_m, echo);
            const ShapeParam p(cmp_alpha, v.dim());
            const StripPoint pt = StripPoint::fourier(v);
            const TransformResult rn = naive_cf(v, p);
            const TransformResult rq = cf_quadrature(pt, p, cmp_tol);
            const TransformResult rs = cf_spectral(pt, p);
            const TransformResult rp = cf_path(v, p);

            Json report = detail::make_report("compare", args);
            report["parameters"] = Json{{"matrix", echo}, {"alpha", cmp_alpha}, {"tol", cmp_tol}};
            for (const TransformResult& r : {rn, rq, rs, rp})
                report["results"].push_back(detail::transform_json(r));
            auto diff = [](const TransformResult& a, const TransformResult& b) {
                return std::abs(a.value - b.value);
            };
            report["differences"] = Json{{"naive_quadrature", diff(rn, rq)},
                                         {"naive_spectral", diff(rn, rs)},
                                         {"naive_path", diff(rn, rp)},
                                         {"quadrature_spectral", diff(rq, rs)},
                                         {"quadrature_path", diff(rq, rp)},
                                         {"spectral_path", diff(rs, rp)}};
            report["winding"] = rp.winding;
            report["branch_defect"] = diff(rn, rq) > 100.0 * cmp_tol;
            return finish(report, 0);
        }

        if (scan->parsed()) {
            Json echo;
            const SymMatrix v = detail::build_matrix(scan_m, echo);
            const ShapeParam p(scan_alpha, v.dim());
            if (scan_points < 2) throw CliParseError("scan needs --points >= 2");

            struct Row {
                double s, nre, nim, cre, cim, diff;
                int winding;
            };
            std::vector<Row> rows;
            rows.reserve(static_cast<size_t>(scan_points));
            for (int k = 0; k < scan_points; ++k) {
                const double s = scan_smax * k / (scan_points - 1);
                const SymMatrix vs = s * v;
                const TransformResult rn = naive_cf(vs, p);
                const TransformResult rc = cf_spectral(StripPoint::fourier(vs), p);
                rows.push_back(Row{s, rn.value.real(), rn.value.imag(), rc.value.real(),
                                   rc.value.imag(), std::abs(rn.value - rc.value),
                                   rc.winding});
            }

            if (scan_csv) {
                out << "s,naive_re,naive_im,correct_re,correct_im,abs_diff,winding\n";
                for (const Row& r : rows)
                    out << detail::format_g17(r.s) << ',' << detail::format_g17(r.nre) << ','
                        << detail::format_g17(r.nim) << ',' << detail::format_g17(r.cre) << ','
                        << detail::format_g17(r.cim) << ',' << detail::format_g17(r.diff) << ','
                        << r.winding << "\n";
                return {0, out.str(), err.str()};
            }

            Json report = detail::make_report("scan", args);
            report["parameters"] = Json{{"matrix", echo},
                                        {"alpha", scan_alpha},
                                        {"s_max", scan_smax},
                                        {"points", scan_points}};
            for (const Row& r : rows)
                report["results"].push_back(Json{{"s", r.s},
                                                 {"naive", Json{{"re", r.nre}, {"im", r.nim}}},
                                                 {"correct", Json{{"re", r.cre}, {"im", r.cim}}},
                                                 {"abs_diff", r.diff},
                                                 {"winding", r.winding}});
            return finish(report, 0);
        }

        if (counter->parsed()) {
            const double root3_half = std::sqrt(3.0) / 2.0;
            const double inv_2sqrt2 = 1.0 / (2.0 * std::sqrt(2.0));
            const double two_sqrt2 = 2.0 * std::sqrt(2.0);
            const SymMatrix v_plus = SymMatrix::scaled_identity(3, root3_half);
            const SymMatrix v_minus = SymMatrix::scaled_identity(3, -root3_half);
            const ShapeParam p(0.5, 3);

            auto det_of = [](const SymMatrix& v) {
                ComplexMatrix pencil = sym_to_complex(v, Complex(0.0, -2.0));
                pencil.shift_diagonal(1.0);
                return complex_det(pencil);
            };
            auto eigen_sqrt = [](const SymMatrix& v) {
                const Spectrum es = sym_eigen(v);
                Complex prod(1.0, 0.0);
                for (double lam : es.eigenvalues)
                    prod *= std::sqrt(Complex(1.0, -2.0 * lam));
                return prod;
            };

            const Complex det_plus = det_of(v_plus);
            const Complex det_minus = det_of(v_minus);
            const Complex principal_sqrt =
                std::exp(0.5 * wishart::detail::principal_log(det_plus));

            struct Check {
                const char* name;
                Complex value;
                Complex expected;
            };
            const std::vector<Check> checks = {
                {"det_plus", det_plus, Complex(-8.0, 0.0)},
                {"det_minus", det_minus, Complex(-8.0, 0.0)},
                {"principal_sqrt_det", principal_sqrt, Complex(0.0, two_sqrt2)},
                {"eigen_sqrt_plus", eigen_sqrt(v_plus), Complex(0.0, -two_sqrt2)},
                {"eigen_sqrt_minus", eigen_sqrt(v_minus), Complex(0.0, two_sqrt2)},
                {"naive_cf_plus", naive_cf(v_plus, p).value, Complex(0.0, -inv_2sqrt2)},
                {"naive_cf_minus", naive_cf(v_minus, p).value, Complex(0.0, -inv_2sqrt2)},
                {"quadrature_cf_plus", cf_quadrature(StripPoint::fourier(v_plus), p).value,
                 Complex(0.0, inv_2sqrt2)},
                {"spectral_cf_plus", cf_spectral(StripPoint::fourier(v_plus), p).value,
                 Complex(0.0, inv_2sqrt2)},
                {"path_cf_plus", cf_path(v_plus, p).value, Complex(0.0, inv_2sqrt2)},
                {"quadrature_cf_minus", cf_quadrature(StripPoint::fourier(v_minus), p).value,
                 Complex(0.0, -inv_2sqrt2)},
                {"spectral_cf_minus", cf_spectral(StripPoint::fourier(v_minus), p).value,
                 Complex(0.0, -inv_2sqrt2)},
                {"path_cf_minus", cf_path(v_minus, p).value, Complex(0.0, -inv_2sqrt2)},
            };

            Json report = detail::make_report("counterexample", args);
            report["parameters"] =
                Json{{"alpha", 0.5}, {"dim", 3}, {"v", "±sqrt(3)/2 * I_3"}, {"tol", 1e-12}};
            bool all_pass = true;
            for (const Check& c : checks) {
                const double abs_err = std::abs(c.value - c.expected);
                const bool pass = abs_err <= 1e-12;
                all_pass = all_pass && pass;
                report["results"].push_back(Json{{"name", c.name},
                                                 {"value", detail::complex_json(c.value)},
                                                 {"expected", detail::complex_json(c.expected)},
                                                 {"abs_error", abs_err},
                                                 {"pass", pass}});
            }
            const int w_plus = cf_path(v_plus, p).winding;
            const int w_minus = cf_path(v_minus, p).winding;
            report["results"].push_back(Json{{"name", "path_winding_plus"},
                                             {"value", w_plus},
                                             {"expected", -1},
                                             {"pass", w_plus == -1}});
            report["results"].push_back(Json{{"name", "path_winding_minus"},
                                             {"value", w_minus},
                                             {"expected", 0},
                                             {"pass", w_minus == 0}});
            all_pass = all_pass && (w_plus == -1) && (w_minus == 0);
            report["status"] = all_pass ? "PASS" : "FAIL";
            return finish(report, all_pass ? 0 : 1);
        }

        if (mcv->parsed()) {
            Json echo;
            const SymMatrix v = detail::build_matrix(mcv_m, echo);
            const ShapeParam p(mcv_alpha, v.dim());
            const MCEstimate est = mc_charfn(v, p, mcv_n, mcv_seed);
            const TransformResult ref = cf_quadrature(StripPoint::fourier(v), p, mcv_tol);
            const double z_re = detail::z_score(est.value.real() - ref.value.real(),
                                                est.std_error);
            const double z_im = detail::z_score(est.value.imag() - ref.value.imag(),
                                                est.std_error);
            const bool pass = std::max(z_re, z_im) <= 4.0;

            Json report = detail::make_report("mc-verify", args);
            report["parameters"] = Json{{"matrix", echo},
                                        {"alpha", mcv_alpha},
                                        {"n", mcv_n},
                                        {"tol", mcv_tol}};
            report["seeds"] = Json{{"mc", mcv_seed}};
            report["results"].push_back(detail::mc_json(est));
            report["results"].push_back(detail::transform_json(ref));
            report["z_scores"] = Json{{"re", z_re}, {"im", z_im}};
            report["status"] = pass ? "PASS" : "FAIL";
            return finish(report, pass ? 0 : 1);
        }

        if (sde->parsed()) {
            Json echo;
            const SymMatrix u = detail::build_matrix(sde_m, echo);
            const ShapeParam p(sde_alpha, u.dim());
            const SdeConfig cfg(p, 1.0, sde_steps, sde_paths, sde_seed);
            const MCEstimate est = laplace_via_sde(cfg, u);
            const double target = std::exp(-phi_closed(1.0, u, p));
            const double dt = cfg.t_end / cfg.n_steps;
            const double band = 4.0 * est.std_error + kEulerBiasConstant * dt;
            const double abs_err = std::abs(est.value.real() - target);
            const bool pass = abs_err <= band;

            Json report = detail::make_report("sde-verify", args);
            report["parameters"] = Json{{"matrix", echo},
                                        {"alpha", sde_alpha},
                                        {"steps", sde_steps},
                                        {"paths", sde_paths},
                                        {"t_end", cfg.t_end}};
            report["seeds"] = Json{{"paths", sde_seed}};
            report["results"].push_back(detail::mc_json(est));
            report["target"] = target;
            report["abs_error"] = abs_err;
            report["tolerance_band"] = band;
            report["status"] = pass ? "PASS" : "FAIL";
            return finish(report, pass ? 0 : 1);
        }
    } catch (const ShapeError& e) {
        err << "invalid shape parameter: " << e.what() << "\n";
        return {2, out.str(), err.str()};
    } catch (const CliParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return {3, out.str(), err.str()};
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return {3, out.str(), err.str()};
    }

    err << "no subcommand executed\n";
    return {3, out.str(), err.str()};
}

}  // namespace wishart::cli
