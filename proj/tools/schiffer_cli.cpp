#include <schiffer/schiffer.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

using namespace schiffer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> suite_names = {"kernels", "adjoint", "complete", "grunsky", "jump_derivatives",
                                              "reflection", "plemelj", "side_independence", "transmission"};

const std::map<std::string, std::vector<std::string>> suite_aliases = {
    {"schiffer", {"adjoint", "complete", "grunsky"}},
    {"jump", {"jump_derivatives", "reflection", "plemelj", "side_independence"}},
    {"all", suite_names},
};

// Every check record must carry one of these anchors.
const std::set<std::string> anchors = {
    "adjoint-identity", "bergman-adjoint", "bergman-reproducing", "complete-identity", "exact-transmission",
    "jump-derivatives", "kernel-symmetry", "left-inverse", "reflection-formula", "schiffer-vanishing",
    "transmission-bounded", "two-sided-limit", "grunsky-norm", "grunsky-monotone", "plemelj-jump",
    "plemelj-uniqueness", "truncation-convergence", "suite-error",
};

struct Config {
    CurveSpec model;
    std::size_t N = 16;
    std::size_t boundary_samples = 4096;
    std::vector<std::string> suites;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::map<std::string, double> tolerances;
    std::string sweep_param;
    std::vector<double> sweep_values;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(Errc::ConfigInvalid, msg); }

std::vector<std::string> expand_suites(const std::vector<std::string>& in)
{
    std::vector<std::string> out;
    auto push = [&](const std::string& s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& s : in) {
        if (auto it = suite_aliases.find(s); it != suite_aliases.end()) {
            for (const auto& t : it->second) push(t);
        } else if (std::find(suite_names.begin(), suite_names.end(), s) != suite_names.end()) {
            push(s);
        } else {
            invalid("unknown suite '" + s + "'");
        }
    }
    // Registered order, so reports do not depend on how suites were listed.
    std::vector<std::string> sorted;
    for (const auto& s : suite_names)
        if (std::find(out.begin(), out.end(), s) != out.end()) sorted.push_back(s);
    return sorted;
}

Config read_config(const std::string& path)
{
    Config c;
    if (path.empty()) return c;
    std::ifstream in(path);
    if (!in) invalid("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        invalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) invalid("config must be a JSON object");
    try {
        if (j.contains("model")) c.model = j["model"].get<CurveSpec>();
        if (j.contains("N")) c.N = j["N"].get<std::size_t>();
        if (j.contains("boundary_samples")) c.boundary_samples = j["boundary_samples"].get<std::size_t>();
        if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<std::map<std::string, double>>();
        if (j.contains("sweep")) {
            c.sweep_param = j["sweep"].at("parameter").get<std::string>();
            c.sweep_values = j["sweep"].at("values").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        invalid(std::string("bad config field: ") + e.what());
    }
    return c;
}

void validate(const Config& c)
{
    if (c.N < 8) invalid("N must be at least 8");
    if (c.boundary_samples < 64) invalid("boundary_samples must be at least 64");
    if (!c.sweep_param.empty()) {
        static const std::set<std::string> params = {"c", "N", "rho", "tau_im"};
        if (!params.count(c.sweep_param)) invalid("unknown sweep parameter '" + c.sweep_param + "'");
        if (c.sweep_values.empty()) invalid("sweep needs at least one value");
        if (c.sweep_param == "c" && c.model.kind == CurveKind::TorusDisk) invalid("sweep over c needs a sphere model");
        if ((c.sweep_param == "rho" || c.sweep_param == "tau_im") && c.model.kind != CurveKind::TorusDisk)
            invalid("sweep over " + c.sweep_param + " needs a torus model");
        if (c.sweep_param == "N")
            for (double v : c.sweep_values)
                if (v < 8 || v != std::floor(v)) invalid("sweep values of N must be integers >= 8");
    }
}

bool needs_full_assembly(const std::vector<std::string>& suites)
{
    for (const auto& s : suites)
        if (s != "kernels" && s != "grunsky" && s != "plemelj" && s != "side_independence" && s != "transmission") return true;
    return false;
}

double ellipse_parameter(const CurveSpec& s)
{
    if (s.kind == CurveKind::Circle) return 0.0;
    if (s.kind == CurveKind::ExteriorMap && s.coeffs.size() == 2 && s.coeffs[0] == cplx(0.0) && s.coeffs[1].imag() == 0.0)
        return s.coeffs[1].real();
    return std::nan("");
}

Report grunsky_suite(const SurfaceModel& m, const Assembly& A)
{
    Report r;
    r.title = "grunsky";
    auto g = grunsky_norm(m, A);
    r.data["nu"] = g.nu;
    r.data["bound"] = g.bound;
    // Strict inequality; the norm is below one for every quasicircle.
    r.add("Grunsky norm below one", "grunsky-norm", g.nu, 1.0 - 1e-12);
    double c = ellipse_parameter(m.spec);
    if (!std::isnan(c)) r.add("Grunsky norm equals ellipse parameter", "grunsky-norm", std::abs(g.nu - std::abs(c)), 1e-6);
    return r;
}

Report plemelj_suite(const SurfaceModel& m, std::size_t N, std::uint64_t seed)
{
    Report r;
    r.title = "plemelj";
    double tol = m.sphere() ? 1e-6 : 1e-4;
    double res = 0.0, uni = 0.0, holo = 0.0;
    for (const auto& h : random_harmonics(m, 3, N, seed)) {
        auto p = plemelj_solve(m, h, m.q);
        res = std::max(res, p.boundary_residual);
        uni = std::max(uni, p.uniqueness);
        HarmonicFun hh = h;
        hh.b.clear();
        auto ph = plemelj_solve(m, hh, m.q);
        holo = std::max({holo, detail::harmonic_distance(ph.jump.h1, hh), detail::harmonic_distance(ph.jump.h2, HarmonicFun{})});
    }
    r.add("boundary values split as h1 - h2", "plemelj-jump", res, tol);
    if (m.sphere()) r.add("re-solve returns the same pair", "plemelj-uniqueness", uni, 1e-6);
    r.add("holomorphic data gives (h, 0)", "plemelj-jump", holo, 1e-9);
    return r;
}

Report run_suite(const std::string& s, const SurfaceModel& m, const Assembly& A, std::size_t N, std::uint64_t seed)
{
    if (s == "kernels") return verify_kernels(m, seed);
    if (s == "adjoint") return verify_adjoint_identity(m, A, seed);
    if (s == "complete") return verify_complete_identity(m, A);
    if (s == "grunsky") return grunsky_suite(m, A);
    if (s == "jump_derivatives") return verify_jump_derivatives(m, A, random_harmonics(m, 5, N, seed), m.q);
    if (s == "reflection") return verify_reflection(m, A, random_harmonics(m, 3, N, seed), m.q);
    if (s == "plemelj") return plemelj_suite(m, N, seed);
    if (s == "side_independence") return verify_side_independence(m, random_harmonics(m, 3, N, seed), m.q);
    return verify_transmission(m, random_harmonics(m, 3, N, seed), N);
}

bool genus0_only(const std::string& s) { return s == "reflection" || s == "side_independence" || s == "transmission"; }

struct Row {
    double value = 0.0;
    Report report;
    std::map<std::string, double> seconds;
};

// One model, all selected suites. Suite errors become failing records.
Row run_model(const Config& c, const CurveSpec& spec, std::size_t N, const std::string& prefix)
{
    Row row;
    auto t0 = std::chrono::steady_clock::now();
    auto lap = [&](const std::string& key) {
        auto t1 = std::chrono::steady_clock::now();
        row.seconds[key] = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
    };
    SurfaceModel m = build_model(spec, N, 1e-10, c.boundary_samples);
    lap("model");
    Assembly A;
    A.N = N;
    bool need_T = std::any_of(c.suites.begin(), c.suites.end(), [](auto& s) { return s != "kernels" && s != "plemelj"; });
    if (needs_full_assembly(c.suites)) {
        A = assemble_all(m, N);
    } else if (need_T) {
        A.T11 = assemble_T(m, 0, 0, N);
        A.T12 = assemble_T(m, 0, 1, N);
    }
    lap("assembly");
    for (const auto& s : c.suites) {
        if (genus0_only(s) && !m.sphere()) {
            row.report.data["skipped"].push_back(s);
            continue;
        }
        Report r;
        try {
            r = run_suite(s, m, A, N, c.seed);
        } catch (const Error& e) {
            r.add(s + ": " + to_string(e.code()) + ": " + e.what(), "suite-error", std::nan(""), 0.0);
        }
        for (auto& ch : r.checks) {
            if (!anchors.count(ch.anchor)) throw std::logic_error("unregistered anchor " + ch.anchor);
            if (auto it = c.tolerances.find(ch.name); it != c.tolerances.end()) {
                ch.tolerance = it->second;
                ch.pass = ch.residual <= ch.tolerance;
            }
            ch.name = prefix + s + ": " + ch.name;
        }
        row.report.merge(Report{"", r.checks, {}});
        if (!r.data.empty()) row.report.data[s] = r.data;
        lap(s);
    }
    return row;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

// Largest residual / tolerance; a nonzero residual against a zero tolerance is infinite.
double worst_ratio(const Report& r)
{
    double w = 0.0;
    for (const auto& ch : r.checks) {
        if (std::isnan(ch.residual)) return ch.residual;
        if (ch.residual > 0.0) w = std::max(w, ch.tolerance > 0.0 ? ch.residual / ch.tolerance : INFINITY);
    }
    return w;
}

const Check* find_check(const Report& r, const std::string& suffix)
{
    for (const auto& ch : r.checks)
        if (ch.name.size() >= suffix.size() && ch.name.compare(ch.name.size() - suffix.size(), suffix.size(), suffix) == 0) return &ch;
    return nullptr;
}

int run(Config c, unsigned threads)
{
    validate(c);
    set_threads(threads);
    fs::create_directories(c.out);

    Report report;
    report.title = "schiffer";
    json timings = json::object();
    std::vector<Row> rows;

    if (c.sweep_param.empty()) {
        Row r = run_model(c, c.model, c.N, "");
        r.value = ellipse_parameter(c.model);
        rows.push_back(std::move(r));
    } else {
        for (double v : c.sweep_values) {
            CurveSpec s = c.model;
            std::size_t N = c.N;
            if (c.sweep_param == "c") s = [&] { auto e = CurveSpec::ellipse(v); e.first = c.model.first; return e; }();
            else if (c.sweep_param == "N") N = std::size_t(v);
            else if (c.sweep_param == "rho") s.rho = v;
            else s.tau = cplx(s.tau.real(), v);
            Row r = run_model(c, s, N, c.sweep_param + "=" + fmt("%g", v) + ": ");
            r.value = v;
            rows.push_back(std::move(r));
        }
    }

    json per_value = json::array();
    for (const auto& r : rows) {
        report.merge(Report{"", r.report.checks, {}});
        per_value.push_back({{"value", r.value}, {"data", r.report.data}});
        json t = json::object();
        for (auto& [k, s] : r.seconds) t[k] = s;
        timings[fmt("%g", r.value)] = t;
    }

    auto selected = [&](const std::string& s) { return std::find(c.suites.begin(), c.suites.end(), s) != c.suites.end(); };
    bool has = selected("grunsky"), complete = selected("complete");

    // Sweep tables.
    if (has && c.model.kind != CurveKind::TorusDisk && (c.sweep_param.empty() || c.sweep_param == "c")) {
        std::ofstream g(fs::path(c.out) / "grunsky_vs_c.csv");
        g << "c, nu\n";
        for (const auto& r : rows)
            if (!std::isnan(r.value) && r.report.data.contains("grunsky"))
                g << fmt("%g", r.value) << ", " << fmt("%.6f", r.report.data["grunsky"]["nu"].get<double>()) << "\n";
    }
    if (!c.sweep_param.empty()) {
        std::ofstream t(fs::path(c.out) / ("sweep_" + c.sweep_param + ".csv"));
        t << c.sweep_param << ",pass,worst_ratio";
        if (has) t << ",nu,nu_increasing";
        if (complete) t << ",complete_residual,complete_non_increasing";
        t << "\n";
        double nu_prev = -1.0, cr_prev = std::nan("");
        int nu_viol = 0, cr_viol = 0;
        for (const auto& r : rows) {
            t << fmt("%g", r.value) << "," << (r.report.pass() ? "true" : "false") << "," << fmt("%.6e", worst_ratio(r.report));
            if (has) {
                double nu = r.report.data.contains("grunsky") ? r.report.data["grunsky"]["nu"].get<double>() : std::nan("");
                bool up = nu > nu_prev;
                t << "," << fmt("%.17g", nu) << "," << (up ? "true" : "false");
                nu_viol += !up;
                nu_prev = nu;
            }
            if (complete) {
                const Check* ch = find_check(r.report, "complete identity residual");
                double cr = ch ? ch->residual : std::nan("");
                // Residuals below 1% of the tolerance count as converged.
                bool ok = std::isnan(cr_prev) || (ch && cr <= std::max(cr_prev, 0.01 * ch->tolerance));
                t << "," << fmt("%.6e", cr) << "," << (ok ? "true" : "false");
                cr_viol += !ok;
                cr_prev = cr;
            }
            t << "\n";
        }
        if (has && c.sweep_param == "c") report.add("sweep: nu strictly increasing in c (violations)", "grunsky-monotone", nu_viol, 0.0);
        if (complete && c.sweep_param == "N") report.add("sweep: complete residual non-increasing in N (violations)", "truncation-convergence", cr_viol, 0.0);
    }

    report.data["model"] = c.model;
    report.data["N"] = c.N;
    report.data["seed"] = c.seed;
    report.data["suites"] = c.suites;
    report.data["threads"] = threads;
    report.data["environment"] = {{"compiler", __VERSION__}, {"cplusplus", long(__cplusplus)}};
    if (!c.sweep_param.empty()) report.data["sweep"] = {{"parameter", c.sweep_param}, {"values", c.sweep_values}};
    report.data["results"] = per_value;

    std::ofstream(fs::path(c.out) / "report.json") << report.json().dump(2) << "\n";
    std::ofstream(fs::path(c.out) / "timings.json") << timings.dump(2) << "\n";
    std::ofstream s(fs::path(c.out) / "summary.csv");
    s << "name,anchor,residual,tolerance,pass\n";
    for (const auto& ch : report.checks)
        s << csv_field(ch.name) << "," << ch.anchor << "," << fmt("%.6e", ch.residual) << "," << fmt("%.3e", ch.tolerance) << ","
          << (ch.pass ? "true" : "false") << "\n";

    std::size_t failed = 0;
    for (const auto& ch : report.checks)
        if (!ch.pass) {
            ++failed;
            std::cerr << "FAIL " << ch.name << " [" << ch.anchor << "] residual " << ch.residual << " tolerance " << ch.tolerance << "\n";
        }
    std::cout << report.checks.size() - failed << "/" << report.checks.size() << " checks passed, report in " << c.out << "\n";
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Schiffer operator verification runs"};
    std::string config_path, out;
    unsigned threads = 0;
    std::vector<std::string> suites;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "worker threads (1 gives identical reports)")->check(CLI::Range(1u, 1024u));
    app.add_option("--suite", suites, "suite or alias to run (repeatable)");
    auto* seed_opt = app.add_option("--seed", seed, "seed for random test data");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Config c = read_config(config_path);
        if (!out.empty()) c.out = out;
        if (!suites.empty()) c.suites = suites;
        if (*seed_opt) c.seed = seed;
        if (c.suites.empty()) c.suites = {"all"};
        c.suites = expand_suites(c.suites);
        if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
        return run(c, threads);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        if (e.code() == Errc::ConfigInvalid || e.code() == Errc::NonUnivalent) return 2;
        return 1;
    }
}
