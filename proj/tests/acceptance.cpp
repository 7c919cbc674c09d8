// Acceptance run: one line per criterion. Criteria 1-9 are judged at N = 32;
// criterion 10 compares every residual across N = 8, 16, 32.
#include <schiffer/schiffer.hpp>

#include <cstdio>
#include <cstring>
#include <map>

using namespace schiffer;

namespace {

struct Entry {
    std::string name;
    double residual;
    double tol;
};

using Table = std::map<int, std::vector<Entry>>;

CurveSpec interior_map()
{
    CurveSpec s;
    s.kind = CurveKind::InteriorMap;
    s.coeffs = {0.2, 0.05};
    return s;
}

struct Model {
    std::string label;
    SurfaceModel m;
};

std::vector<Model> sphere_models(std::size_t N)
{
    return {{"circle", build_model(CurveSpec::circle(), N)},
            {"ellipse-0.2", build_model(CurveSpec::ellipse(0.2), N)},
            {"ellipse-0.5", build_model(CurveSpec::ellipse(0.5), N)},
            {"interior-map", build_model(interior_map(), N)}};
}

void put(Table& t, int crit, const std::string& label, const Report& r)
{
    for (auto& c : r.checks) t[crit].push_back({label + ": " + c.name, c.residual, c.tolerance});
}

double hdist(const HarmonicFun& u, const HarmonicFun& v)
{
    std::size_t n = std::max({u.a.size(), u.b.size(), v.a.size(), v.b.size()});
    double s = std::abs(u.c - v.c);
    for (std::size_t k = 0; k < n; ++k) {
        cplx da = (k < u.a.size() ? u.a[k] : 0.0) - (k < v.a.size() ? v.a[k] : 0.0);
        cplx db = (k < u.b.size() ? u.b[k] : 0.0) - (k < v.b.size() ? v.b[k] : 0.0);
        s = std::max({s, std::abs(da), std::abs(db)});
    }
    return s;
}

Table run(std::size_t N, const SurfaceModel& torus, const Assembly& TA)
{
    Table t;
    auto models = sphere_models(N);
    std::vector<Assembly> asm_;
    for (auto& md : models) asm_.push_back(assemble_all(md.m, N));

    // 1: Grunsky norm of the ellipse family.
    for (double c : {0.2, 0.5, 0.8}) {
        auto m = build_model(CurveSpec::ellipse(c), N);
        Assembly A;
        A.N = N;
        A.T11 = assemble_T(m, 0, 0, N);
        A.T12 = assemble_T(m, 0, 1, N);
        auto g = grunsky_norm(m, A);
        char buf[64];
        std::snprintf(buf, sizeof buf, "ellipse-%.1f", c);
        t[1].push_back({std::string(buf) + ": |nu - c|", std::abs(g.nu - c), 1e-6});
        t[1].push_back({std::string(buf) + ": nu < 1", g.nu < 1.0 ? 0.0 : g.nu, 0.0});
    }

    // 2, 3: complete and adjoint identities.
    for (std::size_t i = 0; i < models.size(); ++i) {
        put(t, 2, models[i].label, verify_complete_identity(models[i].m, asm_[i]));
        put(t, 3, models[i].label, verify_adjoint_identity(models[i].m, asm_[i], 5));
    }
    put(t, 2, "torus", verify_complete_identity(torus, TA));
    put(t, 3, "torus", verify_adjoint_identity(torus, TA, 5));

    // 4: singular values of T12 on the c = 0.5 ellipse and exact columns on the torus.
    {
        double c = 0.5;
        auto g = grunsky_norm(models[2].m, asm_[2]);
        Eigen::Index n = std::min<Eigen::Index>(16, g.sv_T12.size());
        double e = 0.0;
        // Descending order: sqrt(1 - c^(2(N-j))) for j = 0..N-1; compare the smallest n.
        Eigen::Index L = g.sv_T12.size();
        for (Eigen::Index j = 0; j < n; ++j) {
            double exact = std::sqrt(1.0 - std::pow(c, 2.0 * double(j + 1)));
            e = std::max(e, std::abs(g.sv_T12(L - 1 - j) - exact));
        }
        t[4].push_back({"ellipse-0.5: singular values of T12", e, 1e-6});
        double smin = g.sv_T12(L - 1);
        double gap = std::sqrt(1.0 - c * c) - 1e-4 - smin;
        t[4].push_back({"ellipse-0.5: sigma_min bound", std::max(0.0, gap), 0.0});
        CMat P = column_periods(torus, TA.T12);
        double p = P.rightCols(P.cols() - 1).cwiseAbs().maxCoeff();
        t[4].push_back({"torus: T12 column periods on V1", p, 1e-7});
    }

    // 5: jump derivatives, 20 random functions per model.
    for (std::size_t i = 0; i < models.size(); ++i) {
        auto hs = random_harmonics(models[i].m, 20, N, 100 + i);
        put(t, 5, models[i].label, verify_jump_derivatives(models[i].m, asm_[i], hs, models[i].m.q));
    }
    put(t, 5, "torus", verify_jump_derivatives(torus, TA, random_harmonics(torus, 20, N, 105), torus.q));

    // 6: Plemelj-Sokhotski.
    {
        const auto& circ = models[0].m;
        auto hs = random_harmonics(circ, 5, N, 200);
        HarmonicFun cosine;
        cosine.a = {0.5};
        cosine.b = {0.5};
        hs.push_back(cosine);
        double e = 0.0;
        for (auto& h : hs) {
            // Fourier oracle: h1 = c + holomorphic part, h2 = -(conjugate part) in the exterior chart y = 1/w.
            HarmonicFun h1, h2;
            h1.c = h.c;
            h1.a = h.a;
            h2.a = h.b;
            for (auto& v : h2.a) v = -v;
            auto p = plemelj_solve(circ, h, circ.q);
            e = std::max({e, hdist(p.jump.h1, h1), hdist(p.jump.h2, h2)});
        }
        t[6].push_back({"circle: Fourier recovery", e, 1e-8});
        for (std::size_t i : {1, 2}) {
            auto hs2 = random_harmonics(models[i].m, 3, N, 210 + i);
            double r = 0.0, u = 0.0;
            for (auto& h : hs2) {
                auto p = plemelj_solve(models[i].m, h, models[i].m.q);
                r = std::max(r, p.boundary_residual);
                u = std::max(u, p.uniqueness);
            }
            t[6].push_back({models[i].label + ": boundary residual", r, 1e-6});
            t[6].push_back({models[i].label + ": uniqueness re-solve", u, 1e-6});
        }
        // Holomorphic data returns (h, 0).
        std::mt19937_64 rng(220);
        auto holo_err = [&](const SurfaceModel& m, HarmonicFun h) {
            h.b.clear();
            auto p = plemelj_solve(m, h, m.q);
            HarmonicFun zero;
            return std::max(hdist(p.jump.h1, h), hdist(p.jump.h2, zero));
        };
        double eh = 0.0;
        for (std::size_t i = 0; i < models.size(); ++i) eh = std::max(eh, holo_err(models[i].m, random_harmonic(rng, N)));
        t[6].push_back({"sphere: holomorphic data gives (h, 0)", eh, 1e-9});
        t[6].push_back({"torus: holomorphic data gives (h, 0)", holo_err(torus, random_harmonic(rng, N)), 1e-9});
        auto ht = random_harmonics(torus, 1, N, 230)[0];
        t[6].push_back({"torus: boundary residual", plemelj_solve(torus, ht, torus.q).boundary_residual, 1e-4});
    }

    // 7: side independence on ellipses.
    for (std::size_t i : {1, 2}) put(t, 7, models[i].label, verify_side_independence(models[i].m, random_harmonics(models[i].m, 3, N, 300 + i), models[i].m.q));

    // 8: reflection on sphere models.
    for (std::size_t i = 0; i < models.size(); ++i)
        put(t, 8, models[i].label, verify_reflection(models[i].m, asm_[i], random_harmonics(models[i].m, 3, N, 400 + i), models[i].m.q));

    // 9: kernels.
    put(t, 9, "circle", verify_kernels(models[0].m, 9));
    put(t, 9, "ellipse-0.5", verify_kernels(models[2].m, 9));
    put(t, 9, "torus", verify_kernels(torus, 9));
    return t;
}

const char* titles[] = {"",
                        "grunsky family",
                        "complete identity",
                        "adjoint identities",
                        "isomorphism evidence",
                        "jump derivatives",
                        "plemelj-sokhotski",
                        "two-sided limit",
                        "reflection and transmission",
                        "kernel calibration",
                        "convergence in N"};

} // namespace

int main(int argc, char** argv)
{
    bool verbose = argc > 1 && std::strcmp(argv[1], "-v") == 0;
    auto torus = build_model(CurveSpec::torus_disk(cplx(0, 1), cplx(0.5, 0.5), 0.2), 32);
    std::map<std::size_t, Table> runs;
    for (std::size_t N : {8, 16, 32}) runs[N] = run(N, torus, assemble_all(torus, N));

    bool all = true;
    const Table& T = runs[32];
    for (int k = 1; k <= 9; ++k) {
        bool ok = true;
        double worst = 0.0;
        for (auto& e : T.at(k)) {
            bool p = e.residual <= e.tol;
            ok = ok && p;
            worst = std::max(worst, e.tol > 0 ? e.residual / e.tol : e.residual);
            if (verbose || !p) std::printf("    %-60s %.3e (tol %.0e)%s\n", e.name.c_str(), e.residual, e.tol, p ? "" : "  FAIL");
        }
        std::printf("criterion %2d %-28s %s  worst residual/tol %.2e\n", k, titles[k], ok ? "PASS" : "FAIL", worst);
        all = all && ok;
    }

    bool ok10 = true;
    for (int k = 1; k <= 9; ++k)
        for (std::size_t i = 0; i < T.at(k).size(); ++i) {
            double floor = 0.01 * T.at(k)[i].tol;
            double r8 = runs[8].at(k)[i].residual, r16 = runs[16].at(k)[i].residual, r32 = T.at(k)[i].residual;
            bool p = r16 <= std::max(r8, floor) && r32 <= std::max(r16, floor);
            if (verbose || !p) std::printf("    %-60s %.2e %.2e %.2e%s\n", T.at(k)[i].name.c_str(), r8, r16, r32, p ? "" : "  FAIL");
            ok10 = ok10 && p;
        }
    std::printf("criterion 10 %-28s %s\n", titles[10], ok10 ? "PASS" : "FAIL");
    all = all && ok10;
    return all ? 0 : 1;
}
