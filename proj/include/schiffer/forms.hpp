#pragma once

#include "geometry.hpp"

namespace schiffer {

// Coefficients in the chart basis {y^n dy} (holo) and {conj(y)^n conj(dy)} (anti), n >= 0.
struct CoefficientForm {
    std::vector<cplx> holo, anti;
};

// Values at quadrature nodes of a component without a chart: coefficient of
// dz (holo) and of conj(dz) (anti) in plane coordinates.
struct GridForm {
    std::vector<cplx> holo, anti;
    const std::vector<double>* weights = nullptr;
};

struct OneForm {
    int component = 0;
    bool grid = false;
    CoefficientForm coeffs;
    GridForm values;

    bool holomorphic(double tol = 0.0) const
    {
        const auto& a = grid ? values.anti : coeffs.anti;
        for (auto v : a)
            if (std::abs(v) > tol) return false;
        return true;
    }
};

inline OneForm coefficient_form(int k, std::vector<cplx> holo, std::vector<cplx> anti = {})
{
    OneForm f;
    f.component = k;
    f.coeffs.holo = std::move(holo);
    f.coeffs.anti = std::move(anti);
    return f;
}

// h o F(y) = c + sum_{n>=1} a_n y^n + sum_{n>=1} b_n conj(y)^n; a[0] holds a_1.
struct HarmonicFun {
    int component = 0;
    cplx c = 0.0;
    std::vector<cplx> a, b;

    cplx operator()(cplx y) const
    {
        cplx s = c, yn = 1.0, yb = 1.0;
        std::size_t n = std::max(a.size(), b.size());
        for (std::size_t k = 0; k < n; ++k) {
            yn *= y;
            yb *= std::conj(y);
            if (k < a.size()) s += a[k] * yn;
            if (k < b.size()) s += b[k] * yb;
        }
        return s;
    }

    // Value on the unit circle at chart angle t.
    cplx on_circle(double t) const
    {
        cplx s = c, e = 1.0, u = std::polar(1.0, t);
        std::size_t n = std::max(a.size(), b.size());
        for (std::size_t k = 0; k < n; ++k) {
            // Re-anchor the power recurrence to keep long series accurate.
            e = (k % 64 == 63) ? std::polar(1.0, double(k + 1) * t) : e * u;
            if (k < a.size()) s += a[k] * e;
            if (k < b.size()) s += b[k] * std::conj(e);
        }
        return s;
    }
};

// Gram matrix of {y^n dy} on the unit disk by polar quadrature; diagonal
// with entries pi/(n+1) up to quadrature error.
inline RVec disk_gram(std::size_t n, int nr = 96, int nt = 256)
{
    auto d = disk_rule(nr, nt);
    RVec g(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.z.size(); ++i) s += d.w[i] * std::pow(std::abs(d.z[i]), 2.0 * double(k));
        g(k) = s;
    }
    return g;
}

namespace detail {
inline const RVec& cached_gram()
{
    static const RVec g = disk_gram(64, 64, 8);
    return g;
}
inline double gram_entry(std::size_t k)
{
    // 64-point radial Gauss rule is exact for r^{2k+1}, k < 64; beyond that
    // the closed form takes over.
    const RVec& g = cached_gram();
    return k < std::size_t(g.size()) ? g(k) : pi / double(k + 1);
}
} // namespace detail

// (w1, w2) = integral of a1 conj(a2) dA over the component.
inline cplx inner_product(const OneForm& u, const OneForm& v)
{
    if (u.component != v.component || u.grid != v.grid) throw Error(Errc::ComponentMismatch, "forms live on different components");
    cplx s = 0.0;
    if (u.grid) {
        const auto* w = u.values.weights ? u.values.weights : v.values.weights;
        if (!w) throw Error(Errc::ComponentMismatch, "grid form without weights");
        for (std::size_t i = 0; i < w->size(); ++i) {
            if (i < u.values.holo.size() && i < v.values.holo.size()) s += (*w)[i] * u.values.holo[i] * std::conj(v.values.holo[i]);
            if (i < u.values.anti.size() && i < v.values.anti.size()) s += (*w)[i] * u.values.anti[i] * std::conj(v.values.anti[i]);
        }
        return s;
    }
    auto part = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        cplx t = 0.0;
        for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) t += detail::gram_entry(k) * x[k] * std::conj(y[k]);
        return t;
    };
    return part(u.coeffs.holo, v.coeffs.holo) + part(u.coeffs.anti, v.coeffs.anti);
}

inline double norm(const OneForm& u) { return std::sqrt(std::max(0.0, inner_product(u, u).real())); }

inline OneForm del(const HarmonicFun& h)
{
    OneForm f;
    f.component = h.component;
    for (std::size_t k = 0; k < h.a.size(); ++k) f.coeffs.holo.push_back(double(k + 1) * h.a[k]);
    return f;
}

inline OneForm dbar(const HarmonicFun& h)
{
    OneForm f;
    f.component = h.component;
    for (std::size_t k = 0; k < h.b.size(); ++k) f.coeffs.anti.push_back(double(k + 1) * h.b[k]);
    return f;
}

inline OneForm d(const HarmonicFun& h)
{
    OneForm f = del(h);
    f.coeffs.anti = dbar(h).coeffs.anti;
    return f;
}

// Dirichlet seminorm squared, sum pi n (|a_n|^2 + |b_n|^2).
inline double dirichlet_norm2(const HarmonicFun& h)
{
    double s = 0.0;
    for (std::size_t k = 0; k < h.a.size(); ++k) s += pi * double(k + 1) * std::norm(h.a[k]);
    for (std::size_t k = 0; k < h.b.size(); ++k) s += pi * double(k + 1) * std::norm(h.b[k]);
    return s;
}

inline HarmonicFun dbar_solve(const OneForm& abar)
{
    if (abar.grid) throw Error(Errc::NotSimplyConnected, "dbar_solve needs a coefficient form");
    HarmonicFun h;
    h.component = abar.component;
    for (std::size_t k = 0; k < abar.coeffs.anti.size(); ++k) h.b.push_back(abar.coeffs.anti[k] / double(k + 1));
    return h;
}

// Fix the additive constant so that h vanishes at chart point y.
inline HarmonicFun normalize_at(HarmonicFun h, cplx y)
{
    h.c -= h(y);
    return h;
}

inline HarmonicFun operator-(HarmonicFun u, const HarmonicFun& v)
{
    u.c -= v.c;
    u.a.resize(std::max(u.a.size(), v.a.size()), 0.0);
    u.b.resize(std::max(u.b.size(), v.b.size()), 0.0);
    for (std::size_t k = 0; k < v.a.size(); ++k) u.a[k] -= v.a[k];
    for (std::size_t k = 0; k < v.b.size(); ++k) u.b[k] -= v.b[k];
    return u;
}

inline HarmonicFun operator*(cplx s, HarmonicFun u)
{
    u.c *= s;
    for (auto& v : u.a) v *= s;
    for (auto& v : u.b) v *= s;
    return u;
}

// Line integrals of a form with plane coefficient f(w) dw over sampled closed
// curves (equispaced parameter), trapezoid with spectral tangents.
inline CVec periods(const std::function<cplx(cplx)>& f, const std::vector<std::vector<cplx>>& cycles,
                    const std::vector<cplx>& shifts = {})
{
    CVec out(cycles.size());
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const auto& p = cycles[c];
        std::size_t n = p.size();
        // Open lattice cycles close up to a translation; remove it before differentiating.
        cplx shift = c < shifts.size() ? shifts[c] : cplx(0.0);
        std::vector<cplx> per(n);
        for (std::size_t k = 0; k < n; ++k) per[k] = p[k] - shift * double(k) / double(n);
        auto dp = spectral_derivative(per);
        cplx s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += f(p[k]) * (dp[k] + shift / (2 * pi));
        out(c) = s * (2 * pi / double(n));
    }
    return out;
}

// Periods of a coefficient form over closed curves given in chart coordinates.
inline CVec periods(const OneForm& w, const std::vector<std::vector<cplx>>& chart_cycles)
{
    if (w.grid) throw Error(Errc::NotSimplyConnected, "grid forms carry no evaluator; use the functional overload");
    CVec out(chart_cycles.size());
    for (std::size_t c = 0; c < chart_cycles.size(); ++c) {
        const auto& p = chart_cycles[c];
        for (auto y : p)
            if (std::abs(y) >= 1.0) throw Error(Errc::CycleOutsideComponent, "cycle leaves the chart disk");
        auto dp = spectral_derivative(p);
        cplx s = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            cplx f = 0.0, g = 0.0, yn = 1.0;
            for (std::size_t n = 0; n < std::max(w.coeffs.holo.size(), w.coeffs.anti.size()); ++n) {
                if (n < w.coeffs.holo.size()) f += w.coeffs.holo[n] * yn;
                if (n < w.coeffs.anti.size()) g += w.coeffs.anti[n] * std::conj(yn);
                yn *= p[k];
            }
            s += f * dp[k] + g * std::conj(dp[k]);
        }
        out(c) = s * (2 * pi / double(p.size()));
    }
    return out;
}

// The lattice cycles of the torus complement, checked against the disk.
inline CVec torus_periods(const SurfaceModel& m, const std::function<cplx(cplx)>& f)
{
    const auto& cyc = m.grid.cycles;
    for (auto& c : cyc)
        for (auto w : c)
            if (std::abs(m.theta->nearest_image(w - m.spec.center)) <= m.spec.rho)
                throw Error(Errc::CycleOutsideComponent, "cycle meets the disk");
    return periods(f, {cyc[0], cyc[1]}, {1.0, m.spec.tau});
}

// Sigma_1 projection onto V_1: remove the part along global holomorphic
// forms. On the torus disk the only such direction is conj(dz) = rho conj(dy).
inline OneForm project_V1(const SurfaceModel& m, const OneForm& abar)
{
    if (m.sphere()) return abar;
    OneForm e = coefficient_form(abar.component, {}, {m.spec.rho});
    cplx c = inner_product(abar, e) / inner_product(e, e);
    OneForm out = abar;
    if (!out.coeffs.anti.empty()) out.coeffs.anti[0] -= c * m.spec.rho;
    return out;
}

struct W1Check {
    bool admissible = true;
    std::vector<cplx> residual;
};

// Pairing of dbar h with the global holomorphic form dz over Sigma_1.
inline W1Check check_W1(const SurfaceModel& m, const HarmonicFun& h, double tol = 1e-10)
{
    W1Check r;
    if (m.sphere()) return r;
    // integral of dbar h ^ dz with dbar h = sum n b_n conj(y)^{n-1} conj(dy), dz = rho dy,
    // conj(dy) ^ dy = 2i dA.
    auto q = disk_rule(48, 128);
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.z.size(); ++i) {
        cplx v = 0.0, yb = 1.0;
        for (std::size_t k = 0; k < h.b.size(); ++k) {
            v += double(k + 1) * h.b[k] * yb;
            yb *= std::conj(q.z[i]);
        }
        s += q.w[i] * v;
    }
    s *= 2.0 * I * m.spec.rho;
    r.residual = {s};
    r.admissible = std::abs(s) <= tol * std::max(1.0, std::sqrt(dirichlet_norm2(h)));
    return r;
}

inline nlohmann::json to_json(const HarmonicFun& h)
{
    auto arr = [](const std::vector<cplx>& v) {
        auto j = nlohmann::json::array();
        for (auto x : v) j.push_back(detail::cjson(x));
        return j;
    };
    return {{"component", h.component}, {"c", detail::cjson(h.c)}, {"a", arr(h.a)}, {"b", arr(h.b)}};
}

inline HarmonicFun harmonic_from_json(const nlohmann::json& j)
{
    HarmonicFun h;
    try {
        h.component = j.value("component", 0);
        if (j.contains("c")) h.c = detail::cread(j["c"]);
        if (j.contains("a"))
            for (auto& x : j["a"]) h.a.push_back(detail::cread(x));
        if (j.contains("b"))
            for (auto& x : j["b"]) h.b.push_back(detail::cread(x));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
    return h;
}

inline nlohmann::json to_json(const OneForm& f)
{
    auto arr = [](const std::vector<cplx>& v) {
        auto j = nlohmann::json::array();
        for (auto x : v) j.push_back(detail::cjson(x));
        return j;
    };
    if (f.grid) return {{"component", f.component}, {"grid_holo", arr(f.values.holo)}, {"grid_anti", arr(f.values.anti)}};
    return {{"component", f.component}, {"holo", arr(f.coeffs.holo)}, {"anti", arr(f.coeffs.anti)}};
}

inline OneForm form_from_json(const nlohmann::json& j)
{
    OneForm f;
    try {
        f.component = j.value("component", 0);
        if (j.contains("holo"))
            for (auto& x : j["holo"]) f.coeffs.holo.push_back(detail::cread(x));
        if (j.contains("anti"))
            for (auto& x : j["anti"]) f.coeffs.anti.push_back(detail::cread(x));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
    return f;
}

} // namespace schiffer
