#pragma once

#include "geometry.hpp"
#include "report.hpp"

#include <random>

namespace schiffer {

enum class KernelType { dz_dw, dz_dwbar };

// Chart ids: plane coordinates, or the uniformizing chart of side 0 / 1.
inline constexpr int plane_chart = -1;

struct KernelValue {
    cplx value;
    KernelType type;
    int zchart = plane_chart, wchart = plane_chart;
};

namespace detail {

inline cplx sphere_L(const Lifted& a, const Lifted& b)
{
    cplx d = b.num * a.den - a.num * b.den;
    if (d == 0.0) throw Error(Errc::CoincidentPoints, "Schiffer kernel on the diagonal");
    return -a.D * b.D / (2 * pi * I * d * d);
}

inline cplx torus_L(const Theta& th, const Lifted& a, const Lifted& b)
{
    cplx u = b.num / b.den - a.num / a.den;
    if (th.nearest_image(u) == 0.0) throw Error(Errc::CoincidentPoints, "Schiffer kernel on the diagonal");
    return (th.dzeta(u) + pi / th.im_tau()) * a.D * b.D / (2 * pi * I);
}

} // namespace detail

// Schiffer kernel coefficient with both slots given as lifted points.
inline cplx schiffer_coeff(const SurfaceModel& m, const Lifted& a, const Lifted& b)
{
    return m.sphere() ? detail::sphere_L(a, b) : detail::torus_L(*m.theta, a, b);
}

// Disk kernels in chart coordinates.
inline cplx disk_L(cplx x, cplx y)
{
    if (x == y) throw Error(Errc::CoincidentPoints, "disk Schiffer kernel on the diagonal");
    return -1.0 / (2 * pi * I * (y - x) * (y - x));
}

inline cplx disk_K(cplx x, cplx y) { return 1.0 / (2 * pi * I * std::pow(1.0 - x * std::conj(y), 2)); }

// L_R - L_Sigma in chart coordinates of side k (both slots). Holomorphic in
// y across the diagonal; near it the value comes from the Cauchy integral
// over a small circle about x, where the raw difference has no cancellation.
inline cplx regularized_coeff(const SurfaceModel& m, int k, cplx x, cplx y)
{
    require_chart(m, k);
    if (!m.sphere()) {
        double rho = m.spec.rho;
        const Theta& th = *m.theta;
        return rho * rho * (th.dzeta_reg(rho * (y - x)) + pi / th.im_tau()) / (2 * pi * I);
    }
    const Chart& c = m.side[k].chart;
    auto raw = [&](cplx a, cplx b) { return detail::sphere_L(c.lift(a), c.lift(b)) - disk_L(a, b); };
    double r0 = std::min(0.05, 0.5 * (1.0 - std::abs(x)));
    if (c.exterior()) r0 = std::min(r0, 0.5 * std::abs(x));
    if (std::abs(y - x) >= 0.25 * r0) return raw(x, y);
    const int n = 64;
    cplx v = 0.0;
    for (int j = 0; j < n; ++j) {
        cplx e = std::polar(r0, 2 * pi * (j + 0.5) / n);
        v += raw(x, x + e) * e / (x + e - y);
    }
    return v / double(n);
}

// Plane-coordinate kernels (finite points).
inline KernelValue L_R(const SurfaceModel& m, cplx z, cplx w)
{
    if (z == w) throw Error(Errc::CoincidentPoints, "L_R on the diagonal");
    return {schiffer_coeff(m, lift_plane(z), lift_plane(w)), KernelType::dz_dw};
}

inline KernelValue K_R(const SurfaceModel& m, cplx, cplx)
{
    return {m.sphere() ? cplx(0.0) : m.kappa, KernelType::dz_dwbar};
}

inline KernelValue L_comp(const SurfaceModel& m, int k, cplx z, cplx w)
{
    require_chart(m, k);
    const Chart& c = m.side[k].chart;
    cplx x = c.inverse(z), y = c.inverse(w);
    return {disk_L(x, y) / (c.derivative(x) * c.derivative(y)), KernelType::dz_dw};
}

inline KernelValue K_comp(const SurfaceModel& m, int k, cplx z, cplx w)
{
    require_chart(m, k);
    const Chart& c = m.side[k].chart;
    cplx x = c.inverse(z), y = c.inverse(w);
    return {disk_K(x, y) / (c.derivative(x) * std::conj(c.derivative(y))), KernelType::dz_dwbar};
}

inline KernelValue L_regularized(const SurfaceModel& m, int k, cplx z, cplx w)
{
    require_chart(m, k);
    const Chart& c = m.side[k].chart;
    cplx x = c.inverse(z), y = c.inverse(w);
    return {regularized_coeff(m, k, x, y) / (c.derivative(x) * c.derivative(y)), KernelType::dz_dw};
}

// Chart-coordinate variants used by the assembly.
inline KernelValue L_comp_chart(int k, cplx x, cplx y) { return {disk_L(x, y), KernelType::dz_dw, k, k}; }
inline KernelValue K_comp_chart(int k, cplx x, cplx y) { return {disk_K(x, y), KernelType::dz_dwbar, k, k}; }
inline KernelValue L_regularized_chart(const SurfaceModel& m, int k, cplx x, cplx y)
{
    return {regularized_coeff(m, k, x, y), KernelType::dz_dw, k, k};
}

// Circle |y| = r in the chart of side j carrying the sources of area
// integrals against conjugated basis forms.
struct SourceCircle {
    int side = 0;
    double r = 0.8;
    std::vector<cplx> y;
    std::vector<Lifted> lift;
};

inline SourceCircle source_circle(const SurfaceModel& m, int j, double r = 0.8, std::size_t n = 256)
{
    require_chart(m, j);
    if (!m.side[j].analytic) require_series(m, j);
    SourceCircle s;
    s.side = j;
    s.r = r;
    for (std::size_t k = 0; k < n; ++k) {
        cplx y = std::polar(r, unit_root_angle(k, n));
        s.y.push_back(y);
        auto l = m.side[j].chart.lift(y);
        if (!m.sphere()) l = {l.num / l.den, 1.0, l.D};
        s.lift.push_back(l);
    }
    return s;
}

// Taylor coefficients 0..n-1 in the source chart variable of the kernel
// with z-slot at the lifted point a. When x is given the target lies on the
// source side at chart coordinate x (with a = chart lift of x) and the
// regularized kernel is used.
inline std::vector<cplx> kernel_taylor(const SurfaceModel& m, const SourceCircle& src, const Lifted& a,
                                       const cplx* x, std::size_t n)
{
    std::size_t ms = src.y.size();
    std::vector<cplx> v(ms);
    for (std::size_t k = 0; k < ms; ++k)
        v[k] = x ? regularized_coeff(m, src.side, *x, src.y[k]) : schiffer_coeff(m, a, src.lift[k]);
    return taylor_from_circle(v, src.r, n);
}

// Coefficient (in the target's lifted coordinate) of the area integral of
// the kernel against the conjugate of the normalized basis form
// sqrt((k+1)/pi) y^k dy, for k = 0..n-1.
inline std::vector<cplx> conj_basis_images(const SurfaceModel& m, const SourceCircle& src, const Lifted& a,
                                           const cplx* x, std::size_t n)
{
    auto h = kernel_taylor(m, src, a, x, n);
    for (std::size_t k = 0; k < n; ++k) h[k] *= -2.0 * I * std::sqrt(pi / double(k + 1));
    return h;
}

namespace detail {

// Principal value of the disk integral of L_D(x, .) against conj(y)^m conj(dy),
// by polar quadrature about x with the 1/r singularity subtracted. Returned
// without the kernel's constant factor.
inline cplx disk_pv_vanishing(cplx x, int m, int nr = 32, int nt = 256)
{
    auto f = [&](cplx y) { return std::pow(std::conj(y), m); };
    auto g = gauss_legendre(nr, 0.0, 1.0);
    cplx fx = f(x);
    std::vector<cplx> t(nt);
    for (int j = 0; j < nt; ++j) {
        double th = unit_root_angle(j, nt);
        cplx e = std::polar(1.0, th);
        double b = (std::conj(x) * e).real();
        double R = -b + std::sqrt(b * b + 1.0 - std::norm(x));
        cplx inner = fx * std::log(R);
        for (int i = 0; i < nr; ++i) {
            double r = R * g.x[i];
            inner += R * g.w[i] * (f(x + r * e) - fx) / r;
        }
        t[j] = std::polar(1.0, -2 * th) * inner;
    }
    return pairwise_sum(t) * (2 * pi / double(nt));
}

} // namespace detail

// Reproducing property of the Bergman kernels, the Schiffer vanishing
// identity on the disk, and kernel symmetries.
inline Report verify_kernels(const SurfaceModel& m, std::uint64_t seed = 1)
{
    Report r;
    r.title = "kernels";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rand_disk = [&](double rad) {
        cplx z;
        do z = cplx(U(rng), U(rng)); while (std::abs(z) >= 1.0);
        return rad * z;
    };

    // Disk: integral of K_D(x, .) ^ y^n dy reproduces x^n; conj(dy) ^ dy = 2i dA.
    auto q = disk_rule(96, 256);
    double rep = 0.0;
    for (int t = 0; t < 5; ++t) {
        cplx x = rand_disk(0.7);
        for (int n = 0; n < 3; ++n) {
            std::vector<cplx> v(q.z.size());
            for (std::size_t i = 0; i < q.z.size(); ++i) v[i] = q.w[i] * disk_K(x, q.z[i]) * 2.0 * I * std::pow(q.z[i], n);
            rep = std::max(rep, std::abs(pairwise_sum(v) - std::pow(x, n)));
        }
    }
    r.add("disk Bergman kernel reproduces y^n dy", "bergman-reproducing", rep, 1e-8);

    if (!m.sphere()) {
        // Integral of K_R(z, .) ^ dz over the torus: kappa * 2i * area; and the
        // calibrated constant against -i / (2 Im tau).
        double area = pi * m.spec.rho * m.spec.rho + pairwise_sum(m.grid.w);
        r.add("torus Bergman kernel reproduces dz", "bergman-reproducing", std::abs(m.kappa * 2.0 * I * area - 1.0), 1e-8);
        r.add("torus Bergman constant", "bergman-reproducing", std::abs(m.kappa - (-I / (2.0 * m.theta->im_tau()))) * 2.0 * m.theta->im_tau(), 1e-8);
    } else {
        r.add("sphere Bergman kernel vanishes", "bergman-reproducing", std::abs(K_R(m, 0.3, 0.1).value), 0.0);
    }

    double van = 0.0;
    for (int t = 0; t < 4; ++t) {
        cplx x = rand_disk(0.8);
        for (int k = 0; k < 4; ++k)
            van = std::max(van, std::abs(detail::disk_pv_vanishing(x, k)) * std::sqrt(double(k + 1) / pi) / (2 * pi));
    }
    r.add("Schiffer vanishing identity on the disk", "schiffer-vanishing", van, 1e-6);

    // L_R(z, w) = L_R(w, z) and K_R(w, z) = conj K_R(z, w) at plane points away from the curve.
    double sym = 0.0, herm = 0.0;
    for (int t = 0; t < 20; ++t) {
        cplx z = cplx(U(rng), U(rng)), w = cplx(U(rng), U(rng));
        if (!m.sphere()) {
            z = m.spec.center + 0.5 * z;
            w = m.spec.center + 0.5 * w;
        }
        if (std::abs(z - w) < 1e-3) continue;
        cplx a = L_R(m, z, w).value, b = L_R(m, w, z).value;
        sym = std::max(sym, std::abs(a - b) / std::max(1.0, std::abs(a)));
        // The 1/(pi i) normalization makes i K the Hermitian coefficient.
        cplx kwz = I * K_R(m, w, z).value, kzw = I * K_R(m, z, w).value;
        herm = std::max(herm, std::abs(kwz - std::conj(kzw)) / std::max(1.0, std::abs(kzw)));
    }
    r.add("Schiffer kernel symmetry", "kernel-symmetry", sym, 1e-10);
    r.add("Bergman kernel Hermitian symmetry", "kernel-symmetry", herm, 1e-12);
    return r;
}

} // namespace schiffer
