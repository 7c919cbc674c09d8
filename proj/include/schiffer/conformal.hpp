#pragma once

#include "core.hpp"
#include "quadrature.hpp"

namespace schiffer {

// Truncated power series with a radius-dependent cutoff: terms whose
// contribution is below roundoff at the requested radius are skipped.
class PowerSeries {
public:
    PowerSeries() = default;
    explicit PowerSeries(std::vector<cplx> c) : c_(std::move(c)) { finalize(); }

    const std::vector<cplx>& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    cplx operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cplx(0.0); }

    std::size_t cutoff(double r) const
    {
        std::size_t n = c_.size();
        if (n == 0 || r <= 0.0) return std::min<std::size_t>(n, 1);
        if (r >= 1.0) return n;
        double floor = 1e-18 * scale_;
        double lr = std::log(r);
        std::size_t lo = 1, hi = n;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (std::exp(mid * lr) * suffix_max_[mid] < floor) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

    cplx eval(cplx z) const
    {
        std::size_t n = cutoff(std::abs(z));
        cplx s = 0.0;
        for (std::size_t k = n; k-- > 0;) s = s * z + c_[k];
        return s;
    }

    // Value and first derivative.
    std::pair<cplx, cplx> eval_d(cplx z) const
    {
        std::size_t n = cutoff(std::abs(z));
        cplx s = 0.0, d = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            d = d * z + s;
            s = s * z + c_[k];
        }
        return {s, d};
    }

    // Value, first and second derivative.
    std::array<cplx, 3> eval_d2(cplx z) const
    {
        std::size_t n = cutoff(std::abs(z));
        cplx s = 0.0, d = 0.0, d2 = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            d2 = d2 * z + 2.0 * d;
            d = d * z + s;
            s = s * z + c_[k];
        }
        return {s, d, d2};
    }

private:
    void finalize()
    {
        suffix_max_.assign(c_.size() + 1, 0.0);
        for (std::size_t k = c_.size(); k-- > 0;) suffix_max_[k] = std::max(suffix_max_[k + 1], std::abs(c_[k]));
        scale_ = suffix_max_.empty() ? 1.0 : std::max(suffix_max_[0], 1e-300);
    }

    std::vector<cplx> c_;
    std::vector<double> suffix_max_;
    double scale_ = 1.0;
};

// Fourier representation of a circle homeomorphism theta(t) = t + p(t) with
// p periodic; used for boundary correspondences.
class CircleMap {
public:
    CircleMap() = default;
    CircleMap(std::vector<cplx> pc, double offset) : pc_(std::move(pc)), offset_(offset) {}

    // theta and theta' at t (direct Fourier sum).
    std::pair<double, double> eval(double t) const
    {
        std::size_t m = pc_.size();
        double v = t + offset_, d = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            long n = freq(k, m);
            if (m % 2 == 0 && k == m / 2) continue;
            cplx e = std::polar(1.0, double(n) * t);
            v += (pc_[k] * e).real();
            d += (pc_[k] * e * I * double(n)).real();
        }
        return {v, d};
    }

    // theta and theta' on an equispaced grid of size m (m >= coefficient count).
    void sample(std::size_t m, std::vector<double>& th, std::vector<double>& dth) const
    {
        std::size_t mc = pc_.size();
        std::vector<cplx> C(m, 0.0), D(m, 0.0);
        for (std::size_t k = 0; k < mc; ++k) {
            long n = freq(k, mc);
            if (mc % 2 == 0 && k == mc / 2) continue;
            std::size_t slot = n >= 0 ? std::size_t(n) : std::size_t(long(m) + n);
            C[slot] = pc_[k];
            D[slot] = pc_[k] * I * double(n);
        }
        auto v = fourier_values(C), dv = fourier_values(D);
        th.resize(m);
        dth.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            double t = unit_root_angle(j, m);
            th[j] = t + offset_ + v[j].real();
            dth[j] = 1.0 + dv[j].real();
        }
    }

    // Largest coefficient magnitude in the upper half of the resolved band.
    double tail() const
    {
        std::size_t m = pc_.size();
        double t = 0.0;
        for (std::size_t k = m / 4; k < m / 2; ++k) t = std::max({t, std::abs(pc_[k]), std::abs(pc_[m - k])});
        return t;
    }

    std::size_t size() const { return pc_.size(); }
    double offset() const { return offset_; }
    const std::vector<cplx>& coeffs() const { return pc_; }

    // Inverse values t(phi_j) on phi_j = 2 pi j / L, by bracketing on a fine
    // grid followed by Newton on cubic Hermite data.
    std::vector<double> inverse_on_grid(std::size_t L) const
    {
        std::size_t mf = std::max<std::size_t>(8 * std::max(pc_.size(), L), 1 << 12);
        std::vector<double> th, dth;
        sample(mf, th, dth);
        double h = 2 * pi / double(mf);
        std::vector<double> out(L);
        // Extend one period so every phi in [th0, th0 + 2 pi) is bracketed.
        auto val = [&](std::size_t j) { return j < mf ? th[j] : th[j - mf] + 2 * pi; };
        auto der = [&](std::size_t j) { return j < mf ? dth[j] : dth[j - mf]; };
        std::size_t j = 0;
        for (std::size_t i = 0; i < L; ++i) {
            double phi = unit_root_angle(i, L);
            double target = phi;
            while (target < th[0]) target += 2 * pi;
            while (target >= th[0] + 2 * pi) target -= 2 * pi;
            if (i == 0 || target < val(j)) j = 0;
            while (j + 1 <= mf && val(j + 1) <= target) ++j;
            double y0 = val(j), y1 = val(j + 1), d0 = der(j) * h, d1 = der(j + 1) * h;
            // Hermite cubic on [0,1]; bisection-safeguarded Newton.
            double a = 0.0, b = 1.0, x = (y1 > y0) ? (target - y0) / (y1 - y0) : 0.5;
            for (int it = 0; it < 60; ++it) {
                double x2 = x * x, x3 = x2 * x;
                double H = (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * d0 + (-2 * x3 + 3 * x2) * y1 + (x3 - x2) * d1;
                double dH = (6 * x2 - 6 * x) * y0 + (3 * x2 - 4 * x + 1) * d0 + (-6 * x2 + 6 * x) * y1 + (3 * x2 - 2 * x) * d1;
                double r = H - target;
                if (r > 0) b = x;
                else a = x;
                double xn = (dH > 0) ? x - r / dH : 0.5 * (a + b);
                if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
                if (std::abs(xn - x) < 1e-17) {
                    x = xn;
                    break;
                }
                x = xn;
            }
            double t = (double(j) + x) * h;
            out[i] = t;
        }
        return out;
    }

private:
    std::vector<cplx> pc_;
    double offset_ = 0.0;
};

// Riemann map of the interior of a smooth ccw Jordan curve onto the disk,
// from the Kerzman-Stein integral equation for the Szego kernel:
// (I - A) S_a = conj(H(a, .)), A(z,w) = H(z,w) - conj(H(w,z)),
// H(z,w) = T(w) / (2 pi i (w - z)). The boundary correspondence is
// theta = arg T - pi/2 + 2 arg S_a, normalized so the map has positive
// derivative at a.
struct RiemannMapData {
    CircleMap theta; // chart angle as a function of the curve parameter
    std::size_t nodes = 0;
};

template <class Curve>
RiemannMapData kerzman_stein_map(const Curve& curve, cplx a, double tol = 1e-13, std::size_t mmax = 2048)
{
    for (std::size_t m = 256; m <= mmax; m *= 2) {
        std::vector<cplx> z(m), T(m);
        std::vector<double> sp(m);
        for (std::size_t k = 0; k < m; ++k) {
            auto [zz, dz] = curve(unit_root_angle(k, m));
            z[k] = zz;
            sp[k] = std::abs(dz);
            T[k] = dz / sp[k];
        }
        CMat A(m, m);
        double dw = 2 * pi / double(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) {
                    A(i, j) = 1.0;
                    continue;
                }
                cplx Hij = T[j] / (2 * pi * I * (z[j] - z[i]));
                cplx Hji = T[i] / (2 * pi * I * (z[i] - z[j]));
                A(i, j) = -(Hij - std::conj(Hji)) * sp[j] * dw;
            }
        CVec rhs(m);
        for (std::size_t i = 0; i < m; ++i) rhs(i) = std::conj(T[i] / (2 * pi * I * (z[i] - a)));
        CVec S = A.partialPivLu().solve(rhs);
        std::vector<double> th(m);
        for (std::size_t k = 0; k < m; ++k) th[k] = std::arg(T[k]) - pi / 2 + 2 * std::arg(S(k));
        for (std::size_t k = 1; k < m; ++k) {
            double d = th[k] - th[k - 1];
            th[k] -= 2 * pi * std::round(d / (2 * pi));
        }
        double wind = (th[m - 1] - th[0] + (th[m - 1] - th[m - 2])) / (2 * pi);
        if (std::abs(wind - 1.0) > 0.1) throw Error(Errc::NonUnivalent, "boundary correspondence has wrong degree");
        std::vector<cplx> p(m);
        for (std::size_t k = 0; k < m; ++k) p[k] = th[k] - unit_root_angle(k, m);
        auto pc = fourier_coeffs(p);
        double off = pc[0].real();
        pc[0] = 0.0;
        CircleMap cm(pc, off);
        if (cm.tail() < tol) return {cm, m};
    }
    throw Error(Errc::IterationDiverged, "Szego boundary correspondence not resolved");
}

// Self-intersection test for a closed polygon (O(n^2), n of a few thousand).
inline bool polygon_is_simple(const std::vector<cplx>& p)
{
    std::size_t n = p.size();
    auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
    auto inter = [&](cplx a, cplx b, cplx c, cplx d) {
        double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
        double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
        return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
    };
    for (std::size_t i = 0; i < n; ++i) {
        cplx a = p[i], b = p[(i + 1) % n];
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (inter(a, b, p[j], p[(j + 1) % n])) return false;
        }
    }
    return true;
}

inline double winding_number(const std::vector<cplx>& p, cplx z)
{
    double w = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) w += std::arg((p[(i + 1) % p.size()] - z) / (p[i] - z));
    return w / (2 * pi);
}

} // namespace schiffer
