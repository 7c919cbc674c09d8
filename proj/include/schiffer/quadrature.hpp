#pragma once

#include "core.hpp"

#include <unsupported/Eigen/FFT>

namespace schiffer {

struct Rule1D {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes on [a,b] by Newton on the three-term recurrence.
inline Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0)
{
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[n - 1 - i] = 0.5 * (b - a) * x + 0.5 * (b + a);
        r.w[n - 1 - i] = 0.5 * (b - a) * w;
    }
    return r;
}

inline std::vector<cplx> fft(const std::vector<cplx>& in)
{
    Eigen::FFT<double> f;
    std::vector<cplx> out;
    f.fwd(out, in);
    return out;
}

// Inverse transform without the 1/n factor.
inline std::vector<cplx> ifft_unscaled(const std::vector<cplx>& in)
{
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<cplx> out;
    f.inv(out, in);
    return out;
}

// Signed frequency of FFT slot k for length m.
inline long freq(std::size_t k, std::size_t m)
{
    return k <= m / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(m);
}

// Taylor coefficients c_0..c_{n-1} of a function holomorphic on |z| <= r
// from m equispaced samples f(r e^{2 pi i k/m}).
inline std::vector<cplx> taylor_from_circle(const std::vector<cplx>& samples, double r, std::size_t n)
{
    auto F = fft(samples);
    std::size_t m = samples.size();
    std::vector<cplx> c(n);
    double rk = 1.0;
    for (std::size_t k = 0; k < n && k < m; ++k) {
        c[k] = F[k] / double(m) / rk;
        rk *= r;
    }
    return c;
}

// Fourier coefficients of periodic samples on [0, 2 pi): f(s) = sum_k c_k e^{iks}.
inline std::vector<cplx> fourier_coeffs(const std::vector<cplx>& f)
{
    auto F = fft(f);
    for (auto& v : F) v /= double(f.size());
    return F;
}

inline std::vector<cplx> fourier_values(const std::vector<cplx>& c)
{
    return ifft_unscaled(c);
}

inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& f)
{
    auto c = fourier_coeffs(f);
    std::size_t m = f.size();
    for (std::size_t k = 0; k < m; ++k) {
        long n = freq(k, m);
        if (m % 2 == 0 && k == m / 2) n = 0;
        c[k] *= I * double(n);
    }
    return fourier_values(c);
}

// Periodic antiderivative with zero mean; also returns the mean of f, which
// must vanish for the antiderivative to be periodic.
inline std::vector<cplx> spectral_antiderivative(const std::vector<cplx>& f, cplx* mean = nullptr)
{
    auto c = fourier_coeffs(f);
    std::size_t m = f.size();
    if (mean) *mean = c[0];
    c[0] = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        long n = freq(k, m);
        if (m % 2 == 0 && k == m / 2) {
            c[k] = 0.0;
            continue;
        }
        c[k] /= I * double(n);
    }
    return fourier_values(c);
}

// Band-limited interpolation of periodic samples onto a finer equispaced grid.
inline std::vector<cplx> fourier_upsample(const std::vector<cplx>& f, std::size_t mfine)
{
    std::size_t m = f.size();
    auto c = fourier_coeffs(f);
    std::vector<cplx> C(mfine, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        long n = freq(k, m);
        if (m % 2 == 0 && k == m / 2) {
            C[m / 2] += 0.5 * c[k];
            C[mfine - m / 2] += 0.5 * c[k];
            continue;
        }
        C[n >= 0 ? n : long(mfine) + n] = c[k];
    }
    return fourier_values(C);
}

inline std::vector<double> real_part(const std::vector<cplx>& v)
{
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].real();
    return r;
}

inline std::vector<cplx> to_complex(const std::vector<double>& v)
{
    return {v.begin(), v.end()};
}

// Polar product rule on the disk |z| < R: Gauss-Legendre in r times trapezoid
// in angle. Weights include the Jacobian r.
struct DiskRule {
    std::vector<cplx> z;
    std::vector<double> w;
};

inline DiskRule disk_rule(int nr, int nt, double R = 1.0)
{
    auto g = gauss_legendre(nr, 0.0, R);
    DiskRule d;
    d.z.reserve(std::size_t(nr) * nt);
    d.w.reserve(std::size_t(nr) * nt);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            double t = 2 * pi * (j + 0.5) / nt;
            d.z.push_back(std::polar(g.x[i], t));
            d.w.push_back(g.w[i] * g.x[i] * 2 * pi / nt);
        }
    return d;
}

inline double unit_root_angle(std::size_t k, std::size_t m) { return 2 * pi * double(k) / double(m); }

} // namespace schiffer
