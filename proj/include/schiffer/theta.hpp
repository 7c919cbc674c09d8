#pragma once

#include "core.hpp"

namespace schiffer {

// Jacobi theta_1 with nome q = exp(i pi tau) and the doubly periodic
// potential G(u) = -log|theta_1(u)| + pi (Im u)^2 / Im tau, which has a
// -log|u| singularity at the lattice and constant Laplacian 2 pi / Im tau.
class Theta {
public:
    explicit Theta(cplx tau) : tau_(tau)
    {
        if (!(tau.imag() >= 0.5) || std::abs(tau.real()) > 0.5 + 1e-12)
            throw Error(Errc::ConfigInvalid, "tau must satisfy Im tau >= 0.5 and |Re tau| <= 1/2");
        q_ = std::exp(I * pi * tau);
        // Lambert weights q^{2n}/(1-q^{2n}) until they drop below 1e-18 relative
        // to the growth allowed for |Im u| <= Im tau (reduced arguments).
        cplx q2 = q_ * q_, q2n = 1.0;
        for (int n = 1; n < 400; ++n) {
            q2n *= q2;
            lam_.push_back(q2n / (1.0 - q2n));
            q2n_.push_back(q2n);
            if (std::abs(q2n) * std::exp(2 * pi * n * 0.75 * tau.imag()) < 1e-18) break;
        }
    }

    cplx tau() const { return tau_; }
    double im_tau() const { return tau_.imag(); }

    // Representative of u modulo the lattice closest to the origin.
    cplx nearest_image(cplx u) const
    {
        double m = std::round(u.imag() / tau_.imag());
        u -= m * tau_;
        u -= std::round(u.real());
        cplx best = u;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) {
                cplx v = u + double(a) + double(b) * tau_;
                if (std::abs(v) < std::abs(best)) best = v;
            }
        return best;
    }

    double log_abs_theta1(cplx u) const
    {
        u = nearest_image(u);
        double s = std::log(2.0) - 0.25 * pi * tau_.imag() + std::log(std::abs(std::sin(pi * u)));
        cplx c2 = std::cos(2 * pi * u);
        for (std::size_t k = 0; k < q2n_.size(); ++k) {
            cplx a = q2n_[k];
            s += std::log(std::abs(1.0 - a)) + std::log(std::abs(1.0 - 2.0 * a * c2 + a * a));
        }
        return s;
    }

    // Periodic potential; exact lattice periodicity comes from the reduction.
    double G(cplx u) const
    {
        u = nearest_image(u);
        if (std::abs(u) == 0.0) throw Error(Errc::CoincidentPoints, "G at a lattice point");
        return -log_abs_theta1(u) + pi * u.imag() * u.imag() / tau_.imag();
    }

    // (log theta_1)'(u) - 1/u for |Im u| < Im tau, regular at u = 0.
    cplx zeta_reg(cplx u) const
    {
        cplx s = cot_reg(u);
        for (std::size_t k = 0; k < lam_.size(); ++k) {
            double n = double(k + 1);
            s += 4 * pi * lam_[k] * std::sin(2 * pi * n * u);
        }
        return s;
    }

    // (log theta_1)''(u) + 1/u^2, regular at u = 0.
    cplx dzeta_reg(cplx u) const
    {
        cplx s = csc2_reg(u);
        for (std::size_t k = 0; k < lam_.size(); ++k) {
            double n = double(k + 1);
            s += 8 * pi * pi * n * lam_[k] * std::cos(2 * pi * n * u);
        }
        return s;
    }

    cplx zeta(cplx u) const
    {
        u = nearest_image(u);
        if (u == 0.0) throw Error(Errc::CoincidentPoints, "zeta at a lattice point");
        return zeta_reg(u) + 1.0 / u;
    }

    cplx dzeta(cplx u) const
    {
        u = nearest_image(u);
        if (u == 0.0) throw Error(Errc::CoincidentPoints, "dzeta at a lattice point");
        return dzeta_reg(u) - 1.0 / (u * u);
    }

    // dG/du = -zeta/2 - i pi Im u / Im tau (not holomorphic; periodic).
    cplx dG(cplx u) const
    {
        u = nearest_image(u);
        if (u == 0.0) throw Error(Errc::CoincidentPoints, "dG at a lattice point");
        return -0.5 * (zeta_reg(u) + 1.0 / u) - I * pi * u.imag() / tau_.imag();
    }

private:
    // pi cot(pi u) - 1/u
    static cplx cot_reg(cplx u)
    {
        cplx x = pi * u;
        if (std::abs(x) < 0.1) {
            cplx x2 = x * x;
            // x cot x - 1 = -x^2/3 - x^4/45 - 2x^6/945 - x^8/4725 - 2x^10/93555
            cplx t = x2 * (-1.0 / 3 + x2 * (-1.0 / 45 + x2 * (-2.0 / 945 + x2 * (-1.0 / 4725 + x2 * (-2.0 / 93555)))));
            return pi * t / x;
        }
        return pi * std::cos(x) / std::sin(x) - 1.0 / u;
    }

    // -pi^2 / sin^2(pi u) + 1/u^2
    static cplx csc2_reg(cplx u)
    {
        cplx x = pi * u;
        if (std::abs(x) < 0.1) {
            cplx x2 = x * x;
            // x^2/sin^2 x - 1 = x^2/3 + x^4/15 + 2x^6/189 + x^8/675 + 2x^10/10395
            cplx t = 1.0 / 3 + x2 * (1.0 / 15 + x2 * (2.0 / 189 + x2 * (1.0 / 675 + x2 * (2.0 / 10395))));
            return -pi * pi * t;
        }
        cplx s = std::sin(x);
        return -pi * pi / (s * s) + 1.0 / (u * u);
    }

    cplx tau_, q_;
    std::vector<cplx> lam_, q2n_;
};

} // namespace schiffer
