#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace schiffer {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class Errc {
    NonUnivalent,
    IterationDiverged,
    CoincidentPoints,
    NotSimplyConnected,
    InverseMapDiverged,
    EpsilonTooLarge,
    NonMonotone,
    ComponentMismatch,
    CycleOutsideComponent,
    QuadratureOverflow,
    SingularGram,
    QNearCurve,
    ExtrapolationUnstable,
    WeldingUnavailable,
    NotExact,
    NotAdmissible,
    ConfigInvalid,
    SuiteFailed,
};

inline const char* to_string(Errc e)
{
    switch (e) {
    case Errc::NonUnivalent: return "NonUnivalent";
    case Errc::IterationDiverged: return "IterationDiverged";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::NotSimplyConnected: return "NotSimplyConnected";
    case Errc::InverseMapDiverged: return "InverseMapDiverged";
    case Errc::EpsilonTooLarge: return "EpsilonTooLarge";
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::ComponentMismatch: return "ComponentMismatch";
    case Errc::CycleOutsideComponent: return "CycleOutsideComponent";
    case Errc::QuadratureOverflow: return "QuadratureOverflow";
    case Errc::SingularGram: return "SingularGram";
    case Errc::QNearCurve: return "QNearCurve";
    case Errc::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case Errc::WeldingUnavailable: return "WeldingUnavailable";
    case Errc::NotExact: return "NotExact";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::SuiteFailed: return "SuiteFailed";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }
    Errc code() const { return code_; }

private:
    Errc code_;
};

// Worker count used by the parallel loops; 1 means strictly sequential.
inline unsigned& thread_count()
{
    static unsigned n = 1;
    return n;
}

inline void set_threads(unsigned n) { thread_count() = std::max(1u, n); }

// Static block partition; every index is processed exactly once and results
// are written to caller-owned slots, so output does not depend on the count.
template <class F>
void parallel_for(std::size_t n, F&& f)
{
    unsigned t = std::min<std::size_t>(thread_count(), n);
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k) {
        std::size_t lo = n * k / t, hi = n * (k + 1) / t;
        pool.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise summation keeps the rounding of long reductions independent of
// how the terms were produced.
template <class T>
T pairwise_sum(const T* x, std::size_t n)
{
    if (n <= 16) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& x)
{
    return pairwise_sum(x.data(), x.size());
}

} // namespace schiffer
