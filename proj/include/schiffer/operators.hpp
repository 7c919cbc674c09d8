#pragma once

#include "forms.hpp"
#include "kernels.hpp"
#include "report.hpp"

#include <array>
#include <random>

namespace schiffer {

enum class OpTag { T11, T12, T21, T22, S1, S2, Res, Oe };

inline const char* to_string(OpTag t)
{
    static const char* n[] = {"T11", "T12", "T21", "T22", "S1", "S2", "Res", "Oe"};
    return n[int(t)];
}

// Finite section of an operator. Domains use orthonormal chart bases, so
// dom_gram is the identity. Codomain: orthonormal chart coefficients (grid
// false) or dz-coefficients at quadrature nodes (grid true, Gram = weights).
// col_gram holds the exact Gram matrix of the untruncated image columns,
// col_gram(a, b) = <A e_b, A e_a>.
struct OperatorMatrix {
    OpTag tag = OpTag::T11;
    CMat entries;
    std::string dom_basis, cod_basis;
    CMat dom_gram, cod_gram;
    bool grid = false;
    RVec cod_weights;
    CMat col_gram;
    CMat boundary;                 // image columns as dw-coefficients on the curve samples
    std::array<CMat, 2> cycles;    // torus: image columns on the lattice cycles
};

namespace detail {

// Orthonormal chart coefficients 0..n-1 of forms given by their dw
// coefficients H(s) on the curve samples (columns of Hb), seen from side k.
inline CMat chart_coefficients(const SurfaceModel& m, int k, const CMat& Hb, std::size_t n)
{
    const auto& g = m.gamma;
    const auto& sd = m.side[k];
    std::size_t M = g.size();
    int sig = sd.bounded ? 1 : -1;
    CMat C = CMat::Zero(n, Hb.cols());
    if (sd.analytic) {
        // phi = +-s: one FFT per column.
        for (Eigen::Index c = 0; c < Hb.cols(); ++c) {
            std::vector<cplx> v(M);
            for (std::size_t i = 0; i < M; ++i) v[i] = Hb(i, c) * g.dw[i] / (2 * pi * I);
            auto F = fft(v); // sum v e^{-iks}
            for (std::size_t r = 0; r < n; ++r) {
                // e^{-i(r+1) phi}: phi = s -> slot r+1; phi = -s -> slot M-(r+1).
                std::size_t slot = sig > 0 ? r + 1 : M - (r + 1);
                C(r, c) = double(sig) * F[slot] * (2 * pi / double(M)) * std::sqrt(pi / double(r + 1));
            }
        }
        return C;
    }
    parallel_for(n, [&](std::size_t r) {
        for (Eigen::Index c = 0; c < Hb.cols(); ++c) {
            std::vector<cplx> t(M);
            for (std::size_t i = 0; i < M; ++i)
                t[i] = Hb(i, c) * g.dw[i] * std::polar(1.0, -double(r + 1) * sd.phi[i]);
            C(r, c) = double(sig) * pairwise_sum(t) * (2 * pi / double(M)) / (2 * pi * I) * std::sqrt(pi / double(r + 1));
        }
    });
    return C;
}

// Exact Gram matrix of the image columns on side k by Stokes:
// <H_b, H_a> = (i/2) * (boundary integral of Phi_b conj(H_a dw)), Phi_b' = H_b.
inline CMat stokes_gram(const SurfaceModel& m, int k, const CMat& Hb, double* mean_out = nullptr)
{
    const auto& g = m.gamma;
    std::size_t M = g.size();
    Eigen::Index n = Hb.cols();
    std::vector<std::vector<cplx>> Phi(n);
    double worst = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
        std::vector<cplx> f(M);
        for (std::size_t i = 0; i < M; ++i) f[i] = Hb(i, b) * g.dw[i];
        cplx mean;
        Phi[b] = spectral_antiderivative(f, &mean);
        worst = std::max(worst, std::abs(mean));
    }
    if (mean_out) *mean_out = worst;
    CMat G(n, n);
    double o = double(m.orientation(k));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            std::vector<cplx> t(M);
            for (std::size_t i = 0; i < M; ++i) t[i] = Phi[b][i] * std::conj(Hb(i, a) * g.dw[i]);
            G(a, b) = o * 0.5 * I * pairwise_sum(t) * (2 * pi / double(M));
        }
    return G;
}

inline CMat hermitian_part(const CMat& A) { return 0.5 * (A + A.adjoint()); }

} // namespace detail

// T(Sigma_j, Sigma_k) on the first N conjugated basis forms of Sigma_j, with
// ncod codomain rows (default N) on a chart side.
inline OperatorMatrix assemble_T(const SurfaceModel& m, int j, int k, std::size_t N, std::size_t ncod = 0, double rs = 0.8)
{
    if (ncod == 0) ncod = N;
    require_chart(m, j);
    OperatorMatrix op;
    op.tag = j == 0 ? (k == 0 ? OpTag::T11 : OpTag::T12) : (k == 0 ? OpTag::T21 : OpTag::T22);
    op.dom_basis = "conj_orthonormal_side" + std::to_string(j + 1);
    op.dom_gram = CMat::Identity(N, N);
    auto src = source_circle(m, j, rs, 256);
    const auto& g = m.gamma;
    std::size_t M = g.size();

    // Image columns on the curve, seen from side k.
    CMat Hb(M, N);
    parallel_for(M, [&](std::size_t i) {
        Lifted a = lift_plane(g.w[i]);
        std::vector<cplx> h;
        if (j == k) {
            // Same side: regularized kernel; dx/dw from the chart angle.
            cplx x = std::polar(1.0, m.side[k].phi[i]);
            cplx dxdw = I * x * m.side[k].dphi[i] / g.dw[i];
            std::size_t ms = src.y.size();
            std::vector<cplx> v(ms);
            for (std::size_t q = 0; q < ms; ++q) v[q] = schiffer_coeff(m, a, src.lift[q]) - disk_L(x, src.y[q]) * dxdw;
            h = taylor_from_circle(v, src.r, N);
            for (std::size_t c = 0; c < N; ++c) h[c] *= -2.0 * I * std::sqrt(pi / double(c + 1));
        } else {
            h = conj_basis_images(m, src, a, nullptr, N);
        }
        for (std::size_t c = 0; c < N; ++c) Hb(i, c) = h[c];
    });
    if (m.side[k].has_chart) {
        op.boundary = Hb;
        op.cod_basis = "orthonormal_side" + std::to_string(k + 1);
        op.entries = detail::chart_coefficients(m, k, Hb, ncod);
        op.cod_gram = CMat::Identity(ncod, ncod);
        op.col_gram = detail::hermitian_part(detail::stokes_gram(m, k, Hb));
        return op;
    }
    // Torus complement: values at the quadrature nodes and on the cycles.
    op.boundary = Hb;
    op.grid = true;
    op.cod_basis = "grid_dz_side2";
    std::size_t G = m.grid.z.size();
    op.entries.resize(G, N);
    parallel_for(G, [&](std::size_t i) {
        auto h = conj_basis_images(m, src, lift_plane(m.grid.z[i]), nullptr, N);
        for (std::size_t c = 0; c < N; ++c) op.entries(i, c) = h[c];
    });
    op.cod_weights = Eigen::Map<const RVec>(m.grid.w.data(), G);
    for (int cy = 0; cy < 2; ++cy) {
        const auto& pts = m.grid.cycles[cy];
        op.cycles[cy].resize(pts.size(), N);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto h = conj_basis_images(m, src, lift_plane(pts[i]), nullptr, N);
            for (std::size_t c = 0; c < N; ++c) op.cycles[cy](i, c) = h[c];
        }
    }
    op.col_gram = detail::hermitian_part(op.entries.adjoint() * op.cod_weights.asDiagonal() * op.entries);
    return op;
}

// Total area of the torus by quadrature, i.e. <dz, dz>.
inline double torus_area(const SurfaceModel& m) { return pi * m.spec.rho * m.spec.rho + pairwise_sum(m.grid.w); }

// S(Sigma_k): A(Sigma_k) -> A(R). Zero rows on the sphere; on the torus one
// row in the basis {dz} with Gram <dz, dz>.
inline OperatorMatrix assemble_S(const SurfaceModel& m, int k, std::size_t N)
{
    OperatorMatrix op;
    op.tag = k == 0 ? OpTag::S1 : OpTag::S2;
    op.dom_basis = "orthonormal_side" + std::to_string(k + 1);
    op.dom_gram = CMat::Identity(N, N);
    if (m.sphere()) {
        op.cod_basis = "empty";
        op.entries = CMat::Zero(0, N);
        op.cod_gram = CMat::Zero(0, 0);
        op.col_gram = CMat::Zero(N, N);
        return op;
    }
    require_chart(m, k);
    op.cod_basis = "dz";
    op.entries.resize(1, N);
    // integral of K_R(z, .) ^ e_n = kappa dz * (integral of conj(dw) ^ a_n dw),
    // conj(dw) ^ dw = 2i dA, and in the chart dw = rho dy.
    auto q = disk_rule(96, 256);
    double rho = m.spec.rho;
    for (std::size_t n = 0; n < N; ++n) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < q.z.size(); ++i) s += q.w[i] * std::pow(q.z[i], double(n));
        op.entries(0, n) = m.kappa * 2.0 * I * rho * std::sqrt(double(n + 1) / pi) * s;
    }
    op.cod_gram = CMat::Constant(1, 1, torus_area(m));
    op.col_gram = detail::hermitian_part(op.entries.adjoint() * op.cod_gram * op.entries);
    return op;
}

// Periods of torus complement columns over the two lattice cycles
// (rows a, b). The cycles are straight, so dz/dt is 1 or tau.
inline CMat column_periods(const SurfaceModel& m, const OperatorMatrix& op)
{
    if (!op.grid) return CMat::Zero(2, op.entries.cols());
    CMat P(2, op.entries.cols());
    cplx step[2] = {1.0, m.spec.tau};
    for (int c = 0; c < 2; ++c)
        for (Eigen::Index j = 0; j < op.entries.cols(); ++j) P(c, j) = op.cycles[c].col(j).mean() * step[c];
    return P;
}

// Gram-weighted adjoint A* = G_dom^-1 A^H G_cod.
inline OperatorMatrix adjoint(const OperatorMatrix& A)
{
    OperatorMatrix B;
    B.tag = A.tag;
    B.dom_basis = A.cod_basis;
    B.cod_basis = A.dom_basis;
    B.grid = false;
    Eigen::LDLT<CMat> ldlt(A.dom_gram);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().real().minCoeff() <= 1e-14 * ldlt.vectorD().real().maxCoeff())
        throw Error(Errc::SingularGram, "domain Gram matrix is singular");
    CMat AhG = A.grid ? CMat(A.entries.adjoint() * A.cod_weights.asDiagonal()) : CMat(A.entries.adjoint() * A.cod_gram);
    B.entries = ldlt.solve(AhG);
    B.dom_gram = A.grid ? CMat(A.cod_weights.asDiagonal()) : A.cod_gram;
    B.cod_gram = A.dom_gram;
    return B;
}

inline double spectral_norm(const CMat& A)
{
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(A);
    return svd.singularValues()(0);
}

namespace detail {
inline CVec random_unit(std::mt19937_64& rng, Eigen::Index n)
{
    std::normal_distribution<double> nd;
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
    return v / v.norm();
}

// Singular values (descending) of an operator restricted to a column subset,
// from its exact column Gram.
inline RVec gram_singular_values(const CMat& G)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(G);
    RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return ev.reverse();
}
} // namespace detail

// Operators shared by the identity checks. T21 and T22 exist on the sphere
// only, and only when the chart of Sigma_2 has a usable series.
struct Assembly {
    std::size_t N = 0;
    OperatorMatrix T11, T12, T21, T22, S1;
    bool has_reverse = false;
};

inline Assembly assemble_all(const SurfaceModel& m, std::size_t N)
{
    Assembly a;
    a.N = N;
    a.T11 = assemble_T(m, 0, 0, N);
    a.T12 = assemble_T(m, 0, 1, N);
    a.S1 = assemble_S(m, 0, N);
    if (m.sphere() && m.side[1].series_ok) {
        a.T21 = assemble_T(m, 1, 0, N);
        a.T22 = assemble_T(m, 1, 1, N);
        a.has_reverse = true;
    }
    return a;
}

// T(S1,S2)* = conj T(S2,S1) conj and T11* = conj T11 conj. In orthonormal
// bases these read M12^T = M21 and M11^T = M11.
inline Report verify_adjoint_identity(const SurfaceModel& m, const Assembly& A, std::uint64_t seed = 1)
{
    Report r;
    r.title = "adjoint";
    std::mt19937_64 rng(seed);
    std::size_t N = A.N;
    const auto& T11 = A.T11;
    double tol_sym = m.sphere() ? 1e-8 : 1e-4;
    double pair11 = 0.0;
    for (int t = 0; t < 20; ++t) {
        CVec x = detail::random_unit(rng, N), y = detail::random_unit(rng, N);
        // <T11 conj x, y> = <T11 conj y, x> in orthonormal coordinates: y^T M x = x^T M y.
        cplx lhs = (y.transpose() * T11.entries * x)(0);
        cplx rhs = (x.transpose() * T11.entries * y)(0);
        pair11 = std::max(pair11, std::abs(lhs - rhs));
    }
    r.add("T11 self-adjointness (pairing)", "adjoint-identity", pair11, tol_sym);
    r.data["T11_symmetry_norm"] = spectral_norm(T11.entries - T11.entries.transpose());
    auto T11s = adjoint(T11);
    auto T11ss = adjoint(T11s);
    r.data["involution"] = spectral_norm(T11ss.entries - T11.entries);
    if (m.sphere()) {
        if (!A.has_reverse) throw Error(Errc::IterationDiverged, "T21 needs the series of the Sigma_2 chart");
        const auto& T12 = A.T12;
        const auto& T21 = A.T21;
        double pair = 0.0;
        for (int t = 0; t < 20; ++t) {
            CVec x = detail::random_unit(rng, N), y = detail::random_unit(rng, N);
            cplx lhs = (y.adjoint() * T12.entries * x)(0);
            cplx rhs = (x.transpose() * T21.entries * y.conjugate())(0);
            pair = std::max(pair, std::abs(lhs - rhs));
        }
        r.add("T12 adjoint equals conjugated T21 (pairing)", "adjoint-identity", pair, 1e-8);
        r.data["T12_T21_norm"] = spectral_norm(T12.entries.transpose() - T21.entries);
        const auto& T22 = A.T22;
        r.add("T22 self-adjointness", "adjoint-identity", spectral_norm(T22.entries - T22.entries.transpose()), 1e-8);
    } else {
        // S = Res*: <S a, b dz>_R = <a, Res(b dz)>_Sigma1, Res dz = rho dy = rho sqrt(pi) e_0.
        const auto& S = A.S1;
        double area = torus_area(m);
        double pair = 0.0;
        for (int t = 0; t < 20; ++t) {
            CVec x = detail::random_unit(rng, N);
            std::normal_distribution<double> nd;
            cplx b(nd(rng), nd(rng));
            cplx lhs = (S.entries * x)(0) * std::conj(b) * area;
            cplx rhs = x(0) * std::conj(b * m.spec.rho * std::sqrt(pi));
            pair = std::max(pair, std::abs(lhs - rhs));
        }
        r.add("S adjoint to restriction (pairing)", "bergman-adjoint", pair, 1e-4);
    }
    return r;
}

// T11* T11 + T12* T12 + conj(S1)* conj(S1) = I on the first N conjugated basis forms.
inline Report verify_complete_identity(const SurfaceModel& m, const Assembly& A)
{
    Report r;
    r.title = "complete";
    std::size_t N = A.N;
    CMat R = A.T11.col_gram + A.T12.col_gram + A.S1.col_gram.conjugate() - CMat::Identity(N, N);
    double tol = m.sphere() ? 1e-6 : 1e-4;
    r.add("complete identity residual", "complete-identity", spectral_norm(R), tol);
    r.data["worst_entry"] = R.cwiseAbs().maxCoeff();
    return r;
}

struct GrunskyResult {
    double nu = 0.0;
    RVec sv_T11, sv_T12;
    double bound = 1.0; // sqrt(1 - nu^2)
};

// Norm of T11 on V_1 and the singular values of T12 on V_1.
inline GrunskyResult grunsky_norm(const SurfaceModel& m, const Assembly& A)
{
    std::size_t N = A.N;
    const auto& T11 = A.T11;
    const auto& T12 = A.T12;
    Eigen::Index off = m.sphere() ? 0 : 1; // torus: V_1 drops conj(dy)
    Eigen::Index n = Eigen::Index(N) - off;
    GrunskyResult g;
    g.sv_T11 = detail::gram_singular_values(T11.col_gram.block(off, off, n, n));
    g.sv_T12 = detail::gram_singular_values(T12.col_gram.block(off, off, n, n));
    g.nu = g.sv_T11(0);
    g.bound = std::sqrt(std::max(0.0, 1.0 - g.nu * g.nu));
    return g;
}

inline Report verify_adjoint_identity(const SurfaceModel& m, std::size_t N, std::uint64_t seed = 1)
{
    return verify_adjoint_identity(m, assemble_all(m, N), seed);
}

inline Report verify_complete_identity(const SurfaceModel& m, std::size_t N)
{
    return verify_complete_identity(m, assemble_all(m, N));
}

inline GrunskyResult grunsky_norm(const SurfaceModel& m, std::size_t N) { return grunsky_norm(m, assemble_all(m, N)); }

} // namespace schiffer
