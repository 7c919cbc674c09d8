#include <schiffer/schiffer.hpp>

#include <gtest/gtest.h>

using namespace schiffer;

namespace {

const std::size_t N = 16;

struct Fixture {
    SurfaceModel m;
    Assembly A;
};

const Fixture& circle()
{
    static Fixture f = [] {
        auto m = build_model(CurveSpec::circle(), N);
        auto A = assemble_all(m, N);
        return Fixture{std::move(m), std::move(A)};
    }();
    return f;
}

const Fixture& ellipse05()
{
    static Fixture f = [] {
        auto m = build_model(CurveSpec::ellipse(0.5), N);
        auto A = assemble_all(m, N);
        return Fixture{std::move(m), std::move(A)};
    }();
    return f;
}

const Fixture& torus()
{
    static Fixture f = [] {
        auto m = build_model(CurveSpec::torus_disk(cplx(0, 1), cplx(0.5, 0.5), 0.2), N);
        auto A = assemble_all(m, N);
        return Fixture{std::move(m), std::move(A)};
    }();
    return f;
}

double worst(const Report& r)
{
    for (auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
    return r.worst();
}

} // namespace

TEST(Schiffer, CircleT11Vanishes)
{
    EXPECT_LE(circle().A.T11.entries.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(circle().A.T11.tag, OpTag::T11);
}

TEST(Schiffer, EllipseT11IsDiagonal)
{
    // Grunsky coefficients of z + c/z: the log expansion gives -c^k / k at
    // order (k, k), which is -c^k in the orthonormal basis.
    const auto& T = ellipse05().A.T11.entries;
    CMat D = CMat::Zero(N, N);
    for (std::size_t k = 0; k < N; ++k) D(k, k) = -std::pow(0.5, double(k + 1));
    EXPECT_LE((T - D).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Schiffer, T12ColumnsAreExact)
{
    CMat P = column_periods(torus().m, torus().A.T12);
    EXPECT_LE(P.rightCols(N - 1).cwiseAbs().maxCoeff(), 1e-7);
    // The image of conj(dz) restricted to the disk is not in V1.
    EXPECT_GT(P.col(0).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_EQ(column_periods(circle().m, circle().A.T12).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Schiffer, RestrictionAdjoint)
{
    EXPECT_EQ(circle().A.S1.entries.size(), 0);
    const auto& t = torus();
    const auto& S = t.A.S1.entries;
    double area = torus_area(t.m);
    EXPECT_NEAR(area, 1.0, 1e-12);
    EXPECT_NEAR(std::abs(S(0, 0) - t.m.spec.rho * std::sqrt(pi) / area), 0.0, 1e-8);
    EXPECT_LE(S.rightCols(N - 1).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Schiffer, AdjointOperator)
{
    OperatorMatrix id;
    id.entries = CMat::Identity(4, 4);
    id.dom_gram = CMat::Identity(4, 4);
    id.cod_gram = CMat::Identity(4, 4);
    EXPECT_EQ(adjoint(id).entries, id.entries);

    const auto& T = ellipse05().A.T11;
    EXPECT_LE((adjoint(T).entries - T.entries.adjoint()).cwiseAbs().maxCoeff(), 1e-15);

    std::mt19937_64 rng(2);
    const auto& T12 = ellipse05().A.T12;
    auto T12s = adjoint(T12);
    for (int i = 0; i < 5; ++i) {
        CVec x = detail::random_unit(rng, N), y = detail::random_unit(rng, N);
        cplx lhs = y.dot(T12.entries * x);
        cplx rhs = (T12s.entries * y).dot(x);
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-9);
    }

    OperatorMatrix bad = id;
    bad.dom_gram(2, 2) = 0.0;
    EXPECT_THROW(adjoint(bad), Error);
}

TEST(Schiffer, AdjointIdentities)
{
    EXPECT_LE(worst(verify_adjoint_identity(circle().m, circle().A)), 1e-12);
    EXPECT_LE(worst(verify_adjoint_identity(ellipse05().m, ellipse05().A)), 1e-6);
    auto r = verify_adjoint_identity(torus().m, torus().A);
    EXPECT_LE(r.data["T11_symmetry_norm"].get<double>(), 1e-6);
    worst(r);
}

TEST(Schiffer, CompleteIdentity)
{
    EXPECT_LE(worst(verify_complete_identity(circle().m, circle().A)), 1e-8);
    EXPECT_LE((circle().A.T12.col_gram - CMat::Identity(N, N)).cwiseAbs().maxCoeff(), 1e-8);

    const auto& e = ellipse05();
    for (std::size_t k = 0; k < N; ++k) {
        double c2 = std::pow(0.5, 2.0 * double(k + 1));
        EXPECT_NEAR(e.A.T11.col_gram(k, k).real(), c2, 1e-6);
        EXPECT_NEAR(e.A.T12.col_gram(k, k).real(), 1.0 - c2, 1e-6);
    }
    worst(verify_complete_identity(e.m, e.A));
    EXPECT_LE(worst(verify_complete_identity(torus().m, torus().A)), 1e-4);
}

TEST(Schiffer, GrunskyNorm)
{
    EXPECT_LE(grunsky_norm(circle().m, circle().A).nu, 1e-10);
    double prev = 0.0;
    for (double c : {0.1, 0.2, 0.5, 0.8}) {
        auto m = build_model(CurveSpec::ellipse(c), N);
        Assembly A;
        A.N = N;
        A.T11 = assemble_T(m, 0, 0, N);
        A.T12 = assemble_T(m, 0, 1, N);
        auto g = grunsky_norm(m, A);
        EXPECT_NEAR(g.nu, c, 1e-6);
        EXPECT_GT(g.nu, prev);
        prev = g.nu;
        // Singular values of T12 in ascending order are sqrt(1 - c^(2n)).
        Eigen::Index L = g.sv_T12.size();
        for (Eigen::Index n = 1; n <= L; ++n) EXPECT_NEAR(g.sv_T12(L - n), std::sqrt(1.0 - std::pow(c, 2.0 * double(n))), 1e-6);
        EXPECT_NEAR(g.bound, std::sqrt(1.0 - c * c), 1e-6);
    }
}

TEST(Schiffer, ReverseOperatorsNeedTheSeries)
{
    auto m = build_model(CurveSpec::ellipse(0.8), 8);
    auto A = assemble_all(m, 8);
    EXPECT_FALSE(A.has_reverse);
    EXPECT_THROW(verify_adjoint_identity(m, A), Error);
    EXPECT_TRUE(ellipse05().A.has_reverse);
}

TEST(Schiffer, TorusComplementUsesTheGrid)
{
    const auto& T12 = torus().A.T12;
    EXPECT_TRUE(T12.grid);
    EXPECT_EQ(T12.entries.rows(), Eigen::Index(torus().m.grid.z.size()));
    EXPECT_EQ(std::string(to_string(T12.tag)), "T12");
}
