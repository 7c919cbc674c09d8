#include <schiffer/schiffer.hpp>

#include <gtest/gtest.h>

using namespace schiffer;

namespace {

const SurfaceModel& circle()
{
    static SurfaceModel m = build_model(CurveSpec::circle(), 16);
    return m;
}

const SurfaceModel& ellipse05()
{
    static SurfaceModel m = build_model(CurveSpec::ellipse(0.5), 16);
    return m;
}

const SurfaceModel& torus()
{
    static SurfaceModel m = build_model(CurveSpec::torus_disk(cplx(0, 1), cplx(0.5, 0.5), 0.2), 16);
    return m;
}

std::vector<std::pair<cplx, cplx>> random_pairs(std::uint64_t seed, int n)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<std::pair<cplx, cplx>> out;
    for (int i = 0; i < n; ++i) out.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
    return out;
}

} // namespace

TEST(Kernels, SphereSchifferKernelValue)
{
    auto v = L_R(circle(), 0.0, 1.0);
    EXPECT_EQ(v.type, KernelType::dz_dw);
    EXPECT_NEAR(std::abs(v.value + 1.0 / (2 * pi * I)), 0.0, 1e-15);
}

TEST(Kernels, SchifferKernelIsSymmetric)
{
    for (const auto* m : {&circle(), &torus()})
        for (auto [z, w] : random_pairs(3, 20)) EXPECT_NEAR(std::abs(L_R(*m, z, w).value - L_R(*m, w, z).value), 0.0, 1e-10);
}

TEST(Kernels, TorusSchifferKernelFromGreenDifferences)
{
    // L = -(1/pi i) d_z d_w g; d_w g is exact, d_z by central differences.
    const auto& m = torus();
    cplx q(0.8, 0.1);
    double h = 1e-4;
    for (auto [z, w] : random_pairs(5, 6)) {
        if (std::abs(z - w) < 0.1) continue;
        cplx fx = (dw_green_R(m, w, z + h, q) - dw_green_R(m, w, z - h, q)) / (2 * h);
        cplx fy = (dw_green_R(m, w, z + I * h, q) - dw_green_R(m, w, z - I * h, q)) / (2 * h);
        cplx dz = 0.5 * (fx - I * fy);
        EXPECT_NEAR(std::abs(L_R(m, z, w).value + dz / (pi * I)), 0.0, 1e-6);
    }
}

TEST(Kernels, BergmanKernelOfSurfaces)
{
    EXPECT_EQ(K_R(circle(), 0.1, 0.3).value, cplx(0.0));
    const auto& m = torus();
    EXPECT_NEAR(std::abs(K_R(m, 0.1, 0.3).value - cplx(0.0, -0.5)), 0.0, 1e-10);
    // i K is Hermitian symmetric.
    cplx ik = I * K_R(m, 0.1, 0.3).value;
    EXPECT_NEAR(std::abs(ik - std::conj(I * K_R(m, 0.3, 0.1).value)), 0.0, 1e-14);
}

TEST(Kernels, CalibrationReportPasses)
{
    for (const auto* m : {&circle(), &ellipse05(), &torus()}) {
        auto r = verify_kernels(*m, 2);
        for (auto& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.residual;
    }
}

TEST(Kernels, DiskBergmanReproducesMonomials)
{
    auto rule = disk_rule(64, 128);
    cplx x(0.3, -0.2);
    for (int n = 0; n <= 2; ++n) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < rule.z.size(); ++i) {
            cplx y = rule.z[i];
            // K(x, y) ^ h(y) with K = k dx conj(dy) and conj(dy) ^ dy = 2i dA.
            s += disk_K(x, y) * std::pow(y, n) * 2.0 * I * rule.w[i];
        }
        EXPECT_NEAR(std::abs(s - std::pow(x, n)), 0.0, 1e-10) << n;
    }
}

// On the level curve g(., y) = eps through x the kernels satisfy
// conj(k) conj(v) = -exp(-2 eps) l v for a tangent v at x, which becomes the
// boundary identity conj(K)(., v) = -L(., v) as eps -> 0.
TEST(Kernels, LevelCurveIdentityOnTheDisk)
{
    cplx y(0.2, 0.1);
    for (double eps : {0.9, 0.1, 1e-3, 0.0}) {
        double r = std::exp(-eps);
        for (int j = 0; j < 16; ++j) {
            cplx e = std::polar(r, 2 * pi * j / 16.0);
            cplx x = (y + e) / (1.0 + std::conj(y) * e);
            cplx v = (1.0 - std::norm(y)) / std::pow(1.0 + std::conj(y) * e, 2) * I * e;
            cplx lhs = std::conj(disk_K(x, y)) * std::conj(v);
            cplx rhs = -r * r * disk_L(x, y) * v;
            EXPECT_NEAR(std::abs(lhs - rhs) / std::abs(rhs), 0.0, 1e-8) << eps;
        }
    }
}

TEST(Kernels, LevelCurveIdentityOnEllipseExterior)
{
    const auto& m = ellipse05();
    const Chart& c = m.side[0].chart;
    cplx p(0.3, 0.0);
    for (double eps : {0.4, 0.05}) {
        double r = std::exp(-eps);
        auto lc = level_curve(m, 0, p, eps, 16);
        cplx wpole = c(p);
        for (std::size_t j = 0; j < lc.points.size(); ++j) {
            cplx e = std::polar(r, lc.params[j]);
            cplx dx = (1.0 - std::norm(p)) / std::pow(1.0 + std::conj(p) * e, 2) * I * e;
            cplx v = c.derivative(lc.chart[j]) * dx;
            cplx k = K_comp(m, 0, lc.points[j], wpole).value;
            cplx l = L_comp(m, 0, lc.points[j], wpole).value;
            EXPECT_NEAR(std::abs(std::conj(k) * std::conj(v) + r * r * l * v) / std::abs(l * v), 0.0, 1e-8);
        }
    }
}

TEST(Kernels, ComponentKernelHasDoublePole)
{
    const auto& m = ellipse05();
    cplx z = m.side[0].chart(cplx(0.5, 0.2));
    std::vector<double> diffs;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
        cplx w = z + cplx(d, 0.5 * d);
        cplx sing = -1.0 / (2 * pi * I * (w - z) * (w - z));
        diffs.push_back(std::abs(L_comp(m, 0, z, w).value - sing));
    }
    // The remainder stays bounded while the pole grows by 10^6.
    for (double d : diffs) EXPECT_LT(d, 2 * diffs.front() + 1.0);
}

TEST(Kernels, RegularizedKernel)
{
    CurveSpec s;
    auto circ = build_model(s, 8);
    ASSERT_TRUE(circ.side[0].bounded);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int i = 0; i < 10; ++i) {
        cplx x(u(rng), u(rng)), y(u(rng), u(rng));
        EXPECT_NEAR(std::abs(L_regularized_chart(circ, 0, x, y).value), 0.0, 1e-12);
    }

    const auto& m = ellipse05();
    cplx x(0.4, 0.3), dir = std::polar(1.0, 0.7);
    // Continuity across the switch to the near-diagonal evaluation, and
    // across |x - y| = 1e-4.
    for (double d : {1e-4, 0.0125}) {
        cplx a = L_regularized_chart(m, 0, x, x + d * (1 + 1e-8) * dir).value;
        cplx b = L_regularized_chart(m, 0, x, x + d * (1 - 1e-8) * dir).value;
        EXPECT_NEAR(std::abs(a - b), 0.0, 1e-7) << d;
    }
    EXPECT_TRUE(std::isfinite(std::abs(L_regularized_chart(m, 0, x, x).value)));
    for (cplx y : {cplx(-0.3, 0.2), cplx(0.1, -0.5), x + 5e-5 * dir})
        EXPECT_NEAR(std::abs(L_regularized_chart(m, 0, x, y).value - L_regularized_chart(m, 0, y, x).value), 0.0, 1e-9);
}

TEST(Kernels, DiagonalIsRejected)
{
    EXPECT_THROW(L_R(circle(), 0.3, 0.3), Error);
    EXPECT_THROW(L_R(torus(), 0.3, 1.3), Error);
}
