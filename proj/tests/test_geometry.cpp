#include <schiffer/schiffer.hpp>

#include <gtest/gtest.h>

using namespace schiffer;

namespace {

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::SuiteFailed;
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

} // namespace

TEST(Geometry, CircleChartsAreIdentity)
{
    auto m = build_model(CurveSpec::circle(), 16);
    EXPECT_TRUE(m.sphere());
    for (double t : {0.0, 0.7, 2.1, 4.0}) {
        cplx y = std::polar(0.6, t);
        EXPECT_NEAR(std::abs(m.side[0].chart(y) - y), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(m.side[1].chart(y) - 1.0 / y), 0.0, 1e-14);
    }
    auto sig = welding(m, 64);
    for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(sig[j], unit_root_angle(j, 64), 1e-14);
}

TEST(Geometry, EllipseInteriorMapLiesOnEllipse)
{
    const auto& m = ellipse05();
    ASSERT_FALSE(m.side[1].analytic);
    double worst = 0.0;
    for (int j = 0; j < 512; ++j) {
        cplx w = m.side[1].chart(std::polar(1.0, 2 * pi * j / 512.0));
        double r = std::pow(w.real() / 1.5, 2) + std::pow(w.imag() / 0.5, 2) - 1.0;
        worst = std::max(worst, std::abs(r));
    }
    // Algebraic residual times the smallest gradient scale bounds the distance.
    EXPECT_LE(worst * 0.25, 1e-8);
}

TEST(Geometry, WeldingSolvesDefiningEquation)
{
    const auto& m = ellipse05();
    std::size_t n = 256;
    auto sig = welding(m, n);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double t = unit_root_angle(j, n);
        cplx g = std::polar(1.0, t) + 0.5 * std::polar(1.0, -t);
        worst = std::max(worst, std::abs(m.side[1].chart(std::polar(1.0, sig[j])) - g));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Geometry, WeldingTendsToIdentity)
{
    double prev = 1e9;
    for (double c : {0.4, 0.2, 0.1}) {
        auto m = build_model(CurveSpec::ellipse(c), 16);
        auto sig = welding(m, 128);
        double d = 0.0;
        for (std::size_t j = 0; j < 128; ++j) d = std::max(d, std::abs(sig[j] - sig[0] - unit_root_angle(j, 128)));
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(Geometry, TorusDiskIsAffine)
{
    const auto& m = torus();
    EXPECT_FALSE(m.sphere());
    EXPECT_FALSE(m.side[1].has_chart);
    cplx y(0.3, -0.2);
    EXPECT_NEAR(std::abs(m.side[0].chart(y) - (cplx(0.5, 0.5) + 0.2 * y)), 0.0, 1e-15);
}

TEST(Geometry, SphereGreenFunction)
{
    auto m = build_model(CurveSpec::circle(), 8);
    EXPECT_NEAR(green_R(m, 2.0, 0.0, infinity), std::log(2.0), 1e-15);
    EXPECT_NEAR(std::abs(dw_green_R(m, 2.0, 0.0, infinity) - 0.25), 0.0, 1e-15);
    EXPECT_EQ(code_of([&] { green_R(m, 0.0, 0.0, infinity); }), Errc::CoincidentPoints);
}

TEST(Geometry, TorusGreenIsPeriodicAndHarmonic)
{
    const auto& m = torus();
    cplx z(0.3, 0.4), q(0.8, 0.1), tau = m.spec.tau;
    double per = 0.0, lap = 0.0;
    for (cplx w : {cplx(0.1, 0.7), cplx(0.6, 0.2), cplx(0.9, 0.9)}) {
        double g = green_R(m, w, z, q);
        per = std::max({per, std::abs(green_R(m, w + 1.0, z, q) - g), std::abs(green_R(m, w + tau, z, q) - g)});
        // Five-point stencil at h and 2h; the combination cancels the h^2 term.
        auto five = [&](double h) {
            double s = green_R(m, w + h, z, q) + green_R(m, w - h, z, q) + green_R(m, w + I * h, z, q) + green_R(m, w - I * h, z, q);
            return (s - 4 * g) / (h * h);
        };
        lap = std::max(lap, std::abs((4 * five(1e-3) - five(2e-3)) / 3));
    }
    EXPECT_LE(per, 1e-10);
    EXPECT_LE(lap, 1e-6);
}

TEST(Geometry, TorusGreenDerivativeMatchesDifferences)
{
    const auto& m = torus();
    cplx w(0.1, 0.7), z(0.3, 0.4), q(0.8, 0.1);
    double h = 1e-5;
    double gx = (green_R(m, w + h, z, q) - green_R(m, w - h, z, q)) / (2 * h);
    double gy = (green_R(m, w + I * h, z, q) - green_R(m, w - I * h, z, q)) / (2 * h);
    EXPECT_NEAR(std::abs(dw_green_R(m, w, z, q) - 0.5 * cplx(gx, -gy)), 0.0, 1e-8);
}

TEST(Geometry, DiskGreenFunction)
{
    CurveSpec s;
    s.first = FirstSide::Interior;
    auto m = build_model(s, 8);
    EXPECT_NEAR(green_component(m, 0, 0.5, 0.0).g, -std::log(0.5), 1e-14);
}

TEST(Geometry, ExteriorGreenVanishesOnCurve)
{
    const auto& m = ellipse05();
    ASSERT_FALSE(m.side[0].bounded);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.gamma.size(); i += 97) worst = std::max(worst, std::abs(green_component(m, 0, m.gamma.w[i], infinity).g));
    EXPECT_LE(worst, 1e-8);
    // Decay is linear in the distance to the curve.
    cplx w0 = m.gamma.w[0];
    double g1 = green_component(m, 0, w0 + 1e-3, infinity).g, g2 = green_component(m, 0, w0 + 2e-3, infinity).g;
    EXPECT_NEAR(g2 / g1, 2.0, 1e-2);
}

TEST(Geometry, LevelCurves)
{
    CurveSpec s;
    s.first = FirstSide::Interior;
    auto circ = build_model(s, 8);
    auto c = level_curve(circ, 0, 0.0, 0.1, 64);
    for (auto w : c.points) EXPECT_NEAR(std::abs(w), std::exp(-0.1), 1e-14);

    const auto& m = ellipse05();
    auto e = level_curve(m, 0, 0.0, 0.05, 128);
    double worst = 0.0;
    for (auto w : e.points) worst = std::max(worst, std::abs(green_component(m, 0, w, infinity).g - 0.05));
    EXPECT_LE(worst, 1e-9);

    auto t = level_curve(torus(), 0, 0.0, 0.1, 64);
    for (auto w : t.points) EXPECT_NEAR(std::abs(w - cplx(0.5, 0.5)), 0.2 * std::exp(-0.1), 1e-14);

    EXPECT_EQ(code_of([&] { level_curve(circ, 0, 0.0, 2.0, 64); }), Errc::EpsilonTooLarge);
}

TEST(Geometry, InvalidSpecsAreRejected)
{
    EXPECT_EQ(code_of([] { build_model(CurveSpec::ellipse(1.2), 16); }), Errc::NonUnivalent);
    EXPECT_EQ(code_of([] { build_model(CurveSpec::torus_disk(cplx(0, 1), cplx(0.5, 0.5), 0.6), 16); }), Errc::ConfigInvalid);
    EXPECT_EQ(code_of([] { build_model(CurveSpec::circle(), 4); }), Errc::ConfigInvalid);
    EXPECT_EQ(code_of([] { welding(torus(), 16); }), Errc::WeldingUnavailable);
}

TEST(Geometry, CurveSpecJsonRoundTrip)
{
    auto s = CurveSpec::ellipse(0.3);
    s.first = FirstSide::Interior;
    nlohmann::json j = s;
    auto back = j.get<CurveSpec>();
    EXPECT_EQ(back.kind, CurveKind::ExteriorMap);
    EXPECT_EQ(back.first, FirstSide::Interior);
    ASSERT_EQ(back.coeffs.size(), 2u);
    EXPECT_EQ(back.coeffs[1], cplx(0.3));
    EXPECT_EQ(code_of([] { nlohmann::json::parse(R"({"kind":"Square"})").get<CurveSpec>(); }), Errc::ConfigInvalid);
}
