#pragma once

#include "conformal.hpp"
#include "theta.hpp"

#include <json.hpp>

#include <array>
#include <functional>
#include <limits>
#include <optional>

namespace schiffer {

inline const cplx infinity{std::numeric_limits<double>::infinity(), 0.0};
inline bool is_infinite(cplx z) { return std::isinf(z.real()) || std::isinf(z.imag()); }

enum class CurveKind { Circle, ExteriorMap, InteriorMap, TorusDisk };

// Which complementary component plays the role of Sigma_1. Default picks
// the analytic side for exterior maps and the bounded side otherwise.
enum class FirstSide { Default, Interior, Exterior };

// ExteriorMap coeffs: b0, b1, b2, ... for g(z) = z + b0 + sum b_k z^-k.
// InteriorMap coeffs: a2, a3, ... for f(z) = z + sum a_k z^k.
struct CurveSpec {
    CurveKind kind = CurveKind::Circle;
    std::vector<cplx> coeffs;
    cplx tau{0.0, 1.0};
    cplx center{0.5, 0.5};
    double rho = 0.2;
    FirstSide first = FirstSide::Default;

    static CurveSpec circle() { return {}; }
    static CurveSpec ellipse(double c)
    {
        CurveSpec s;
        s.kind = CurveKind::ExteriorMap;
        s.coeffs = {0.0, c};
        return s;
    }
    static CurveSpec torus_disk(cplx tau, cplx z0, double rho)
    {
        CurveSpec s;
        s.kind = CurveKind::TorusDisk;
        s.tau = tau;
        s.center = z0;
        s.rho = rho;
        return s;
    }
};

namespace detail {
inline nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
inline cplx cread(const nlohmann::json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw Error(Errc::ConfigInvalid, "complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}
} // namespace detail

inline void to_json(nlohmann::json& j, const CurveSpec& s)
{
    static const char* names[] = {"Circle", "ExteriorMap", "InteriorMap", "TorusDisk"};
    j = nlohmann::json::object();
    j["kind"] = names[int(s.kind)];
    auto c = nlohmann::json::array();
    for (auto v : s.coeffs) c.push_back(detail::cjson(v));
    j["coeffs"] = c;
    if (s.kind == CurveKind::TorusDisk) {
        j["tau"] = detail::cjson(s.tau);
        j["center"] = detail::cjson(s.center);
        j["rho"] = s.rho;
    }
    if (s.first != FirstSide::Default) j["sigma1"] = s.first == FirstSide::Interior ? "interior" : "exterior";
}

inline void from_json(const nlohmann::json& j, CurveSpec& s)
{
    try {
        s = CurveSpec{};
        std::string k = j.at("kind").get<std::string>();
        if (k == "Circle") s.kind = CurveKind::Circle;
        else if (k == "ExteriorMap") s.kind = CurveKind::ExteriorMap;
        else if (k == "InteriorMap") s.kind = CurveKind::InteriorMap;
        else if (k == "TorusDisk") s.kind = CurveKind::TorusDisk;
        else throw Error(Errc::ConfigInvalid, "unknown curve kind " + k);
        if (j.contains("coeffs"))
            for (auto& c : j["coeffs"]) s.coeffs.push_back(detail::cread(c));
        if (j.contains("tau")) s.tau = detail::cread(j["tau"]);
        if (j.contains("center")) s.center = detail::cread(j["center"]);
        if (j.contains("rho")) s.rho = j["rho"].get<double>();
        if (j.contains("sigma1")) {
            std::string f = j["sigma1"].get<std::string>();
            if (f == "interior") s.first = FirstSide::Interior;
            else if (f == "exterior") s.first = FirstSide::Exterior;
            else throw Error(Errc::ConfigInvalid, "sigma1 must be interior or exterior");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigInvalid, e.what());
    }
}

// Point in a chart written homogeneously: w = num / den, and D = (dw/dz) den^2.
// Lets kernels be evaluated uniformly at the point at infinity.
struct Lifted {
    cplx num, den, D;
};

inline Lifted lift_plane(cplx w) { return {w, 1.0, 1.0}; }

// Uniformizing chart of a simply connected component: F(z) for bounded
// components, F(z) = P(z)/z for the component containing infinity.
class Chart {
public:
    Chart() = default;
    Chart(PowerSeries s, bool exterior) : s_(std::move(s)), ext_(exterior) { build_table(); }

    bool exterior() const { return ext_; }
    const PowerSeries& series() const { return s_; }

    Lifted lift(cplx z) const
    {
        auto [p, dp] = s_.eval_d(z);
        if (!ext_) return {p, 1.0, dp};
        return {p, z, z * dp - p};
    }

    cplx operator()(cplx z) const
    {
        if (!ext_) return s_.eval(z);
        if (z == 0.0) return infinity;
        return s_.eval(z) / z;
    }

    // dw/dz in plane coordinates (not meaningful at the pole of an exterior chart).
    cplx derivative(cplx z) const
    {
        auto [p, dp] = s_.eval_d(z);
        if (!ext_) return dp;
        return (z * dp - p) / (z * z);
    }

    // Chart coordinate of w; Newton from the nearest tabulated value.
    cplx inverse(cplx w) const
    {
        if (ext_ && is_infinite(w)) return 0.0;
        cplx z = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < table_z_.size(); ++i) {
            double d = std::abs(table_w_[i] - w);
            if (d < best) {
                best = d;
                z = table_z_[i];
            }
        }
        double scale = std::max(1.0, std::abs(w));
        for (int it = 0; it < 50; ++it) {
            auto [p, dp] = s_.eval_d(z);
            cplx r = ext_ ? p - w * z : p - w;
            cplx dr = ext_ ? dp - w : dp;
            if (dr == 0.0) break;
            cplx step = r / dr;
            // Damp steps that would leave a slightly enlarged disk.
            double lim = 0.5 * (1.05 - std::abs(z)) + 0.05;
            if (std::abs(step) > lim) step *= lim / std::abs(step);
            z -= step;
            if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z)) && std::abs(r) < 1e-12 * scale) return z;
        }
        auto [p, dp] = s_.eval_d(z);
        cplx r = ext_ ? p - w * z : p - w;
        if (std::abs(r) < 1e-11 * scale) return z;
        throw Error(Errc::InverseMapDiverged, "inverse map Newton did not converge");
    }

private:
    void build_table()
    {
        for (int i = 1; i <= 24; ++i) {
            double r = 0.999 * i / 24.0;
            for (int j = 0; j < 64; ++j) {
                cplx z = std::polar(r, 2 * pi * j / 64.0);
                table_z_.push_back(z);
                table_w_.push_back((*this)(z));
            }
        }
        table_z_.push_back(ext_ ? cplx(1e-3) : cplx(0.0));
        table_w_.push_back((*this)(table_z_.back()));
    }

    PowerSeries s_;
    bool ext_ = false;
    std::vector<cplx> table_z_, table_w_;
};

// Samples of the separating curve at uniform parameter s, s increasing
// counterclockwise around the bounded component.
struct Boundary {
    std::vector<double> s;
    std::vector<cplx> w, dw;
    std::size_t size() const { return w.size(); }
};

struct SideData {
    bool has_chart = false;
    bool bounded = true;   // the component not containing infinity (torus: the disk)
    bool analytic = true;  // chart given in closed form by the input data
    Chart chart;
    std::vector<double> phi, dphi; // chart angle of the curve samples and its s-derivative
    double series_mismatch = 0.0;  // sup |F(e^{i phi}) - w| over the curve samples
    bool series_ok = true;
};

struct TorusGrid {
    std::vector<cplx> z;
    std::vector<double> w;
    std::array<std::vector<cplx>, 2> cycles; // sampled lattice generators inside Sigma_2
};

struct SurfaceModel {
    int genus = 0;
    CurveSpec spec;
    std::size_t N = 32;
    double tol = 1e-10;
    Boundary gamma;
    std::array<SideData, 2> side; // side[0] = Sigma_1
    CircleMap correspondence;     // increasing angle map of the computed side (genus 0)
    bool computed_is_bounded = true;
    std::size_t szego_nodes = 0;
    cplx q = infinity;
    std::array<cplx, 2> p{}; // level-curve base points in chart coordinates
    std::optional<Theta> theta;
    TorusGrid grid;
    double green_shift = 0.0; // additive constant hook; never reaches derivatives
    cplx kappa = 0.0;         // Bergman constant of the torus, K_R = kappa dz dw-bar

    // Orientation of s-increasing traversal relative to Sigma_k (+1 positive).
    int orientation(int k) const { return side[k].bounded ? 1 : -1; }
    bool sphere() const { return genus == 0; }
};

namespace detail {

// Normalized Grunsky matrix norm of z + b0 + sum b_k z^-k from a 2D FFT of
// log((g(z)-g(w))/(z-w)) in the variables 1/z, 1/w.
inline double exterior_grunsky_screen(const std::vector<cplx>& b, std::size_t kmax = 24)
{
    auto g = [&](cplx z) {
        cplx s = z + (b.empty() ? 0.0 : b[0]);
        cplx zk = 1.0;
        for (std::size_t k = 1; k < b.size(); ++k) {
            zk /= z;
            s += b[k] * zk;
        }
        return s;
    };
    auto dg = [&](cplx z) {
        cplx s = 1.0, zk = 1.0 / z;
        for (std::size_t k = 1; k < b.size(); ++k) {
            zk /= z;
            s -= double(k) * b[k] * zk;
        }
        return s;
    };
    const std::size_t n = 64;
    const double r = 0.9;
    CMat F(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            cplx e = std::polar(r, unit_root_angle(j, n)), x = std::polar(r, unit_root_angle(k, n));
            cplx Q = j == k ? dg(1.0 / e) : (g(1.0 / e) - g(1.0 / x)) / (1.0 / e - 1.0 / x);
            if (std::abs(std::arg(Q)) > pi - 0.1 || std::abs(Q) < 1e-12)
                throw Error(Errc::NonUnivalent, "exterior map fails the Grunsky screen");
            F(j, k) = std::log(Q);
        }
    // 2D transform: rows then columns.
    CMat C(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<cplx> row(n);
        for (std::size_t k = 0; k < n; ++k) row[k] = F(j, k);
        auto c = fourier_coeffs(row);
        for (std::size_t k = 0; k < n; ++k) C(j, k) = c[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cplx> col(n);
        for (std::size_t j = 0; j < n; ++j) col[j] = C(j, k);
        auto c = fourier_coeffs(col);
        for (std::size_t j = 0; j < n; ++j) C(j, k) = c[j];
    }
    kmax = std::min(kmax, n / 2 - 1);
    CMat B(kmax, kmax);
    for (std::size_t k = 1; k <= kmax; ++k)
        for (std::size_t l = 1; l <= kmax; ++l)
            B(k - 1, l - 1) = -C(k, l) * std::sqrt(double(k * l)) / std::pow(r, double(k + l));
    Eigen::JacobiSVD<CMat> svd(B);
    return svd.singularValues()(0);
}

inline std::vector<cplx> sample_closed(const std::function<cplx(double)>& f, std::size_t m)
{
    std::vector<cplx> p(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = f(unit_root_angle(k, m));
    return p;
}

// Chart angle samples of an analytic side: phi = s (bounded) or -s.
inline void analytic_angles(SideData& sd, const Boundary& b)
{
    std::size_t m = b.size();
    sd.phi.resize(m);
    sd.dphi.assign(m, sd.bounded ? 1.0 : -1.0);
    for (std::size_t k = 0; k < m; ++k) sd.phi[k] = sd.bounded ? b.s[k] : -b.s[k];
}

// Power series of a computed bounded chart from the boundary
// correspondence: the chart value at e^{i phi} is the curve point whose
// parameter maps to phi. Sample count doubles until the tail is negligible.
template <class CurveAt>
PowerSeries computed_series(const CircleMap& theta, const CurveAt& curve_at, std::size_t Lmax = 1u << 16)
{
    std::vector<cplx> best;
    for (std::size_t L = 1024; L <= Lmax; L *= 2) {
        auto t = theta.inverse_on_grid(L);
        std::vector<cplx> v(L);
        for (std::size_t i = 0; i < L; ++i) v[i] = curve_at(t[i]);
        auto c = fourier_coeffs(v);
        double top = 0.0, tail = 0.0;
        for (std::size_t k = 0; k < L; ++k) top = std::max(top, std::abs(c[k]));
        for (std::size_t k = L / 4; k < L; ++k) tail = std::max(tail, std::abs(c[k]));
        best.assign(c.begin(), c.begin() + L / 2);
        if (tail < 1e-15 * top) break;
    }
    while (best.size() > 1 && std::abs(best.back()) < 1e-18) best.pop_back();
    return PowerSeries(best);
}

inline TorusGrid torus_grid(cplx tau, cplx z0, double rho, int nr = 32, int nphi = 32)
{
    TorusGrid g;
    std::array<cplx, 4> corner{(1.0 + tau) / 2.0, (-1.0 + tau) / 2.0, (-1.0 - tau) / 2.0, (1.0 - tau) / 2.0};
    std::array<double, 4> ang;
    for (int k = 0; k < 4; ++k) ang[k] = std::arg(corner[k]);
    std::sort(ang.begin(), ang.end());
    struct Edge {
        cplx m, d;
    };
    std::array<Edge, 4> edges{Edge{0.5, tau}, Edge{-0.5, tau}, Edge{tau / 2.0, 1.0}, Edge{-tau / 2.0, 1.0}};
    auto cross = [](cplx a, cplx b) { return (std::conj(a) * b).imag(); };
    auto reach = [&](double phi) {
        cplx e = std::polar(1.0, phi);
        double r = std::numeric_limits<double>::infinity();
        for (auto& ed : edges) {
            double den = cross(e, ed.d);
            if (std::abs(den) < 1e-14) continue;
            double t = cross(ed.m, ed.d) / den;
            if (t > 0) r = std::min(r, t);
        }
        return r;
    };
    auto gr = gauss_legendre(nr, 0.0, 1.0);
    for (int p = 0; p < 4; ++p) {
        double a = ang[p], b = p == 3 ? ang[0] + 2 * pi : ang[p + 1];
        auto gp = gauss_legendre(nphi, a, b);
        for (int i = 0; i < nphi; ++i) {
            double phi = gp.x[i];
            double lo = std::log(rho), hi = std::log(reach(phi));
            for (int j = 0; j < nr; ++j) {
                double t = lo + (hi - lo) * gr.x[j];
                double r = std::exp(t);
                g.z.push_back(z0 + std::polar(r, phi));
                g.w.push_back(gp.w[i] * gr.w[j] * (hi - lo) * r * r);
            }
        }
    }
    const std::size_t mc = 256;
    for (std::size_t k = 0; k < mc; ++k) {
        double t = double(k) / double(mc) - 0.5;
        g.cycles[0].push_back(z0 + tau / 2.0 + t);
        g.cycles[1].push_back(z0 + 0.5 + t * tau);
    }
    return g;
}

} // namespace detail

// Build both complementary charts of the separating curve (genus 0) or the
// affine disk chart (torus). The missing chart comes from the Szego kernel
// boundary correspondence; its power series is a secondary product whose
// resolution is recorded rather than enforced.
inline SurfaceModel build_model(const CurveSpec& spec, std::size_t N = 32, double tol = 1e-10, std::size_t boundary_samples = 4096)
{
    if (N < 8) throw Error(Errc::ConfigInvalid, "truncation N must be at least 8");
    SurfaceModel m;
    m.spec = spec;
    m.N = N;
    m.tol = tol;
    std::size_t M = boundary_samples;
    // A round disk is resolved to machine precision long before 4096 nodes.
    if (spec.kind == CurveKind::TorusDisk) M = std::min<std::size_t>(M, 1024);
    m.gamma.s.resize(M);
    m.gamma.w.resize(M);
    m.gamma.dw.resize(M);
    for (std::size_t k = 0; k < M; ++k) m.gamma.s[k] = unit_root_angle(k, M);

    if (spec.kind == CurveKind::TorusDisk) {
        m.genus = 1;
        if (!(spec.rho > 0.0 && spec.rho < 0.5 * std::min(1.0, spec.tau.imag())))
            throw Error(Errc::ConfigInvalid, "torus disk radius must satisfy rho < min(1, Im tau)/2");
        m.theta.emplace(spec.tau);
        for (std::size_t k = 0; k < M; ++k) {
            cplx u = std::polar(1.0, m.gamma.s[k]);
            m.gamma.w[k] = spec.center + spec.rho * u;
            m.gamma.dw[k] = I * spec.rho * u;
        }
        m.side[0].has_chart = true;
        m.side[0].bounded = true;
        m.side[0].chart = Chart(PowerSeries({spec.center, spec.rho}), false);
        detail::analytic_angles(m.side[0], m.gamma);
        m.side[1].has_chart = false;
        m.side[1].bounded = false;
        m.q = spec.center + 0.4 + 0.4 * spec.tau;
        m.grid = detail::torus_grid(spec.tau, spec.center, spec.rho);
        // Reproducing dz over the whole torus fixes kappa = 1 / (2i Area).
        double area = pi * spec.rho * spec.rho + pairwise_sum(m.grid.w);
        m.kappa = 1.0 / (2.0 * I * area);
        return m;
    }

    SideData in, out;
    in.bounded = true;
    out.bounded = false;
    in.has_chart = out.has_chart = true;

    if (spec.kind == CurveKind::Circle) {
        in.chart = Chart(PowerSeries({0.0, 1.0}), false);
        out.chart = Chart(PowerSeries({1.0}), true);
        for (std::size_t k = 0; k < M; ++k) {
            cplx u = std::polar(1.0, m.gamma.s[k]);
            m.gamma.w[k] = u;
            m.gamma.dw[k] = I * u;
        }
        detail::analytic_angles(in, m.gamma);
        detail::analytic_angles(out, m.gamma);
        m.correspondence = CircleMap(std::vector<cplx>(1, 0.0), 0.0);
    } else if (spec.kind == CurveKind::ExteriorMap) {
        const auto& b = spec.coeffs;
        std::vector<cplx> P(b.size() + 1, 0.0);
        P[0] = 1.0;
        for (std::size_t k = 0; k < b.size(); ++k) P[k + 1] = b[k];
        out.chart = Chart(PowerSeries(P), true);
        auto curve = [&](double s) {
            cplx u = std::polar(1.0, s);
            auto l = out.chart.lift(1.0 / u);
            // w = P(eta)/eta, dw/ds = (dw/deta)(deta/ds) with eta = e^{-is}.
            cplx eta = 1.0 / u;
            return std::pair<cplx, cplx>{l.num / l.den, l.D / (eta * eta) * (-I * eta)};
        };
        auto poly = detail::sample_closed([&](double s) { return curve(s).first; }, 1024);
        if (!polygon_is_simple(poly)) throw Error(Errc::NonUnivalent, "exterior map boundary is not simple");
        if (detail::exterior_grunsky_screen(b) >= 1.0) throw Error(Errc::NonUnivalent, "Grunsky norm is not below 1");
        for (std::size_t k = 0; k < M; ++k) std::tie(m.gamma.w[k], m.gamma.dw[k]) = curve(m.gamma.s[k]);
        detail::analytic_angles(out, m.gamma);
        cplx a = b.empty() ? cplx(0.0) : b[0];
        if (std::abs(winding_number(poly, a) - 1.0) > 1e-6) {
            a = 0.0;
            for (auto v : poly) a += v / double(poly.size());
        }
        auto rm = kerzman_stein_map(curve, a);
        m.szego_nodes = rm.nodes;
        m.correspondence = rm.theta;
        m.computed_is_bounded = true;
        in.analytic = false;
        std::vector<double> th, dth;
        rm.theta.sample(M, th, dth);
        in.phi = th;
        in.dphi = dth;
        in.chart = Chart(detail::computed_series(rm.theta, [&](double t) { return curve(t).first; }), false);
    } else {
        std::vector<cplx> A(spec.coeffs.size() + 2, 0.0);
        A[1] = 1.0;
        for (std::size_t k = 0; k < spec.coeffs.size(); ++k) A[k + 2] = spec.coeffs[k];
        in.chart = Chart(PowerSeries(A), false);
        auto fcurve = [&](double s) {
            cplx u = std::polar(1.0, s);
            auto [f, df] = in.chart.series().eval_d(u);
            return std::pair<cplx, cplx>{f, I * u * df};
        };
        auto poly = detail::sample_closed([&](double s) { return fcurve(s).first; }, 1024);
        if (!polygon_is_simple(poly)) throw Error(Errc::NonUnivalent, "interior map boundary is not simple");
        auto grid = disk_rule(16, 64, 1.0);
        for (auto z : grid.z)
            if (std::abs(in.chart.derivative(z)) < 1e-8) throw Error(Errc::NonUnivalent, "interior map derivative vanishes");
        for (std::size_t k = 0; k < M; ++k) std::tie(m.gamma.w[k], m.gamma.dw[k]) = fcurve(m.gamma.s[k]);
        detail::analytic_angles(in, m.gamma);
        // Exterior of the curve is the interior of its inversion about f(0),
        // traversed with reversed parameter t = -s.
        cplx c0 = in.chart.series()[0];
        auto inv = [&](double t) {
            auto [f, df] = fcurve(-t);
            cplx d = f - c0;
            return std::pair<cplx, cplx>{1.0 / d, df / (d * d)};
        };
        auto rm = kerzman_stein_map(inv, 0.0);
        m.szego_nodes = rm.nodes;
        // psi(s) = -theta(-s): increasing angle of the exterior map u = 1/eta.
        auto pc = rm.theta.coeffs();
        std::vector<cplx> qc(pc.size());
        for (std::size_t k = 0; k < pc.size(); ++k) qc[k] = -pc[(pc.size() - k) % pc.size()];
        m.correspondence = CircleMap(qc, -rm.theta.offset());
        m.computed_is_bounded = false;
        out.analytic = false;
        std::vector<double> th, dth;
        m.correspondence.sample(M, th, dth);
        out.phi.resize(M);
        out.dphi.resize(M);
        for (std::size_t k = 0; k < M; ++k) {
            out.phi[k] = -th[k];
            out.dphi[k] = -dth[k];
        }
        // eta = e^{i phi} with phi = -psi(s): sample P(eta) = eta w on that grid.
        std::vector<cplx> best;
        for (std::size_t L = 1024; L <= (1u << 16); L *= 2) {
            auto t = m.correspondence.inverse_on_grid(L); // s with psi(s) = 2 pi i / L
            std::vector<cplx> v(L);
            for (std::size_t i = 0; i < L; ++i) {
                // psi = 2 pi i/L  <=>  phi = -2 pi i/L = 2 pi (L-i)/L
                double phi = -unit_root_angle(i, L);
                v[(L - i) % L] = std::polar(1.0, phi) * fcurve(t[i]).first;
            }
            auto c = fourier_coeffs(v);
            double top = 0.0, tail = 0.0;
            for (std::size_t k = 0; k < L; ++k) top = std::max(top, std::abs(c[k]));
            for (std::size_t k = L / 4; k < L; ++k) tail = std::max(tail, std::abs(c[k]));
            best.assign(c.begin(), c.begin() + L / 2);
            if (tail < 1e-15 * top) break;
        }
        while (best.size() > 1 && std::abs(best.back()) < 1e-18) best.pop_back();
        out.chart = Chart(PowerSeries(best), true);
    }

    for (SideData* sd : {&in, &out}) {
        if (sd->analytic) continue;
        double mis = 0.0;
        for (std::size_t k = 0; k < M; k += 4) {
            cplx z = std::polar(1.0, sd->phi[k]);
            auto l = sd->chart.lift(z);
            mis = std::max(mis, std::abs(l.num / l.den - m.gamma.w[k]));
        }
        sd->series_mismatch = mis;
        sd->series_ok = mis <= 1e-8 * std::max(1.0, std::abs(m.gamma.w[0]));
    }

    bool first_interior = spec.first == FirstSide::Interior ||
                          (spec.first == FirstSide::Default && spec.kind != CurveKind::ExteriorMap);
    m.side[0] = first_interior ? in : out;
    m.side[1] = first_interior ? out : in;
    if (first_interior) m.q = infinity;
    else m.q = m.side[1].chart(0.0);
    m.p = {cplx(0.0), cplx(0.0)};
    return m;
}

// Plane (or infinite) point of chart coordinate z on side k.
inline cplx chart_point(const SurfaceModel& m, int k, cplx z) { return m.side[k].chart(z); }

inline void require_chart(const SurfaceModel& m, int k)
{
    if (!m.side[k].has_chart) throw Error(Errc::NotSimplyConnected, "component has no uniformizing chart");
}

inline void require_series(const SurfaceModel& m, int k)
{
    require_chart(m, k);
    if (!m.side[k].series_ok)
        throw Error(Errc::IterationDiverged, "computed map series does not reproduce the curve");
}

// Green's function of the closed surface, g(w; z, q) with a logarithmic
// pole +log|w - z| at z and -log|w - q| at q; additive constant set so the
// sphere formula is exact and the torus one is lattice periodic.
inline double green_R(const SurfaceModel& m, cplx w, cplx z, cplx q)
{
    if (w == z || w == q) throw Error(Errc::CoincidentPoints, "green_R at a pole");
    if (m.sphere()) {
        double g = is_infinite(z) ? 0.0 : std::log(std::abs(w - z));
        if (!is_infinite(q)) g -= std::log(std::abs(w - q));
        return g + m.green_shift;
    }
    const Theta& th = *m.theta;
    return -(th.G(w - z) - th.G(w - q)) + m.green_shift;
}

// Two-point normalized form g(w, w0; z, q) = g(w; z, q) - g(w0; z, q).
inline double green_R(const SurfaceModel& m, cplx w, cplx w0, cplx z, cplx q)
{
    if (m.sphere() && is_infinite(w)) return -green_R(m, w0, z, q) + m.green_shift;
    return green_R(m, w, z, q) - green_R(m, w0, z, q);
}

// Coefficient of dw in the w-differential of green_R.
inline cplx dw_green_R(const SurfaceModel& m, cplx w, cplx z, cplx q)
{
    if (w == z || w == q) throw Error(Errc::CoincidentPoints, "green_R at a pole");
    if (m.sphere()) {
        cplx d = is_infinite(z) ? 0.0 : 0.5 / (w - z);
        if (!is_infinite(q)) d -= 0.5 / (w - q);
        return d;
    }
    const Theta& th = *m.theta;
    return -(th.dG(w - z) - th.dG(w - q));
}

// Component Green's function -log|(x - y)/(1 - x conj y)| in chart
// coordinates x = F^-1(w), y = F^-1(z), with its w-derivative.
struct GreenValue {
    double g;
    cplx dw;
};

inline GreenValue green_component(const SurfaceModel& m, int k, cplx w, cplx z)
{
    require_chart(m, k);
    if (m.side[k].has_chart && !m.side[k].analytic) require_series(m, k);
    if (w == z) throw Error(Errc::CoincidentPoints, "component Green's function at its pole");
    const Chart& c = m.side[k].chart;
    cplx x = c.inverse(w), y = c.inverse(z);
    if (std::abs(x) > 1.0 + 1e-9 || std::abs(y) > 1.0 + 1e-9)
        throw Error(Errc::InverseMapDiverged, "point is outside the component");
    cplx num = x - y, den = 1.0 - x * std::conj(y);
    double g = -std::log(std::abs(num / den));
    // d/dx of -log|..| = -1/2 [1/(x-y) + conj(y)/(1 - x conj y)]
    cplx dx = -0.5 * (1.0 / num + std::conj(y) / den);
    cplx dw = is_infinite(w) ? cplx(0.0) : dx / c.derivative(x);
    return {g, dw};
}

struct SampledCurve {
    std::vector<cplx> points;
    std::vector<double> params;
    std::vector<cplx> chart; // chart coordinates of the samples
    double eps = 0.0;
    int component = 0;
};

// Level curve g_p = eps of the component Green's function with pole at the
// chart point p, oriented like the curve seen from Sigma_1.
inline SampledCurve level_curve(const SurfaceModel& m, int k, cplx p, double eps, std::size_t n)
{
    require_chart(m, k);
    if (!m.side[k].analytic) require_series(m, k);
    double r = std::exp(-eps);
    if (!(eps > 0.0)) throw Error(Errc::EpsilonTooLarge, "level must be positive");
    // Collar: the level circle must stay in the outer half of the chart disk.
    if (std::abs(p) + r <= 0.5 || std::abs(p) >= 1.0 || r < 0.5)
        throw Error(Errc::EpsilonTooLarge, "level curve leaves the collar");
    SampledCurve c;
    c.eps = eps;
    c.component = k;
    int dir = k == 0 ? 1 : -1;
    for (std::size_t j = 0; j < n; ++j) {
        double t = dir * unit_root_angle(j, n);
        cplx e = std::polar(r, t);
        cplx z = (p + e) / (1.0 + std::conj(p) * e);
        c.params.push_back(unit_root_angle(j, n));
        c.chart.push_back(z);
        c.points.push_back(m.side[k].chart(z));
    }
    return c;
}

// Welding homeomorphism: sigma(t) = arg f^-1(g(e^{it})) on m samples, unwrapped.
inline std::vector<double> welding(const SurfaceModel& m, std::size_t n)
{
    if (!m.sphere()) throw Error(Errc::WeldingUnavailable, "welding needs a genus 0 model");
    std::vector<double> sig(n);
    if (m.spec.kind == CurveKind::Circle) {
        for (std::size_t j = 0; j < n; ++j) sig[j] = unit_root_angle(j, n);
    } else if (m.computed_is_bounded) {
        // g(e^{is}) = f(e^{i theta(s)}): sigma = theta.
        std::vector<double> th, dth;
        m.correspondence.sample(std::max(n, m.correspondence.size()), th, dth);
        std::size_t step = th.size() / n;
        if (step * n != th.size()) {
            for (std::size_t j = 0; j < n; ++j) sig[j] = m.correspondence.eval(unit_root_angle(j, n)).first;
        } else {
            for (std::size_t j = 0; j < n; ++j) sig[j] = th[j * step];
        }
    } else {
        // f(e^{is}) = g(e^{i psi(s)}): sigma = psi^-1.
        sig = m.correspondence.inverse_on_grid(n);
    }
    for (std::size_t j = 1; j < n; ++j) sig[j] -= 2 * pi * std::round((sig[j] - sig[j - 1]) / (2 * pi));
    for (std::size_t j = 1; j < n; ++j)
        if (!(sig[j] > sig[j - 1])) throw Error(Errc::NonMonotone, "welding is not increasing");
    if (std::abs(sig[n - 1] - sig[0] + (sig[1] - sig[0]) - 2 * pi) > 0.5) throw Error(Errc::NonMonotone, "welding degree is not 1");
    return sig;
}

} // namespace schiffer
