#include "chfilm/geometry.hpp"

#include <cmath>
#include <limits>

namespace chfilm {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
// The flat sheet has no curvature constraint on the offset; represent the
// tubular radius by a large sentinel.
constexpr double kFlatDelta = 1e30;
}  // namespace

SurfaceChart SurfaceChart::torus(double R, double a) {
    if (!(R > a && a > 0.0))
        throw GeometryError("torus requires R > a > 0");
    return SurfaceChart(ChartKind::torus, R, a, a / 2.0);
}

SurfaceChart SurfaceChart::flat_sheet() {
    return SurfaceChart(ChartKind::flat_sheet, 0.0, 0.0, kFlatDelta);
}

SurfaceChart SurfaceChart::unit_sphere_patch() {
    return SurfaceChart(ChartKind::unit_sphere_patch, 0.0, 0.0, 0.5);
}

ChartPoint SurfaceChart::eval(double s1, double s2) const {
    ChartPoint p;
    switch (kind_) {
        case ChartKind::flat_sheet: {
            p.position = Vec3(s1, s2, 0.0);
            p.t1 = Vec3(1, 0, 0);
            p.t2 = Vec3(0, 1, 0);
            p.normal = Vec3(0, 0, 1);
            break;
        }
        case ChartKind::torus: {
            const double u = kTwoPi * s1, v = kTwoPi * s2;
            const double cu = std::cos(u), su = std::sin(u);
            const double cv = std::cos(v), sv = std::sin(v);
            const double ring = R_ + a_ * cv;
            p.position = Vec3(ring * cu, ring * su, a_ * sv);
            p.t1 = kTwoPi * Vec3(-ring * su, ring * cu, 0.0);
            p.t2 = kTwoPi * Vec3(-a_ * sv * cu, -a_ * sv * su, a_ * cv);
            p.normal = Vec3(cv * cu, cv * su, sv);
            break;
        }
        case ChartKind::unit_sphere_patch: {
            // Colatitude pi*s2, longitude 2*pi*s1; poles are excluded.
            if (s2 <= 0.0 || s2 >= 1.0)
                throw GeometryError("sphere patch evaluated at a pole");
            const double lam = kTwoPi * s1, phi = M_PI * s2;
            const double cl = std::cos(lam), sl = std::sin(lam);
            const double cp = std::cos(phi), sp = std::sin(phi);
            p.position = Vec3(sp * cl, sp * sl, cp);
            p.t1 = kTwoPi * Vec3(-sp * sl, sp * cl, 0.0);
            p.t2 = M_PI * Vec3(cp * cl, cp * sl, -sp);
            p.normal = p.position;
            break;
        }
    }
    p.metric(0, 0) = p.t1.dot(p.t1);
    p.metric(0, 1) = p.metric(1, 0) = p.t1.dot(p.t2);
    p.metric(1, 1) = p.t2.dot(p.t2);
    p.sqrt_det_metric = std::sqrt(p.metric.determinant());
    return p;
}

ShapeData SurfaceChart::shape(double s1, double s2) const {
    ShapeData d;
    switch (kind_) {
        case ChartKind::flat_sheet: {
            d.W.setZero();
            break;
        }
        case ChartKind::torus: {
            const ChartPoint p = eval(s1, s2);
            const double cv = std::cos(kTwoPi * s2);
            d.kappa1 = -cv / (R_ + a_ * cv);  // ring direction
            d.kappa2 = -1.0 / a_;             // tube direction
            const Vec3 e1 = p.t1.normalized();
            const Vec3 e2 = p.t2.normalized();
            d.W = d.kappa1 * e1 * e1.transpose() + d.kappa2 * e2 * e2.transpose();
            break;
        }
        case ChartKind::unit_sphere_patch: {
            const ChartPoint p = eval(s1, s2);
            // nu(y) = y, so grad_Gamma(nu) = P and W = -P.
            d.kappa1 = d.kappa2 = -1.0;
            d.W = -(Mat3::Identity() - p.normal * p.normal.transpose());
            break;
        }
    }
    d.H = d.kappa1 + d.kappa2;
    d.K = d.kappa1 * d.kappa2;
    return d;
}

double SurfaceChart::jacobian(double s1, double s2, double r) const {
    if (std::abs(r) > delta_)
        throw GeometryError("offset exceeds tubular radius");
    const ShapeData d = shape(s1, s2);
    return 1.0 - r * d.H + r * r * d.K;
}

void SurfaceChart::curvature_gradients(double s1, double s2, Vec3& grad_H,
                                       Vec3& grad_K) const {
    grad_H.setZero();
    grad_K.setZero();
    if (kind_ != ChartKind::torus) return;  // H, K constant otherwise
    const ChartPoint p = eval(s1, s2);
    const double v = kTwoPi * s2;
    const double sv = std::sin(v);
    const double den = R_ + a_ * std::cos(v);
    // H and K depend on s2 only; lift the chart derivative through theta^{22}.
    const double dH_ds2 = kTwoPi * R_ * sv / (den * den);
    const double dK_ds2 = -kTwoPi * R_ * sv / (a_ * den * den);
    const double inv_theta22 = 1.0 / p.metric(1, 1);
    grad_H = inv_theta22 * dH_ds2 * p.t2;
    grad_K = inv_theta22 * dK_ds2 * p.t2;
}

ThicknessProfile ThicknessProfile::constant(double c0, double c1) {
    if (!(c1 > c0))
        throw GeometryError("constant thickness preset requires c1 > c0");
    return ThicknessProfile(Preset::constant, c0, c1);
}

ThicknessProfile ThicknessProfile::sinusoidal(double amplitude, double frequency) {
    if (!(std::abs(amplitude) < 1.0))
        throw GeometryError("sinusoidal thickness preset requires |amplitude| < 1");
    return ThicknessProfile(Preset::sinusoidal, amplitude, frequency);
}

void ThicknessProfile::values(double s1, double& g0, double& g1, double& d1_g0,
                              double& d1_g1) const {
    if (preset_ == Preset::constant) {
        g0 = amp_;
        g1 = freq_;
        d1_g0 = d1_g1 = 0.0;
    } else {
        g0 = 0.0;
        d1_g0 = 0.0;
        g1 = 1.0 + amp_ * std::cos(kTwoPi * freq_ * s1);
        d1_g1 = -kTwoPi * freq_ * amp_ * std::sin(kTwoPi * freq_ * s1);
    }
}

ThicknessSample ThicknessProfile::eval(const SurfaceChart& chart, double s1,
                                       double s2) const {
    ThicknessSample t;
    values(s1, t.g0, t.g1, t.d1_g0, t.d1_g1);
    t.d2_g0 = t.d2_g1 = 0.0;
    t.g = t.g1 - t.g0;
    if (!(t.g > 0.0)) throw GeometryError("thickness g = g1 - g0 is not positive");
    const ChartPoint p = chart.eval(s1, s2);
    const Mat2 inv_theta = p.metric.inverse();
    auto lift = [&](double d1, double d2) -> Vec3 {
        const double c1 = inv_theta(0, 0) * d1 + inv_theta(0, 1) * d2;
        const double c2 = inv_theta(1, 0) * d1 + inv_theta(1, 1) * d2;
        return c1 * p.t1 + c2 * p.t2;
    };
    t.grad_g0 = lift(t.d1_g0, t.d2_g0);
    t.grad_g1 = lift(t.d1_g1, t.d2_g1);
    return t;
}

double ThicknessProfile::max_abs_g() const {
    if (preset_ == Preset::constant) return std::max(std::abs(amp_), std::abs(freq_));
    return 1.0 + std::abs(amp_);
}

double ThicknessProfile::min_g() const {
    if (preset_ == Preset::constant) return freq_ - amp_;
    return 1.0 - std::abs(amp_);
}

double max_epsilon(const SurfaceChart& chart, const ThicknessProfile& profile) {
    return chart.tubular_radius() / profile.max_abs_g();
}

}  // namespace chfilm
