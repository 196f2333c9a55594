#ifndef CHFILM_GEOMETRY_HPP
#define CHFILM_GEOMETRY_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace chfilm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

enum class ChartKind { flat_sheet, torus, unit_sphere_patch };

// Chart evaluation at a parameter point s' in the unit square.
struct ChartPoint {
    Vec3 position;
    Vec3 t1, t2;        // partial derivatives of the embedding along s1, s2
    Vec3 normal;        // unit outward normal
    Mat2 metric;        // first fundamental form theta_ij = t_i . t_j
    double sqrt_det_metric;
};

// Shape operator W = -grad_Gamma(nu) and its derived curvatures. With the
// outward normal, convex surfaces carry negative principal curvatures.
struct ShapeData {
    Mat3 W;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double H = 0.0;  // tr W = kappa1 + kappa2
    double K = 0.0;  // kappa1 * kappa2
};

// Closed-form doubly periodic surface descriptions. The torus and the flat
// sheet are solver-eligible (single global chart, wrap in both directions);
// the sphere patch exists for pointwise unit tests only.
class SurfaceChart {
public:
    static SurfaceChart torus(double R, double a);
    static SurfaceChart flat_sheet();
    static SurfaceChart unit_sphere_patch();

    ChartKind kind() const { return kind_; }
    double R() const { return R_; }
    double a() const { return a_; }
    double tubular_radius() const { return delta_; }
    bool solver_eligible() const { return kind_ != ChartKind::unit_sphere_patch; }

    ChartPoint eval(double s1, double s2) const;
    ShapeData shape(double s1, double s2) const;

    // J(y, r) = 1 - r H + r^2 K; requires |r| <= tubular radius.
    double jacobian(double s1, double s2, double r) const;

    // Tangential gradients of the curvatures H and K (ambient 3-vectors).
    void curvature_gradients(double s1, double s2, Vec3& grad_H, Vec3& grad_K) const;

private:
    SurfaceChart(ChartKind kind, double R, double a, double delta)
        : kind_(kind), R_(R), a_(a), delta_(delta) {}

    ChartKind kind_;
    double R_, a_;
    double delta_;
};

// Thickness profiles g0, g1 on the surface; g = g1 - g0 must be positive.
struct ThicknessSample {
    double g0 = 0.0, g1 = 0.0, g = 0.0;
    double d1_g0 = 0.0, d2_g0 = 0.0;  // chart partials of g0
    double d1_g1 = 0.0, d2_g1 = 0.0;  // chart partials of g1
    Vec3 grad_g0 = Vec3::Zero();      // tangential gradients
    Vec3 grad_g1 = Vec3::Zero();
};

class ThicknessProfile {
public:
    enum class Preset { constant, sinusoidal };

    // g0 = c0, g1 = c1 (signed c0 allowed; requires c1 > c0).
    static ThicknessProfile constant(double c0, double c1);
    // g0 = 0, g1 = 1 + amplitude * cos(2 pi frequency s1); |amplitude| < 1.
    static ThicknessProfile sinusoidal(double amplitude, double frequency);

    Preset preset() const { return preset_; }

    ThicknessSample eval(const SurfaceChart& chart, double s1, double s2) const;

    // Bounds over the surface, used for tubular-radius admissibility of eps.
    double max_abs_g() const;
    double min_g() const;

    bool depends_on_s1() const { return preset_ == Preset::sinusoidal && amp_ != 0.0; }

private:
    ThicknessProfile(Preset p, double a, double b) : preset_(p), amp_(a), freq_(b) {}
    void values(double s1, double& g0, double& g1, double& d1_g0, double& d1_g1) const;

    Preset preset_;
    double amp_, freq_;  // constant: (c0, c1); sinusoidal: (amplitude, frequency)
};

// Largest admissible thickness parameter for a chart/profile pair:
// eps * max(|g0|, |g1|) must stay within the tubular radius.
double max_epsilon(const SurfaceChart& chart, const ThicknessProfile& profile);

}  // namespace chfilm

#endif
