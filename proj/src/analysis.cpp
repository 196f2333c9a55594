#include "chfilm/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace chfilm {

double surface_norm(const SurfaceField& v, SurfaceNormKind kind,
                    const SurfaceOperators& ops) {
    switch (kind) {
        case SurfaceNormKind::L2: {
            KahanSum s;
            for (std::size_t q = 0; q < v.values.size(); ++q)
                s.add(ops.plain_mass()[q] * v.values[q] * v.values[q]);
            return std::sqrt(s.value());
        }
        case SurfaceNormKind::H1: {
            const double l2 = surface_norm(v, SurfaceNormKind::L2, ops);
            const double grad = ops.grad_norm(v, /*weighted=*/false);
            return std::sqrt(l2 * l2 + grad * grad);
        }
        case SurfaceNormKind::Lg_semi: {
            const double mean = ops.weighted_mean(v.values);
            if (std::abs(mean) > 1e-9)
                throw std::invalid_argument(
                    "Lg seminorm requires weighted-mean-zero input");
            const SurfaceField phi = ops.solve_Lg(v, 1e-11);
            return ops.grad_norm(phi, /*weighted=*/true);
        }
    }
    return 0.0;
}

double surface_norm_diff(const SurfaceField& a, const SurfaceField& b,
                         SurfaceNormKind kind, const SurfaceOperators& ops) {
    SurfaceField d(a.n1, a.n2);
    for (std::size_t q = 0; q < d.values.size(); ++q)
        d.values[q] = a.values[q] - b.values[q];
    return surface_norm(d, kind, ops);
}

BulkDifference bulk_difference(const BulkField& u, const SurfaceField& v,
                               const AveragingContext& ctx) {
    const BulkOperators& bulk = ctx.bulk();
    const SurfaceGeometryCache& surf = ctx.surface();
    const ReferenceGrid& g = bulk.grid();
    if (v.n1 != g.n1 || v.n2 != g.n2)
        throw std::invalid_argument("mismatched grids in bulk_difference");

    const auto [d1v, d2v] = ctx.chart_gradient(v);
    KahanSum su, sg;
    for (int k = 0; k <= g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const std::size_t p = g.node(i, j, k);
                const std::size_t q = surf.index(i, j);
                const double m = bulk.mass()[p];

                const double du = u.values[p] - v.at(i, j);
                su.add(m * du * du);

                // Constant-extended tangential gradient of v in chart form.
                const Vec3 grad_v =
                    (surf.inv_theta11[q] * d1v.at(i, j)) * surf.t1[q] +
                    (surf.inv_theta22[q] * d2v.at(i, j)) * surf.t2[q];
                const Vec3 nu = surf.normal[q];
                const Vec3 grad_u = ctx.ambient_gradient(u, i, j, k);
                const Vec3 tang_u = grad_u - nu.dot(grad_u) * nu;
                const Vec3 diff = tang_u - grad_v;
                sg.add(m * diff.squaredNorm());
            }
    BulkDifference out;
    const double scale = 1.0 / std::sqrt(g.eps);
    out.e_u = scale * std::sqrt(su.value());
    out.e_grad = scale * std::sqrt(sg.value());
    return out;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("rate fit needs at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [eps, err] : points) {
        if (!(eps > 0.0) || !(err > 0.0))
            throw std::invalid_argument("rate fit needs positive eps and errors");
        const double x = std::log(eps), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    RateFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0;
    for (const auto& [eps, err] : points) {
        const double r = std::log(err) - fit.slope * std::log(eps) - fit.intercept;
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

void ConvergenceReport::fit_all() {
    auto column = [&](double ConvergenceEntry::* field) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& e : entries) pts.emplace_back(e.epsilon, e.*field);
        return fit_rate(pts);
    };
    rate_L2 = column(&ConvergenceEntry::error_L2);
    rate_H1 = column(&ConvergenceEntry::error_H1);
    rate_Lg = column(&ConvergenceEntry::error_Lg);
    rate_bulk_u = column(&ConvergenceEntry::error_bulk_u);
    rate_bulk_grad = column(&ConvergenceEntry::error_bulk_grad);
    rate_nd = column(&ConvergenceEntry::normal_deriv_scaled);
}

std::string ConvergenceReport::to_csv() const {
    std::string out =
        "epsilon,err_L2,err_H1,err_Lg,err_bulk_u,err_bulk_grad,nd_scaled\n";
    char line[512];
    for (const auto& e : entries) {
        std::snprintf(line, sizeof(line),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.epsilon,
                      e.error_L2, e.error_H1, e.error_Lg, e.error_bulk_u,
                      e.error_bulk_grad, e.normal_deriv_scaled);
        out += line;
    }
    std::snprintf(line, sizeof(line),
                  "fitted_slope,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  rate_L2.slope, rate_H1.slope, rate_Lg.slope, rate_bulk_u.slope,
                  rate_bulk_grad.slope, rate_nd.slope);
    out += line;
    return out;
}

}  // namespace chfilm
