#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ppife/assembly.hpp"
#include "ppife/geometry.hpp"
#include "ppife/ife_basis.hpp"
#include "ppife/parallel.hpp"
#include "ppife/quadrature.hpp"

namespace ppife {

/// Per-mesh error norms and their pairwise log2 rates against the previous
/// (coarser) record.
struct ErrorRecord {
    double h = 0.0;
    double dt = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
    double h1_semi = 0.0;
    double energy = 0.0;
    std::optional<double> linf_rate;
    std::optional<double> l2_rate;
    std::optional<double> h1_rate;
    std::optional<double> energy_rate;
};

namespace detail {

/// Element-parallel accumulation with a deterministic sequential reduction.
template <typename Fn>
double sum_over_elements(int n_elements, Fn&& per_element) {
    std::vector<double> partial(n_elements, 0.0);
    parallel_for(n_elements, [&](int ie) { partial[ie] = per_element(ie); });
    double s = 0.0;
    for (int ie = 0; ie < n_elements; ++ie) s += partial[ie];
    return s;
}

}  // namespace detail

/// L2 error with strength-7 quadrature. The exact field is evaluated on the
/// true curve side of each point; the discrete field on its chord side.
inline double l2_error(const GlobalSpace& space, const std::vector<double>& coeffs,
                       const std::function<double(Point2)>& exact, int strength = 7) {
    const CartesianMesh& mesh = space.mesh();
    double s = detail::sum_over_elements(mesh.n_elements(), [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        auto gv = mesh.element_vertices(ie);
        double acc = 0.0;
        TaggedQuadrature quad = element_quadrature(mesh, space.classification(), ie, strength);
        for (const auto& q : quad.points) {
            double uh = 0.0;
            for (int i = 0; i < 4; ++i)
                uh += coeffs[gv[i]] * basis.branch(i, q.side).eval(q.p.x, q.p.y);
            const double d = uh - exact(q.p);
            acc += q.w * d * d;
        }
        return acc;
    });
    return std::sqrt(s);
}

/// Broken H1 seminorm of the error (no beta weighting).
inline double h1_semi_error(const GlobalSpace& space, const std::vector<double>& coeffs,
                            const std::function<Point2(Point2)>& exact_grad, int strength = 7) {
    const CartesianMesh& mesh = space.mesh();
    double s = detail::sum_over_elements(mesh.n_elements(), [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        auto gv = mesh.element_vertices(ie);
        double acc = 0.0;
        TaggedQuadrature quad = element_quadrature(mesh, space.classification(), ie, strength);
        for (const auto& q : quad.points) {
            Point2 gh{0.0, 0.0};
            for (int i = 0; i < 4; ++i) {
                const Point2 g = basis.branch(i, q.side).grad(q.p.x, q.p.y);
                gh.x += coeffs[gv[i]] * g.x;
                gh.y += coeffs[gv[i]] * g.y;
            }
            const Point2 d = gh - exact_grad(q.p);
            acc += q.w * dot(d, d);
        }
        return acc;
    });
    return std::sqrt(s);
}

/// Energy norm of the error: beta-weighted broken gradient plus the
/// interface-edge jump penalties. The exact solution is continuous, so the
/// jumps reduce to jumps of the discrete field.
inline double energy_error(const GlobalSpace& space, const std::vector<double>& coeffs,
                           const std::function<Point2(Point2)>& exact_grad,
                           const PenaltyConfig& cfg, const InterfaceCurve& curve) {
    const CartesianMesh& mesh = space.mesh();
    const MeshClassification& cls = space.classification();
    double s = detail::sum_over_elements(mesh.n_elements(), [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        auto gv = mesh.element_vertices(ie);
        double acc = 0.0;
        TaggedQuadrature quad = element_quadrature(mesh, cls, ie, 7);
        for (const auto& q : quad.points) {
            Point2 gh{0.0, 0.0};
            for (int i = 0; i < 4; ++i) {
                const Point2 g = basis.branch(i, q.side).grad(q.p.x, q.p.y);
                gh.x += coeffs[gv[i]] * g.x;
                gh.y += coeffs[gv[i]] * g.y;
            }
            const Point2 d = gh - exact_grad(q.p);
            acc += q.w * space.beta(q.side) * dot(d, d);
        }
        return acc;
    });
    for (int ib : cls.interior_interface_edges) {
        const Edge& e = mesh.edge(ib);
        const double pen = cfg.sigma0 / std::pow(e.length, cfg.alpha);
        Segment2 seg{mesh.vertex(e.v0), mesh.vertex(e.v1)};
        TaggedQuadrature quad = edge_quadrature(curve, seg, cls.edge_split[ib], 5);
        const IFEElementBasis& b1 = space.element_basis(e.k1);
        const IFEElementBasis& b2 = space.element_basis(e.k2);
        auto gv1 = mesh.element_vertices(e.k1);
        auto gv2 = mesh.element_vertices(e.k2);
        for (const auto& q : quad.points) {
            double jump = 0.0;
            for (int k = 0; k < 4; ++k) jump += coeffs[gv1[k]] * b1.eval(k, q.p);
            for (int k = 0; k < 4; ++k) jump -= coeffs[gv2[k]] * b2.eval(k, q.p);
            s += q.w * pen * jump * jump;
        }
    }
    return std::sqrt(s);
}

/// Max error over a fixed closed 5x5 sample grid per element (the grid
/// contains the element corners).
inline double linf_error(const GlobalSpace& space, const std::vector<double>& coeffs,
                         const std::function<double(Point2)>& exact) {
    const CartesianMesh& mesh = space.mesh();
    std::vector<double> partial(mesh.n_elements(), 0.0);
    parallel_for(mesh.n_elements(), [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        const AxisRect rect = mesh.element_rect(ie);
        auto gv = mesh.element_vertices(ie);
        double m = 0.0;
        for (int sx = 0; sx < 5; ++sx)
            for (int sy = 0; sy < 5; ++sy) {
                const Point2 p{rect.origin.x + rect.width * sx / 4.0,
                               rect.origin.y + rect.height * sy / 4.0};
                double uh = 0.0;
                for (int i = 0; i < 4; ++i) uh += coeffs[gv[i]] * basis.eval(i, p);
                m = std::max(m, std::abs(uh - exact(p)));
            }
        partial[ie] = m;
    });
    double m = 0.0;
    for (double v : partial) m = std::max(m, v);
    return m;
}

/// Max nodal error; by the Lagrange property the discrete value at a vertex
/// is its coefficient. This is the superconvergent vertex statistic, kept
/// separate from the sampled sup-norm above.
inline double max_vertex_error(const GlobalSpace& space, const std::vector<double>& coeffs,
                               const std::function<double(Point2)>& exact) {
    double m = 0.0;
    for (int iv = 0; iv < space.dof_count(); ++iv)
        m = std::max(m, std::abs(coeffs[iv] - exact(space.mesh().vertex(iv))));
    return m;
}

/// Fills pairwise rates log2(e_coarse / e_fine); records must be ordered by
/// decreasing h.
inline void rates(std::vector<ErrorRecord>& records) {
    for (std::size_t k = 1; k < records.size(); ++k) {
        auto rate = [](double coarse, double fine) { return std::log2(coarse / fine); };
        records[k].linf_rate = rate(records[k - 1].linf, records[k].linf);
        records[k].l2_rate = rate(records[k - 1].l2, records[k].l2);
        records[k].h1_rate = rate(records[k - 1].h1_semi, records[k].h1_semi);
        records[k].energy_rate = rate(records[k - 1].energy, records[k].energy);
    }
}

}  // namespace ppife
