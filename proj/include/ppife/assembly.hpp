#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ppife/geometry.hpp"
#include "ppife/ife_basis.hpp"
#include "ppife/linalg.hpp"
#include "ppife/mesh.hpp"
#include "ppife/parallel.hpp"
#include "ppife/quadrature.hpp"

namespace ppife {

/// Parameters of the penalized bilinear form: epsilon in {-1, 0, +1},
/// penalty strength sigma0 >= 0 and edge-length exponent alpha > 0.
/// Coercivity for epsilon in {-1, 0} needs sigma0 > 0.
struct PenaltyConfig {
    int epsilon = 1;
    double sigma0 = 1.0;
    double alpha = 1.0;

    void validate() const {
        if (epsilon != -1 && epsilon != 0 && epsilon != 1)
            throw std::invalid_argument("PenaltyConfig: epsilon must be -1, 0 or +1");
        if (alpha <= 0.0) throw std::invalid_argument("PenaltyConfig: alpha must be positive");
        if (sigma0 < 0.0) throw std::invalid_argument("PenaltyConfig: sigma0 must be nonnegative");
        if (epsilon != 1 && sigma0 <= 0.0)
            throw std::invalid_argument("PenaltyConfig: sigma0 > 0 required for epsilon in {-1, 0}");
    }
};

struct DirichletData {
    std::vector<int> dofs;
    std::function<double(Point2, double)> value;  // g(x, t)
};

/// Mass matrix, volume strength 4 (exact for products of bilinears).
inline SparseMatrixCSR assemble_mass(const GlobalSpace& space) {
    const CartesianMesh& mesh = space.mesh();
    const int ne = mesh.n_elements();
    std::vector<std::array<std::array<double, 4>, 4>> local(ne);

    parallel_for(ne, [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        TaggedQuadrature quad = element_quadrature(mesh, space.classification(), ie, 4);
        auto& loc = local[ie];
        loc = {};
        for (const auto& q : quad.points) {
            std::array<double, 4> val;
            for (int i = 0; i < 4; ++i) val[i] = basis.branch(i, q.side).eval(q.p.x, q.p.y);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) loc[i][j] += q.w * (val[i] * val[j]);
        }
    });

    TripletBuffer buf(space.dof_count());
    buf.reserve(static_cast<std::size_t>(ne) * 16);
    for (int ie = 0; ie < ne; ++ie) {
        auto gv = mesh.element_vertices(ie);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) buf.add(gv[i], gv[j], local[ie][i][j]);
    }
    return SparseMatrixCSR::compress(buf);
}

/// Stiffness of the penalized bilinear form: beta-weighted volume gradients
/// over all elements, plus consistency/symmetrization/penalty integrals over
/// the interior interface edges only. The entry (i, j) carries a(phi_j, phi_i).
inline SparseMatrixCSR assemble_stiffness(const GlobalSpace& space, const PenaltyConfig& cfg,
                                          const InterfaceCurve& curve) {
    cfg.validate();
    const CartesianMesh& mesh = space.mesh();
    const MeshClassification& cls = space.classification();
    const int ne = mesh.n_elements();

    std::vector<std::array<std::array<double, 4>, 4>> local(ne);
    parallel_for(ne, [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        TaggedQuadrature quad = element_quadrature(mesh, cls, ie, 4);
        auto& loc = local[ie];
        loc = {};
        for (const auto& q : quad.points) {
            const double bw = space.beta(q.side) * q.w;
            std::array<Point2, 4> g;
            for (int i = 0; i < 4; ++i) g[i] = basis.branch(i, q.side).grad(q.p.x, q.p.y);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) loc[i][j] += bw * dot(g[i], g[j]);
        }
    });

    TripletBuffer buf(space.dof_count());
    buf.reserve(static_cast<std::size_t>(ne) * 16 + cls.interior_interface_edges.size() * 36);
    for (int ie = 0; ie < ne; ++ie) {
        auto gv = mesh.element_vertices(ie);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) buf.add(gv[i], gv[j], local[ie][i][j]);
    }

    for (int ib : cls.interior_interface_edges) {
        const Edge& e = mesh.edge(ib);
        const Point2 nB{e.nx, e.ny};
        const double pen = cfg.sigma0 / std::pow(e.length, cfg.alpha);

        // union of the two elements' dofs, first element's first
        auto gv1 = mesh.element_vertices(e.k1);
        auto gv2 = mesh.element_vertices(e.k2);
        std::vector<int> dofs(gv1.begin(), gv1.end());
        std::vector<int> map2(4);
        for (int k = 0; k < 4; ++k) {
            int found = -1;
            for (std::size_t m = 0; m < dofs.size(); ++m)
                if (dofs[m] == gv2[k]) found = static_cast<int>(m);
            if (found < 0) {
                dofs.push_back(gv2[k]);
                found = static_cast<int>(dofs.size()) - 1;
            }
            map2[k] = found;
        }
        const std::size_t nd = dofs.size();
        std::vector<std::vector<double>> loc(nd, std::vector<double>(nd, 0.0));

        Segment2 seg{mesh.vertex(e.v0), mesh.vertex(e.v1)};
        TaggedQuadrature quad = edge_quadrature(curve, seg, cls.edge_split[ib], 3);
        const IFEElementBasis& b1 = space.element_basis(e.k1);
        const IFEElementBasis& b2 = space.element_basis(e.k2);

        std::vector<double> jmp(nd), avg(nd);
        for (const auto& q : quad.points) {
            std::fill(jmp.begin(), jmp.end(), 0.0);
            std::fill(avg.begin(), avg.end(), 0.0);
            for (int k = 0; k < 4; ++k) {
                jmp[k] += b1.eval(k, q.p);
                avg[k] += 0.5 * space.beta(b1.side_at(q.p)) * dot(b1.grad(k, q.p), nB);
            }
            for (int k = 0; k < 4; ++k) {
                jmp[map2[k]] -= b2.eval(k, q.p);
                avg[map2[k]] += 0.5 * space.beta(b2.side_at(q.p)) * dot(b2.grad(k, q.p), nB);
            }
            for (std::size_t i = 0; i < nd; ++i)
                for (std::size_t j = 0; j < nd; ++j)
                    loc[i][j] += q.w * (-avg[j] * jmp[i] + cfg.epsilon * (avg[i] * jmp[j]) +
                                        pen * (jmp[j] * jmp[i]));
        }
        for (std::size_t i = 0; i < nd; ++i)
            for (std::size_t j = 0; j < nd; ++j) buf.add(dofs[i], dofs[j], loc[i][j]);
    }
    return SparseMatrixCSR::compress(buf);
}

/// Load vector with strength-7 tagged quadrature; the source is evaluated
/// with the quadrature point's side tag.
inline std::vector<double> assemble_load(const GlobalSpace& space,
                                         const std::function<double(Point2, double, Side)>& f,
                                         double t) {
    const CartesianMesh& mesh = space.mesh();
    const int ne = mesh.n_elements();
    std::vector<std::array<double, 4>> local(ne);

    parallel_for(ne, [&](int ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        TaggedQuadrature quad = element_quadrature(mesh, space.classification(), ie, 7);
        auto& loc = local[ie];
        loc = {};
        for (const auto& q : quad.points) {
            const double fw = f(q.p, t, q.side) * q.w;
            for (int i = 0; i < 4; ++i) loc[i] += fw * basis.branch(i, q.side).eval(q.p.x, q.p.y);
        }
    });

    std::vector<double> F(space.dof_count(), 0.0);
    for (int ie = 0; ie < ne; ++ie) {
        auto gv = mesh.element_vertices(ie);
        for (int i = 0; i < 4; ++i) F[gv[i]] += local[ie][i];
    }
    return F;
}

/// Zero the constrained rows and columns and put ones on their diagonal.
inline SparseMatrixCSR constrain_operator(const SparseMatrixCSR& A, const std::vector<int>& dofs) {
    std::vector<char> is_bnd(A.dimension(), 0);
    for (int k : dofs) is_bnd[k] = 1;
    SparseMatrixCSR C = A;
    for (int r = 0; r < C.dimension(); ++r)
        for (int k = C.row_offsets()[r]; k < C.row_offsets()[r + 1]; ++k) {
            const int c = C.cols()[k];
            if (is_bnd[r] || is_bnd[c]) C.values()[k] = (r == c && is_bnd[r]) ? 1.0 : 0.0;
        }
    return C;
}

/// Symmetric elimination on the right-hand side: subtract g_k times column k
/// of the unconstrained operator, then pin the constrained entries to g_k.
inline void constrain_rhs(const SparseMatrixCSR& A_unconstrained, std::vector<double>& rhs,
                          const std::vector<int>& dofs, const std::vector<double>& values) {
    std::vector<double> g(A_unconstrained.dimension(), 0.0);
    std::vector<char> is_bnd(A_unconstrained.dimension(), 0);
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        g[dofs[k]] = values[k];
        is_bnd[dofs[k]] = 1;
    }
    for (int r = 0; r < A_unconstrained.dimension(); ++r) {
        if (is_bnd[r]) continue;
        double s = 0.0;
        for (int k = A_unconstrained.row_offsets()[r]; k < A_unconstrained.row_offsets()[r + 1]; ++k) {
            const int c = A_unconstrained.cols()[k];
            if (is_bnd[c]) s += A_unconstrained.values()[k] * g[c];
        }
        rhs[r] -= s;
    }
    for (std::size_t k = 0; k < dofs.size(); ++k) rhs[dofs[k]] = values[k];
}

/// One-shot symmetric elimination of Dirichlet data at time t.
inline SparseMatrixCSR apply_dirichlet(const SparseMatrixCSR& op, std::vector<double>& rhs,
                                       const CartesianMesh& mesh, const DirichletData& data,
                                       double t) {
    std::vector<double> values(data.dofs.size());
    for (std::size_t k = 0; k < data.dofs.size(); ++k)
        values[k] = data.value(mesh.vertex(data.dofs[k]), t);
    constrain_rhs(op, rhs, data.dofs, values);
    return constrain_operator(op, data.dofs);
}

}  // namespace ppife
