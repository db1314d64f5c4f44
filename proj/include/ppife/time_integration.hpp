#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppife/assembly.hpp"
#include "ppife/geometry.hpp"
#include "ppife/ife_basis.hpp"
#include "ppife/linalg.hpp"
#include "ppife/quadrature.hpp"

namespace ppife {

/// Time discretization parameters. theta = 1 is backward Euler, theta = 1/2
/// Crank-Nicolson; theta = 0 is accepted but carries no stability guarantee.
struct ThetaSchemeConfig {
    double theta = 1.0;
    double t_final = 1.0;
    int n_steps = 1;
    double solver_tol = 1e-10;
    int solver_max_iter = 50000;

    double dt() const { return t_final / n_steps; }

    void validate() const {
        if (theta < 0.0 || theta > 1.0)
            throw std::invalid_argument("ThetaSchemeConfig: theta must lie in [0,1]");
        if (t_final <= 0.0) throw std::invalid_argument("ThetaSchemeConfig: t_final must be positive");
        if (n_steps < 1) throw std::invalid_argument("ThetaSchemeConfig: n_steps must be >= 1");
    }
};

enum class InitMode { Interpolation, EllipticProjection };

/// Data of one transient problem instance.
struct TransientProblem {
    std::function<double(Point2, double, Side)> source;  // f(x, t, side)
    std::function<double(Point2, double)> dirichlet;     // g(x, t)
    std::function<double(Point2)> initial;               // u0(x)
    std::function<Point2(Point2)> initial_flux;          // beta * grad u0, projection mode only
};

/// Coefficient vectors recorded along the march. Snapshot 0 is the initial
/// condition, the last snapshot is the final time level.
struct TransientSolution {
    double dt = 0.0;
    int n_steps = 0;
    int stride = 0;  // 0 = record initial and final only
    std::vector<int> snapshot_steps;
    std::vector<std::vector<double>> snapshots;

    const std::vector<double>& initial() const { return snapshots.front(); }
    const std::vector<double>& final_level() const { return snapshots.back(); }
};

/// Right side of the elliptic projection: a_eps(u0, v_i) evaluated from the
/// analytic conormal flux beta*grad(u0). The jump terms of the (continuous)
/// initial data vanish, so beyond the volume gradients only the
/// flux-average integral survives on interface edges.
inline std::vector<double> elliptic_projection_rhs(const GlobalSpace& space,
                                                   const std::function<Point2(Point2)>& beta_grad_u0,
                                                   const InterfaceCurve& curve) {
    const CartesianMesh& mesh = space.mesh();
    const MeshClassification& cls = space.classification();

    std::vector<double> rhs(space.dof_count(), 0.0);
    for (int ie = 0; ie < mesh.n_elements(); ++ie) {
        const IFEElementBasis& basis = space.element_basis(ie);
        auto gv = mesh.element_vertices(ie);
        TaggedQuadrature quad = element_quadrature(mesh, cls, ie, 7);
        for (const auto& q : quad.points) {
            const Point2 flux = beta_grad_u0(q.p);
            for (int i = 0; i < 4; ++i)
                rhs[gv[i]] += q.w * dot(flux, basis.branch(i, q.side).grad(q.p.x, q.p.y));
        }
    }
    for (int ib : cls.interior_interface_edges) {
        const Edge& e = mesh.edge(ib);
        const Point2 nB{e.nx, e.ny};
        Segment2 seg{mesh.vertex(e.v0), mesh.vertex(e.v1)};
        TaggedQuadrature quad = edge_quadrature(curve, seg, cls.edge_split[ib], 5);
        const IFEElementBasis& b1 = space.element_basis(e.k1);
        const IFEElementBasis& b2 = space.element_basis(e.k2);
        auto gv1 = mesh.element_vertices(e.k1);
        auto gv2 = mesh.element_vertices(e.k2);
        for (const auto& q : quad.points) {
            const double fn = dot(beta_grad_u0(q.p), nB);
            for (int k = 0; k < 4; ++k) {
                rhs[gv1[k]] -= q.w * fn * b1.eval(k, q.p);
                rhs[gv2[k]] += q.w * fn * b2.eval(k, q.p);
            }
        }
    }
    return rhs;
}

/// Initial coefficient vector: nodal interpolation of u0, or the elliptic
/// projection defined through the penalized bilinear form. Boundary dofs
/// carry u0's trace.
inline std::vector<double> initial_condition(const GlobalSpace& space, InitMode mode,
                                             const std::function<double(Point2)>& u0,
                                             const std::function<Point2(Point2)>& beta_grad_u0,
                                             const PenaltyConfig& cfg, const InterfaceCurve& curve,
                                             const SparseMatrixCSR* stiffness = nullptr,
                                             double solver_tol = 1e-10) {
    if (mode == InitMode::Interpolation) return interpolate(space, u0);
    if (!beta_grad_u0)
        throw std::invalid_argument("initial_condition: elliptic projection needs the analytic flux");

    std::vector<double> rhs = elliptic_projection_rhs(space, beta_grad_u0, curve);
    SparseMatrixCSR A = stiffness ? *stiffness : assemble_stiffness(space, cfg, curve);
    std::vector<double> values(space.boundary_dofs().size());
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = u0(space.mesh().vertex(space.boundary_dofs()[k]));
    constrain_rhs(A, rhs, space.boundary_dofs(), values);
    SparseMatrixCSR C = constrain_operator(A, space.boundary_dofs());

    std::vector<double> x0 = interpolate(space, u0);  // warm start
    SolveResult sol = (cfg.epsilon == -1) ? cg(C, rhs, solver_tol, 50000, &x0)
                                          : bicgstab(C, rhs, solver_tol, 50000, &x0);
    for (std::size_t k = 0; k < space.boundary_dofs().size(); ++k)
        sol.x[space.boundary_dofs()[k]] = values[k];
    return std::move(sol.x);
}

/// Marches the composite operator (M/dt + theta*A), built and constrained
/// once; each step assembles the right side and solves with a warm start.
class ThetaStepper {
  public:
    ThetaStepper(const SparseMatrixCSR& mass, const SparseMatrixCSR& stiffness,
                 const CartesianMesh& mesh, DirichletData dirichlet, double dt, double theta,
                 bool symmetric, double solver_tol = 1e-10, int max_iter = 50000)
        : M_(mass),
          A_(stiffness),
          mesh_(mesh),
          dirichlet_(std::move(dirichlet)),
          dt_(dt),
          theta_(theta),
          symmetric_(symmetric),
          tol_(solver_tol),
          max_iter_(max_iter) {
        composite_ = add_scaled(1.0 / dt_, M_, theta_, A_);
        constrained_ = constrain_operator(composite_, dirichlet_.dofs);
    }

    const SparseMatrixCSR& composite() const { return composite_; }
    const SparseMatrixCSR& constrained() const { return constrained_; }
    int last_iterations() const { return last_iterations_; }

    /// Advances u from t_next - dt to t_next.
    std::vector<double> step(const std::vector<double>& u_prev, const std::vector<double>& F_prev,
                             const std::vector<double>& F_curr, double t_next) const {
        const int n = composite_.dimension();
        std::vector<double> rhs(n), tmp(n);
        M_.multiply(u_prev, rhs);
        A_.multiply(u_prev, tmp);
        for (int k = 0; k < n; ++k)
            rhs[k] = rhs[k] / dt_ - (1.0 - theta_) * tmp[k] + theta_ * F_curr[k] +
                     (1.0 - theta_) * F_prev[k];

        std::vector<double> values(dirichlet_.dofs.size());
        for (std::size_t k = 0; k < values.size(); ++k)
            values[k] = dirichlet_.value(mesh_.vertex(dirichlet_.dofs[k]), t_next);
        constrain_rhs(composite_, rhs, dirichlet_.dofs, values);

        SolveResult sol = symmetric_ ? cg(constrained_, rhs, tol_, max_iter_, &u_prev)
                                     : bicgstab(constrained_, rhs, tol_, max_iter_, &u_prev);
        last_iterations_ = sol.iterations;
        // pin the constrained entries; the iterative solve leaves them only
        // within solver tolerance of the data
        for (std::size_t k = 0; k < dirichlet_.dofs.size(); ++k)
            sol.x[dirichlet_.dofs[k]] = values[k];
        return std::move(sol.x);
    }

  private:
    const SparseMatrixCSR& M_;
    const SparseMatrixCSR& A_;
    const CartesianMesh& mesh_;
    DirichletData dirichlet_;
    double dt_;
    double theta_;
    bool symmetric_;
    double tol_;
    int max_iter_;
    SparseMatrixCSR composite_;
    SparseMatrixCSR constrained_;
    mutable int last_iterations_ = 0;
};

/// One theta step from scratch; convenience wrapper over ThetaStepper.
inline std::vector<double> theta_step(const SparseMatrixCSR& M, const SparseMatrixCSR& A,
                                      const std::vector<double>& u_prev,
                                      const std::vector<double>& F_prev,
                                      const std::vector<double>& F_curr, double dt, double theta,
                                      const CartesianMesh& mesh, const DirichletData& dirichlet,
                                      double t_next, bool symmetric, double tol = 1e-10) {
    ThetaStepper stepper(M, A, mesh, dirichlet, dt, theta, symmetric, tol);
    return stepper.step(u_prev, F_prev, F_curr, t_next);
}

/// Full march of the fully discrete scheme. Mass and stiffness are
/// assembled once (the coefficients are time-independent); the load is
/// reassembled per step.
inline TransientSolution run_transient(const GlobalSpace& space, const InterfaceCurve& curve,
                                       const PenaltyConfig& penalty, const ThetaSchemeConfig& scheme,
                                       const TransientProblem& problem,
                                       InitMode init = InitMode::Interpolation, int stride = 0) {
    penalty.validate();
    scheme.validate();

    const SparseMatrixCSR M = assemble_mass(space);
    const SparseMatrixCSR A = assemble_stiffness(space, penalty, curve);
    const double dt = scheme.dt();

    DirichletData dirichlet{space.boundary_dofs(), problem.dirichlet};
    ThetaStepper stepper(M, A, space.mesh(), dirichlet, dt, scheme.theta, penalty.epsilon == -1,
                         scheme.solver_tol, scheme.solver_max_iter);

    TransientSolution out;
    out.dt = dt;
    out.n_steps = scheme.n_steps;
    out.stride = stride;

    std::vector<double> u = initial_condition(space, init, problem.initial, problem.initial_flux,
                                              penalty, curve, &A, scheme.solver_tol);
    out.snapshot_steps.push_back(0);
    out.snapshots.push_back(u);

    std::vector<double> F_prev = assemble_load(space, problem.source, 0.0);
    for (int n = 1; n <= scheme.n_steps; ++n) {
        const double t = n * dt;
        std::vector<double> F_curr = assemble_load(space, problem.source, t);
        try {
            u = stepper.step(u, F_prev, F_curr, t);
        } catch (const NoConvergence& e) {
            throw std::runtime_error("run_transient: step " + std::to_string(n) + ": " + e.what());
        }
        F_prev = std::move(F_curr);
        if ((stride > 0 && n % stride == 0 && n != scheme.n_steps) || n == scheme.n_steps) {
            out.snapshot_steps.push_back(n);
            out.snapshots.push_back(u);
        }
    }
    return out;
}

}  // namespace ppife
