#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppife/geometry.hpp"
#include "ppife/mesh.hpp"
#include "ppife/parallel.hpp"

namespace ppife {

class SingularLocalSystem : public std::runtime_error {
  public:
    explicit SingularLocalSystem(const std::string& what) : std::runtime_error(what) {}
};

/// One bilinear branch phi(x,y) = a + b*x + c*y + d*x*y in global coordinates.
struct BilinearCoeffs {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double eval(double x, double y) const { return a + b * x + c * y + d * x * y; }
    Point2 grad(double x, double y) const { return {b + d * y, c + d * x}; }
};

/// Tensor-product hat functions of a rectangle, one per corner
/// (counterclockwise from lower-left), expressed in global coordinates.
inline std::array<BilinearCoeffs, 4> standard_bilinear_basis(const AxisRect& rect) {
    const double x0 = rect.origin.x, y0 = rect.origin.y;
    const double x1 = x0 + rect.width, y1 = y0 + rect.height;
    const double s = 1.0 / (rect.width * rect.height);
    return {{
        {x1 * y1 * s, -y1 * s, -x1 * s, s},
        {-x0 * y1 * s, y1 * s, x0 * s, -s},
        {x0 * y0 * s, -y0 * s, -x0 * s, s},
        {-x1 * y0 * s, y0 * s, x1 * s, -s},
    }};
}

/// Shape functions of one element. Non-interface elements carry the plain
/// bilinear basis and a single material side; interface elements carry one
/// coefficient pair per shape, stitched across the chord.
struct IFEElementBasis {
    enum class Kind { Standard, Immersed };
    Kind kind = Kind::Standard;

    Side side = Side::Minus;                   // Standard only
    std::array<BilinearCoeffs, 4> coeff;       // Standard branch
    std::array<BilinearCoeffs, 4> coeff_plus;  // Immersed plus branch

    // partition-of-unity defect of the local solve; the global expanded
    // coefficients carry an unavoidable eps/h^2 cancellation floor, so the
    // identity sum(phi_i) = 1 is certified here, where it is clean
    double pu_residual = 0.0;

    // chord line of the immersed split
    Point2 chord_normal;
    double chord_offset = 0.0;

    Side side_at(const Point2& p) const {
        if (kind == Kind::Standard) return side;
        return (dot(chord_normal, p) - chord_offset) <= 0.0 ? Side::Minus : Side::Plus;
    }

    const BilinearCoeffs& branch(int i, Side s) const {
        return (kind == Kind::Standard || s == Side::Minus) ? coeff[i] : coeff_plus[i];
    }

    double eval(int i, const Point2& p) const { return branch(i, side_at(p)).eval(p.x, p.y); }
    Point2 grad(int i, const Point2& p) const { return branch(i, side_at(p)).grad(p.x, p.y); }
};

namespace detail {

/// Dense LU with partial pivoting; solves in place against nrhs columns.
/// Returns the smallest pivot magnitude encountered.
template <int N>
double lu_solve(std::array<std::array<double, N>, N>& A, std::array<std::array<double, N>, N>& B,
                int nrhs) {
    std::array<int, N> perm;
    for (int i = 0; i < N; ++i) perm[i] = i;
    double min_pivot = std::numeric_limits<double>::max();
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (piv != col) {
            std::swap(A[piv], A[col]);
            std::swap(B[piv], B[col]);
        }
        min_pivot = std::min(min_pivot, std::abs(A[col][col]));
        if (A[col][col] == 0.0) return 0.0;
        for (int r = col + 1; r < N; ++r) {
            const double m = A[r][col] / A[col][col];
            if (m == 0.0) continue;
            for (int c = col; c < N; ++c) A[r][c] -= m * A[col][c];
            for (int c = 0; c < nrhs; ++c) B[r][c] -= m * B[col][c];
        }
    }
    for (int col = N - 1; col >= 0; --col)
        for (int c = 0; c < nrhs; ++c) {
            double s = B[col][c];
            for (int k = col + 1; k < N; ++k) s -= A[col][k] * B[k][c];
            B[col][c] = s / A[col][col];
        }
    return min_pivot;
}

}  // namespace detail

/// Immersed shape functions of a cut rectangle: for each corner, a pair of
/// bilinear branches determined by the 8 constraints (4 nodal values,
/// continuity at the chord endpoints, equal mixed coefficients, and zero
/// flux jump across the chord). The system is assembled and solved in
/// element-local coordinates, which realizes the h-power row scalings with
/// O(1) entries throughout; the solution is then expanded into global
/// coefficients. A refinement pass keeps residuals near machine precision
/// for sliver cuts.
inline IFEElementBasis build_immersed_basis(const AxisRect& rect, const CutConfiguration& cut,
                                            double beta_minus, double beta_plus) {
    if (beta_minus <= 0.0 || beta_plus <= 0.0)
        throw std::invalid_argument("build_immersed_basis: beta must be positive");

    IFEElementBasis basis;
    basis.kind = IFEElementBasis::Kind::Immersed;
    basis.chord_normal = cut.chord_normal;
    basis.chord_offset = cut.chord_offset;

    const double x0 = rect.origin.x, y0 = rect.origin.y;
    auto local = [&](const Point2& p) {
        return Point2{(p.x - x0) / rect.width, (p.y - y0) / rect.height};
    };
    const Point2 mid = local(cut.chord.midpoint());

    // unknown layout: [a- b- c- d- | a+ b+ c+ d+], local monomials 1, xi, eta, xi*eta
    std::array<std::array<double, 8>, 8> M{};
    std::array<std::array<double, 8>, 8> rhs{};

    for (int k = 0; k < 4; ++k) {
        const int off = basis.side_at(rect.corner(k)) == Side::Minus ? 0 : 4;
        const Point2 v = local(rect.corner(k));
        const std::array<double, 4> row{1.0, v.x, v.y, v.x * v.y};
        for (int c = 0; c < 4; ++c) M[k][off + c] = row[c];
        rhs[k][k] = 1.0;
    }
    for (int k = 0; k < 2; ++k) {
        const Point2 p = local(k == 0 ? cut.D : cut.E);
        const std::array<double, 4> row{1.0, p.x, p.y, p.x * p.y};
        for (int c = 0; c < 4; ++c) {
            M[4 + k][c] = row[c];
            M[4 + k][4 + c] = -row[c];
        }
    }
    // equal mixed coefficients (the h^2-scaled jump condition)
    M[6][3] = -1.0;
    M[6][7] = 1.0;
    // flux jump at the chord midpoint, scaled by h/max(beta); the integrand
    // is linear along the chord, so the midpoint value carries the whole
    // integral
    const double bmax = std::max(beta_minus, beta_plus);
    const double bm = beta_minus / bmax, bp = beta_plus / bmax;
    const Point2 n = cut.chord_normal;
    M[7][1] = -bm * n.x;
    M[7][2] = -bm * n.y;
    M[7][3] = -bm * (n.x * mid.y + n.y * mid.x);
    M[7][5] = bp * n.x;
    M[7][6] = bp * n.y;
    M[7][7] = bp * (n.x * mid.y + n.y * mid.x);

    auto M_saved = M;
    auto sol = rhs;
    const double pivot = detail::lu_solve<8>(M, sol, 4);
    if (pivot < 1e-14)
        throw SingularLocalSystem("build_immersed_basis: pivot " + std::to_string(pivot));

    // one step of iterative refinement
    std::array<std::array<double, 8>, 8> resid{};
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 4; ++c) {
            double s = rhs[r][c];
            for (int k = 0; k < 8; ++k) s -= M_saved[r][k] * sol[k][c];
            resid[r][c] = s;
        }
    auto M2 = M_saved;
    detail::lu_solve<8>(M2, resid, 4);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 4; ++c) sol[r][c] += resid[r][c];

    // partition-of-unity defect of the local solution
    for (int off : {0, 4}) {
        double sa = -1.0, sb = 0.0, sc = 0.0, sd = 0.0;
        for (int i = 0; i < 4; ++i) {
            sa += sol[off + 0][i];
            sb += sol[off + 1][i];
            sc += sol[off + 2][i];
            sd += sol[off + 3][i];
        }
        basis.pu_residual = std::max({basis.pu_residual, std::abs(sa), std::abs(sb),
                                      std::abs(sc), std::abs(sd)});
    }

    // expand xi = (x-x0)/w, eta = (y-y0)/hh into global monomials
    const double w = rect.width, hh = rect.height;
    for (int i = 0; i < 4; ++i) {
        for (int off : {0, 4}) {
            const double la = sol[off + 0][i], lb = sol[off + 1][i];
            const double lc = sol[off + 2][i], ld = sol[off + 3][i];
            BilinearCoeffs g;
            g.d = ld / (w * hh);
            g.b = lb / w - ld * y0 / (w * hh);
            g.c = lc / hh - ld * x0 / (w * hh);
            g.a = la - lb * x0 / w - lc * y0 / hh + ld * x0 * y0 / (w * hh);
            (off == 0 ? basis.coeff[i] : basis.coeff_plus[i]) = g;
        }
    }
    return basis;
}

inline double eval_shape(const IFEElementBasis& basis, int i, const Point2& p) {
    return basis.eval(i, p);
}

inline Point2 eval_shape_grad(const IFEElementBasis& basis, int i, const Point2& p) {
    return basis.grad(i, p);
}

/// The global IFE space: one degree of freedom per mesh vertex, one basis
/// table entry per element. Owns its mesh and classification.
class GlobalSpace {
  public:
    GlobalSpace(CartesianMesh mesh, MeshClassification cls, double beta_minus, double beta_plus)
        : mesh_(std::move(mesh)),
          cls_(std::move(cls)),
          beta_minus_(beta_minus),
          beta_plus_(beta_plus) {
        bases_.resize(mesh_.n_elements());
        std::vector<std::string> failures(mesh_.n_elements());
        parallel_for(mesh_.n_elements(), [&](int ie) {
            try {
                if (cls_.is_interface_element(ie)) {
                    bases_[ie] = build_immersed_basis(mesh_.element_rect(ie),
                                                      *cls_.element_cut[ie], beta_minus_,
                                                      beta_plus_);
                } else {
                    IFEElementBasis b;
                    b.kind = IFEElementBasis::Kind::Standard;
                    b.side = cls_.element_side[ie];
                    b.coeff = standard_bilinear_basis(mesh_.element_rect(ie));
                    bases_[ie] = b;
                }
            } catch (const std::exception& e) {
                failures[ie] = e.what();
            }
        });
        for (int ie = 0; ie < mesh_.n_elements(); ++ie)
            if (!failures[ie].empty())
                throw SingularLocalSystem("element " + std::to_string(ie) + ": " + failures[ie]);
    }

    const CartesianMesh& mesh() const { return mesh_; }
    const MeshClassification& classification() const { return cls_; }
    int dof_count() const { return mesh_.n_vertices(); }
    double beta_minus() const { return beta_minus_; }
    double beta_plus() const { return beta_plus_; }
    double beta(Side s) const { return s == Side::Minus ? beta_minus_ : beta_plus_; }
    const IFEElementBasis& element_basis(int ie) const { return bases_[ie]; }
    const std::vector<int>& boundary_dofs() const { return cls_.boundary_vertices; }

  private:
    CartesianMesh mesh_;
    MeshClassification cls_;
    double beta_minus_;
    double beta_plus_;
    std::vector<IFEElementBasis> bases_;
};

inline GlobalSpace build_global_space(CartesianMesh mesh, MeshClassification cls,
                                      double beta_minus, double beta_plus) {
    return GlobalSpace(std::move(mesh), std::move(cls), beta_minus, beta_plus);
}

/// Nodal interpolation: the coefficient of every vertex dof is the value of
/// u at that vertex.
inline std::vector<double> interpolate(const GlobalSpace& space,
                                       const std::function<double(Point2)>& u) {
    std::vector<double> c(space.dof_count());
    for (int iv = 0; iv < space.dof_count(); ++iv) c[iv] = u(space.mesh().vertex(iv));
    return c;
}

}  // namespace ppife
