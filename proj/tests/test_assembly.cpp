#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

#include "ppife/assembly.hpp"
#include "ppife/manufactured_problem.hpp"

using namespace ppife;
using Catch::Approx;

namespace {
const AxisRect kUnit({0.0, 0.0}, 1.0, 1.0);

InterfaceCurve far_curve() {
    return InterfaceCurve([](double, double) { return -1.0; });
}

GlobalSpace make_space(int n, const InterfaceCurve& curve, double bm, double bp) {
    CartesianMesh mesh = build_mesh(kUnit, n);
    MeshClassification cls = classify_mesh(mesh, curve);
    return GlobalSpace(std::move(mesh), std::move(cls), bm, bp);
}

GlobalSpace section4_space(int n, double bp = 10.0) {
    EllipseProblem prob;
    prob.beta_plus = bp;
    return make_space(n, prob.curve(), prob.beta_minus, prob.beta_plus);
}

struct Lcg {
    unsigned long long s = 0xabcdef9876543210ull;
    double next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return ((s >> 33) & 0xffffff) / double(0x1000000) - 0.5;
    }
};
}  // namespace

TEST_CASE("penalty config validation", "[assembly]") {
    CHECK_THROWS_AS((PenaltyConfig{2, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PenaltyConfig{-1, 0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((PenaltyConfig{1, 1.0, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((PenaltyConfig{1, 0.0, 1.0}.validate()));  // epsilon=1 allows sigma0=0
    CHECK_NOTHROW((PenaltyConfig{-1, 100.0, 1.0}.validate()));
}

TEST_CASE("local mass matrix matches the tensor-product closed form", "[assembly]") {
    // one element of an N=2 mesh with no interface; local mass is
    // h^2/36 * [[4,2,1,2],[2,4,2,1],[1,2,4,2],[2,1,2,4]]
    GlobalSpace space = make_space(2, far_curve(), 1.0, 1.0);
    const int ie = 0;
    const IFEElementBasis& basis = space.element_basis(ie);
    TaggedQuadrature quad = element_quadrature(space.mesh(), space.classification(), ie, 4);
    const double h = space.mesh().h();
    const double expected[4][4] = {{4, 2, 1, 2}, {2, 4, 2, 1}, {1, 2, 4, 2}, {2, 1, 2, 4}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double m = 0.0;
            for (const auto& q : quad.points) m += q.w * basis.eval(i, q.p) * basis.eval(j, q.p);
            CHECK(m == Approx(h * h / 36.0 * expected[i][j]).epsilon(1e-13));
        }
}

TEST_CASE("global mass properties", "[assembly]") {
    GlobalSpace space = section4_space(10);
    SparseMatrixCSR M = assemble_mass(space);
    const std::vector<double> ones(space.dof_count(), 1.0);
    std::vector<double> M1 = spmv(M, ones);
    double total = 0.0;
    for (double v : M1) total += v;
    CHECK(total == Approx(1.0).margin(1e-12));
    CHECK(M.is_symmetric(0.0));

    // partition of unity squared integrates to the element area on cut elements
    const int ie = space.classification().interface_elements.front();
    const IFEElementBasis& basis = space.element_basis(ie);
    TaggedQuadrature quad = element_quadrature(space.mesh(), space.classification(), ie, 4);
    double sum = 0.0;
    for (const auto& q : quad.points) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += basis.branch(i, q.side).eval(q.p.x, q.p.y);
        sum += q.w * s * s;
    }
    CHECK(sum == Approx(space.mesh().h() * space.mesh().h()).epsilon(1e-12));
}

TEST_CASE("constants lie in the stiffness kernel before constraints", "[assembly]") {
    EllipseProblem prob;
    for (double bp : {10.0, 10000.0}) {
        GlobalSpace space = section4_space(10, bp);
        for (int eps : {-1, 0, 1}) {
            PenaltyConfig cfg{eps, eps == 1 ? 1.0 : 100.0, 1.0};
            SparseMatrixCSR A = assemble_stiffness(space, cfg, prob.curve());
            std::vector<double> A1 = spmv(A, std::vector<double>(space.dof_count(), 1.0));
            const double scale = A.infinity_norm();
            for (double v : A1) CHECK(std::abs(v) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("no-interface stiffness annihilates constants", "[assembly]") {
    GlobalSpace space = make_space(4, far_curve(), 1.0, 1.0);
    SparseMatrixCSR A = assemble_stiffness(space, {1, 1.0, 1.0}, far_curve());
    std::vector<double> A1 = spmv(A, std::vector<double>(space.dof_count(), 1.0));
    for (double v : A1) CHECK(std::abs(v) <= 1e-13 * A.infinity_norm());
}

TEST_CASE("symmetric configuration gives a bitwise-symmetric operator", "[assembly]") {
    EllipseProblem prob;
    GlobalSpace space = section4_space(10);
    SparseMatrixCSR A = assemble_stiffness(space, {-1, 100.0, 1.0}, prob.curve());
    CHECK(A.is_symmetric(0.0));

    SparseMatrixCSR A1 = assemble_stiffness(space, {1, 1.0, 1.0}, prob.curve());
    CHECK_FALSE(A1.is_symmetric(0.0));
}

TEST_CASE("equal-beta stiffness matches the standard FE operator", "[assembly]") {
    EllipseProblem prob;
    prob.beta_plus = 1.0;
    GlobalSpace cut_space = make_space(8, prob.curve(), 1.0, 1.0);
    GlobalSpace std_space = make_space(8, far_curve(), 1.0, 1.0);
    SparseMatrixCSR A_cut = assemble_stiffness(cut_space, {1, 1.0, 1.0}, prob.curve());
    SparseMatrixCSR A_std = assemble_stiffness(std_space, {1, 1.0, 1.0}, far_curve());

    Lcg rng;
    std::vector<double> x(cut_space.dof_count());
    for (double& v : x) v = rng.next();
    std::vector<double> y1 = spmv(A_cut, x);
    std::vector<double> y2 = spmv(A_std, x);
    for (std::size_t k = 0; k < y1.size(); ++k) CHECK(std::abs(y1[k] - y2[k]) <= 1e-10);
}

TEST_CASE("stiffness couples only neighboring dofs", "[assembly]") {
    EllipseProblem prob;
    GlobalSpace space = section4_space(10);
    SparseMatrixCSR A = assemble_stiffness(space, {1, 1.0, 1.0}, prob.curve());

    // admissible couplings: dofs sharing an element, or dofs of the two
    // elements flanking an interior interface edge
    std::set<std::pair<int, int>> allowed;
    const CartesianMesh& mesh = space.mesh();
    for (int ie = 0; ie < mesh.n_elements(); ++ie) {
        auto gv = mesh.element_vertices(ie);
        for (int i : gv)
            for (int j : gv) allowed.insert({i, j});
    }
    for (int ib : space.classification().interior_interface_edges) {
        const Edge& e = mesh.edge(ib);
        auto g1 = mesh.element_vertices(e.k1);
        auto g2 = mesh.element_vertices(e.k2);
        for (int i : g1)
            for (int j : g2) {
                allowed.insert({i, j});
                allowed.insert({j, i});
            }
    }
    for (int r = 0; r < A.dimension(); ++r)
        for (int k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k)
            if (A.values()[k] != 0.0) CHECK(allowed.count({r, A.cols()[k]}) == 1);
}

TEST_CASE("load vector properties", "[assembly]") {
    GlobalSpace space = section4_space(10);
    std::vector<double> F1 =
        assemble_load(space, [](Point2, double, Side) { return 1.0; }, 0.0);
    double total = 0.0;
    for (double v : F1) total += v;
    CHECK(total == Approx(1.0).margin(1e-12));

    std::vector<double> F0 =
        assemble_load(space, [](Point2, double, Side) { return 0.0; }, 0.0);
    for (double v : F0) CHECK(v == 0.0);
}

TEST_CASE("section-4 load total matches a Monte-Carlo integral", "[assembly]") {
    EllipseProblem prob;
    GlobalSpace space = section4_space(20);
    auto f = [&prob](Point2 p, double t, Side) { return prob.source_f(p.x, p.y, t); };
    std::vector<double> F = assemble_load(space, f, 0.0);
    double total = 0.0;
    for (double v : F) total += v;

    Lcg rng;
    double mc = 0.0;
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        const double x = rng.next() + 0.5, y = rng.next() + 0.5;
        mc += prob.source_f(x, y, 0.0);
    }
    mc /= n;
    CHECK(total == Approx(mc).epsilon(1e-3));
}

TEST_CASE("dirichlet elimination with zero data", "[assembly]") {
    GlobalSpace space = section4_space(4);
    EllipseProblem prob;
    SparseMatrixCSR A = assemble_stiffness(space, {1, 1.0, 1.0}, prob.curve());
    std::vector<double> rhs(space.dof_count(), 0.5);
    DirichletData bc{space.boundary_dofs(), [](Point2, double) { return 0.0; }};
    SparseMatrixCSR C = apply_dirichlet(A, rhs, space.mesh(), bc, 0.0);

    std::vector<char> is_bnd(space.dof_count(), 0);
    for (int k : space.boundary_dofs()) is_bnd[k] = 1;
    for (int r = 0; r < C.dimension(); ++r)
        for (int k = C.row_offsets()[r]; k < C.row_offsets()[r + 1]; ++k) {
            const int c = C.cols()[k];
            if (is_bnd[r] || is_bnd[c])
                CHECK(C.values()[k] == ((r == c && is_bnd[r]) ? 1.0 : 0.0));
        }
    for (int k : space.boundary_dofs()) CHECK(rhs[k] == 0.0);
}

TEST_CASE("laplace patch test reproduces a linear solution", "[assembly]") {
    GlobalSpace space = make_space(6, far_curve(), 1.0, 1.0);
    SparseMatrixCSR A = assemble_stiffness(space, {1, 1.0, 1.0}, far_curve());
    std::vector<double> rhs(space.dof_count(), 0.0);
    DirichletData bc{space.boundary_dofs(), [](Point2 p, double) { return p.x + p.y; }};
    SparseMatrixCSR C = apply_dirichlet(A, rhs, space.mesh(), bc, 0.0);
    SolveResult sol = bicgstab(C, rhs, 1e-12, 2000);
    for (int iv = 0; iv < space.dof_count(); ++iv) {
        const Point2 p = space.mesh().vertex(iv);
        CHECK(sol.x[iv] == Approx(p.x + p.y).margin(1e-9));
    }
}

TEST_CASE("dirichlet right side carries the boundary trace", "[assembly]") {
    EllipseProblem prob;
    GlobalSpace space = section4_space(4);
    SparseMatrixCSR A = assemble_stiffness(space, {1, 1.0, 1.0}, prob.curve());
    std::vector<double> rhs(space.dof_count(), 0.0);
    DirichletData bc{space.boundary_dofs(),
                     [&prob](Point2 p, double t) { return prob.boundary_g(p.x, p.y, t); }};
    apply_dirichlet(A, rhs, space.mesh(), bc, 0.5);
    for (int k : space.boundary_dofs()) {
        const Point2 p = space.mesh().vertex(k);
        CHECK(rhs[k] == prob.boundary_g(p.x, p.y, 0.5));
    }
}

TEST_CASE("symmetric composite operator is positive definite", "[assembly]") {
    // coercivity proxy: with eps=-1, sigma0=100, cg converges on the
    // constrained operator and the condition estimate is finite
    EllipseProblem prob;
    GlobalSpace space = section4_space(10);
    SparseMatrixCSR A = assemble_stiffness(space, {-1, 100.0, 1.0}, prob.curve());
    SparseMatrixCSR C = constrain_operator(A, space.boundary_dofs());
    Lcg rng;
    std::vector<double> b(space.dof_count());
    for (double& v : b) v = rng.next();
    SolveResult sol = cg(C, b, 1e-10, 5000);
    CHECK(sol.iterations < 5000);
    const double cond = condition_estimate(C);
    CHECK(cond > 1.0);
    CHECK(cond < 1e8);
}
