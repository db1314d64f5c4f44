#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ppife/manufactured_problem.hpp"

using namespace ppife;
using Catch::Approx;

namespace {
struct Lcg {
    unsigned long long s = 0xfeedfacecafebeefull;
    double next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return ((s >> 33) & 0xffffff) / double(0x1000000);
    }
};

// points in the unit square away from the interface band
Point2 off_interface_point(const EllipseProblem& prob, Lcg& rng) {
    for (;;) {
        Point2 p{rng.next(), rng.next()};
        if (std::abs(prob.r(p.x, p.y) - 1.0) > 0.05) return p;
    }
}
}  // namespace

TEST_CASE("exact solution values", "[manufactured]") {
    EllipseProblem prob;  // beta (1, 10), p = 5
    CHECK(prob.exact_u(0.0, 0.0, 0.0) == 0.0);
    CHECK(prob.exact_u(0.0, 0.0, 0.7) == 0.0);

    // direct evaluation at (1,1): r = hypot(4/pi, 6/pi), u+ = r^5/10 + 0.9
    CHECK(prob.exact_u(1.0, 1.0, 0.0) == Approx(7.271753931904936).margin(1e-12));

    // continuity across the interface
    const double a = prob.a;
    for (double t : {0.0, 1.0}) {
        const double inner = prob.exact_u((1.0 - 1e-9) * a, 0.0, t);
        const double outer = prob.exact_u((1.0 + 1e-9) * a, 0.0, t);
        CHECK(std::abs(inner - outer) <= 1e-7);
        CHECK(inner == Approx(std::exp(t) / prob.beta_minus).epsilon(1e-7));
    }
}

TEST_CASE("exact gradient matches finite differences", "[manufactured]") {
    EllipseProblem prob;
    CHECK(prob.exact_grad_u(0.0, 0.0, 0.3).x == 0.0);
    CHECK(prob.exact_grad_u(0.0, 0.0, 0.3).y == 0.0);

    Lcg rng;
    const double step = 1e-5;
    for (int k = 0; k < 100; ++k) {
        const Point2 p = off_interface_point(prob, rng);
        const double t = rng.next();
        const Point2 g = prob.exact_grad_u(p.x, p.y, t);
        const double fdx =
            (prob.exact_u(p.x + step, p.y, t) - prob.exact_u(p.x - step, p.y, t)) / (2 * step);
        const double fdy =
            (prob.exact_u(p.x, p.y + step, t) - prob.exact_u(p.x, p.y - step, t)) / (2 * step);
        const double scale = std::max(1.0, std::max(std::abs(g.x), std::abs(g.y)));
        CHECK(std::abs(g.x - fdx) / scale <= 1e-7);
        CHECK(std::abs(g.y - fdy) / scale <= 1e-7);
    }
}

TEST_CASE("conormal flux is continuous across the interface", "[manufactured]") {
    EllipseProblem prob;
    const Point2 p = prob.interface_point(0.7);
    const Point2 n = prob.interface_normal(p.x, p.y);
    const Point2 gm = prob.exact_grad_u_side(p.x, p.y, 0.4, Side::Minus);
    const Point2 gp = prob.exact_grad_u_side(p.x, p.y, 0.4, Side::Plus);
    CHECK(std::abs(prob.beta_minus * dot(gm, n) - prob.beta_plus * dot(gp, n)) <= 1e-10);
}

TEST_CASE("source term matches the five-point stencil oracle", "[manufactured]") {
    EllipseProblem prob;
    CHECK(prob.source_f_side(0.0, 0.0, 0.0, Side::Minus) == 0.0);

    Lcg rng;
    const double hstep = 1e-4;
    for (int k = 0; k < 100; ++k) {
        const Point2 p = off_interface_point(prob, rng);
        const double t = rng.next();
        const Side s = prob.side(p.x, p.y);
        const double beta = prob.beta(s);
        const double u0 = prob.exact_u(p.x, p.y, t);
        const double lap = (prob.exact_u(p.x + hstep, p.y, t) + prob.exact_u(p.x - hstep, p.y, t) +
                            prob.exact_u(p.x, p.y + hstep, t) + prob.exact_u(p.x, p.y - hstep, t) -
                            4.0 * u0) /
                           (hstep * hstep);
        // u_t = u for the e^t time factor
        const double oracle = u0 - beta * lap;
        const double f = prob.source_f(p.x, p.y, t);
        CHECK(std::abs(f - oracle) / std::max(1.0, std::abs(f)) <= 1e-5);
    }
}

TEST_CASE("source jump vanishes on the interface", "[manufactured]") {
    EllipseProblem prob;
    for (int k = 0; k < 50; ++k) {
        const Point2 p = prob.interface_point(0.001 + k * (std::numbers::pi / 2 - 0.002) / 49);
        const double fm = prob.source_f_side(p.x, p.y, 0.6, Side::Minus);
        const double fp = prob.source_f_side(p.x, p.y, 0.6, Side::Plus);
        CHECK(std::abs(fm - fp) <= 1e-9 * std::max(1.0, std::abs(fm)));
    }
}

TEST_CASE("boundary and initial data are traces of the exact solution", "[manufactured]") {
    EllipseProblem prob;
    CHECK(prob.initial_u0(0.0, 0.0) == 0.0);
    CHECK(prob.boundary_g(1.0, 1.0, 0.0) == prob.exact_u(1.0, 1.0, 0.0));
    CHECK(prob.boundary_g(1.0, 1.0, 1.0) ==
          Approx(std::exp(1.0) * prob.exact_u(1.0, 1.0, 0.0)).epsilon(1e-15));
}

TEST_CASE("interface jump conditions hold at 50 parametric points", "[manufactured]") {
    EllipseProblem prob;
    for (int k = 0; k < 50; ++k) {
        const double theta = 0.001 + k * (std::numbers::pi / 2 - 0.002) / 49;
        const Point2 p = prob.interface_point(theta);
        const Point2 n = prob.interface_normal(p.x, p.y);
        for (double t : {0.0, 0.5, 1.0}) {
            const double um = prob.exact_u_side(p.x, p.y, t, Side::Minus);
            const double up = prob.exact_u_side(p.x, p.y, t, Side::Plus);
            CHECK(std::abs(um - up) <= 1e-9);
            const Point2 gm = prob.exact_grad_u_side(p.x, p.y, t, Side::Minus);
            const Point2 gp = prob.exact_grad_u_side(p.x, p.y, t, Side::Plus);
            CHECK(std::abs(prob.beta_minus * dot(gm, n) - prob.beta_plus * dot(gp, n)) <= 1e-9);
        }
    }
}
