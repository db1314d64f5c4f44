#pragma once

#include <cmath>
#include <numbers>

#include "ppife/geometry.hpp"

namespace ppife {

/// Benchmark problem: ellipse interface in the unit square with the
/// piecewise exact solution r^p scaled per side so that both the solution
/// and the normal flux are continuous across the interface.
struct EllipseProblem {
    double x0 = 0.0;
    double y0 = 0.0;
    double a = std::numbers::pi / 4.0;
    double b = std::numbers::pi / 6.0;
    int p = 5;
    double beta_minus = 1.0;
    double beta_plus = 10.0;
    double t_final = 1.0;

    double r(double x, double y) const {
        const double dx = (x - x0) / a, dy = (y - y0) / b;
        return std::sqrt(dx * dx + dy * dy);
    }

    Side side(double x, double y) const { return r(x, y) < 1.0 ? Side::Minus : Side::Plus; }

    double beta(Side s) const { return s == Side::Minus ? beta_minus : beta_plus; }

    InterfaceCurve curve() const {
        return InterfaceCurve::ellipse(x0, y0, a, b);
    }

    double exact_u(double x, double y, double t) const {
        return exact_u_side(x, y, t, side(x, y));
    }

    double exact_u_side(double x, double y, double t, Side s) const {
        const double rp = std::pow(r(x, y), p);
        if (s == Side::Minus) return rp / beta_minus * std::exp(t);
        return (rp / beta_plus - 1.0 / beta_plus + 1.0 / beta_minus) * std::exp(t);
    }

    Point2 exact_grad_u(double x, double y, double t) const {
        return exact_grad_u_side(x, y, t, side(x, y));
    }

    Point2 exact_grad_u_side(double x, double y, double t, Side s) const {
        const double rv = r(x, y);
        if (rv == 0.0) return {0.0, 0.0};
        const double scale = p * std::pow(rv, p - 2) * std::exp(t) / beta(s);
        return {scale * (x - x0) / (a * a), scale * (y - y0) / (b * b)};
    }

    /// Source term of u_t - div(beta grad u) for the exact solution.
    double source_f(double x, double y, double t) const { return source_f_side(x, y, t, side(x, y)); }

    double source_f_side(double x, double y, double t, Side s) const {
        const double rv = r(x, y);
        const double dx = x - x0, dy = y - y0;
        double lap = 0.0;  // Laplacian of r^p; every term carries a positive power of r
        if (rv > 0.0)
            lap = p * (p - 2) * std::pow(rv, p - 4) * (dx * dx / (a * a * a * a) + dy * dy / (b * b * b * b)) +
                  p * std::pow(rv, p - 2) * (1.0 / (a * a) + 1.0 / (b * b));
        const double rp = std::pow(rv, p);
        if (s == Side::Minus) return std::exp(t) * (rp / beta_minus - lap);
        return std::exp(t) * (rp / beta_plus + 1.0 / beta_minus - 1.0 / beta_plus - lap);
    }

    double boundary_g(double x, double y, double t) const { return exact_u(x, y, t); }

    double initial_u0(double x, double y) const { return exact_u(x, y, 0.0); }

    /// Point on the interface at parameter angle theta.
    Point2 interface_point(double theta) const {
        return {x0 + a * std::cos(theta), y0 + b * std::sin(theta)};
    }

    /// Unit normal of the interface (normalized gradient of the level set).
    Point2 interface_normal(double x, double y) const {
        Point2 g{(x - x0) / (a * a), (y - y0) / (b * b)};
        const double n = norm(g);
        return {g.x / n, g.y / n};
    }
};

}  // namespace ppife
