#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ppife/geometry.hpp"
#include "ppife/mesh.hpp"

namespace ppife {

/// Gauss rule on the unit segment [0,1].
struct SegmentRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// Symmetric rule on the reference triangle {x,y >= 0, x+y <= 1}; weights
/// sum to the reference area 1/2.
struct TriangleRule {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
};

/// Gauss-Legendre on [0,1]; n in {3, 5}, exact for degree 2n-1.
inline SegmentRule segment_rule(int n_points) {
    SegmentRule r;
    if (n_points == 3) {
        const double s = std::sqrt(3.0 / 5.0);
        r.points = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
        r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    } else if (n_points == 5) {
        const double s1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double s2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double w0 = 128.0 / 225.0;
        const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        r.points = {0.5 * (1.0 - s2), 0.5 * (1.0 - s1), 0.5, 0.5 * (1.0 + s1), 0.5 * (1.0 + s2)};
        r.weights = {0.5 * w2, 0.5 * w1, 0.5 * w0, 0.5 * w1, 0.5 * w2};
    } else {
        throw std::invalid_argument("segment_rule: supported point counts are 3 and 5");
    }
    return r;
}

namespace detail {

inline void add_orbit3(TriangleRule& r, double a, double w) {
    r.points.push_back({a, a});
    r.points.push_back({a, 1.0 - 2.0 * a});
    r.points.push_back({1.0 - 2.0 * a, a});
    r.weights.insert(r.weights.end(), 3, w);
}

inline void add_orbit6(TriangleRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b});
    r.points.push_back({b, a});
    r.points.push_back({a, c});
    r.points.push_back({c, a});
    r.points.push_back({b, c});
    r.points.push_back({c, b});
    r.weights.insert(r.weights.end(), 6, w);
}

}  // namespace detail

/// Symmetric positive-weight triangle rules: 3-point (degree 2), 6-point
/// (degree 4), 15-point (degree 7).
inline TriangleRule triangle_rule(int strength) {
    TriangleRule r;
    switch (strength) {
        case 2:
            detail::add_orbit3(r, 1.0 / 6.0, 1.0 / 6.0);
            break;
        case 4:
            detail::add_orbit3(r, 0.44594849091596478, 0.11169079483900567);
            detail::add_orbit3(r, 0.091576213509770785, 0.054975871827660998);
            break;
        case 7:
            detail::add_orbit3(r, 0.24325913983559375, 0.062696803724664935);
            detail::add_orbit6(r, 0.31864418984755255, 0.050714384307196061,
                               0.038153169170262791);
            detail::add_orbit6(r, 0.086636631341760223, 0.045720829846315994,
                               0.013831762300738086);
            break;
        default:
            throw std::invalid_argument("triangle_rule: supported strengths are 2, 4 and 7");
    }
    return r;
}

/// Quadrature points in global coordinates with measure-carrying weights and
/// a material side tag per point.
struct TaggedQuadrature {
    struct Pt {
        Point2 p;
        double w;
        Side side;
    };
    std::vector<Pt> points;

    double weight_sum() const {
        double s = 0.0;
        for (const Pt& q : points) s += q.w;
        return s;
    }
};

namespace detail {

inline void map_triangle(TaggedQuadrature& out, const TriangleRule& rule, const Point2& p0,
                         const Point2& p1, const Point2& p2, Side side) {
    const Point2 d1 = p1 - p0, d2 = p2 - p0;
    const double jac = std::abs(cross(d1, d2));  // = 2 * area
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double xi = rule.points[q][0], eta = rule.points[q][1];
        out.points.push_back({p0 + d1 * xi + d2 * eta, rule.weights[q] * jac, side});
    }
}

}  // namespace detail

/// Volume rule over one element. Non-interface elements get a tensor Gauss
/// rule (3x3 for strength 4, 5x5 for strength 7) with the element's single
/// tag; interface elements get mapped triangle rules over the fan
/// triangulations of the chord polygons, tagged by polygon side.
inline TaggedQuadrature element_quadrature(const CartesianMesh& mesh,
                                           const MeshClassification& cls, int element,
                                           int strength) {
    TaggedQuadrature out;
    const AxisRect rect = mesh.element_rect(element);
    if (!cls.is_interface_element(element)) {
        const SegmentRule g = segment_rule(strength >= 7 ? 5 : 3);
        const Side side = cls.element_side[element];
        for (std::size_t qx = 0; qx < g.points.size(); ++qx)
            for (std::size_t qy = 0; qy < g.points.size(); ++qy)
                out.points.push_back({{rect.origin.x + g.points[qx] * rect.width,
                                       rect.origin.y + g.points[qy] * rect.height},
                                      g.weights[qx] * g.weights[qy] * rect.area(),
                                      side});
        return out;
    }
    const CutConfiguration& cut = *cls.element_cut[element];
    const TriangleRule rule = triangle_rule(strength >= 7 ? 7 : 4);
    for (const auto& tri : CutConfiguration::fan(cut.minus_polygon))
        detail::map_triangle(out, rule, tri[0], tri[1], tri[2], Side::Minus);
    for (const auto& tri : CutConfiguration::fan(cut.plus_polygon))
        detail::map_triangle(out, rule, tri[0], tri[1], tri[2], Side::Plus);
    return out;
}

/// Gauss rule along an edge; a split point yields one sub-rule per side,
/// each tagged by the curve side of the sub-segment midpoint.
inline TaggedQuadrature edge_quadrature(const InterfaceCurve& curve, const Segment2& seg,
                                        const std::optional<Point2>& split, int n_points) {
    TaggedQuadrature out;
    const SegmentRule g = segment_rule(n_points);
    auto add = [&](const Point2& a, const Point2& b) {
        const double len = distance(a, b);
        if (len == 0.0) return;
        const Side side = curve.level(Segment2{a, b}.midpoint()) < 0.0 ? Side::Minus : Side::Plus;
        for (std::size_t q = 0; q < g.points.size(); ++q)
            out.points.push_back({a + (b - a) * g.points[q], g.weights[q] * len, side});
    };
    if (split) {
        add(seg.a, *split);
        add(*split, seg.b);
    } else {
        add(seg.a, seg.b);
    }
    return out;
}

}  // namespace ppife
