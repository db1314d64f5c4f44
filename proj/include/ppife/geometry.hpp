#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppife {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2() = default;
    Point2(double x_, double y_) : x(x_), y(y_) {}

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

struct Segment2 {
    Point2 a;
    Point2 b;

    double length() const { return distance(a, b); }
    Point2 at(double t) const { return a + (b - a) * t; }
    Point2 midpoint() const { return at(0.5); }
};

/// Axis-aligned rectangle given by its lower-left corner and extents.
struct AxisRect {
    Point2 origin;
    double width = 0.0;
    double height = 0.0;

    AxisRect() = default;
    AxisRect(Point2 o, double w, double h) : origin(o), width(w), height(h) {
        if (w <= 0.0 || h <= 0.0) throw std::invalid_argument("AxisRect: extents must be positive");
    }

    /// Corners counterclockwise from lower-left: 0=(x0,y0), 1=(x1,y0), 2=(x1,y1), 3=(x0,y1).
    Point2 corner(int k) const {
        switch (k & 3) {
            case 0: return origin;
            case 1: return {origin.x + width, origin.y};
            case 2: return {origin.x + width, origin.y + height};
            default: return {origin.x, origin.y + height};
        }
    }
    /// Edge k runs from corner(k) to corner(k+1).
    Segment2 edge(int k) const { return {corner(k), corner(k + 1)}; }
    Point2 center() const { return {origin.x + 0.5 * width, origin.y + 0.5 * height}; }
    double area() const { return width * height; }
};

enum class Region { Minus, Plus, OnInterface };
/// Side tag for the two material subdomains.
enum class Side { Minus, Plus };

inline const char* to_string(Side s) { return s == Side::Minus ? "-" : "+"; }

/// Level-set description of the interface curve: negative in the minus
/// subdomain, positive in the plus subdomain, zero on the curve.
class InterfaceCurve {
  public:
    explicit InterfaceCurve(std::function<double(double, double)> level_set)
        : level_set_(std::move(level_set)) {}

    /// Ellipse centered at (x0, y0) with semi-axes a, b; level set r(x,y) - 1.
    static InterfaceCurve ellipse(double x0, double y0, double a, double b) {
        return InterfaceCurve([=](double x, double y) {
            double dx = (x - x0) / a;
            double dy = (y - y0) / b;
            return std::sqrt(dx * dx + dy * dy) - 1.0;
        });
    }

    double level(double x, double y) const { return level_set_(x, y); }
    double level(const Point2& p) const { return level_set_(p.x, p.y); }

  private:
    std::function<double(double, double)> level_set_;
};

class MultipleCrossings : public std::runtime_error {
  public:
    explicit MultipleCrossings(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateCut : public std::runtime_error {
  public:
    explicit DegenerateCut(const std::string& what) : std::runtime_error(what) {}
};

inline Region classify_point(const InterfaceCurve& curve, const Point2& p, double tol) {
    if (tol < 0.0) throw std::invalid_argument("classify_point: tol must be nonnegative");
    double v = curve.level(p);
    if (std::abs(v) <= tol) return Region::OnInterface;
    return v < 0.0 ? Region::Minus : Region::Plus;
}

inline double polygon_area(const std::vector<Point2>& poly) {
    double s = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point2& p = poly[k];
        const Point2& q = poly[(k + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

inline Point2 polygon_centroid(const std::vector<Point2>& poly) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point2& p = poly[k];
        const Point2& q = poly[(k + 1) % n];
        double w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    a *= 0.5;
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

/// Chord-split of an interface rectangle: crossing points D, E on the
/// boundary, the chord DE, and the two sub-polygons with fan triangulations.
struct CutConfiguration {
    Point2 D;
    Point2 E;
    Segment2 chord;
    std::vector<Point2> minus_polygon;  // counterclockwise
    std::vector<Point2> plus_polygon;   // counterclockwise
    Point2 chord_normal;                // unit, oriented from minus toward plus
    double chord_offset = 0.0;          // chord_normal . D

    /// Signed distance to the chord line; negative on the minus side.
    double chord_distance(const Point2& p) const { return dot(chord_normal, p) - chord_offset; }

    /// Branch selection along the chord split; ties go to the minus side.
    Side chord_side(const Point2& p) const {
        return chord_distance(p) <= 0.0 ? Side::Minus : Side::Plus;
    }

    /// Fan triangulation (apex at the first polygon vertex).
    static std::vector<std::array<Point2, 3>> fan(const std::vector<Point2>& poly) {
        std::vector<std::array<Point2, 3>> tris;
        for (std::size_t k = 1; k + 1 < poly.size(); ++k)
            tris.push_back({poly[0], poly[k], poly[k + 1]});
        return tris;
    }
};

/// Root of the level set along a segment whose endpoint signs differ.
/// Returns none when both endpoints are on the same side (or on the curve).
/// Throws MultipleCrossings when interior sampling detects more than one
/// sign change, i.e. the mesh under-resolves the curve.
inline std::optional<Point2> segment_intersection(const InterfaceCurve& curve,
                                                  const Segment2& seg, double tol) {
    (void)tol;
    const double f0 = curve.level(seg.a);
    const double f1 = curve.level(seg.b);

    int changes = 0;
    double prev = f0;
    for (int k = 1; k <= 16; ++k) {
        double f = curve.level(seg.at(k / 17.0));
        if (prev != 0.0 && f != 0.0 && (prev < 0.0) != (f < 0.0)) ++changes;
        if (f != 0.0) prev = f;
    }
    if (f1 != 0.0 && prev != 0.0 && (prev < 0.0) != (f1 < 0.0)) ++changes;
    if (changes > 1)
        throw MultipleCrossings("segment_intersection: more than one sign change along segment");

    if (f0 == 0.0 || f1 == 0.0 || (f0 < 0.0) == (f1 < 0.0)) return std::nullopt;

    // Bisection to |level| <= 1e-13 and interval <= 1e-13 * |seg|.
    double lo = 0.0, hi = 1.0;
    bool lo_neg = f0 < 0.0;
    double mid = 0.5;
    for (int it = 0; it < 60; ++it) {
        mid = 0.5 * (lo + hi);
        double fm = curve.level(seg.at(mid));
        if (fm == 0.0) break;
        if ((fm < 0.0) == lo_neg)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-13 && std::abs(fm) <= 1e-13) break;
    }
    return seg.at(0.5 * (lo + hi));
}

namespace detail {

/// Walk the rectangle boundary counterclockwise, inserting the crossing
/// points, and return the closed vertex loop plus the loop indices of the
/// two crossings.
inline std::vector<Point2> boundary_loop(const AxisRect& rect, const Point2& D, const Point2& E,
                                         std::size_t& iD, std::size_t& iE) {
    std::vector<Point2> loop;
    const double snap = 1e-10 * std::max(rect.width, rect.height);
    auto push_unique = [&](const Point2& p) {
        if (!loop.empty() && distance(loop.back(), p) < snap) return;
        loop.push_back(p);
    };
    auto on_edge = [&](const Point2& p, int k) {
        Segment2 e = rect.edge(k);
        Point2 d = e.b - e.a;
        double t = dot(p - e.a, d) / dot(d, d);
        if (t < -1e-12 || t > 1.0 + 1e-12) return false;
        return distance(p, e.at(std::clamp(t, 0.0, 1.0))) < snap;
    };
    for (int k = 0; k < 4; ++k) {
        push_unique(rect.corner(k));
        // crossings on this edge, ordered along it
        std::vector<Point2> here;
        for (const Point2& p : {D, E})
            if (on_edge(p, k)) here.push_back(p);
        if (here.size() == 2) {
            Point2 d = rect.edge(k).b - rect.edge(k).a;
            if (dot(here[1] - here[0], d) < 0.0) std::swap(here[0], here[1]);
        }
        for (const Point2& p : here) {
            // a crossing sitting at the next corner is inserted there instead
            if (distance(p, rect.corner(k + 1)) < snap) continue;
            push_unique(p);
        }
    }
    if (loop.size() > 1 && distance(loop.front(), loop.back()) < snap) loop.pop_back();
    iD = iE = loop.size();
    for (std::size_t k = 0; k < loop.size(); ++k) {
        if (distance(loop[k], D) < snap && iD == loop.size()) iD = k;
        if (distance(loop[k], E) < snap && iE == loop.size()) iE = k;
    }
    return loop;
}

}  // namespace detail

/// Chord-split of a rectangle by the interface. Returns none when the
/// rectangle is not cut (all vertices one side, tangential grazing, or a
/// degenerate cut that leaves one side with negligible area).
inline std::optional<CutConfiguration> cut_rectangle(const InterfaceCurve& curve,
                                                     const AxisRect& rect, double tol) {
    const double h = std::max(rect.width, rect.height);
    const double tol_snap = 1e-10 * h;

    std::array<double, 4> f{};
    for (int k = 0; k < 4; ++k) f[k] = curve.level(rect.corner(k));

    // candidate crossing points: strict sign changes on edges, plus corners
    // lying on the curve within tol
    std::vector<Point2> cand;
    for (int k = 0; k < 4; ++k) {
        if (std::abs(f[k]) <= tol) cand.push_back(rect.corner(k));
        double fa = f[k], fb = f[(k + 1) % 4];
        if (fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0)) {
            auto p = segment_intersection(curve, rect.edge(k), tol);
            if (p) cand.push_back(*p);
        }
    }
    // snap near-corner crossings to the corner, then drop duplicates
    for (Point2& p : cand)
        for (int k = 0; k < 4; ++k)
            if (distance(p, rect.corner(k)) < tol_snap) p = rect.corner(k);
    std::vector<Point2> pts;
    for (const Point2& p : cand) {
        bool dup = false;
        for (const Point2& q : pts)
            if (distance(p, q) < tol_snap) dup = true;
        if (!dup) pts.push_back(p);
    }

    bool mixed = false;
    {
        bool has_neg = false, has_pos = false;
        for (double v : f) {
            if (v < -tol) has_neg = true;
            if (v > tol) has_pos = true;
        }
        mixed = has_neg && has_pos;
    }
    if (pts.size() < 2) {
        if (mixed)
            throw DegenerateCut("cut_rectangle: mixed vertex signs but fewer than two crossings");
        return std::nullopt;
    }
    if (pts.size() > 2)
        throw MultipleCrossings("cut_rectangle: more than two boundary crossings");

    CutConfiguration cut;
    cut.D = pts[0];
    cut.E = pts[1];
    cut.chord = {cut.D, cut.E};

    std::size_t iD = 0, iE = 0;
    std::vector<Point2> loop = detail::boundary_loop(rect, cut.D, cut.E, iD, iE);
    if (iD >= loop.size() || iE >= loop.size() || iD == iE)
        throw DegenerateCut("cut_rectangle: crossings collapse after snapping");

    auto walk = [&](std::size_t from, std::size_t to) {
        std::vector<Point2> poly;
        for (std::size_t k = from;; k = (k + 1) % loop.size()) {
            poly.push_back(loop[k]);
            if (k == to) break;
        }
        return poly;
    };
    std::vector<Point2> polyA = walk(iD, iE);
    std::vector<Point2> polyB = walk(iE, iD);

    double areaA = polygon_area(polyA);
    double areaB = polygon_area(polyB);
    if (std::min(areaA, areaB) < 1e-12 * rect.area()) return std::nullopt;

    double sideA = curve.level(polygon_centroid(polyA));
    if (sideA < 0.0) {
        cut.minus_polygon = std::move(polyA);
        cut.plus_polygon = std::move(polyB);
    } else {
        cut.minus_polygon = std::move(polyB);
        cut.plus_polygon = std::move(polyA);
    }

    Point2 t = cut.E - cut.D;
    Point2 n{t.y, -t.x};
    double nn = norm(n);
    n = {n.x / nn, n.y / nn};
    // orient from minus toward plus
    if (dot(n, polygon_centroid(cut.minus_polygon) - cut.D) > 0.0) n = {-n.x, -n.y};
    cut.chord_normal = n;
    cut.chord_offset = dot(n, cut.D);
    return cut;
}

}  // namespace ppife
