#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppife/geometry.hpp"

namespace ppife {

/// Mesh edge with adjacency. For interior edges the unit normal points from
/// element k1 (the smaller index) into k2; boundary edges carry the outward
/// normal and k2 = -1.
struct Edge {
    int v0 = -1;
    int v1 = -1;
    int k1 = -1;
    int k2 = -1;
    double nx = 0.0;
    double ny = 0.0;
    double length = 0.0;

    bool is_boundary() const { return k2 < 0; }
};

/// Uniform Cartesian mesh of a square domain: n_side x n_side square
/// elements, row-major numbering from the lower-left corner.
class CartesianMesh {
  public:
    CartesianMesh(AxisRect domain, int n_side) : domain_(domain), n_side_(n_side) {
        if (n_side < 2) throw std::invalid_argument("build_mesh: n_side must be >= 2");
        if (std::abs(domain.width - domain.height) > 1e-14 * domain.width)
            throw std::invalid_argument("build_mesh: domain must be square");
        h_ = domain.width / n_side;
        build_edges();
    }

    const AxisRect& domain() const { return domain_; }
    int n_side() const { return n_side_; }
    double h() const { return h_; }

    int n_vertices() const { return (n_side_ + 1) * (n_side_ + 1); }
    int n_elements() const { return n_side_ * n_side_; }
    int n_edges() const { return static_cast<int>(edges_.size()); }

    Point2 vertex(int iv) const {
        int n1 = n_side_ + 1;
        return {domain_.origin.x + (iv % n1) * h_, domain_.origin.y + (iv / n1) * h_};
    }

    /// Element vertex indices, counterclockwise from the lower-left corner.
    std::array<int, 4> element_vertices(int ie) const {
        int i = ie % n_side_, j = ie / n_side_, n1 = n_side_ + 1;
        return {j * n1 + i, j * n1 + i + 1, (j + 1) * n1 + i + 1, (j + 1) * n1 + i};
    }

    AxisRect element_rect(int ie) const {
        int i = ie % n_side_, j = ie / n_side_;
        return AxisRect({domain_.origin.x + i * h_, domain_.origin.y + j * h_}, h_, h_);
    }

    const Edge& edge(int ib) const { return edges_[ib]; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Element edge indices: bottom, right, top, left.
    std::array<int, 4> element_edges(int ie) const {
        const int i = ie % n_side_, j = ie / n_side_;
        const int vbase = n_side_ * (n_side_ + 1);
        return {j * n_side_ + i, vbase + j * (n_side_ + 1) + i + 1, (j + 1) * n_side_ + i,
                vbase + j * (n_side_ + 1) + i};
    }

    bool is_boundary_vertex(int iv) const {
        int n1 = n_side_ + 1, i = iv % n1, j = iv / n1;
        return i == 0 || i == n_side_ || j == 0 || j == n_side_;
    }

    std::vector<int> boundary_vertices() const {
        std::vector<int> out;
        for (int iv = 0; iv < n_vertices(); ++iv)
            if (is_boundary_vertex(iv)) out.push_back(iv);
        return out;
    }

  private:
    void build_edges() {
        const int N = n_side_, n1 = N + 1;
        edges_.reserve(2 * N * n1);
        // horizontal edges first, then vertical, both row-major
        for (int j = 0; j <= N; ++j) {
            for (int i = 0; i < N; ++i) {
                Edge e;
                e.v0 = j * n1 + i;
                e.v1 = j * n1 + i + 1;
                e.length = h_;
                int below = (j > 0) ? (j - 1) * N + i : -1;
                int above = (j < N) ? j * N + i : -1;
                if (below >= 0 && above >= 0) {
                    e.k1 = below;  // smaller index
                    e.k2 = above;
                    e.ny = 1.0;
                } else if (below >= 0) {
                    e.k1 = below;
                    e.ny = 1.0;  // outward at the top boundary
                } else {
                    e.k1 = above;
                    e.ny = -1.0;  // outward at the bottom boundary
                }
                edges_.push_back(e);
            }
        }
        for (int j = 0; j < N; ++j) {
            for (int i = 0; i <= N; ++i) {
                Edge e;
                e.v0 = j * n1 + i;
                e.v1 = (j + 1) * n1 + i;
                e.length = h_;
                int left = (i > 0) ? j * N + i - 1 : -1;
                int right = (i < N) ? j * N + i : -1;
                if (left >= 0 && right >= 0) {
                    e.k1 = left;  // smaller index
                    e.k2 = right;
                    e.nx = 1.0;
                } else if (left >= 0) {
                    e.k1 = left;
                    e.nx = 1.0;  // outward at the right boundary
                } else {
                    e.k1 = right;
                    e.nx = -1.0;  // outward at the left boundary
                }
                edges_.push_back(e);
            }
        }
    }

    AxisRect domain_;
    int n_side_;
    double h_;
    std::vector<Edge> edges_;
};

inline CartesianMesh build_mesh(const AxisRect& domain, int n_side) {
    return CartesianMesh(domain, n_side);
}

class MeshTooCoarse : public std::runtime_error {
  public:
    MeshTooCoarse(int entity_id, const std::string& what)
        : std::runtime_error(what), entity_id(entity_id) {}
    int entity_id;
};

/// Interface-aware classification of elements and edges.
struct MeshClassification {
    std::vector<std::optional<CutConfiguration>> element_cut;  // per element
    std::vector<Side> element_side;                            // per element; majority side for cut ones
    std::vector<int> interface_elements;                       // sorted element ids
    std::vector<std::optional<Point2>> edge_split;             // per edge, interior crossings only
    std::vector<int> interior_interface_edges;                 // sorted edge ids
    std::vector<int> interior_noninterface_edges;
    std::vector<int> boundary_edges;
    std::vector<int> boundary_vertices;

    bool is_interface_element(int ie) const { return element_cut[ie].has_value(); }
};

inline MeshClassification classify_mesh(const CartesianMesh& mesh, const InterfaceCurve& curve,
                                        double tol = 1e-12) {
    MeshClassification cls;
    const int ne = mesh.n_elements();
    cls.element_cut.resize(ne);
    cls.element_side.resize(ne, Side::Minus);

    for (int ie = 0; ie < ne; ++ie) {
        AxisRect rect = mesh.element_rect(ie);
        std::optional<CutConfiguration> cut;
        try {
            cut = cut_rectangle(curve, rect, tol);
        } catch (const MultipleCrossings& e) {
            throw MeshTooCoarse(ie, "classify_mesh: element " + std::to_string(ie) + ": " + e.what());
        }
        if (cut) {
            cls.element_cut[ie] = std::move(*cut);
            cls.interface_elements.push_back(ie);
        }
        // majority vertex vote, centroid sign as tie-break
        int neg = 0, pos = 0;
        for (int v : mesh.element_vertices(ie)) {
            double f = curve.level(mesh.vertex(v));
            if (f < -tol) ++neg;
            else if (f > tol) ++pos;
        }
        if (neg != pos)
            cls.element_side[ie] = neg > pos ? Side::Minus : Side::Plus;
        else
            cls.element_side[ie] = curve.level(rect.center()) < 0.0 ? Side::Minus : Side::Plus;
    }

    cls.edge_split.resize(mesh.n_edges());
    const double snap = 1e-10 * mesh.h();
    for (int ib = 0; ib < mesh.n_edges(); ++ib) {
        const Edge& e = mesh.edge(ib);
        Segment2 seg{mesh.vertex(e.v0), mesh.vertex(e.v1)};
        std::optional<Point2> split;
        try {
            split = segment_intersection(curve, seg, tol);
        } catch (const MultipleCrossings& ex) {
            throw MeshTooCoarse(ib, "classify_mesh: edge " + std::to_string(ib) + ": " + ex.what());
        }
        if (e.is_boundary()) {
            cls.boundary_edges.push_back(ib);
            continue;
        }
        bool interior_crossing = split && distance(*split, seg.a) > snap &&
                                 distance(*split, seg.b) > snap;
        if (interior_crossing && cls.is_interface_element(e.k1) && cls.is_interface_element(e.k2)) {
            cls.edge_split[ib] = *split;
            cls.interior_interface_edges.push_back(ib);
        } else {
            cls.interior_noninterface_edges.push_back(ib);
        }
    }
    cls.boundary_vertices = mesh.boundary_vertices();
    return cls;
}

/// Debug dump: `V i x y`, `E i v0 v1 v2 v3`, `B i v0 v1 k1 k2 nx ny`.
inline void dump_mesh(const CartesianMesh& mesh, std::ostream& os) {
    char buf[160];
    for (int iv = 0; iv < mesh.n_vertices(); ++iv) {
        Point2 p = mesh.vertex(iv);
        std::snprintf(buf, sizeof buf, "V %d %.17g %.17g\n", iv, p.x, p.y);
        os << buf;
    }
    for (int ie = 0; ie < mesh.n_elements(); ++ie) {
        auto v = mesh.element_vertices(ie);
        std::snprintf(buf, sizeof buf, "E %d %d %d %d %d\n", ie, v[0], v[1], v[2], v[3]);
        os << buf;
    }
    for (int ib = 0; ib < mesh.n_edges(); ++ib) {
        const Edge& e = mesh.edge(ib);
        std::snprintf(buf, sizeof buf, "B %d %d %d %d %d %.17g %.17g\n", ib, e.v0, e.v1, e.k1,
                      e.k2, e.nx, e.ny);
        os << buf;
    }
}

}  // namespace ppife
