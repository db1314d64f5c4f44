#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "ppife/mesh.hpp"

using namespace ppife;

namespace {
const AxisRect kUnit({0.0, 0.0}, 1.0, 1.0);

InterfaceCurve test_ellipse() {
    return InterfaceCurve::ellipse(0.0, 0.0, std::numbers::pi / 4.0, std::numbers::pi / 6.0);
}

// brute-force interface-element oracle: mixed level-set signs over a dense
// per-element sample grid
bool oracle_is_interface(const InterfaceCurve& curve, const AxisRect& rect) {
    bool neg = false, pos = false;
    for (int i = 0; i <= 100; ++i)
        for (int j = 0; j <= 100; ++j) {
            double f = curve.level(rect.origin.x + rect.width * i / 100.0,
                                   rect.origin.y + rect.height * j / 100.0);
            neg = neg || f < -1e-13;
            pos = pos || f > 1e-13;
        }
    return neg && pos;
}
}  // namespace

TEST_CASE("build_mesh entity counts", "[mesh]") {
    CartesianMesh m2 = build_mesh(kUnit, 2);
    CHECK(m2.n_vertices() == 9);
    CHECK(m2.n_elements() == 4);
    CHECK(m2.n_edges() == 12);

    CartesianMesh m10 = build_mesh(kUnit, 10);
    CHECK(m10.n_vertices() == 121);
    CHECK(m10.n_elements() == 100);
    CHECK(m10.n_edges() == 220);

    CHECK_THROWS_AS(build_mesh(kUnit, 1), std::invalid_argument);
}

TEST_CASE("center element of a 3x3 mesh has four interior edges", "[mesh]") {
    CartesianMesh m = build_mesh(kUnit, 3);
    for (int ib : m.element_edges(4)) {
        const Edge& e = m.edge(ib);
        CHECK_FALSE(e.is_boundary());
        CHECK(((e.k1 == 4) != (e.k2 == 4)));
    }
}

TEST_CASE("edge adjacency and normals are consistent", "[mesh]") {
    CartesianMesh m = build_mesh(kUnit, 4);
    std::vector<int> visits(m.n_edges(), 0);
    for (int ie = 0; ie < m.n_elements(); ++ie)
        for (int ib : m.element_edges(ie)) {
            const Edge& e = m.edge(ib);
            CHECK((e.k1 == ie || e.k2 == ie));
            ++visits[ib];
        }
    for (int ib = 0; ib < m.n_edges(); ++ib) {
        const Edge& e = m.edge(ib);
        CHECK(visits[ib] == (e.is_boundary() ? 1 : 2));
        CHECK(std::abs(e.nx * e.nx + e.ny * e.ny - 1.0) < 1e-15);
        CHECK((e.nx == 0.0 || e.ny == 0.0));
        if (!e.is_boundary()) {
            CHECK(e.k1 < e.k2);
            // normal points from k1 into k2
            Point2 c1 = m.element_rect(e.k1).center();
            Point2 c2 = m.element_rect(e.k2).center();
            CHECK(dot({e.nx, e.ny}, c2 - c1) > 0.0);
        }
    }
}

TEST_CASE("classification of a mesh-aligned line yields no interface entities", "[mesh]") {
    InterfaceCurve line([](double x, double) { return x - 0.5; });
    CartesianMesh m = build_mesh(kUnit, 2);
    MeshClassification cls = classify_mesh(m, line);
    CHECK(cls.interface_elements.empty());
    CHECK(cls.interior_interface_edges.empty());
    CHECK(cls.element_side[0] == Side::Minus);
    CHECK(cls.element_side[1] == Side::Plus);
}

TEST_CASE("classification of an offset line", "[mesh]") {
    InterfaceCurve line([](double x, double) { return x - 0.3; });
    CartesianMesh m = build_mesh(kUnit, 2);
    MeshClassification cls = classify_mesh(m, line);
    REQUIRE(cls.interface_elements == std::vector<int>{0, 2});
    REQUIRE(cls.interior_interface_edges.size() == 1);
    const Edge& e = m.edge(cls.interior_interface_edges[0]);
    CHECK(e.k1 == 0);
    CHECK(e.k2 == 2);

    // split point agrees with the D/E points of both adjacent cuts
    const Point2 split = *cls.edge_split[cls.interior_interface_edges[0]];
    for (int ie : {0, 2}) {
        const CutConfiguration& cut = *cls.element_cut[ie];
        const double d = std::min(distance(split, cut.D), distance(split, cut.E));
        CHECK(d <= 1e-12);
    }
}

TEST_CASE("interface-element count matches the brute-force oracle", "[mesh]") {
    InterfaceCurve c = test_ellipse();
    CartesianMesh m = build_mesh(kUnit, 10);
    MeshClassification cls = classify_mesh(m, c);
    int oracle = 0;
    for (int ie = 0; ie < m.n_elements(); ++ie)
        if (oracle_is_interface(c, m.element_rect(ie))) ++oracle;
    CHECK(static_cast<int>(cls.interface_elements.size()) == oracle);
}

TEST_CASE("interface edges have interface neighbors on both sides", "[mesh]") {
    InterfaceCurve c = test_ellipse();
    CartesianMesh m = build_mesh(kUnit, 20);
    MeshClassification cls = classify_mesh(m, c);
    CHECK_FALSE(cls.interior_interface_edges.empty());
    for (int ib : cls.interior_interface_edges) {
        const Edge& e = m.edge(ib);
        CHECK(cls.is_interface_element(e.k1));
        CHECK(cls.is_interface_element(e.k2));
        const Point2 split = *cls.edge_split[ib];
        for (int ke : {e.k1, e.k2}) {
            const CutConfiguration& cut = *cls.element_cut[ke];
            CHECK(std::min(distance(split, cut.D), distance(split, cut.E)) <= 1e-12);
        }
    }
}

TEST_CASE("boundary edges crossed by the interface stay boundary", "[mesh]") {
    InterfaceCurve c = test_ellipse();
    CartesianMesh m = build_mesh(kUnit, 10);
    MeshClassification cls = classify_mesh(m, c);
    // the quarter ellipse exits through the bottom edge of element [0.7,0.8]x[0,0.1]
    int crossed_boundary = 0;
    for (int ib : cls.boundary_edges) {
        const Edge& e = m.edge(ib);
        Segment2 seg{m.vertex(e.v0), m.vertex(e.v1)};
        if (segment_intersection(c, seg, 1e-12).has_value()) ++crossed_boundary;
    }
    CHECK(crossed_boundary == 2);  // one on the bottom boundary, one on the left
    for (int ib : cls.interior_interface_edges) CHECK_FALSE(m.edge(ib).is_boundary());
}

TEST_CASE("interface element count scales linearly under refinement", "[mesh]") {
    InterfaceCurve c = test_ellipse();
    std::vector<std::size_t> counts;
    for (int n : {10, 20, 40}) {
        MeshClassification cls = classify_mesh(build_mesh(kUnit, n), c);
        counts.push_back(cls.interface_elements.size());
    }
    for (std::size_t k = 1; k < counts.size(); ++k) {
        const double ratio = double(counts[k]) / double(counts[k - 1]);
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 2.5);
    }
}

TEST_CASE("too coarse meshes are reported with the offending entity", "[mesh]") {
    // ellipse thin enough to enter and leave through one element edge
    InterfaceCurve thin = InterfaceCurve::ellipse(0.52, 0.52, 0.24, 0.013);
    CartesianMesh m = build_mesh(kUnit, 2);
    CHECK_THROWS_AS(classify_mesh(m, thin), MeshTooCoarse);
}

TEST_CASE("mesh dump format", "[mesh]") {
    CartesianMesh m = build_mesh(kUnit, 2);
    std::ostringstream os;
    dump_mesh(m, os);
    std::istringstream is(os.str());
    std::string line;
    int nv = 0, ne = 0, nb = 0;
    while (std::getline(is, line)) {
        REQUIRE_FALSE(line.empty());
        if (line[0] == 'V') ++nv;
        else if (line[0] == 'E') ++ne;
        else if (line[0] == 'B') ++nb;
    }
    CHECK(nv == 9);
    CHECK(ne == 4);
    CHECK(nb == 12);
}
