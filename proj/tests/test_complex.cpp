#include <catch2/catch_amalgamated.hpp>

#include "collapsar/simplicial_complex.hpp"

using namespace collapsar;

TEST_CASE("facet construction closes downward and tracks facets") {
    auto c = SimplicialComplex::from_facets({{0, 1, 2}});
    CHECK(c.size() == 7);
    CHECK(c.dim() == 2);
    CHECK(c.has_face({0, 1}));
    CHECK(c.has_face({2}));
    CHECK(c.facets().size() == 1);

    // facet absorption: {0,1} is not a facet of the triangle
    auto d = SimplicialComplex::from_facets({{0, 1, 2}, {0, 1}});
    CHECK(d.facets().size() == 1);

    CHECK_THROWS_AS(SimplicialComplex::from_faces({{0, 1}}), invalid_input_error);
}

TEST_CASE("star examples") {
    auto tri_boundary = simplex_boundary(2);
    auto st = tri_boundary.star({0});
    // the two edges at 0 and their faces
    CHECK(st.facets().size() == 2);
    CHECK(st.has_face({0, 1}));
    CHECK(st.has_face({0, 2}));
    CHECK(!st.has_face({1, 2}));

    auto full = full_simplex(3);
    for (const Face& f : {Face{0}, Face{1, 2}, Face{0, 1, 2, 3}})
        CHECK(full.star(f) == full);

    // disjoint union: star stays in its component
    auto two = SimplicialComplex::from_facets({{0, 1, 2}, {5, 6}});
    auto s5 = two.star({5});
    CHECK(s5.has_face({5, 6}));
    CHECK(!s5.has_face({0}));

    CHECK_THROWS_AS(two.star({9}), missing_face_error);
}

TEST_CASE("link examples") {
    auto tri_boundary = simplex_boundary(2);
    auto lk = tri_boundary.link({0});
    CHECK(lk.size() == 2);
    CHECK(lk.dim() == 0);
    CHECK(lk.has_face({1}));
    CHECK(lk.has_face({2}));

    auto tet_boundary = simplex_boundary(3);
    auto lk_edge = tet_boundary.link({0, 1});
    CHECK(lk_edge.size() == 2);
    CHECK(lk_edge.has_face({2}));
    CHECK(lk_edge.has_face({3}));

    // cone point link recovers the base
    auto base = SimplicialComplex::from_facets({{0, 1}, {1, 2}, {3}});
    auto coned = cone(base, 99);
    CHECK(coned.link({99}) == base);
}

TEST_CASE("star contains the closure, link matches its second definition") {
    auto c = SimplicialComplex::from_facets({{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {4, 5}});
    for (const auto& f : c.faces()) {
        auto st = c.star(f);
        // closure of f inside star
        auto closure = SimplicialComplex::from_facets({f});
        for (const auto& g : closure.faces()) CHECK(st.has_face(g));

        // cross-check: link = { g : g cap f = empty, g cup f in c }
        auto lk = c.link(f);
        std::set<Face> expect;
        for (const auto& g : c.faces())
            if (!faces_intersect(g, f) && c.has_face(face_union(g, f))) expect.insert(g);
        CHECK(lk.faces() == expect);
    }
}

TEST_CASE("barycentric subdivision counts and Euler invariance") {
    auto edge = SimplicialComplex::from_facets({{0, 1}});
    auto sd_edge = barycentric_subdivision(edge);
    CHECK(sd_edge.vertices().size() == 3);
    CHECK(sd_edge.faces_of_dim(1).size() == 2);

    auto tri = full_simplex(2);
    auto sd_tri = barycentric_subdivision(tri);
    CHECK(sd_tri.vertices().size() == 7);
    CHECK(sd_tri.faces_of_dim(2).size() == 6);

    for (const auto& c : {simplex_boundary(3), full_simplex(3),
                          SimplicialComplex::from_facets({{0, 1, 2}, {2, 3}, {4}})}) {
        CHECK(barycentric_subdivision(c).euler_characteristic() == c.euler_characteristic());
    }
}

TEST_CASE("face poset is acyclic under strict inclusion") {
    auto c = barycentric_subdivision(simplex_boundary(3));
    // strict inclusion must strictly increase size, so any chain terminates;
    // verify antisymmetry explicitly on all pairs
    std::vector<Face> fs(c.faces().begin(), c.faces().end());
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = 0; j < fs.size(); ++j) {
            if (i == j) continue;
            bool ij = face_subset(fs[i], fs[j]);
            bool ji = face_subset(fs[j], fs[i]);
            CHECK(!(ij && ji));
        }
}

TEST_CASE("connected components") {
    auto c = SimplicialComplex::from_facets({{0, 1}, {1, 2}, {4, 5}, {7}});
    CHECK(c.connected_components() == 3);
    CHECK(full_simplex(4).connected_components() == 1);
}
