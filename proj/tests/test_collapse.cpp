#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "collapsar/collapse.hpp"
#include "collapsar/homology.hpp"
#include "support/corpus.hpp"

using namespace collapsar;

namespace {

// Test-side oracle: free pairs by direct enumeration over all face pairs.
std::vector<ElementaryCollapse> free_pairs_oracle(const SimplicialComplex& c) {
    std::vector<ElementaryCollapse> out;
    for (const auto& f : c.faces()) {
        std::vector<Face> cofaces;
        for (const auto& g : c.faces())
            if (f != g && face_subset(f, g)) cofaces.push_back(g);
        if (cofaces.size() == 1) out.push_back({f, cofaces[0]});
    }
    return out;
}

}  // namespace

TEST_CASE("free faces of the full 2-simplex are its three boundary edges") {
    auto c = full_simplex(2);
    auto pairs = free_faces(c);
    REQUIRE(pairs.size() == 3);
    for (const auto& p : pairs) {
        CHECK(p.free_face.size() == 2);
        CHECK(p.coface == Face{0, 1, 2});
    }
    CHECK(pairs == free_pairs_oracle(c));
}

TEST_CASE("dunce hat and bing house have no free faces") {
    auto dh = corpus::dunce_hat();
    CHECK(free_faces(dh).empty());
    CHECK(free_pairs_oracle(dh).empty());

    auto bh = corpus::bing_house();
    CHECK(free_faces(bh).empty());
    CHECK(free_pairs_oracle(bh).empty());
}

TEST_CASE("collapse_step removes exactly the pair") {
    auto c = full_simplex(2);
    auto next = collapse_step(c, {{0, 1}, {0, 1, 2}});
    CHECK(next.size() == 5);
    CHECK(next.facets().size() == 2);
    CHECK(next.has_face({0, 2}));
    CHECK(next.has_face({1, 2}));

    auto edge = SimplicialComplex::from_facets({{0, 1}});
    auto pt = collapse_step(edge, {{1}, {0, 1}});
    CHECK(pt.size() == 1);
    CHECK(pt.has_face({0}));

    CHECK_THROWS_AS(collapse_step(c, {{0}, {0, 1}}), stale_step_error);
    CHECK_THROWS_AS(collapse_step(c, {{0, 2}, {0, 1}}), stale_step_error);
}

TEST_CASE("homology is invariant under collapse steps") {
    auto c = corpus::grid_disk();
    auto before = reduced_homology(c);
    SimplicialComplex cur = c;
    for (int i = 0; i < 6 && cur.size() > 1; ++i) {
        auto pairs = free_faces(cur);
        REQUIRE(!pairs.empty());
        cur = collapse_step(cur, pairs.front());
        auto h = reduced_homology(cur);
        for (std::size_t k = 0; k < h.size(); ++k) CHECK(h[k] == before[k]);
    }
}

TEST_CASE("simplices collapse with the expected number of steps") {
    for (int n = 1; n <= 6; ++n) {
        auto c = full_simplex(n);
        auto res = find_collapse(c, GreedyRandomStrategy{7, 8});
        REQUIRE(res.outcome == SearchOutcome::Success);
        long expected = ((1L << (n + 1)) - 2) / 2;
        CHECK(static_cast<long>(res.certificate->steps.size()) == expected);
        CHECK(replay(c, *res.certificate).valid);
    }
}

TEST_CASE("exhaustive search proves the dunce hat non-collapsible at step 0") {
    auto res = find_collapse(corpus::dunce_hat(), ExhaustiveStrategy{});
    CHECK(res.outcome == SearchOutcome::NonCollapsible);
    CHECK(res.stats.states_explored <= 2);  // the root alone settles it

    auto res2 = find_collapse(corpus::bing_house(), ExhaustiveStrategy{});
    CHECK(res2.outcome == SearchOutcome::NonCollapsible);
}

TEST_CASE("greedy search reports NotFound on complexes with no free faces") {
    auto res = find_collapse(corpus::dunce_hat(), GreedyRandomStrategy{1, 4});
    CHECK(res.outcome == SearchOutcome::NotFound);
    CHECK(!res.certificate.has_value());
}

TEST_CASE("cones over corpus complexes collapse") {
    for (const auto& base :
         {corpus::dunce_hat(), corpus::grid_disk(), simplex_boundary(2), simplex_boundary(3)}) {
        auto coned = cone(base, 1000);
        auto res = find_collapse(coned, GreedyRandomStrategy{3, 16});
        REQUIRE(res.outcome == SearchOutcome::Success);
        CHECK(replay(coned, *res.certificate).valid);
    }
}

TEST_CASE("replay rejects reordered certificates") {
    auto c = full_simplex(2);
    auto res = find_collapse(c, GreedyRandomStrategy{5, 4});
    REQUIRE(res.outcome == SearchOutcome::Success);
    auto good = *res.certificate;
    REQUIRE(good.steps.size() == 3);
    CHECK(replay(c, good).valid);

    // First step removes (edge, triangle); the second step then collapses a
    // vertex into a boundary edge. Swapping them breaks freeness at step 1,
    // because before the triangle is removed no vertex is free.
    CollapseSequence swapped = good;
    std::swap(swapped.steps[0], swapped.steps[1]);
    auto verdict = replay(c, swapped);
    CHECK(!verdict.valid);
    CHECK(verdict.first_failing_step == 1);

    // empty sequence on a single vertex is a valid certificate
    auto pt = SimplicialComplex::from_facets({{42}});
    CollapseSequence empty;
    empty.terminal_vertex = 42;
    CHECK(replay(pt, empty).valid);

    // empty sequence on anything larger is not
    CHECK(!replay(c, empty).valid);
}

TEST_CASE("greedy search is deterministic for a fixed seed") {
    auto c = cone(corpus::grid_disk(), 777);
    auto r1 = find_collapse(c, GreedyRandomStrategy{11, 8});
    auto r2 = find_collapse(c, GreedyRandomStrategy{11, 8});
    REQUIRE(r1.outcome == SearchOutcome::Success);
    REQUIRE(r2.outcome == SearchOutcome::Success);
    CHECK(r1.certificate->steps == r2.certificate->steps);
    CHECK(r1.certificate->terminal_vertex == r2.certificate->terminal_vertex);
    CHECK(r1.stats.restarts_used == r2.stats.restarts_used);
}

TEST_CASE("exhaustive and greedy agree on small successes") {
    for (int n = 1; n <= 3; ++n) {
        auto c = full_simplex(n);
        auto g = find_collapse(c, GreedyRandomStrategy{2, 4});
        auto e = find_collapse(c, ExhaustiveStrategy{});
        REQUIRE(g.outcome == SearchOutcome::Success);
        REQUIRE(e.outcome == SearchOutcome::Success);
        CHECK(replay(c, *e.certificate).valid);
        CHECK(e.certificate->steps.size() == g.certificate->steps.size());
    }
}

TEST_CASE("budgets degrade into a budget outcome with statistics") {
    auto c = cone(corpus::dunce_hat(), 99);
    SearchBudget tiny;
    tiny.max_steps = 3;
    auto res = find_collapse(c, ExhaustiveStrategy{}, tiny);
    CHECK(res.outcome == SearchOutcome::Budget);
    CHECK(res.stats.budget_hit);
    CHECK(res.stats.states_explored >= 3);
}

TEST_CASE("certificate files round-trip") {
    auto c = full_simplex(3);
    auto res = find_collapse(c, GreedyRandomStrategy{9, 4});
    REQUIRE(res.outcome == SearchOutcome::Success);
    std::ostringstream out;
    write_certificate(out, *res.certificate, 9);
    std::istringstream in(out.str());
    auto back = read_certificate(in);
    CHECK(back.steps == res.certificate->steps);
    CHECK(back.terminal_vertex == res.certificate->terminal_vertex);

    std::istringstream bad("collapse 0 1 ;\npoint 0\n");
    CHECK_THROWS_AS(read_certificate(bad), parse_error);
    std::istringstream nopoint("collapse 0 ; 0 1\n");
    CHECK_THROWS_AS(read_certificate(nopoint), parse_error);
}

TEST_CASE("facet list parsing") {
    std::istringstream in("# comment\n0 1 2\n2 3\n\n4 # trailing\n");
    auto c = read_facet_list(in);
    CHECK(c.has_face({0, 1, 2}));
    CHECK(c.has_face({2, 3}));
    CHECK(c.has_face({4}));

    std::istringstream bad("0 x 2\n");
    try {
        read_facet_list(bad);
        FAIL("expected parse error");
    } catch (const parse_error& e) {
        CHECK(e.line == 1);
    }
}
