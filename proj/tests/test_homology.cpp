#include <catch2/catch_amalgamated.hpp>

#include "collapsar/homology.hpp"
#include "support/corpus.hpp"

using namespace collapsar;

namespace {

// Independent dense Smith-normal-form oracle: textbook recursive version
// with gcd-style reduction, separate from the library implementation.
void oracle_reduce(BigMat& m, std::size_t t, std::vector<BigInt>& diag) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    if (t >= rows || t >= cols) return;
    // locate any nonzero entry
    std::size_t pi = rows, pj = cols;
    for (std::size_t i = t; i < rows && pi == rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
            if (m[i][j] != 0) {
                pi = i;
                pj = j;
                break;
            }
    if (pi == rows) return;
    std::swap(m[t], m[pi]);
    for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][pj]);

    for (;;) {
        bool again = false;
        for (std::size_t i = t + 1; i < rows; ++i)
            while (m[i][t] != 0) {
                BigInt q = m[i][t] / m[t][t];
                for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
                if (m[i][t] != 0) {
                    std::swap(m[i], m[t]);
                    again = true;
                }
            }
        for (std::size_t j = t + 1; j < cols; ++j)
            while (m[t][j] != 0) {
                BigInt q = m[t][j] / m[t][t];
                for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
                if (m[t][j] != 0) {
                    for (std::size_t i = t; i < rows; ++i) std::swap(m[i][j], m[i][t]);
                    again = true;
                }
            }
        if (!again) break;
    }
    // enforce divisibility of the remaining block by the pivot
    for (std::size_t i = t + 1; i < rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
            if (m[i][j] % m[t][t] != 0) {
                for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
                oracle_reduce(m, t, diag);
                return;
            }
    diag.push_back(abs(m[t][t]));
    oracle_reduce(m, t + 1, diag);
}

std::vector<BigInt> oracle_snf(BigMat m) {
    std::vector<BigInt> diag;
    oracle_reduce(m, 0, diag);
    return diag;
}

std::vector<HomologyGroup> oracle_homology(const SimplicialComplex& c) {
    int d = c.dim();
    std::vector<HomologyGroup> out(std::max(0, d + 1));
    std::vector<std::vector<BigInt>> diag(d + 2);
    std::vector<long> rank(d + 2, 0);
    for (int k = 0; k <= d; ++k) {
        diag[k] = oracle_snf(boundary_matrix(c, k));
        rank[k] = snf_rank(diag[k]);
    }
    for (int k = 0; k <= d; ++k) {
        out[k].betti = static_cast<long>(c.faces_of_dim(k).size()) - rank[k] -
                       (k + 1 <= d ? rank[k + 1] : 0);
        if (k + 1 <= d)
            for (const auto& e : diag[k + 1])
                if (e > 1) out[k].torsion.push_back(e);
    }
    return out;
}

}  // namespace

TEST_CASE("smith normal form basics") {
    BigMat m = {{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}};
    auto d = smith_normal_form(m);
    // known invariant factors of this classic example: 2, 2, 156
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 2);
    CHECK(d[1] == 2);
    CHECK(d[2] == 156);
    CHECK(oracle_snf(m) == d);
}

TEST_CASE("single simplices are acyclic") {
    for (int n = 0; n <= 5; ++n) {
        auto h = reduced_homology(full_simplex(n));
        for (const auto& g : h) {
            CHECK(g.betti == 0);
            CHECK(g.torsion.empty());
        }
    }
}

TEST_CASE("boundary of the tetrahedron is a 2-sphere") {
    auto h = reduced_homology(simplex_boundary(3));
    REQUIRE(h.size() == 3);
    CHECK(h[0].betti == 0);
    CHECK(h[1].betti == 0);
    CHECK(h[2].betti == 1);
    for (const auto& g : h) CHECK(g.torsion.empty());
}

TEST_CASE("dunce hat is contractible-looking over Z") {
    auto dh = corpus::dunce_hat();
    // f-vector of the vertex-minimal dunce hat
    CHECK(dh.vertices().size() == 8);
    CHECK(dh.faces_of_dim(1).size() == 24);
    CHECK(dh.faces_of_dim(2).size() == 17);
    CHECK(dh.euler_characteristic() == 1);

    auto h = reduced_homology(dh);
    auto ho = oracle_homology(dh);
    REQUIRE(h.size() == ho.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(h[k] == ho[k]);
        CHECK(h[k].betti == 0);
        CHECK(h[k].torsion.empty());
    }
}

TEST_CASE("projective plane has Z/2 torsion in degree one") {
    auto rp2 = corpus::projective_plane();
    auto h = reduced_homology(rp2);
    REQUIRE(h.size() == 3);
    CHECK(h[0].betti == 0);
    CHECK(h[1].betti == 0);
    REQUIRE(h[1].torsion.size() == 1);
    CHECK(h[1].torsion[0] == 2);
    CHECK(h[2].betti == 0);
    CHECK(oracle_homology(rp2)[1].torsion == h[1].torsion);
}

TEST_CASE("homology is invariant under barycentric subdivision") {
    for (const auto& c : {simplex_boundary(2), simplex_boundary(3), corpus::dunce_hat(),
                          corpus::projective_plane(), corpus::grid_disk()}) {
        auto h = reduced_homology(c);
        auto hs = reduced_homology(barycentric_subdivision(c));
        // pad to common length (subdivision cannot change dimension)
        REQUIRE(h.size() == hs.size());
        for (std::size_t k = 0; k < h.size(); ++k) CHECK(h[k] == hs[k]);
    }
}

TEST_CASE("random small complexes: library and oracle homology agree") {
    Rng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Face> facets;
        int nf = 3 + static_cast<int>(rng.index(6));
        for (int i = 0; i < nf; ++i) {
            Face f;
            int sz = 1 + static_cast<int>(rng.index(4));
            for (int k = 0; k < sz; ++k) f.push_back(static_cast<int>(rng.index(7)));
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
            facets.push_back(f);
        }
        auto c = SimplicialComplex::from_facets(facets);
        auto h = reduced_homology(c);
        auto ho = oracle_homology(c);
        REQUIRE(h.size() == ho.size());
        for (std::size_t k = 0; k < h.size(); ++k) CHECK(h[k] == ho[k]);
    }
}

TEST_CASE("bing house is connected with trivial homology") {
    auto bh = corpus::bing_house();
    CHECK(bh.connected_components() == 1);
    CHECK(bh.euler_characteristic() == 1);
    CHECK(has_point_homology(bh));
}
