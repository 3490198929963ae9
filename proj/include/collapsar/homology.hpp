#pragma once

// Reduced simplicial homology over the integers, via Smith normal form of
// boundary matrices with arbitrary-precision entries. Torsion is reported so
// that contractibility certificates are honest over Z, not just over Q.

#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "collapsar/simplicial_complex.hpp"

namespace collapsar {

using BigInt = boost::multiprecision::cpp_int;
using BigMat = std::vector<std::vector<BigInt>>;

struct HomologyGroup {
    long betti = 0;
    std::vector<BigInt> torsion;  // invariant factors > 1

    bool trivial() const { return betti == 0 && torsion.empty(); }
    bool operator==(const HomologyGroup& o) const {
        return betti == o.betti && torsion == o.torsion;
    }
};

// Boundary matrix from k-faces (columns) to (k-1)-faces (rows), with the
// usual alternating signs on sorted vertex lists. k = 0 gives the
// augmentation row (reduced homology).
inline BigMat boundary_matrix(const SimplicialComplex& c, int k) {
    std::vector<Face> cols = c.faces_of_dim(k);
    if (k == 0) {
        BigMat m(1, std::vector<BigInt>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) m[0][j] = 1;
        return m;
    }
    std::vector<Face> rows = c.faces_of_dim(k - 1);
    std::map<Face, std::size_t> row_index;
    for (std::size_t i = 0; i < rows.size(); ++i) row_index.emplace(rows[i], i);
    BigMat m(rows.size(), std::vector<BigInt>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Face& f = cols[j];
        int sign = 1;
        for (std::size_t i = 0; i < f.size(); ++i) {
            Face sub = f;
            sub.erase(sub.begin() + i);
            m[row_index.at(sub)][j] = sign;
            sign = -sign;
        }
    }
    return m;
}

// In-place Smith normal form; returns the diagonal entries (nonnegative,
// each dividing the next).
inline std::vector<BigInt> smith_normal_form(BigMat m) {
    std::size_t rows = m.size();
    std::size_t cols = rows ? m[0].size() : 0;
    std::vector<BigInt> diag;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // find a nonzero pivot of minimal absolute value
        std::size_t pi = t, pj = t;
        BigInt best = 0;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (m[i][j] == 0) continue;
                BigInt a = abs(m[i][j]);
                if (best == 0 || a < best) {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break;
        std::swap(m[t], m[pi]);
        for (std::size_t i = 0; i < rows; ++i) std::swap(m[i][t], m[i][pj]);

        bool clean = true;
        for (std::size_t i = t + 1; i < rows && clean; ++i)
            if (m[i][t] != 0) clean = false;
        for (std::size_t j = t + 1; j < cols && clean; ++j)
            if (m[t][j] != 0) clean = false;

        if (!clean) {
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (m[i][t] == 0) continue;
                BigInt q = m[i][t] / m[t][t];
                for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (m[t][j] == 0) continue;
                BigInt q = m[t][j] / m[t][t];
                for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
            }
            continue;  // re-pick a pivot until the cross is clean
        }

        // divisibility: fold in any entry the pivot does not divide
        bool fixed = false;
        for (std::size_t i = t + 1; i < rows && !fixed; ++i)
            for (std::size_t j = t + 1; j < cols && !fixed; ++j)
                if (m[i][j] % m[t][t] != 0) {
                    for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
                    fixed = true;
                }
        if (fixed) continue;

        diag.push_back(abs(m[t][t]));
        ++t;
    }
    return diag;
}

inline long snf_rank(const std::vector<BigInt>& diag) {
    long r = 0;
    for (const auto& d : diag)
        if (d != 0) ++r;
    return r;
}

// Reduced homology groups in dimensions 0..dim(c).
inline std::vector<HomologyGroup> reduced_homology(const SimplicialComplex& c) {
    int d = c.dim();
    std::vector<HomologyGroup> out(std::max(0, d + 1));
    if (d < 0) return out;
    std::vector<long> rank(d + 2, 0);
    std::vector<std::vector<BigInt>> diag(d + 2);
    for (int k = 0; k <= d; ++k) {
        diag[k] = smith_normal_form(boundary_matrix(c, k));
        rank[k] = snf_rank(diag[k]);
    }
    for (int k = 0; k <= d; ++k) {
        long nk = static_cast<long>(c.faces_of_dim(k).size());
        long boundary_rank_above = (k + 1 <= d) ? rank[k + 1] : 0;
        out[k].betti = nk - rank[k] - boundary_rank_above;
        if (k + 1 <= d)
            for (const auto& e : diag[k + 1])
                if (e > 1) out[k].torsion.push_back(e);
    }
    return out;
}

inline bool has_point_homology(const SimplicialComplex& c) {
    if (c.empty()) return false;
    for (const auto& h : reduced_homology(c))
        if (!h.trivial()) return false;
    return true;
}

}  // namespace collapsar
