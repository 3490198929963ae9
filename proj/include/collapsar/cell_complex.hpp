#pragma once

// Polyhedral complexes whose cells are products (simplex x cube), recorded
// combinatorially: a base simplex, a cube exponent, and one global vertex id
// per corner. Gluing between cells is purely by shared vertex ids.
//
// Cells are triangulated by the staircase triangulation: simplices are the
// chains of the corner poset (b, m) <= (b', m') iff the base corners satisfy
// id(b) <= id(b') and m is a submask of m'. Because the poset order is
// derived from global ids, two cells sharing a face induce the same
// triangulation on it.

#include <map>
#include <vector>

#include "collapsar/simplicial_complex.hpp"

namespace collapsar {

struct ProductCell {
    std::vector<int> base_corner_ids;  // ids of corners (b, 0); ascending
    int cube_dim = 0;
    std::vector<int> corner_ids;  // corner (b, mask) at index mask*base_size + b

    int base_size() const { return static_cast<int>(base_corner_ids.size()); }
    int dim() const { return base_size() - 1 + cube_dim; }
    std::size_t corner_count() const {
        return static_cast<std::size_t>(base_size()) << cube_dim;
    }
    int corner(int b, unsigned mask) const {
        return corner_ids[static_cast<std::size_t>(mask) * base_size() + b];
    }

    static ProductCell simplex(const Face& f) {
        ProductCell c;
        c.base_corner_ids = f;
        c.cube_dim = 0;
        c.corner_ids = f;
        return c;
    }
};

struct CellComplex {
    std::vector<ProductCell> cells;
};

struct CellTriangulation {
    SimplicialComplex complex;
    std::vector<std::vector<Face>> cell_simplices;  // maximal chains per cell
    std::map<Face, int> owner;  // maximal simplex -> a top cell containing it
};

namespace detail {

// Maximal chains of the corner poset of one cell.
inline void staircase_chains(const ProductCell& cell, std::vector<Face>& out) {
    const int bs = cell.base_size();
    const unsigned full = (1u << cell.cube_dim) - 1u;
    Face chain;
    std::function<void(int, unsigned)> walk = [&](int b, unsigned mask) {
        chain.push_back(cell.corner(b, mask));
        if (b == bs - 1 && mask == full) {
            out.push_back(make_face(chain));
        } else {
            if (b + 1 < bs) walk(b + 1, mask);
            for (int j = 0; j < cell.cube_dim; ++j)
                if (!(mask & (1u << j))) walk(b, mask | (1u << j));
        }
        chain.pop_back();
    };
    walk(0, 0u);
}

// All chains (of any length) with vertices restricted to `allowed`.
inline std::set<Face> restricted_chains(const ProductCell& cell, const std::set<int>& allowed) {
    // corners in the poset, filtered
    struct Node {
        int b;
        unsigned mask;
        int id;
    };
    std::vector<Node> nodes;
    for (unsigned m = 0; m < (1u << cell.cube_dim); ++m)
        for (int b = 0; b < cell.base_size(); ++b) {
            int id = cell.corner(b, m);
            if (allowed.count(id)) nodes.push_back({b, m, id});
        }
    auto leq = [&](const Node& x, const Node& y) {
        return cell.base_corner_ids[x.b] <= cell.base_corner_ids[y.b] &&
               (x.mask & y.mask) == x.mask;
    };
    std::set<Face> out;
    // recursive enumeration over comparable extensions; nodes are sorted by
    // poset rank first so chains are always index-increasing
    std::function<void(std::vector<std::size_t>&)> grow = [&](std::vector<std::size_t>& idx) {
        if (!idx.empty()) {
            Face f;
            for (auto k : idx) f.push_back(nodes[k].id);
            out.insert(make_face(f));
        }
        std::size_t last = idx.empty() ? 0 : idx.back() + 1;
        for (std::size_t i = last; i < nodes.size(); ++i) {
            if (!idx.empty() && !leq(nodes[idx.back()], nodes[i])) continue;
            idx.push_back(i);
            grow(idx);
            idx.pop_back();
        }
    };
    std::sort(nodes.begin(), nodes.end(), [&](const Node& x, const Node& y) {
        int rx = x.b + __builtin_popcount(x.mask);
        int ry = y.b + __builtin_popcount(y.mask);
        if (rx != ry) return rx < ry;
        return x.id < y.id;
    });
    std::vector<std::size_t> idx;
    grow(idx);
    return out;
}

}  // namespace detail

// Checks per-cell corner injectivity and that any two cells induce the same
// triangulation on their shared vertices.
inline void validate_cell_complex(const CellComplex& cc) {
    for (const auto& cell : cc.cells) {
        if (cell.corner_ids.size() != cell.corner_count())
            throw invalid_input_error("cell corner table has the wrong size");
        std::set<int> seen(cell.corner_ids.begin(), cell.corner_ids.end());
        if (seen.size() != cell.corner_ids.size())
            throw gluing_error("attaching data identifies two corners of one cell");
        for (int b = 0; b + 1 < cell.base_size(); ++b)
            if (cell.base_corner_ids[b] >= cell.base_corner_ids[b + 1])
                throw invalid_input_error("base corners must be in ascending id order");
    }
    for (std::size_t i = 0; i < cc.cells.size(); ++i)
        for (std::size_t j = i + 1; j < cc.cells.size(); ++j) {
            std::set<int> a(cc.cells[i].corner_ids.begin(), cc.cells[i].corner_ids.end());
            std::set<int> b(cc.cells[j].corner_ids.begin(), cc.cells[j].corner_ids.end());
            std::set<int> shared;
            for (int id : a)
                if (b.count(id)) shared.insert(id);
            if (shared.empty()) continue;
            auto ti = detail::restricted_chains(cc.cells[i], shared);
            auto tj = detail::restricted_chains(cc.cells[j], shared);
            if (ti != tj)
                throw gluing_error("cells induce different triangulations on a shared face");
        }
}

inline CellTriangulation triangulate_cells(const CellComplex& cc) {
    validate_cell_complex(cc);
    CellTriangulation out;
    out.cell_simplices.resize(cc.cells.size());
    std::vector<Face> all;
    for (std::size_t i = 0; i < cc.cells.size(); ++i) {
        detail::staircase_chains(cc.cells[i], out.cell_simplices[i]);
        for (const auto& s : out.cell_simplices[i]) all.push_back(s);
    }
    out.complex = SimplicialComplex::from_facets(all);

    // owners: assign each maximal simplex to the highest-dimensional cell
    // containing it (ties broken by cell index)
    std::vector<std::size_t> order(cc.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (cc.cells[x].dim() != cc.cells[y].dim()) return cc.cells[x].dim() > cc.cells[y].dim();
        return x < y;
    });
    for (std::size_t i : order)
        for (const auto& s : out.cell_simplices[i])
            out.owner.emplace(s, static_cast<int>(i));
    return out;
}

}  // namespace collapsar
