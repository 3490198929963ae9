#pragma once

// Reverse-collapse combinatorics. Undoing an elementary collapse that removed
// the pair (free face, coface) rebuilds the coface as a ball assembled from
// blocks: one block per nonempty chain (F_1 < ... < F_i) of interior faces of
// the disk gamma = (boundary of the coface) minus the free face, namely the
// product cell F_1 x [0,1]^i. Cube coordinate j corresponds to chain element
// F_j. Corners carry canonical labels (v, {F_j : bit j set}); blocks meeting
// along subchains therefore share vertex ids automatically, and the whole
// union attaches to the old complex along the corners with empty label set.

#include <map>
#include <vector>

#include "collapsar/cell_complex.hpp"
#include "collapsar/collapse.hpp"
#include "collapsar/homology.hpp"
#include "collapsar/simplicial_complex.hpp"

namespace collapsar {

struct FreeFaceDisk {
    SimplicialComplex gamma;     // (k-1)-disk the coface is rebuilt over
    SimplicialComplex boundary;  // its pseudomanifold boundary (may be empty)
    std::vector<Face> interior_faces;
    Face free_face;
    Face coface;
};

// Faces sorted so that inclusion-increasing chains are index-increasing.
inline std::vector<Face> sorted_by_size(std::vector<Face> faces) {
    std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return faces;
}

inline FreeFaceDisk free_face_disk(const SimplicialComplex& sigma, const ElementaryCollapse& e) {
    if (!is_free_pair(sigma, e))
        throw stale_step_error("free-face pair is not currently free");

    FreeFaceDisk d;
    d.free_face = e.free_face;
    d.coface = e.coface;

    // gamma = boundary of the coface minus the open star of the free face
    std::set<Face> faces;
    auto closure = SimplicialComplex::from_facets({e.coface});
    for (const auto& f : closure.faces())
        if (f != e.coface && !face_subset(e.free_face, f)) faces.insert(f);
    if (faces.empty())
        throw degeneracy_error("collapse leaves an empty reattachment disk");
    d.gamma = SimplicialComplex::from_faces(faces);

    // disk certificate: pure, connected, ridge degree <= 2, trivial homology
    int top = d.gamma.dim();
    for (const auto& f : d.gamma.facets())
        if (face_dim(f) != top)
            throw degeneracy_error("reattachment disk is not pure");
    if (d.gamma.connected_components() != 1)
        throw degeneracy_error("reattachment disk is disconnected");
    std::set<Face> boundary_ridges;
    if (top >= 1) {
        for (const auto& r : d.gamma.faces_of_dim(top - 1)) {
            int deg = 0;
            for (const auto& g : d.gamma.facets())
                if (face_subset(r, g)) ++deg;
            if (deg > 2)
                throw degeneracy_error("reattachment disk is not a pseudomanifold");
            if (deg == 1) boundary_ridges.insert(r);
        }
    }
    if (!has_point_homology(d.gamma))
        throw degeneracy_error("reattachment disk has nontrivial homology");

    if (!boundary_ridges.empty()) {
        std::vector<Face> br(boundary_ridges.begin(), boundary_ridges.end());
        d.boundary = SimplicialComplex::from_facets(br);
    } else if (top >= 1) {
        throw degeneracy_error("reattachment disk has empty boundary");
    }
    // interior faces: everything not carried by the boundary subcomplex; for
    // a single vertex the boundary is empty and the vertex itself counts
    for (const auto& f : d.gamma.faces())
        if (d.boundary.empty() || !d.boundary.has_face(f)) d.interior_faces.push_back(f);
    d.interior_faces = sorted_by_size(std::move(d.interior_faces));
    if (d.interior_faces.empty())
        throw degeneracy_error("reattachment disk has no interior faces");
    return d;
}

using FaceChain = std::vector<Face>;  // strictly increasing under inclusion

inline std::vector<FaceChain> enumerate_chains(const FreeFaceDisk& d) {
    const auto& faces = d.interior_faces;
    std::vector<FaceChain> out;
    FaceChain chain;
    std::function<void(std::size_t)> grow = [&](std::size_t start) {
        for (std::size_t i = start; i < faces.size(); ++i) {
            if (!chain.empty() &&
                !(chain.back().size() < faces[i].size() && face_subset(chain.back(), faces[i])))
                continue;
            chain.push_back(faces[i]);
            out.push_back(chain);
            grow(i + 1);
            chain.pop_back();
        }
    };
    grow(0);
    return out;
}

// Canonical label of a non-base block corner: base vertex plus the set of
// chain elements whose cube coordinate is 1.
struct CornerLabel {
    int base_vertex;
    std::vector<Face> subset;  // nonempty, sorted by (size, lex)

    bool operator<(const CornerLabel& o) const {
        if (base_vertex != o.base_vertex) return base_vertex < o.base_vertex;
        return subset < o.subset;
    }
};

struct BlockComplex {
    CellComplex cells;
    std::size_t first_block_cell = 0;        // earlier cells carry the old complex
    std::vector<FaceChain> chains;           // one per block cell, aligned
    std::map<int, CornerLabel> new_vertices; // fresh corner ids
};

// Subcomplex of the triangulated complex spanned by the block cells only.
inline SimplicialComplex block_region(const BlockComplex& b, const CellTriangulation& t) {
    std::vector<Face> facets;
    for (std::size_t i = b.first_block_cell; i < b.cells.cells.size(); ++i)
        for (const auto& s : t.cell_simplices[i]) facets.push_back(s);
    return SimplicialComplex::from_facets(facets);
}

inline BlockComplex build_blocks(const FreeFaceDisk& d, const SimplicialComplex& sigma_prime) {
    BlockComplex out;
    for (const auto& f : sigma_prime.facets()) out.cells.cells.push_back(ProductCell::simplex(f));
    out.first_block_cell = out.cells.cells.size();

    int next_id = 0;
    for (int v : sigma_prime.vertices()) next_id = std::max(next_id, v + 1);
    for (int v : d.coface) next_id = std::max(next_id, v + 1);

    std::map<CornerLabel, int> ids;
    auto corner_id = [&](int v, const std::vector<Face>& subset) {
        if (subset.empty()) return v;
        CornerLabel lbl{v, subset};
        auto it = ids.find(lbl);
        if (it != ids.end()) return it->second;
        int id = next_id++;
        ids.emplace(lbl, id);
        out.new_vertices.emplace(id, lbl);
        return id;
    };

    out.chains = enumerate_chains(d);
    for (const auto& chain : out.chains) {
        const Face& base = chain.front();
        ProductCell cell;
        cell.base_corner_ids = base;
        cell.cube_dim = static_cast<int>(chain.size());
        cell.corner_ids.resize(cell.corner_count());
        for (unsigned mask = 0; mask < (1u << cell.cube_dim); ++mask) {
            std::vector<Face> subset;
            for (int j = 0; j < cell.cube_dim; ++j)
                if (mask & (1u << j)) subset.push_back(chain[j]);
            for (std::size_t b = 0; b < base.size(); ++b)
                cell.corner_ids[mask * base.size() + b] = corner_id(base[b], subset);
        }
        out.cells.cells.push_back(std::move(cell));
    }

    // ball certificate over the rebuilt region
    auto tri = triangulate_cells(out.cells);
    auto region = block_region(out, tri);
    if (!has_point_homology(region) || region.euler_characteristic() != 1) {
        std::ostringstream msg;
        msg << "rebuilt region is not a homology ball (" << out.chains.size() << " chains)";
        throw construction_error(msg.str());
    }
    return out;
}

}  // namespace collapsar
