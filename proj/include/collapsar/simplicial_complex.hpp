#pragma once

// Finite abstract simplicial complexes over integer vertex labels.
// Complexes are immutable after construction; all queries are pure.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "collapsar/util.hpp"

namespace collapsar {

// A face is a sorted, duplicate-free, nonempty list of vertex labels.
using Face = std::vector<int>;

inline Face make_face(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.empty()) throw invalid_input_error("faces must be nonempty");
    return v;
}

inline int face_dim(const Face& f) { return static_cast<int>(f.size()) - 1; }

inline bool face_subset(const Face& a, const Face& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline Face face_union(const Face& a, const Face& b) {
    Face out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline Face face_difference(const Face& a, const Face& b) {
    Face out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool faces_intersect(const Face& a, const Face& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else return true;
    }
    return false;
}

class SimplicialComplex {
public:
    SimplicialComplex() = default;

    static SimplicialComplex from_facets(const std::vector<Face>& facets) {
        std::set<Face> all;
        for (const auto& raw : facets) {
            Face f = make_face(raw);
            // downward closure over all nonempty subsets
            std::size_t n = f.size();
            for (std::size_t mask = 1; mask < (1u << n); ++mask) {
                Face sub;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (1u << i)) sub.push_back(f[i]);
                all.insert(std::move(sub));
            }
        }
        return SimplicialComplex(std::move(all));
    }

    // The face set must already be downward closed.
    static SimplicialComplex from_faces(std::set<Face> faces) {
        for (const auto& f : faces) {
            if (f.size() <= 1) continue;
            for (std::size_t i = 0; i < f.size(); ++i) {
                Face sub = f;
                sub.erase(sub.begin() + i);
                if (!faces.count(sub))
                    throw invalid_input_error("face set is not downward closed");
            }
        }
        return SimplicialComplex(std::move(faces));
    }

    const std::set<Face>& faces() const { return faces_; }
    const std::vector<Face>& facets() const { return facets_; }
    bool has_face(const Face& f) const { return faces_.count(f) > 0; }
    bool empty() const { return faces_.empty(); }
    std::size_t size() const { return faces_.size(); }

    int dim() const {
        int d = -1;
        for (const auto& f : facets_) d = std::max(d, face_dim(f));
        return d;
    }

    std::vector<int> vertices() const {
        std::vector<int> out;
        for (const auto& f : faces_)
            if (f.size() == 1) out.push_back(f[0]);
        return out;
    }

    std::vector<Face> faces_of_dim(int k) const {
        std::vector<Face> out;
        for (const auto& f : faces_)
            if (face_dim(f) == k) out.push_back(f);
        return out;
    }

    // All faces strictly containing f.
    std::vector<Face> proper_cofaces(const Face& f) const {
        require_face(f);
        std::vector<Face> out;
        for (const auto& g : faces_)
            if (g.size() > f.size() && face_subset(f, g)) out.push_back(g);
        return out;
    }

    // st_f = all faces of all cofaces of f (including f and its own faces).
    SimplicialComplex star(const Face& f) const {
        require_face(f);
        std::vector<Face> cofacets;
        for (const auto& g : facets_)
            if (face_subset(f, g)) cofacets.push_back(g);
        return from_facets(cofacets);
    }

    // lk_f = complements of f inside its proper cofaces.
    SimplicialComplex link(const Face& f) const {
        require_face(f);
        std::set<Face> out;
        for (const auto& g : faces_)
            if (g.size() > f.size() && face_subset(f, g))
                out.insert(face_difference(g, f));
        return SimplicialComplex(std::move(out));
    }

    // Plain Euler characteristic sum_k (-1)^k f_k.
    long euler_characteristic() const {
        long chi = 0;
        for (const auto& f : faces_) chi += (face_dim(f) % 2 == 0) ? 1 : -1;
        return chi;
    }

    int connected_components() const {
        std::map<int, int> parent;
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& f : faces_)
            if (f.size() == 1) parent[f[0]] = f[0];
        for (const auto& f : faces_)
            if (f.size() == 2) {
                int a = find(f[0]), b = find(f[1]);
                if (a != b) parent[a] = b;
            }
        std::set<int> roots;
        for (auto& [v, _] : parent) roots.insert(find(v));
        return static_cast<int>(roots.size());
    }

    // Complex with the two faces of an elementary collapse removed.
    SimplicialComplex without_pair(const Face& f, const Face& g) const {
        std::set<Face> out = faces_;
        out.erase(f);
        out.erase(g);
        return SimplicialComplex(std::move(out));
    }

    bool operator==(const SimplicialComplex& o) const { return faces_ == o.faces_; }

private:
    explicit SimplicialComplex(std::set<Face> faces) : faces_(std::move(faces)) {
        for (const auto& f : faces_) {
            bool maximal = true;
            for (const auto& g : faces_)
                if (g.size() > f.size() && face_subset(f, g)) {
                    maximal = false;
                    break;
                }
            if (maximal) facets_.push_back(f);
        }
    }

    void require_face(const Face& f) const {
        if (!faces_.count(f)) throw missing_face_error("face is not in the complex");
    }

    std::set<Face> faces_;
    std::vector<Face> facets_;
};

// Cone over c with a fresh apex vertex.
inline SimplicialComplex cone(const SimplicialComplex& c, int apex) {
    std::vector<Face> facets;
    for (const auto& f : c.facets()) {
        Face g = f;
        g.push_back(apex);
        facets.push_back(make_face(std::move(g)));
    }
    if (facets.empty()) facets.push_back({apex});
    return SimplicialComplex::from_facets(facets);
}

// The full simplex on n+1 vertices 0..n.
inline SimplicialComplex full_simplex(int n) {
    Face top(n + 1);
    for (int i = 0; i <= n; ++i) top[i] = i;
    return SimplicialComplex::from_facets({top});
}

inline SimplicialComplex simplex_boundary(int n) {
    Face top(n + 1);
    for (int i = 0; i <= n; ++i) top[i] = i;
    std::vector<Face> facets;
    for (int i = 0; i <= n; ++i) {
        Face f = top;
        f.erase(f.begin() + i);
        facets.push_back(f);
    }
    return SimplicialComplex::from_facets(facets);
}

// Order complex of the face poset. New vertices are numbered 0,1,... in the
// (dimension, lexicographic) order of the original faces; the optional map
// reports which face each new vertex stands for.
inline SimplicialComplex barycentric_subdivision(const SimplicialComplex& c,
                                                 std::map<Face, int>* vertex_of_face = nullptr) {
    std::vector<Face> ordered(c.faces().begin(), c.faces().end());
    std::sort(ordered.begin(), ordered.end(), [](const Face& a, const Face& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    std::map<Face, int> id;
    for (const auto& f : ordered) id.emplace(f, static_cast<int>(id.size()));
    if (vertex_of_face) *vertex_of_face = id;

    // Facets of the order complex are the maximal flags; generate all flags
    // under each facet of c by descending through faces.
    std::vector<Face> flags;
    std::function<void(const Face&, Face&)> descend = [&](const Face& f, Face& flag) {
        flag.push_back(id.at(f));
        if (f.size() == 1) {
            Face out = flag;
            std::sort(out.begin(), out.end());
            flags.push_back(out);
        } else {
            for (std::size_t i = 0; i < f.size(); ++i) {
                Face sub = f;
                sub.erase(sub.begin() + i);
                descend(sub, flag);
            }
        }
        flag.pop_back();
    };
    for (const auto& f : c.facets()) {
        Face flag;
        descend(f, flag);
    }
    return SimplicialComplex::from_facets(flags);
}

}  // namespace collapsar
