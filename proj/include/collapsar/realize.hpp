#pragma once

// Metric realization of block complexes as piecewise-hyperbolic structures.
//
// Every top-dimensional brick (simplex x cube product cell) gets one
// coordinate chart: hyperboloid-model coordinates for each of its corners,
// parametrized by the spatial part only, so points stay on the model under
// every solver step. Within a chart the brick is an honest region of H^d;
// curvature concentrates only where charts meet. The solver is a damped
// (Levenberg-style) least-squares over all chart coordinates with residuals
//   (a) prescribed right angles: at every ridge of a brick that touches its
//       glue face (the base at cube coordinates all-zero), the fan of
//       simplexwise dihedral angles sums to pi/2,
//   (b) shared edges: any edge seen by two charts, or carrying an already
//       frozen length, must agree,
//   (c) every edge length stays within [edge_scale/2, 2*edge_scale].
// The reported residual is the maximum absolute violation; success means
// residual < kGeomTol.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "collapsar/cell_complex.hpp"
#include "collapsar/geometry.hpp"
#include "collapsar/simplicial_complex.hpp"
#include "collapsar/util.hpp"

namespace collapsar {

struct Chart {
    int dim = 0;                 // chart lives in H^dim
    std::vector<int> vertices;   // realized vertex ids
    std::vector<HPoint> coords;  // aligned with `vertices`
    std::vector<Face> tops;      // top simplices owned by this chart (vertex ids)
    int step = 0;                // reverse-collapse step that created the chart
    int cell = -1;               // source cell in the originating cell complex

    std::map<int, int> local;  // vertex id -> index into coords

    int local_index(int v) const { return local.at(v); }
    const HPoint& point_of(int v) const { return coords[local.at(v)]; }

    void build_local() {
        local.clear();
        for (std::size_t i = 0; i < vertices.size(); ++i) local.emplace(vertices[i], i);
    }
};

struct GlueRidgeRecord {
    int chart = 0;
    Face ridge;    // realized vertex ids of the codim-2 simplex
    double angle;  // measured fan sum
};

struct StepImage {
    std::vector<int> vertices;
    std::vector<Face> tops;
};

struct ResidualReport {
    double max_abs = std::numeric_limits<double>::infinity();
    double sum_sq = 0.0;
    int iterations = 0;
    int attempts = 1;
    bool success = false;
    std::string worst;

    std::vector<double> per_step;  // max-abs residual per reverse step
};

struct MetricComplex {
    double edge_scale = 0.25;
    std::uint64_t seed = 0;
    std::vector<Chart> charts;
    std::vector<Face> top_simplices;
    std::map<Face, int> chart_of;  // top simplex -> chart index
    std::map<std::pair<int, int>, double> edge_length;
    std::vector<GlueRidgeRecord> glue_ridges;
    std::vector<StepImage> steps;  // nested images, one entry per reverse step
    std::map<int, std::string> vertex_labels;
    ResidualReport residual;

    SimplicialComplex complex() const {
        return SimplicialComplex::from_facets(top_simplices);
    }
};

inline std::pair<int, int> edge_key(int a, int b) {
    return {std::min(a, b), std::max(a, b)};
}

// Largest disagreement of induced edge lengths between charts (and against
// the recorded canonical lengths).
inline double max_edge_disagreement(const MetricComplex& m) {
    std::map<std::pair<int, int>, std::pair<double, double>> range;
    for (const auto& chart : m.charts) {
        for (std::size_t i = 0; i < chart.vertices.size(); ++i)
            for (std::size_t j = i + 1; j < chart.vertices.size(); ++j) {
                auto key = edge_key(chart.vertices[i], chart.vertices[j]);
                if (!m.edge_length.count(key)) continue;
                double len = hdist(chart.coords[i], chart.coords[j]);
                auto it = range.find(key);
                if (it == range.end())
                    range.emplace(key, std::make_pair(len, len));
                else {
                    it->second.first = std::min(it->second.first, len);
                    it->second.second = std::max(it->second.second, len);
                }
            }
    }
    double worst = 0.0;
    for (const auto& [key, mm] : range) {
        worst = std::max(worst, mm.second - mm.first);
        auto canon = m.edge_length.at(key);
        worst = std::max(worst, std::abs(mm.second - canon));
        worst = std::max(worst, std::abs(mm.first - canon));
    }
    return worst;
}

namespace realize_detail {

// Allocation-free geometry on small fixed buffers for the solver hot path.
// Mirrors hdist / dihedral_angle_tangent from geometry.hpp; the slow and fast
// routes are cross-checked by tests.
namespace fastgeom {

constexpr int kMaxAmbient = 9;

struct P {
    double c[kMaxAmbient];
    int n = 0;  // ambient coordinates (spatial dim + 1)
};

inline void lift(const double* spatial, int d, P& out) {
    double s2 = 0.0;
    for (int i = 0; i < d; ++i) {
        out.c[i + 1] = spatial[i];
        s2 += spatial[i] * spatial[i];
    }
    out.c[0] = std::sqrt(1.0 + s2);
    out.n = d + 1;
}

inline double mink(const double* a, const double* b, int n) {
    double s = -a[0] * b[0];
    for (int i = 1; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double dist(const P& a, const P& b) {
    double diff[kMaxAmbient];
    for (int i = 0; i < a.n; ++i) diff[i] = a.c[i] - b.c[i];
    double s = mink(diff, diff, a.n);
    return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, s)));
}

// Dihedral angle of the simplex `cell` at the ridge (indices into cell);
// throws nothing, returns a large value when degenerate.
inline double dihedral(const P* cell, int ncell, const int* ridge, int nridge) {
    int rest[2], k = 0;
    bool in_ridge[8] = {};
    for (int i = 0; i < nridge; ++i) in_ridge[ridge[i]] = true;
    for (int i = 0; i < ncell; ++i)
        if (!in_ridge[i]) rest[k++] = i;
    const P& p = cell[ridge[0]];
    const int n = p.n;

    auto tangent = [&](const P& q, double* t) {
        double m = mink(p.c, q.c, n);
        for (int i = 0; i < n; ++i) t[i] = q.c[i] + m * p.c[i];
    };

    double frame[7][kMaxAmbient];
    int nframe = 0;
    for (int j = 1; j < nridge; ++j) {
        double t[kMaxAmbient];
        tangent(cell[ridge[j]], t);
        for (int e = 0; e < nframe; ++e) {
            double d = mink(t, frame[e], n);
            for (int i = 0; i < n; ++i) t[i] -= d * frame[e][i];
        }
        double nn = mink(t, t, n);
        if (nn <= 1e-20) return 2.0 * M_PI;
        double inv = 1.0 / std::sqrt(nn);
        for (int i = 0; i < n; ++i) frame[nframe][i] = t[i] * inv;
        ++nframe;
    }
    auto project = [&](const P& q, double* t) {
        tangent(q, t);
        for (int e = 0; e < nframe; ++e) {
            double d = mink(t, frame[e], n);
            for (int i = 0; i < n; ++i) t[i] -= d * frame[e][i];
        }
    };
    double u[kMaxAmbient], v[kMaxAmbient];
    project(cell[rest[0]], u);
    project(cell[rest[1]], v);
    double nu = mink(u, u, n), nv = mink(v, v, n);
    if (nu <= 1e-20 || nv <= 1e-20) return 2.0 * M_PI;
    double cosang = mink(u, v, n) / std::sqrt(nu * nv);
    return std::acos(std::clamp(cosang, -1.0, 1.0));
}

}  // namespace fastgeom

// One codim-2 simplex of a brick together with the incident top simplices,
// all in chart-local vertex indices.
struct FanPiece {
    std::vector<int> cell;   // local indices of a top simplex
    std::vector<int> ridge;  // positions within `cell` of the ridge vertices
};

struct AngleSumTerm {
    int chart;
    std::vector<FanPiece> pieces;
    double target;
};

struct EdgeMatchTerm {
    int chart_a, a0, a1;
    int chart_b, b0, b1;
};

struct EdgeFrozenTerm {
    int chart, a0, a1;
    double target;
};

struct EdgeWindowTerm {
    int chart, a0, a1;
    double lo, hi;
};

using Term = std::variant<AngleSumTerm, EdgeMatchTerm, EdgeFrozenTerm, EdgeWindowTerm>;

class System {
public:
    // charts: (ambient dim, vertex count)
    explicit System(std::vector<std::pair<int, int>> charts) : charts_(std::move(charts)) {
        offsets_.resize(charts_.size());
        int off = 0;
        for (std::size_t k = 0; k < charts_.size(); ++k) {
            offsets_[k] = off;
            off += charts_[k].first * charts_[k].second;
        }
        nvars_ = off;
    }

    int var_count() const { return nvars_; }
    int term_count() const { return static_cast<int>(terms_.size()); }
    void add(Term t) { terms_.push_back(std::move(t)); }
    const std::vector<Term>& terms() const { return terms_; }

    int var_of(int chart, int local_vertex, int coord) const {
        return offsets_[chart] + local_vertex * charts_[chart].first + coord;
    }

    HPoint point(const Eigen::VectorXd& x, int chart, int local_vertex) const {
        int d = charts_[chart].first;
        Vec spatial(d);
        for (int c = 0; c < d; ++c) spatial[c] = x[var_of(chart, local_vertex, c)];
        return HPoint::lift(spatial);
    }

    void point_fast(const Eigen::VectorXd& x, int chart, int local_vertex,
                    fastgeom::P& out) const {
        int d = charts_[chart].first;
        fastgeom::lift(x.data() + var_of(chart, local_vertex, 0), d, out);
    }

    double edge_len(const Eigen::VectorXd& x, int chart, int v0, int v1) const {
        fastgeom::P a, b;
        point_fast(x, chart, v0, a);
        point_fast(x, chart, v1, b);
        return fastgeom::dist(a, b);
    }

    double eval_term(const Term& t, const Eigen::VectorXd& x) const {
        if (const auto* a = std::get_if<AngleSumTerm>(&t)) {
            double sum = 0.0;
            fastgeom::P cell[8];
            int ridge[8];
            for (const auto& piece : a->pieces) {
                int nc = static_cast<int>(piece.cell.size());
                for (int i = 0; i < nc; ++i) point_fast(x, a->chart, piece.cell[i], cell[i]);
                int nr = static_cast<int>(piece.ridge.size());
                for (int i = 0; i < nr; ++i) ridge[i] = piece.ridge[i];
                sum += fastgeom::dihedral(cell, nc, ridge, nr);
            }
            return sum - a->target;
        }
        if (const auto* e = std::get_if<EdgeMatchTerm>(&t)) {
            return edge_len(x, e->chart_a, e->a0, e->a1) - edge_len(x, e->chart_b, e->b0, e->b1);
        }
        if (const auto* e = std::get_if<EdgeFrozenTerm>(&t)) {
            return edge_len(x, e->chart, e->a0, e->a1) - e->target;
        }
        const auto& w = std::get<EdgeWindowTerm>(t);
        double len = edge_len(x, w.chart, w.a0, w.a1);
        if (len < w.lo) return len - w.lo;
        if (len > w.hi) return len - w.hi;
        return 0.0;
    }

    std::vector<int> vars_of_term(const Term& t) const {
        std::vector<int> vars;
        auto add_vertex = [&](int chart, int lv) {
            int d = charts_[chart].first;
            for (int c = 0; c < d; ++c) vars.push_back(var_of(chart, lv, c));
        };
        if (const auto* a = std::get_if<AngleSumTerm>(&t)) {
            std::set<int> locals;
            for (const auto& piece : a->pieces) locals.insert(piece.cell.begin(), piece.cell.end());
            for (int lv : locals) add_vertex(a->chart, lv);
        } else if (const auto* e = std::get_if<EdgeMatchTerm>(&t)) {
            add_vertex(e->chart_a, e->a0);
            add_vertex(e->chart_a, e->a1);
            add_vertex(e->chart_b, e->b0);
            add_vertex(e->chart_b, e->b1);
        } else if (const auto* e = std::get_if<EdgeFrozenTerm>(&t)) {
            add_vertex(e->chart, e->a0);
            add_vertex(e->chart, e->a1);
        } else {
            const auto& w = std::get<EdgeWindowTerm>(t);
            add_vertex(w.chart, w.a0);
            add_vertex(w.chart, w.a1);
        }
        return vars;
    }

    Eigen::VectorXd eval(const Eigen::VectorXd& x) const {
        Eigen::VectorXd r(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) r[i] = eval_term(terms_[i], x);
        return r;
    }

private:
    std::vector<std::pair<int, int>> charts_;
    std::vector<int> offsets_;
    std::vector<Term> terms_;
    int nvars_ = 0;
};

struct SolveOutcome {
    Eigen::VectorXd x;
    double max_abs = std::numeric_limits<double>::infinity();
    double sum_sq = 0.0;
    int iterations = 0;
    int worst_term = -1;
};

// Damped least squares with numeric Jacobian restricted to each term's
// support. A weak proximal anchor at the start point fixes the per-chart
// isometry gauge and selects the solution nearest the initialization; it is
// not part of the reported residual.
inline SolveOutcome levenberg_solve(const System& sys, Eigen::VectorXd x, int max_iters = 500,
                                    double target = 1e-10, double anchor_weight = 1e-2) {
    SolveOutcome out;
    const int m = sys.term_count();
    const int n = sys.var_count();
    if (m == 0 || n == 0) {
        out.x = x;
        out.max_abs = 0.0;
        return out;
    }

    Eigen::VectorXd x_anchor = x;
    const double w2 = anchor_weight * anchor_weight;
    Eigen::VectorXd r = sys.eval(x);
    double cost = r.squaredNorm();
    double lambda = 1e-4;

    auto max_abs_of = [&](const Eigen::VectorXd& v, int* where) {
        double best = 0.0;
        for (int i = 0; i < v.size(); ++i)
            if (std::abs(v[i]) > best) {
                best = std::abs(v[i]);
                if (where) *where = i;
            }
        return best;
    };

    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter;
        double cur = max_abs_of(r, nullptr);
        if (cur < target) break;

        // The anchor holds the iterates near the initialization while the
        // residual is large; once the iterate is close to the feasible set
        // the pull is dropped entirely, otherwise it caps the step length
        // and convergence degrades to a creep.
        const double w2_eff = cur < 1e-3 ? 0.0 : w2;
        if (w2_eff == 0.0) cost = r.squaredNorm();

        // sparse Jacobian by central differences on each term's support
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd xp = x;
        for (int ti = 0; ti < m; ++ti) {
            const auto& term = sys.terms()[ti];
            for (int v : sys.vars_of_term(term)) {
                double h = 1e-7 * std::max(1.0, std::abs(x[v]));
                xp[v] = x[v] + h;
                double fp = sys.eval_term(term, xp);
                xp[v] = x[v] - h;
                double fm = sys.eval_term(term, xp);
                xp[v] = x[v];
                double d = (fp - fm) / (2 * h);
                if (d != 0.0) trips.emplace_back(ti, v, d);
            }
        }
        Eigen::SparseMatrix<double> J(m, n);
        J.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseMatrix<double> JtJ = Eigen::SparseMatrix<double>(J.transpose()) * J;
        Eigen::VectorXd g = J.transpose() * r + w2_eff * (x - x_anchor);

        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::SparseMatrix<double> A = JtJ;
            for (int d = 0; d < n; ++d)
                A.coeffRef(d, d) += w2_eff + lambda * (JtJ.coeff(d, d) + 1e-8) + 1e-14;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
            if (solver.info() == Eigen::Success) {
                Eigen::VectorXd delta = solver.solve(-g);
                if (delta.lpNorm<Eigen::Infinity>() > 0.5) {
                    lambda *= 4.0;
                    continue;
                }
                Eigen::VectorXd xn = x + delta;
                Eigen::VectorXd rn = sys.eval(xn);
                double cn = rn.squaredNorm() + w2_eff * (xn - x_anchor).squaredNorm();
                if (cn < cost) {
                    x = xn;
                    r = rn;
                    cost = cn;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
            if (lambda > 1e14) break;
        }
        if (!accepted) break;
    }

    out.x = x;
    out.sum_sq = r.squaredNorm();
    out.max_abs = max_abs_of(r, &out.worst_term);
    return out;
}

inline std::string describe_term(const Term& t) {
    std::ostringstream ss;
    if (std::holds_alternative<AngleSumTerm>(t))
        ss << "glue-face angle constraint";
    else if (std::holds_alternative<EdgeMatchTerm>(t))
        ss << "shared-edge agreement";
    else if (std::holds_alternative<EdgeFrozenTerm>(t))
        ss << "frozen edge length";
    else
        ss << "edge-length window";
    return ss.str();
}

// ---------------------------------------------------------------------------
// Brick preparation shared by realize_metric and the hyperbolizer pipeline.

struct Brick {
    ProductCell cell;  // corner ids are realized vertex ids
    int source_cell = -1;
    int step = 0;
};

// Ridge sub-cells of a brick that touch its glue face: all (two cube
// coordinates zeroed) ridges, plus (base facet, one cube coordinate zeroed)
// ridges.
inline std::vector<ProductCell> glue_ridge_cells(const ProductCell& brick) {
    std::vector<ProductCell> out;
    const int bs = brick.base_size();
    const int cd = brick.cube_dim;
    auto subcell = [&](const std::vector<int>& base_sel, const std::vector<int>& free_bits) {
        ProductCell r;
        for (int b : base_sel) r.base_corner_ids.push_back(brick.base_corner_ids[b]);
        r.cube_dim = static_cast<int>(free_bits.size());
        r.corner_ids.resize(r.corner_count());
        for (unsigned m = 0; m < (1u << r.cube_dim); ++m) {
            unsigned full = 0;
            for (std::size_t j = 0; j < free_bits.size(); ++j)
                if (m & (1u << j)) full |= (1u << free_bits[j]);
            for (std::size_t b = 0; b < base_sel.size(); ++b)
                r.corner_ids[m * base_sel.size() + b] = brick.corner(base_sel[b], full);
        }
        return r;
    };

    std::vector<int> all_base(bs);
    for (int b = 0; b < bs; ++b) all_base[b] = b;

    for (int j = 0; j < cd; ++j)
        for (int l = j + 1; l < cd; ++l) {
            std::vector<int> free_bits;
            for (int k = 0; k < cd; ++k)
                if (k != j && k != l) free_bits.push_back(k);
            out.push_back(subcell(all_base, free_bits));
        }
    if (bs >= 2) {
        for (int drop = 0; drop < bs; ++drop) {
            std::vector<int> sel;
            for (int b = 0; b < bs; ++b)
                if (b != drop) sel.push_back(b);
            for (int j = 0; j < cd; ++j) {
                std::vector<int> free_bits;
                for (int k = 0; k < cd; ++k)
                    if (k != j) free_bits.push_back(k);
                out.push_back(subcell(sel, free_bits));
            }
        }
    }
    return out;
}

}  // namespace realize_detail

struct RealizeOptions {
    double edge_scale = 0.25;
    std::uint64_t seed = 0;
    int max_iterations = 500;  // per solve
    int attempts = 6;          // multistart with jittered initialization
};

struct StepRealization {
    std::vector<Chart> charts;
    std::vector<Face> tops;      // new top simplices
    std::vector<int> top_chart;  // aligned chart index (into `charts`)
    std::map<std::pair<int, int>, double> new_edge_lengths;
    std::vector<GlueRidgeRecord> ridges;
    double max_abs = std::numeric_limits<double>::infinity();
    double sum_sq = 0.0;
    int iterations = 0;
    int attempts_used = 0;
    std::string worst;
    bool success = false;
};

namespace realize_detail {

// Comparable corner pairs = edges of the staircase triangulation.
inline std::vector<std::pair<int, int>> brick_edges_local(const ProductCell& cell) {
    std::vector<std::pair<int, int>> out;
    const int bs = cell.base_size();
    const unsigned cubes = 1u << cell.cube_dim;
    for (unsigned m1 = 0; m1 < cubes; ++m1)
        for (int b1 = 0; b1 < bs; ++b1)
            for (unsigned m2 = 0; m2 < cubes; ++m2)
                for (int b2 = 0; b2 < bs; ++b2) {
                    if (m1 == m2 && b1 == b2) continue;
                    bool leq = b1 <= b2 && (m1 & m2) == m1;
                    bool geq = b2 <= b1 && (m1 & m2) == m2;
                    if (!(leq || geq)) continue;
                    int i = static_cast<int>(m1) * bs + b1;
                    int j = static_cast<int>(m2) * bs + b2;
                    if (i < j) out.emplace_back(i, j);
                }
    return out;
}

// Euclidean coordinates of a simplex with the given pairwise distances,
// padded to ambient dimension `dim`.
inline std::vector<Vec> embed_base(const Mat& dist, int dim) {
    const int n = static_cast<int>(dist.rows());
    if (n == 1) return {Vec::Zero(dim)};
    Mat g(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            g(i - 1, j - 1) = 0.5 * (dist(0, i) * dist(0, i) + dist(0, j) * dist(0, j) -
                                     dist(i, j) * dist(i, j));
    Eigen::SelfAdjointEigenSolver<Mat> eig(g);
    Mat half = eig.eigenvectors() *
               eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::vector<Vec> pts(n, Vec::Zero(dim));
    for (int i = 1; i < n; ++i)
        for (int c = 0; c < n - 1 && c < dim; ++c) pts[i][c] = half(i - 1, c);
    return pts;
}

}  // namespace realize_detail

// Solves one family of bricks jointly. `frozen` pins edges already realized
// in earlier steps; bricks must list base corners first (mask 0).
inline StepRealization realize_bricks(const std::vector<realize_detail::Brick>& bricks,
                                      const std::map<std::pair<int, int>, double>& frozen,
                                      const RealizeOptions& opts, int step_index = 0) {
    using namespace realize_detail;
    StepRealization out;

    // chart scaffolding
    std::vector<std::pair<int, int>> chart_shapes;
    std::vector<std::vector<Face>> chart_tops_local;  // realized-id faces
    for (const auto& brick : bricks) {
        chart_shapes.emplace_back(brick.cell.dim(),
                                  static_cast<int>(brick.cell.corner_count()));
        std::vector<Face> tops;
        detail::staircase_chains(brick.cell, tops);
        chart_tops_local.push_back(std::move(tops));
    }

    std::vector<Chart> charts(bricks.size());
    for (std::size_t k = 0; k < bricks.size(); ++k) {
        charts[k].dim = bricks[k].cell.dim();
        charts[k].vertices = bricks[k].cell.corner_ids;
        charts[k].tops = chart_tops_local[k];
        charts[k].step = step_index;
        charts[k].cell = bricks[k].source_cell;
        charts[k].build_local();
    }

    // (a) right angles at glue ridges, described per brick (chart set later)
    struct RidgeSpec {
        int chart;
        Face ridge;
    };
    std::vector<RidgeSpec> ridge_specs;
    std::vector<std::vector<AngleSumTerm>> brick_angles(bricks.size());
    for (std::size_t k = 0; k < bricks.size(); ++k) {
        const auto& brick = bricks[k].cell;
        if (brick.cube_dim == 0) continue;
        for (const auto& ridge_cell : glue_ridge_cells(brick)) {
            std::vector<Face> ridge_tops;
            detail::staircase_chains(ridge_cell, ridge_tops);
            for (const auto& r : ridge_tops) {
                AngleSumTerm term;
                term.chart = static_cast<int>(k);
                term.target = M_PI / 2.0;
                for (const auto& top : charts[k].tops) {
                    if (!face_subset(r, top)) continue;
                    FanPiece piece;
                    for (int v : top) piece.cell.push_back(charts[k].local_index(v));
                    for (std::size_t p = 0; p < top.size(); ++p)
                        if (std::binary_search(r.begin(), r.end(), top[p]))
                            piece.ridge.push_back(static_cast<int>(p));
                    term.pieces.push_back(std::move(piece));
                }
                if (!term.pieces.empty()) {
                    ridge_specs.push_back({static_cast<int>(k), r});
                    brick_angles[k].push_back(std::move(term));
                }
            }
        }
    }

    // (b) shared and frozen edges, (c) length windows
    std::map<std::pair<int, int>, std::vector<std::tuple<int, int, int>>> edge_sites;
    for (std::size_t k = 0; k < bricks.size(); ++k)
        for (auto [i, j] : brick_edges_local(bricks[k].cell)) {
            int vi = bricks[k].cell.corner_ids[i];
            int vj = bricks[k].cell.corner_ids[j];
            edge_sites[edge_key(vi, vj)].push_back({static_cast<int>(k), i, j});
        }

    System sys(chart_shapes);
    for (std::size_t k = 0; k < bricks.size(); ++k)
        for (const auto& t : brick_angles[k]) sys.add(t);
    for (const auto& [key, sites] : edge_sites) {
        auto it = frozen.find(key);
        if (it != frozen.end()) {
            for (const auto& [c, i, j] : sites)
                sys.add(EdgeFrozenTerm{c, i, j, it->second});
            continue;
        }
        for (std::size_t s = 1; s < sites.size(); ++s) {
            const auto& [ca, ia, ja] = sites[s - 1];
            const auto& [cb, ib, jb] = sites[s];
            sys.add(EdgeMatchTerm{ca, ia, ja, cb, ib, jb});
        }
        const auto& [c, i, j] = sites.front();
        sys.add(EdgeWindowTerm{c, i, j, opts.edge_scale / 2.0, 2.0 * opts.edge_scale});
    }

    // initialization: per-brick Euclidean product lifted onto the model
    auto initial_guess = [&](Rng& rng, double jitter) {
        Eigen::VectorXd x(sys.var_count());
        for (std::size_t k = 0; k < bricks.size(); ++k) {
            const auto& cell = bricks[k].cell;
            const int bs = cell.base_size();
            const int d = cell.dim();
            Mat dist = Mat::Zero(bs, bs);
            for (int i = 0; i < bs; ++i)
                for (int j = 0; j < bs; ++j) {
                    if (i == j) continue;
                    auto it = frozen.find(edge_key(cell.base_corner_ids[i], cell.base_corner_ids[j]));
                    dist(i, j) = (it != frozen.end()) ? it->second : opts.edge_scale;
                }
            auto base_pts = embed_base(dist, d);
            for (unsigned m = 0; m < (1u << cell.cube_dim); ++m)
                for (int b = 0; b < bs; ++b) {
                    Vec p = base_pts[b];
                    for (int j = 0; j < cell.cube_dim; ++j)
                        if (m & (1u << j)) p[bs - 1 + j] += opts.edge_scale;
                    // exponential lift keeps radial lengths exact
                    Vec spatial = HPoint::exp_origin(p).spatial();
                    std::size_t lv = static_cast<std::size_t>(m) * bs + b;
                    for (int c = 0; c < d; ++c)
                        x[sys.var_of(static_cast<int>(k), static_cast<int>(lv), c)] =
                            spatial[c] + jitter * rng.normal();
                }
        }
        return x;
    };

    // Pre-solve every brick alone (its own angles, frozen base edges and
    // windows), then polish jointly with the cross-chart couplings.
    auto presolve = [&](Eigen::VectorXd x0) {
        for (std::size_t k = 0; k < bricks.size(); ++k) {
            System sub({chart_shapes[k]});
            for (auto t : brick_angles[k]) {
                t.chart = 0;
                sub.add(std::move(t));
            }
            for (auto [i, j] : brick_edges_local(bricks[k].cell)) {
                int vi = bricks[k].cell.corner_ids[i];
                int vj = bricks[k].cell.corner_ids[j];
                auto it = frozen.find(edge_key(vi, vj));
                if (it != frozen.end())
                    sub.add(EdgeFrozenTerm{0, i, j, it->second});
                else
                    sub.add(
                        EdgeWindowTerm{0, i, j, opts.edge_scale / 2.0, 2.0 * opts.edge_scale});
            }
            Eigen::VectorXd xk(sub.var_count());
            const int base_var = sys.var_of(static_cast<int>(k), 0, 0);
            for (int v = 0; v < sub.var_count(); ++v) xk[v] = x0[base_var + v];
            auto sol = levenberg_solve(sub, xk, opts.max_iterations);
            for (int v = 0; v < sub.var_count(); ++v) x0[base_var + v] = sol.x[v];
        }
        return x0;
    };

    // multistart damped least-squares
    Rng rng(opts.seed + 7919 * static_cast<std::uint64_t>(step_index));
    realize_detail::SolveOutcome best;
    const bool trace = std::getenv("COLLAPSAR_TRACE") != nullptr;
    for (int attempt = 0; attempt < std::max(1, opts.attempts); ++attempt) {
        double jitter = attempt == 0 ? 0.0 : 0.02 * opts.edge_scale * attempt;
        Eigen::VectorXd x0 = presolve(initial_guess(rng, jitter));
        auto sol = levenberg_solve(sys, x0, opts.max_iterations);
        out.attempts_used = attempt + 1;
        if (trace)
            std::cerr << "[realize] step " << step_index << " attempt " << attempt << ": bricks "
                      << bricks.size() << " vars " << sys.var_count() << " terms "
                      << sys.term_count() << " iters " << sol.iterations << " max_abs "
                      << sol.max_abs << "\n";
        if (sol.max_abs < best.max_abs) best = sol;
        if (best.max_abs < kGeomTol) break;
    }

    out.max_abs = best.max_abs;
    out.sum_sq = best.sum_sq;
    out.iterations = best.iterations;
    out.success = best.max_abs < kGeomTol;
    if (best.worst_term >= 0)
        out.worst = realize_detail::describe_term(sys.terms()[best.worst_term]);

    // commit coordinates
    for (std::size_t k = 0; k < bricks.size(); ++k) {
        charts[k].coords.clear();
        for (std::size_t lv = 0; lv < charts[k].vertices.size(); ++lv)
            charts[k].coords.push_back(sys.point(best.x, static_cast<int>(k), static_cast<int>(lv)));
    }
    out.charts = charts;

    for (std::size_t k = 0; k < bricks.size(); ++k)
        for (const auto& top : chart_tops_local[k]) {
            out.tops.push_back(top);
            out.top_chart.push_back(static_cast<int>(k));
        }

    for (const auto& [key, sites] : edge_sites) {
        if (frozen.count(key)) continue;
        const auto& [c, i, j] = sites.front();
        out.new_edge_lengths[key] =
            hdist(out.charts[c].coords[i], out.charts[c].coords[j]);
    }

    for (const auto& spec : ridge_specs) {
        GlueRidgeRecord rec;
        rec.chart = spec.chart;
        rec.ridge = spec.ridge;
        double sum = 0.0;
        const Chart& ch = out.charts[spec.chart];
        for (const auto& top : ch.tops) {
            if (!face_subset(spec.ridge, top)) continue;
            std::vector<HPoint> cell;
            std::vector<int> ridge_pos;
            for (std::size_t p = 0; p < top.size(); ++p) {
                cell.push_back(ch.point_of(top[p]));
                if (std::binary_search(spec.ridge.begin(), spec.ridge.end(), top[p]))
                    ridge_pos.push_back(static_cast<int>(p));
            }
            sum += dihedral_angle(cell, ridge_pos);
        }
        rec.angle = sum;
        out.ridges.push_back(rec);
    }
    return out;
}

// Realizes a free-standing block complex: every cell that is not a face of
// another cell becomes a brick with its own chart.
inline MetricComplex realize_metric(const CellComplex& cc, const RealizeOptions& opts = {}) {
    using namespace realize_detail;
    validate_cell_complex(cc);

    std::vector<Brick> bricks;
    for (std::size_t i = 0; i < cc.cells.size(); ++i) {
        std::set<int> mine(cc.cells[i].corner_ids.begin(), cc.cells[i].corner_ids.end());
        bool contained = false;
        for (std::size_t j = 0; j < cc.cells.size() && !contained; ++j) {
            if (i == j) continue;
            std::set<int> other(cc.cells[j].corner_ids.begin(), cc.cells[j].corner_ids.end());
            contained = other.size() > mine.size() &&
                        std::includes(other.begin(), other.end(), mine.begin(), mine.end());
        }
        if (!contained) bricks.push_back({cc.cells[i], static_cast<int>(i), 0});
    }

    auto step = realize_bricks(bricks, {}, opts, 0);
    if (!step.success) {
        std::ostringstream msg;
        msg << "metric realization stalled at residual " << step.max_abs
            << "; worst constraint: " << step.worst;
        throw realization_error(msg.str());
    }

    MetricComplex m;
    m.edge_scale = opts.edge_scale;
    m.seed = opts.seed;
    m.charts = step.charts;
    m.top_simplices = step.tops;
    for (std::size_t i = 0; i < step.tops.size(); ++i)
        m.chart_of[step.tops[i]] = step.top_chart[i];
    m.edge_length = step.new_edge_lengths;
    m.glue_ridges = step.ridges;
    m.residual.max_abs = step.max_abs;
    m.residual.sum_sq = step.sum_sq;
    m.residual.iterations = step.iterations;
    m.residual.attempts = step.attempts_used;
    m.residual.success = step.success;
    m.residual.worst = step.worst;
    m.residual.per_step = {step.max_abs};
    StepImage img;
    std::set<int> verts;
    for (const auto& c : m.charts) verts.insert(c.vertices.begin(), c.vertices.end());
    img.vertices.assign(verts.begin(), verts.end());
    img.tops = m.top_simplices;
    m.steps.push_back(img);
    for (int v : img.vertices) m.vertex_labels[v] = std::to_string(v);
    return m;
}
}  // namespace collapsar
