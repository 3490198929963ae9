#pragma once

// Constant-curvature model geometry: the hyperboloid model of H^n inside
// Minkowski space R^{n,1} (curvature -1) and the round unit sphere S^n
// (curvature +1). Everything here is pure and thread-safe.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "collapsar/util.hpp"

namespace collapsar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// <a,b>_M = -a0*b0 + sum_{i>=1} ai*bi
inline double minkowski(const Vec& a, const Vec& b) {
    double s = -a[0] * b[0];
    for (Eigen::Index i = 1; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool on_hyperboloid(const Vec& x, double tol = kModelTol) {
    return x.size() >= 2 && x[0] > 0.0 && std::abs(minkowski(x, x) + 1.0) <= tol;
}

// Point of H^n, stored as its Minkowski coordinates (n+1 of them).
struct HPoint {
    Vec coords;

    HPoint() = default;
    explicit HPoint(Vec c) : coords(std::move(c)) {
        if (!on_hyperboloid(coords))
            throw invalid_input_error("point is not on the hyperboloid model");
    }

    // Graph chart of the upper sheet: x -> (sqrt(1+|x|^2), x).
    static HPoint lift(const Vec& spatial) {
        Vec c(spatial.size() + 1);
        c[0] = std::sqrt(1.0 + spatial.squaredNorm());
        c.tail(spatial.size()) = spatial;
        return HPoint(std::move(c));
    }

    // Exponential map at (1,0,...,0); preserves distances from the origin.
    static HPoint exp_origin(const Vec& tangent) {
        double r = tangent.norm();
        Vec c(tangent.size() + 1);
        c[0] = std::cosh(r);
        if (r < 1e-300)
            c.tail(tangent.size()).setZero();
        else
            c.tail(tangent.size()) = (std::sinh(r) / r) * tangent;
        return HPoint(std::move(c));
    }

    Vec spatial() const { return coords.tail(coords.size() - 1); }
    int ambient_dim() const { return static_cast<int>(coords.size()) - 1; }
};

// Rescales onto the model; used after solver steps to control drift.
inline HPoint renormalize(const Vec& x) {
    double q = -minkowski(x, x);
    if (q <= 0.0 || x[0] <= 0.0)
        throw degeneracy_error("cannot renormalize a non-timelike vector onto the hyperboloid");
    Vec y = x / std::sqrt(q);
    return HPoint(std::move(y));
}

inline double hdist(const HPoint& p, const HPoint& q) {
    // Chord form of acosh(-<p,q>); stable for nearly coincident points.
    Vec v = p.coords - q.coords;
    double s = std::max(0.0, minkowski(v, v));
    return 2.0 * std::asinh(0.5 * std::sqrt(s));
}

// Point at arclength fraction t on the geodesic from p to q.
inline HPoint geodesic_point(const HPoint& p, const HPoint& q, double t) {
    double d = hdist(p, q);
    if (d <= 1e-15) return p;
    double sh = std::sinh(d);
    Vec x = (std::sinh((1.0 - t) * d) / sh) * p.coords + (std::sinh(t * d) / sh) * q.coords;
    return renormalize(x);
}

// Unit tangent at p pointing towards q.
inline Vec direction(const HPoint& p, const HPoint& q) {
    Vec t = q.coords + minkowski(p.coords, q.coords) * p.coords;
    double n2 = minkowski(t, t);
    if (n2 <= 1e-30) throw degeneracy_error("zero tangent between coincident points");
    return t / std::sqrt(n2);
}

// Interior angle at p of the geodesic triangle (p,u,w).
inline double vertex_angle(const HPoint& p, const HPoint& u, const HPoint& w) {
    Vec a = direction(p, u), b = direction(p, w);
    return std::acos(std::clamp(minkowski(a, b), -1.0, 1.0));
}

// Minkowski Gram matrix of a point tuple.
inline Mat gram(const std::vector<HPoint>& pts) {
    Mat g(pts.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            g(i, j) = minkowski(pts[i].coords, pts[j].coords);
    return g;
}

// Hyperbolic law of cosines: angle opposite side a in a triangle with sides a,b,c.
inline double hyperbolic_angle_from_sides(double a, double b, double c) {
    double denom = std::sinh(b) * std::sinh(c);
    if (denom <= 1e-300) throw degeneracy_error("degenerate hyperbolic triangle");
    double v = (std::cosh(b) * std::cosh(c) - std::cosh(a)) / denom;
    return std::acos(std::clamp(v, -1.0, 1.0));
}

// Spherical law of cosines: angle opposite side a.
inline double spherical_angle_from_sides(double a, double b, double c) {
    double denom = std::sin(b) * std::sin(c);
    if (denom <= 1e-300) throw degeneracy_error("degenerate spherical triangle");
    double v = (std::cos(a) - std::cos(b) * std::cos(c)) / denom;
    return std::acos(std::clamp(v, -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Sphere S^n

struct SPoint {
    Vec coords;

    SPoint() = default;
    explicit SPoint(Vec c) : coords(std::move(c)) {
        if (std::abs(coords.norm() - 1.0) > kModelTol)
            throw invalid_input_error("point is not on the unit sphere");
    }

    static SPoint project(const Vec& v) {
        double n = v.norm();
        if (n <= 1e-30) throw degeneracy_error("cannot project the zero vector to the sphere");
        Vec c = v / n;
        return SPoint(std::move(c));
    }
};

inline double spherical_dist(const SPoint& p, const SPoint& q) {
    return std::acos(std::clamp(p.coords.dot(q.coords), -1.0, 1.0));
}

inline SPoint spherical_geodesic_point(const SPoint& p, const SPoint& q, double t) {
    double d = spherical_dist(p, q);
    if (d <= 1e-15) return p;
    double s = std::sin(d);
    Vec x = (std::sin((1.0 - t) * d) / s) * p.coords + (std::sin(t * d) / s) * q.coords;
    return SPoint::project(x);
}

// ---------------------------------------------------------------------------
// Dihedral angles of hyperbolic simplices

// Spacelike unit normal of the hyperplane spanned by `span`, oriented so that
// <n, inside> <= 0.
inline Vec facet_normal(const std::vector<HPoint>& span, const HPoint& inside) {
    int dim = static_cast<int>(span.front().coords.size());
    Mat rows(span.size(), dim);
    Eigen::DiagonalMatrix<double, Eigen::Dynamic> J(dim);
    J.diagonal().setOnes();
    J.diagonal()[0] = -1.0;
    for (std::size_t i = 0; i < span.size(); ++i)
        rows.row(i) = (J * span[i].coords).transpose();
    if (static_cast<int>(span.size()) != dim - 1)
        throw invalid_input_error("facet must have exactly ambient-dimension many vertices");
    Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[span.size() - 1] < 1e-10 * std::max(1.0, sv[0]))
        throw degeneracy_error("facet does not span a hyperplane");
    Vec n = svd.matrixV().col(dim - 1);
    double nn = minkowski(n, n);
    if (nn <= 1e-14) throw degeneracy_error("facet normal is not spacelike");
    n /= std::sqrt(nn);
    if (minkowski(n, inside.coords) > 0) n = -n;
    return n;
}

// Interior dihedral angle of the simplex `cell` at the ridge given by vertex
// indices. The cell's vertices must be affinely independent in the model; the
// ridge must omit exactly two vertices.
inline double dihedral_angle(const std::vector<HPoint>& cell, const std::vector<int>& ridge) {
    const int n = static_cast<int>(cell.size());
    if (static_cast<int>(ridge.size()) != n - 2)
        throw invalid_input_error("ridge must omit exactly two vertices of the simplex");
    std::vector<bool> in_ridge(n, false);
    for (int i : ridge) {
        if (i < 0 || i >= n || in_ridge[i]) throw invalid_input_error("bad ridge index");
        in_ridge[i] = true;
    }
    std::array<int, 2> rest{};
    int k = 0;
    for (int i = 0; i < n; ++i)
        if (!in_ridge[i]) rest[k++] = i;

    std::vector<HPoint> facet_a, facet_b;
    for (int i = 0; i < n; ++i) {
        if (in_ridge[i] || i == rest[0]) facet_a.push_back(cell[i]);
        if (in_ridge[i] || i == rest[1]) facet_b.push_back(cell[i]);
    }
    Vec na = facet_normal(facet_a, cell[rest[1]]);
    Vec nb = facet_normal(facet_b, cell[rest[0]]);
    return std::acos(std::clamp(-minkowski(na, nb), -1.0, 1.0));
}

// Same angle via tangent projections at a ridge point: project the directions
// towards the two off-ridge vertices orthogonally to the ridge tangents.
// Cheaper than the normal-vector route; the two are cross-checked in tests.
inline double dihedral_angle_tangent(const std::vector<HPoint>& cell,
                                     const std::vector<int>& ridge) {
    const int n = static_cast<int>(cell.size());
    std::vector<bool> in_ridge(n, false);
    for (int i : ridge) in_ridge[i] = true;
    int a = -1, b = -1;
    for (int i = 0; i < n; ++i)
        if (!in_ridge[i]) (a < 0 ? a : b) = i;
    const HPoint& p = cell[ridge[0]];

    auto tangent = [&](const HPoint& q) -> Vec {
        return q.coords + minkowski(p.coords, q.coords) * p.coords;
    };

    // orthonormal frame of the ridge tangents at p (Minkowski restricted to
    // the tangent space is positive definite)
    std::vector<Vec> frame;
    for (std::size_t k = 1; k < ridge.size(); ++k) {
        Vec t = tangent(cell[ridge[k]]);
        for (const Vec& e : frame) t -= minkowski(t, e) * e;
        double nn = minkowski(t, t);
        if (nn <= 1e-20) throw degeneracy_error("ridge tangents are degenerate");
        frame.push_back(t / std::sqrt(nn));
    }
    auto project = [&](Vec t) {
        for (const Vec& e : frame) t -= minkowski(t, e) * e;
        return t;
    };
    Vec u = project(tangent(cell[a]));
    Vec v = project(tangent(cell[b]));
    double nu = minkowski(u, u), nv = minkowski(v, v);
    if (nu <= 1e-20 || nv <= 1e-20) throw degeneracy_error("degenerate facet directions");
    return std::acos(std::clamp(minkowski(u, v) / std::sqrt(nu * nv), -1.0, 1.0));
}

// ---------------------------------------------------------------------------
// Comparison triangles in H^2

// A geodesic triangle in H^2 with prescribed side lengths, realized as three
// concrete points: side a = |BC|, b = |CA|, c = |AB|.
struct ComparisonTriangle {
    double a = 0, b = 0, c = 0;
    std::array<HPoint, 3> vertex;  // A, B, C

    static ComparisonTriangle from_sides(double a, double b, double c) {
        if (a < 0 || b < 0 || c < 0)
            throw invalid_input_error("comparison triangle sides must be nonnegative");
        double slack = kGeomTol * std::max({1.0, a, b, c});
        if (a > b + c + slack || b > a + c + slack || c > a + b + slack)
            throw invalid_input_error("comparison triangle sides violate the triangle inequality");
        ComparisonTriangle t;
        t.a = a; t.b = b; t.c = c;
        Vec A(3); A << 1, 0, 0;
        Vec B(3); B << std::cosh(c), std::sinh(c), 0;
        double alpha = 0.0;  // angle at A
        if (b > 1e-15 && c > 1e-15)
            alpha = hyperbolic_angle_from_sides(a, b, c);
        Vec C(3);
        C << std::cosh(b), std::sinh(b) * std::cos(alpha), std::sinh(b) * std::sin(alpha);
        t.vertex = {HPoint(A), renormalize(B), renormalize(C)};
        return t;
    }
};

// Point at arclength fraction t of a side; side 0 = AB, 1 = BC, 2 = CA.
inline HPoint comparison_point(const ComparisonTriangle& tri, int side, double t) {
    if (side < 0 || side > 2) throw invalid_input_error("side id must be 0, 1 or 2");
    if (t < 0.0 || t > 1.0) throw invalid_input_error("side parameter must lie in [0,1]");
    int i = side, j = (side + 1) % 3;
    return geodesic_point(tri.vertex[i], tri.vertex[j], t);
}

// ---------------------------------------------------------------------------
// Lorentz transforms (used heavily by invariance tests)

inline Mat lorentz_boost(int dim, int axis, double rapidity) {
    Mat m = Mat::Identity(dim, dim);
    m(0, 0) = std::cosh(rapidity);
    m(0, axis) = m(axis, 0) = std::sinh(rapidity);
    m(axis, axis) = std::cosh(rapidity);
    return m;
}

inline Mat random_lorentz(Rng& rng, int dim, double max_rapidity = 1.0) {
    // random spatial rotation
    Mat r(dim - 1, dim - 1);
    for (int i = 0; i < dim - 1; ++i)
        for (int j = 0; j < dim - 1; ++j) r(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(r);
    Mat q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    Mat m = Mat::Identity(dim, dim);
    m.bottomRightCorner(dim - 1, dim - 1) = q;
    for (int axis = 1; axis < dim; ++axis)
        m = lorentz_boost(dim, axis, rng.uniform(-max_rapidity, max_rapidity)) * m;
    return m;
}

inline HPoint apply_lorentz(const Mat& m, const HPoint& p) {
    return renormalize(m * p.coords);
}

}  // namespace collapsar
