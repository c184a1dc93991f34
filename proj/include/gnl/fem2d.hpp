#ifndef GNL_FEM2D_HPP
#define GNL_FEM2D_HPP

/// Gaussian-weighted finite elements for planar (m = 2) origin-symmetric
/// domains: meshing, piecewise-linear assembly of the weighted stiffness and
/// mass matrices
///
///     K_ij = int grad phi_i . grad phi_j e^(-|x|^2/2) dx
///     M_ij = int phi_i phi_j e^(-|x|^2/2) dx
///
/// and extraction of the lowest generalized eigenpairs. Meshes are built so
/// the node set is exactly symmetric under x -> -x: structured grids for
/// rectangles, ring meshes for disks and annuli, and a lattice + Delaunay +
/// smoothing pipeline for ellipses and polygons (half generated, half
/// mirrored).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gnl/errors.hpp"
#include "gnl/quadrature.hpp"

namespace gnl {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

enum class Domain2DKind { disk, ellipse, rectangle, annulus, polygon };

/// Origin-symmetric planar domain. Parametric kinds are symmetric by
/// construction; polygons are validated: the vertex set must map to itself
/// under negation within 1e-12.
struct Domain2D {
    Domain2DKind kind = Domain2DKind::disk;
    double R = 1.0;        // disk
    double a = 1.0, b = 1.0; // ellipse semi-axes / rectangle half-widths
    double R1 = 0.5, R2 = 1.0; // annulus
    std::vector<Vec2> vertices; // polygon, counter-clockwise

    static Domain2D disk(double R) {
        if (!(R > 0.0)) throw std::invalid_argument("disk: R must be > 0");
        Domain2D d;
        d.kind = Domain2DKind::disk;
        d.R = R;
        return d;
    }
    static Domain2D ellipse(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse: axes must be > 0");
        Domain2D d;
        d.kind = Domain2DKind::ellipse;
        d.a = a;
        d.b = b;
        return d;
    }
    static Domain2D rectangle(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("rectangle: half-widths must be > 0");
        Domain2D d;
        d.kind = Domain2DKind::rectangle;
        d.a = a;
        d.b = b;
        return d;
    }
    static Domain2D annulus(double R1, double R2) {
        if (!(0.0 < R1 && R1 < R2)) throw std::invalid_argument("annulus: requires 0 < R1 < R2");
        Domain2D d;
        d.kind = Domain2DKind::annulus;
        d.R1 = R1;
        d.R2 = R2;
        return d;
    }
    static Domain2D polygon(std::vector<Vec2> verts) {
        if (verts.size() < 4)
            throw std::invalid_argument("polygon: need at least 4 vertices for central symmetry");
        for (const auto& v : verts) {
            bool matched = false;
            for (const auto& w : verts)
                if (std::abs(v.x + w.x) < 1e-12 && std::abs(v.y + w.y) < 1e-12) {
                    matched = true;
                    break;
                }
            if (!matched)
                throw std::invalid_argument("polygon: vertex set is not symmetric about the origin");
        }
        Domain2D d;
        d.kind = Domain2DKind::polygon;
        d.vertices = std::move(verts);
        return d;
    }

    bool contains(double x, double y) const {
        switch (kind) {
        case Domain2DKind::disk:
            return x * x + y * y <= R * R;
        case Domain2DKind::ellipse: {
            const double u = x / a, v = y / b;
            return u * u + v * v <= 1.0;
        }
        case Domain2DKind::rectangle:
            return std::abs(x) <= a && std::abs(y) <= b;
        case Domain2DKind::annulus: {
            const double r2 = x * x + y * y;
            return r2 >= R1 * R1 && r2 <= R2 * R2;
        }
        case Domain2DKind::polygon: {
            // ray crossing
            bool in = false;
            const std::size_t n = vertices.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const auto& p = vertices[i];
                const auto& q = vertices[j];
                if ((p.y > y) != (q.y > y) && x < (q.x - p.x) * (y - p.y) / (q.y - p.y) + p.x)
                    in = !in;
            }
            return in;
        }
        }
        return false;
    }

    double inradius() const {
        switch (kind) {
        case Domain2DKind::disk:
            return R;
        case Domain2DKind::ellipse:
            return std::min(a, b);
        case Domain2DKind::rectangle:
            return std::min(a, b);
        case Domain2DKind::annulus:
            return 0.5 * (R2 - R1);
        case Domain2DKind::polygon: {
            double best = std::numeric_limits<double>::infinity();
            const std::size_t n = vertices.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const double ex = vertices[i].x - vertices[j].x;
                const double ey = vertices[i].y - vertices[j].y;
                const double len = std::hypot(ex, ey);
                if (len == 0.0) continue;
                best = std::min(best, std::abs(ex * vertices[j].y - ey * vertices[j].x) / len);
            }
            return best;
        }
        }
        return 0.0;
    }

    /// Radial section [r_lo(theta), r_hi(theta)] of the boundary along the ray
    /// at angle theta; domains other than the annulus are star-shaped about
    /// the origin.
    std::pair<double, double> radial_section(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        switch (kind) {
        case Domain2DKind::disk:
            return {0.0, R};
        case Domain2DKind::ellipse: {
            const double u = c / a, v = s / b;
            return {0.0, 1.0 / std::sqrt(u * u + v * v)};
        }
        case Domain2DKind::rectangle: {
            const double tx = std::abs(c) > 1e-300 ? a / std::abs(c) : std::numeric_limits<double>::infinity();
            const double ty = std::abs(s) > 1e-300 ? b / std::abs(s) : std::numeric_limits<double>::infinity();
            return {0.0, std::min(tx, ty)};
        }
        case Domain2DKind::annulus:
            return {R1, R2};
        case Domain2DKind::polygon: {
            double best = std::numeric_limits<double>::infinity();
            const std::size_t n = vertices.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                // solve p + t(q - p) = r (c, s), r > 0, t in [0,1]
                const auto& p = vertices[j];
                const auto& q = vertices[i];
                const double dx = q.x - p.x, dy = q.y - p.y;
                const double det = dx * s - dy * c;
                if (std::abs(det) < 1e-14) continue;
                const double t = (p.y * c - p.x * s) / det;
                if (t < -1e-12 || t > 1.0 + 1e-12) continue;
                const double r = (c != 0.0 && std::abs(c) >= std::abs(s))
                                     ? (p.x + t * dx) / c
                                     : (p.y + t * dy) / s;
                if (r > 1e-12) best = std::min(best, r);
            }
            if (!std::isfinite(best))
                throw std::invalid_argument("polygon: not star-shaped about the origin");
            return {0.0, best};
        }
        }
        return {0.0, 0.0};
    }

    /// Boundary angles where the section radius is non-smooth (corners).
    std::vector<double> corner_angles() const {
        std::vector<double> out;
        if (kind == Domain2DKind::rectangle) {
            for (double sx : {1.0, -1.0})
                for (double sy : {1.0, -1.0}) out.push_back(std::atan2(sy * b, sx * a));
        } else if (kind == Domain2DKind::polygon) {
            for (const auto& v : vertices) out.push_back(std::atan2(v.y, v.x));
        }
        for (double& t : out)
            if (t < 0.0) t += 2.0 * std::numbers::pi;
        std::sort(out.begin(), out.end());
        return out;
    }
};

struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles; // counter-clockwise
    std::vector<std::array<int, 2>> boundary_edges;
    double h = 0.0; ///< longest edge in the mesh

    double triangle_area(std::size_t t) const {
        const auto& [i, j, k] = triangles[t];
        return 0.5 * ((nodes[j].x - nodes[i].x) * (nodes[k].y - nodes[i].y) -
                      (nodes[k].x - nodes[i].x) * (nodes[j].y - nodes[i].y));
    }

    double min_angle_degrees() const {
        double worst = 180.0;
        for (const auto& tri : triangles) {
            for (int c = 0; c < 3; ++c) {
                const Vec2& p = nodes[tri[c]];
                const Vec2& q = nodes[tri[(c + 1) % 3]];
                const Vec2& r = nodes[tri[(c + 2) % 3]];
                const double ux = q.x - p.x, uy = q.y - p.y;
                const double vx = r.x - p.x, vy = r.y - p.y;
                const double dot = ux * vx + uy * vy;
                const double cr = ux * vy - uy * vx;
                worst = std::min(worst, std::atan2(std::abs(cr), dot) * 180.0 / std::numbers::pi);
            }
        }
        return worst;
    }

    /// Largest node-set deviation from central symmetry: max over nodes of the
    /// distance to the nearest negated node.
    double symmetry_defect() const {
        double worst = 0.0;
        for (const auto& p : nodes) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : nodes)
                best = std::min(best, std::hypot(p.x + q.x, p.y + q.y));
            worst = std::max(worst, best);
        }
        return worst;
    }

    bool conforming() const {
        std::map<std::pair<int, int>, int> edge_count;
        for (const auto& tri : triangles)
            for (int c = 0; c < 3; ++c) {
                int u = tri[c], v = tri[(c + 1) % 3];
                if (u > v) std::swap(u, v);
                ++edge_count[{u, v}];
            }
        for (const auto& [e, cnt] : edge_count)
            if (cnt > 2) return false;
        return true;
    }
};

namespace detail {

inline void finalize_mesh(Mesh& mesh) {
    // enforce counter-clockwise orientation, collect boundary edges and the
    // characteristic size
    for (auto& tri : mesh.triangles) {
        const double area = 0.5 * ((mesh.nodes[tri[1]].x - mesh.nodes[tri[0]].x) *
                                       (mesh.nodes[tri[2]].y - mesh.nodes[tri[0]].y) -
                                   (mesh.nodes[tri[2]].x - mesh.nodes[tri[0]].x) *
                                       (mesh.nodes[tri[1]].y - mesh.nodes[tri[0]].y));
        if (area < 0.0) std::swap(tri[1], tri[2]);
    }
    std::map<std::pair<int, int>, int> edge_count;
    double hmax = 0.0;
    for (const auto& tri : mesh.triangles)
        for (int c = 0; c < 3; ++c) {
            int u = tri[c], v = tri[(c + 1) % 3];
            hmax = std::max(hmax, std::hypot(mesh.nodes[u].x - mesh.nodes[v].x,
                                             mesh.nodes[u].y - mesh.nodes[v].y));
            if (u > v) std::swap(u, v);
            ++edge_count[{u, v}];
        }
    mesh.boundary_edges.clear();
    for (const auto& [e, cnt] : edge_count)
        if (cnt == 1) mesh.boundary_edges.push_back({e.first, e.second});
    mesh.h = hmax;
}

// --- structured rectangle -------------------------------------------------

inline Mesh mesh_rectangle(double a, double b, double target_h) {
    auto odd = [](int n) { return n % 2 == 0 ? n + 1 : n; };
    const int nx = odd(std::max(3, static_cast<int>(std::ceil(2.0 * a / target_h))));
    const int ny = odd(std::max(3, static_cast<int>(std::ceil(2.0 * b / target_h))));
    const double hx = 2.0 * a / nx, hy = 2.0 * b / ny;
    Mesh mesh;
    mesh.nodes.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.nodes.push_back({-a + hx * i, -b + hy * j});
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int p = id(i, j), q = id(i + 1, j), r = id(i + 1, j + 1), s = id(i, j + 1);
            // alternating diagonal: with odd cell counts the pattern is
            // invariant under both negation and quarter-turns
            if ((i + j) % 2 == 0) {
                mesh.triangles.push_back({p, q, r});
                mesh.triangles.push_back({p, r, s});
            } else {
                mesh.triangles.push_back({p, q, s});
                mesh.triangles.push_back({q, r, s});
            }
        }
    finalize_mesh(mesh);
    return mesh;
}

// --- ring meshes (disk / annulus) ------------------------------------------

// nodes on a circle of radius r, count n (even): half generated, half mirrored
// so antipodal pairs negate exactly
inline std::vector<Vec2> circle_nodes(double r, int n) {
    std::vector<Vec2> out(n);
    for (int k = 0; k < n / 2; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        out[k] = {r * std::cos(t), r * std::sin(t)};
        out[k + n / 2] = {-out[k].x, -out[k].y};
    }
    return out;
}

// Triangulate the strip between two concentric node rings by merging their
// angular sequences; ring node k sits exactly at angle 2 pi k / n.
inline void triangulate_strip(Mesh& mesh, const std::vector<int>& inner,
                              const std::vector<int>& outer) {
    const int ni = static_cast<int>(inner.size());
    const int no = static_cast<int>(outer.size());
    int i = 0, j = 0;
    while (i < ni || j < no) {
        const double a_next = static_cast<double>(i + 1) / ni;
        const double b_next = static_cast<double>(j + 1) / no;
        const bool advance_inner = j >= no || (i < ni && a_next <= b_next + 1e-15);
        if (advance_inner) {
            mesh.triangles.push_back({inner[i % ni], outer[j % no], inner[(i + 1) % ni]});
            ++i;
        } else {
            mesh.triangles.push_back({outer[j % no], outer[(j + 1) % no], inner[i % ni]});
            ++j;
        }
    }
}

inline Mesh mesh_rings(double r_inner, double r_outer, double target_h) {
    const int n_rings = std::max(2, static_cast<int>(std::lround((r_outer - r_inner) / target_h)));
    const double dr = (r_outer - r_inner) / n_rings;
    Mesh mesh;
    std::vector<std::vector<int>> rings;
    const bool has_center = (r_inner == 0.0);
    if (has_center) mesh.nodes.push_back({0.0, 0.0});
    const int first_ring = has_center ? 1 : 0;
    for (int i = first_ring; i <= n_rings; ++i) {
        const double r = r_inner + dr * i;
        int n = std::max(6, static_cast<int>(std::lround(2.0 * std::numbers::pi * r / (0.9 * target_h))));
        if (n % 2) ++n;
        const int base = static_cast<int>(mesh.nodes.size());
        for (const auto& p : circle_nodes(r, n)) mesh.nodes.push_back(p);
        std::vector<int> ids(n);
        for (int k = 0; k < n; ++k) ids[k] = base + k;
        rings.push_back(ids);
    }
    if (has_center) {
        const auto& r1 = rings.front();
        for (std::size_t k = 0; k < r1.size(); ++k)
            mesh.triangles.push_back({0, r1[k], r1[(k + 1) % r1.size()]});
    }
    for (std::size_t i = 0; i + 1 < rings.size(); ++i) triangulate_strip(mesh, rings[i], rings[i + 1]);
    finalize_mesh(mesh);
    return mesh;
}

// --- Delaunay (Bowyer-Watson) ----------------------------------------------

struct DelaunayTri {
    int a, b, c;
    double cx, cy, r2; // circumcircle
};

inline DelaunayTri make_tri(const std::vector<Vec2>& pts, int a, int b, int c) {
    const Vec2 &A = pts[a], &B = pts[b], &C = pts[c];
    const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
    const double a2 = A.x * A.x + A.y * A.y;
    const double b2 = B.x * B.x + B.y * B.y;
    const double c2 = C.x * C.x + C.y * C.y;
    DelaunayTri t;
    t.a = a;
    t.b = b;
    t.c = c;
    t.cx = (a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d;
    t.cy = (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d;
    const double dx = A.x - t.cx, dy = A.y - t.cy;
    t.r2 = dx * dx + dy * dy;
    return t;
}

inline std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
    std::vector<Vec2> pts = points;
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pts) {
        lo = std::min({lo, p.x, p.y});
        hi = std::max({hi, p.x, p.y});
    }
    const double span = std::max(hi - lo, 1.0);
    const int s0 = static_cast<int>(pts.size());
    pts.push_back({lo - 10.0 * span, lo - 10.0 * span});
    pts.push_back({lo + 30.0 * span, lo - 10.0 * span});
    pts.push_back({lo - 10.0 * span, lo + 30.0 * span});

    std::vector<DelaunayTri> tris{make_tri(pts, s0, s0 + 1, s0 + 2)};
    for (int p = 0; p < s0; ++p) {
        std::vector<std::array<int, 2>> cavity;
        std::vector<DelaunayTri> keep;
        keep.reserve(tris.size());
        for (const auto& t : tris) {
            const double dx = pts[p].x - t.cx, dy = pts[p].y - t.cy;
            if (dx * dx + dy * dy <= t.r2 * (1.0 + 1e-12)) {
                cavity.push_back({t.a, t.b});
                cavity.push_back({t.b, t.c});
                cavity.push_back({t.c, t.a});
            } else {
                keep.push_back(t);
            }
        }
        // boundary of the cavity: edges that appear exactly once
        std::vector<std::array<int, 2>> boundary;
        for (const auto& e : cavity) {
            bool dup = false;
            for (const auto& f : cavity)
                if (e[0] == f[1] && e[1] == f[0]) {
                    dup = true;
                    break;
                }
            if (!dup) boundary.push_back(e);
        }
        tris = std::move(keep);
        for (const auto& e : boundary) tris.push_back(make_tri(pts, e[0], e[1], p));
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris)
        if (t.a < s0 && t.b < s0 && t.c < s0) out.push_back({t.a, t.b, t.c});
    return out;
}

// --- lattice + smoothing mesher (ellipse, polygon) --------------------------

inline std::vector<Vec2> boundary_samples(const Domain2D& dom, double target_h) {
    std::vector<Vec2> half;
    if (dom.kind == Domain2DKind::ellipse) {
        // arc-length equidistribution over the upper half, dense parameter scan
        const int dense = 8192;
        std::vector<double> cum(dense + 1, 0.0);
        auto point = [&](double t) {
            return Vec2{dom.a * std::cos(t), dom.b * std::sin(t)};
        };
        for (int i = 1; i <= dense; ++i) {
            const Vec2 p = point(std::numbers::pi * (i - 1) / dense);
            const Vec2 q = point(std::numbers::pi * i / dense);
            cum[i] = cum[i - 1] + std::hypot(q.x - p.x, q.y - p.y);
        }
        const int count = std::max(8, static_cast<int>(std::lround(cum[dense] / target_h)));
        for (int k = 0; k < count; ++k) {
            const double target = cum[dense] * k / count;
            const auto it = std::lower_bound(cum.begin(), cum.end(), target);
            const int i = std::max<int>(1, static_cast<int>(it - cum.begin()));
            const double f = (target - cum[i - 1]) / std::max(cum[i] - cum[i - 1], 1e-300);
            half.push_back(point(std::numbers::pi * (i - 1 + f) / dense));
        }
    } else if (dom.kind == Domain2DKind::polygon) {
        const std::size_t n = dom.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& p = dom.vertices[i];
            const Vec2& q = dom.vertices[(i + 1) % n];
            const double len = std::hypot(q.x - p.x, q.y - p.y);
            const int segs = std::max(1, static_cast<int>(std::lround(len / target_h)));
            for (int s = 0; s < segs; ++s) {
                const double f = static_cast<double>(s) / segs;
                const Vec2 v{p.x + f * (q.x - p.x), p.y + f * (q.y - p.y)};
                if (v.y > 1e-12 || (std::abs(v.y) <= 1e-12 && v.x > 0.0)) half.push_back(v);
            }
        }
    }
    std::vector<Vec2> out;
    out.reserve(2 * half.size());
    for (const auto& p : half) out.push_back(p);
    for (const auto& p : half) out.push_back({-p.x, -p.y});
    return out;
}

inline Mesh mesh_lattice_smoothed(const Domain2D& dom, double target_h) {
    std::vector<Vec2> boundary = boundary_samples(dom, target_h);

    // symmetric hex lattice, kept when inside and clear of the boundary
    std::vector<Vec2> interior;
    const double dx = target_h;
    const double dy = target_h * std::sqrt(3.0) / 2.0;
    double extent = 0.0;
    for (const auto& p : boundary) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
    const int imax = static_cast<int>(extent / dx) + 2;
    const int jmax = static_cast<int>(extent / dy) + 2;
    auto near_boundary = [&](const Vec2& p) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : boundary) {
            best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
            if (best < 0.55 * target_h) return true;
        }
        return false;
    };
    for (int j = -jmax; j <= jmax; ++j)
        for (int i = -imax; i <= imax; ++i) {
            const Vec2 p{(i + 0.5 * std::abs(j % 2)) * dx, j * dy};
            if (!dom.contains(p.x, p.y)) continue;
            if (near_boundary(p)) continue;
            interior.push_back(p);
        }

    std::vector<Vec2> pts = boundary;
    pts.insert(pts.end(), interior.begin(), interior.end());
    const int n_bnd = static_cast<int>(boundary.size());
    const int n_all = static_cast<int>(pts.size());

    // mirror pairing (exact by construction; lattice rows negate exactly)
    std::vector<int> mirror(n_all, -1);
    for (int i = 0; i < n_all; ++i) {
        if (mirror[i] >= 0) continue;
        for (int j = i; j < n_all; ++j)
            if (std::abs(pts[i].x + pts[j].x) < 1e-9 && std::abs(pts[i].y + pts[j].y) < 1e-9) {
                mirror[i] = j;
                mirror[j] = i;
                break;
            }
    }

    std::vector<std::array<int, 3>> tris;
    auto keep_inside = [&]() {
        std::vector<std::array<int, 3>> kept;
        for (const auto& t : tris) {
            const double cx = (pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0;
            const double cy = (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0;
            if (dom.contains(cx, cy)) kept.push_back(t);
        }
        tris = std::move(kept);
    };

    for (int round = 0; round < 4; ++round) {
        tris = delaunay(pts);
        keep_inside();
        // Laplacian smoothing of interior nodes, symmetrized each pass
        for (int pass = 0; pass < 4; ++pass) {
            std::vector<Vec2> acc(n_all, {0.0, 0.0});
            std::vector<int> deg(n_all, 0);
            for (const auto& t : tris)
                for (int c = 0; c < 3; ++c) {
                    const int u = t[c], v = t[(c + 1) % 3];
                    acc[u].x += pts[v].x;
                    acc[u].y += pts[v].y;
                    ++deg[u];
                    acc[v].x += pts[u].x;
                    acc[v].y += pts[u].y;
                    ++deg[v];
                }
            for (int i = n_bnd; i < n_all; ++i)
                if (deg[i] > 0) pts[i] = {acc[i].x / deg[i], acc[i].y / deg[i]};
            for (int i = n_bnd; i < n_all; ++i)
                if (mirror[i] > i) pts[mirror[i]] = {-pts[i].x, -pts[i].y};
        }
    }
    tris = delaunay(pts);
    keep_inside();

    Mesh mesh;
    mesh.nodes = pts;
    mesh.triangles = tris;
    finalize_mesh(mesh);
    return mesh;
}

} // namespace detail

/// Symmetric conforming triangulation of the domain with characteristic size
/// near target_h. Boundary nodes lie on the exact boundary curve.
inline Mesh mesh_domain(const Domain2D& domain, double target_h) {
    if (!(target_h > 0.0)) throw mesh_error("mesh_domain: target_h must be > 0");
    if (target_h >= domain.inradius())
        throw mesh_error("mesh_domain: target_h must be smaller than the domain inradius");

    Mesh mesh;
    switch (domain.kind) {
    case Domain2DKind::rectangle:
        mesh = detail::mesh_rectangle(domain.a, domain.b, target_h);
        break;
    case Domain2DKind::disk:
        mesh = detail::mesh_rings(0.0, domain.R, target_h);
        break;
    case Domain2DKind::annulus:
        mesh = detail::mesh_rings(domain.R1, domain.R2, target_h);
        break;
    case Domain2DKind::ellipse:
    case Domain2DKind::polygon:
        mesh = detail::mesh_lattice_smoothed(domain, target_h);
        break;
    }
    if (mesh.triangles.empty()) throw mesh_error("mesh_domain: degenerate domain produced no mesh");
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (mesh.triangle_area(t) <= 0.0)
            throw mesh_error("mesh_domain: degenerate triangle " + std::to_string(t));
    const double worst_angle = mesh.min_angle_degrees();
    if (worst_angle < 20.0)
        throw mesh_error("mesh_domain: mesh quality below the 20 degree floor (got " +
                         std::to_string(worst_angle) + ")");
    return mesh;
}

/// Plain-text mesh format: node count, "x y" lines, triangle count, "i j k"
/// lines (0-based indices).
inline void write_mesh(const Mesh& mesh, std::ostream& os) {
    os.precision(17);
    os << mesh.nodes.size() << "\n";
    for (const auto& p : mesh.nodes) os << p.x << " " << p.y << "\n";
    os << mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

inline Mesh read_mesh(std::istream& is) {
    Mesh mesh;
    std::size_t nn = 0, nt = 0;
    if (!(is >> nn)) throw mesh_error("read_mesh: missing node count");
    mesh.nodes.resize(nn);
    for (auto& p : mesh.nodes)
        if (!(is >> p.x >> p.y)) throw mesh_error("read_mesh: truncated node list");
    if (!(is >> nt)) throw mesh_error("read_mesh: missing triangle count");
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) {
        if (!(is >> t[0] >> t[1] >> t[2])) throw mesh_error("read_mesh: truncated triangle list");
        for (int v : t)
            if (v < 0 || v >= static_cast<int>(nn)) throw mesh_error("read_mesh: index out of range");
    }
    detail::finalize_mesh(mesh);
    return mesh;
}

inline void write_mesh_file(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw mesh_error("write_mesh_file: cannot open " + path);
    write_mesh(mesh, os);
}

inline Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw mesh_error("read_mesh_file: cannot open " + path);
    return read_mesh(is);
}

// --- assembly ----------------------------------------------------------------

/// Degree-4 six-point triangle rule in barycentric coordinates; weights sum
/// to one and are scaled by the triangle area on use.
struct TriangleRule6 {
    static constexpr int size = 6;
    static constexpr double w[6] = {0.223381589678011, 0.223381589678011, 0.223381589678011,
                                    0.109951743655322, 0.109951743655322, 0.109951743655322};
    static constexpr double l1[6] = {0.108103018168070, 0.445948490915965, 0.445948490915965,
                                     0.816847572980459, 0.091576213509771, 0.091576213509771};
    static constexpr double l2[6] = {0.445948490915965, 0.108103018168070, 0.445948490915965,
                                     0.091576213509771, 0.816847572980459, 0.091576213509771};
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    int size() const { return static_cast<int>(stiffness.rows()); }
};

/// Piecewise-linear Galerkin assembly of the Gaussian-weighted stiffness and
/// mass matrices. The weight e^(-|x|^2/2) is evaluated at every quadrature
/// point (it is nowhere constant per element).
inline AssembledSystem assemble(const Mesh& mesh) {
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(mesh.triangles.size() * 6);
    tm.reserve(mesh.triangles.size() * 6);

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2& A = mesh.nodes[tri[0]];
        const Vec2& B = mesh.nodes[tri[1]];
        const Vec2& C = mesh.nodes[tri[2]];
        const double det = (B.x - A.x) * (C.y - A.y) - (C.x - A.x) * (B.y - A.y);
        if (det <= 0.0)
            throw assembly_error("assemble: inverted triangle " + std::to_string(t));
        const double area = 0.5 * det;

        // constant P1 gradients
        const double gx[3] = {(B.y - C.y) / det, (C.y - A.y) / det, (A.y - B.y) / det};
        const double gy[3] = {(C.x - B.x) / det, (A.x - C.x) / det, (B.x - A.x) / det};

        double wsum = 0.0;      // int_T e^(-|x|^2/2)
        double mloc[3][3] = {}; // mass with the weight under the rule
        for (int q = 0; q < TriangleRule6::size; ++q) {
            const double l1 = TriangleRule6::l1[q], l2 = TriangleRule6::l2[q];
            const double l3 = 1.0 - l1 - l2;
            const double x = l1 * A.x + l2 * B.x + l3 * C.x;
            const double y = l1 * A.y + l2 * B.y + l3 * C.y;
            const double wq = TriangleRule6::w[q] * std::exp(-0.5 * (x * x + y * y));
            wsum += wq;
            const double phi[3] = {l1, l2, l3};
            for (int a = 0; a < 3; ++a)
                for (int b = a; b < 3; ++b) mloc[a][b] += wq * phi[a] * phi[b];
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                const double kv = (gx[a] * gx[b] + gy[a] * gy[b]) * wsum * area;
                const double mv = mloc[a][b] * area;
                const int i = tri[a], j = tri[b];
                tk.emplace_back(i, j, kv);
                tm.emplace_back(i, j, mv);
                if (i != j) {
                    tk.emplace_back(j, i, kv);
                    tm.emplace_back(j, i, mv);
                }
            }
    }
    AssembledSystem sys;
    sys.stiffness.resize(n, n);
    sys.mass.resize(n, n);
    sys.stiffness.setFromTriplets(tk.begin(), tk.end());
    sys.mass.setFromTriplets(tm.begin(), tm.end());
    return sys;
}

// --- generalized eigensolver ---------------------------------------------

struct EigenResult {
    std::vector<double> eigenvalues; ///< ascending, starts at mu_0 ~ 0
    Eigen::MatrixXd eigenvectors;    ///< one column per eigenvalue, M-orthonormal
    std::vector<double> residual_norms;
};

namespace detail {

inline void compute_residuals(const AssembledSystem& sys, EigenResult& res) {
    res.residual_norms.clear();
    for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
        const Eigen::VectorXd x = res.eigenvectors.col(static_cast<int>(i));
        const Eigen::VectorXd mx = sys.mass * x;
        const Eigen::VectorXd r = sys.stiffness * x - res.eigenvalues[i] * mx;
        res.residual_norms.push_back(r.norm() / mx.norm());
    }
}

inline EigenResult solve_dense(const AssembledSystem& sys, int k) {
    const Eigen::MatrixXd K = Eigen::MatrixXd(sys.stiffness);
    const Eigen::MatrixXd M = Eigen::MatrixXd(sys.mass);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success) throw solver_error("dense generalized eigensolve failed");
    EigenResult res;
    res.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k + 1);
    res.eigenvectors = es.eigenvectors().leftCols(k + 1);
    compute_residuals(sys, res);
    return res;
}

// Shift-invert subspace iteration with M-orthonormalization and Rayleigh-Ritz
// extraction; A = K + M is SPD since K is PSD and M is PD.
inline EigenResult solve_subspace(const AssembledSystem& sys, int k) {
    const int n = sys.size();
    const int p = std::min(n, k + 1 + 6);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    Eigen::SparseMatrix<double> A = sys.stiffness + sys.mass;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw solver_error("subspace eigensolve: factorization failed");

    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = gauss(rng);
    X.col(0).setOnes(); // seed the constant mode

    EigenResult res;
    std::vector<double> prev(k + 1, 1e300);
    for (int iter = 0; iter < 400; ++iter) {
        const Eigen::MatrixXd Y = solver.solve(sys.mass * X);
        const Eigen::MatrixXd Kr = Y.transpose() * (sys.stiffness * Y);
        const Eigen::MatrixXd Mr = Y.transpose() * (sys.mass * Y);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(Kr, Mr);
        if (small.info() != Eigen::Success)
            throw solver_error("subspace eigensolve: Rayleigh-Ritz failed");
        X = Y * small.eigenvectors();

        res.eigenvalues.assign(small.eigenvalues().data(), small.eigenvalues().data() + k + 1);
        res.eigenvectors = X.leftCols(k + 1);
        compute_residuals(sys, res);
        bool done = true;
        for (int i = 0; i <= k; ++i) {
            if (res.residual_norms[i] > 1e-9) done = false;
            if (std::abs(res.eigenvalues[i] - prev[i]) > 1e-12 * (1.0 + std::abs(prev[i])))
                done = false;
        }
        if (done) return res;
        prev.assign(res.eigenvalues.begin(), res.eigenvalues.end());
    }
    double worst = 0.0;
    for (double r : res.residual_norms) worst = std::max(worst, r);
    if (worst > 1e-8)
        throw solver_error("subspace eigensolve: no convergence, residual " + std::to_string(worst));
    return res;
}

} // namespace detail

/// k+1 smallest generalized eigenpairs of K x = mu M x (the constant mode
/// mu_0 ~ 0 included): dense below dimension 2000, shift-invert subspace
/// iteration above.
inline EigenResult solve_lowest(const AssembledSystem& sys, int k) {
    if (k < 1) throw std::invalid_argument("solve_lowest: k must be >= 1");
    if (k + 1 >= sys.size()) throw std::invalid_argument("solve_lowest: k exceeds matrix dimension");
    return sys.size() < 2000 ? detail::solve_dense(sys, k) : detail::solve_subspace(sys, k);
}

/// Piecewise-linear interpolation of eigenvector `index` at a point.
inline double eigenfunction_value(const EigenResult& result, const Mesh& mesh, int index,
                                  double x, double y) {
    if (index < 0 || index >= static_cast<int>(result.eigenvalues.size()))
        throw std::invalid_argument("eigenfunction_value: index out of range");
    for (const auto& tri : mesh.triangles) {
        const Vec2& A = mesh.nodes[tri[0]];
        const Vec2& B = mesh.nodes[tri[1]];
        const Vec2& C = mesh.nodes[tri[2]];
        const double det = (B.x - A.x) * (C.y - A.y) - (C.x - A.x) * (B.y - A.y);
        const double l1 = ((B.x - x) * (C.y - y) - (C.x - x) * (B.y - y)) / det;
        const double l2 = ((C.x - x) * (A.y - y) - (A.x - x) * (C.y - y)) / det;
        const double l3 = 1.0 - l1 - l2;
        const double tol = -1e-12;
        if (l1 >= tol && l2 >= tol && l3 >= tol) {
            return l1 * result.eigenvectors(tri[0], index) + l2 * result.eigenvectors(tri[1], index) +
                   l3 * result.eigenvectors(tri[2], index);
        }
    }
    throw location_error("eigenfunction_value: point (" + std::to_string(x) + ", " +
                         std::to_string(y) + ") lies outside the mesh");
}

} // namespace gnl

#endif // GNL_FEM2D_HPP
