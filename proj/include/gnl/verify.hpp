#ifndef GNL_VERIFY_HPP
#define GNL_VERIFY_HPP

/// End-to-end numerical verification of the sharp harmonic-mean bound
///
///     sum_{i=1}^{m-1} 1/mu_i(Omega) >= (m-1)/mu_1(B),
///
/// for origin-symmetric domains, B the origin-centered ball of equal Gaussian
/// volume, with equality exactly on the ball family. The machinery follows
/// the comparison argument behind the bound: a radial profile G extended
/// constantly past the matched radius, trial functions v_i = G(|x|) x_i/|x|,
/// a QR rotation making v_i orthogonal to the leading eigenfunctions, per-mode
/// Rayleigh bounds, two rearrangement inequalities for monotone radial
/// integrands, and an index-regrouping step. Every displayed inequality is
/// evaluated numerically on both sides and the slacks are required to
/// recompose into the final margin.
///
/// Two domain backends feed the same checks: radially symmetric domains
/// (balls and annuli, any dimension) reduce every integral to weighted 1D
/// quadrature with exact angular factors; general planar domains go through
/// the fem2d solver with per-triangle quadrature.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnl/ball_spectrum.hpp"
#include "gnl/errors.hpp"
#include "gnl/fem2d.hpp"
#include "gnl/quadrature.hpp"
#include "gnl/radial_ode.hpp"

namespace gnl::verify {

// --- trial profile G ---------------------------------------------------------

/// Radial profile of the comparison functions: the first l = 1 eigenfunction
/// g of the matched ball on [0,R], extended by the constant g(R) beyond R.
/// Piecewise cubic Hermite evaluation from the stored (g, g', g'') samples.
struct TrialFunctionG {
    double matched_radius = 1.0;
    double mu1_ball = 0.0;
    int dimension_m = 2;
    std::vector<double> grid;
    std::vector<double> g;
    std::vector<double> g_prime;
    std::vector<double> g_second;
    double tail_value = 0.0;

    double value(double r) const {
        if (r >= matched_radius) return tail_value;
        return hermite(grid, g, g_prime, r);
    }
    double derivative(double r) const {
        if (r >= matched_radius) return 0.0;
        return hermite(grid, g_prime, g_second, r);
    }

private:
    static double hermite(const std::vector<double>& x, const std::vector<double>& f,
                          const std::vector<double>& df, double r) {
        const std::size_t n = x.size();
        const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
        double t = (r - x.front()) / h;
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0.0)), n - 2);
        t -= static_cast<double>(i);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * df[i] +
               (-2 * t3 + 3 * t2) * f[i + 1] + (t3 - t2) * h * df[i + 1];
    }
};

inline TrialFunctionG build_trial_profile(const RadialEigenpair& ball_mode) {
    if (ball_mode.angular_index_l != 1 || ball_mode.inner_radius != 0.0)
        throw std::invalid_argument("build_trial_profile: expects the first l = 1 ball mode");
    TrialFunctionG G;
    G.matched_radius = ball_mode.outer_radius;
    G.mu1_ball = ball_mode.mu;
    G.dimension_m = ball_mode.dimension_m;
    G.grid = ball_mode.grid;
    G.g = ball_mode.g_values;
    G.g_prime = ball_mode.g_prime_values;
    G.g_second = ball_mode.g_second_values;
    G.tail_value = ball_mode.g_values.back();
    return G;
}

/// Dense-grid check of the two monotonicity facts the argument rests on:
/// G nondecreasing and G/r nonincreasing on (0, inf).
struct MonotonicityReport {
    double min_G_increment = 0.0;      ///< min of G' samples on (0,R)
    double max_ratio_increment = 0.0;  ///< max of d/dr (G/r) * r^2 = G' r - G
    bool nondecreasing = false;
    bool ratio_nonincreasing = false;
    bool pass() const { return nondecreasing && ratio_nonincreasing; }
};

inline MonotonicityReport check_trial_monotonicity(const TrialFunctionG& G, int samples = 4096,
                                                   double tol = 1e-8) {
    MonotonicityReport rep;
    double min_gp = std::numeric_limits<double>::infinity();
    double max_ratio = -std::numeric_limits<double>::infinity();
    const double R = G.matched_radius;
    for (int i = 1; i < samples; ++i) {
        const double r = 1.5 * R * i / samples;
        const double gp = G.derivative(r);
        const double defect = gp * r - G.value(r); // sign of (G/r)'
        min_gp = std::min(min_gp, gp);
        max_ratio = std::max(max_ratio, defect);
    }
    rep.min_G_increment = min_gp;
    rep.max_ratio_increment = max_ratio;
    rep.nondecreasing = min_gp >= -tol;
    rep.ratio_nonincreasing = max_ratio <= tol * (1.0 + std::abs(G.tail_value));
    return rep;
}

/// The comparison family v_i(x) = G(|x|) x_i / |x| (value 0 at the origin).
struct TrialFunctions {
    TrialFunctionG G;
    int dimension_m = 2;

    double value(int i, const std::vector<double>& x) const {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double r = std::sqrt(r2);
        if (r == 0.0) return 0.0;
        return G.value(r) * x[static_cast<std::size_t>(i)] / r;
    }
};

inline TrialFunctions build_trial_functions(const TrialFunctionG& G, int m) {
    if (m < 2) throw std::invalid_argument("build_trial_functions: m must be >= 2");
    return TrialFunctions{G, m};
}

// --- matched ball ------------------------------------------------------------

/// Radius of the origin-centered ball with the given Gaussian volume.
inline double matched_ball(int m, GaussianVolume volume) { return volume_to_radius(m, volume); }

// --- orthogonalization (3-step QR rotation) -----------------------------------

struct OrthogonalizationResult {
    Eigen::MatrixXd gram_q;    ///< q_ij = int v_i u_j dgamma
    Eigen::MatrixXd rotation_A; ///< orthogonal; (A q) is upper triangular
    double orthogonality_residual = 0.0; ///< max |(Aq)_ij| over j < i
    double unitarity_defect = 0.0;       ///< ||A A^T - I||_max
    bool degenerate = false;             ///< Gram numerically rank-deficient
};

/// Orthogonal rotation A with (A q)_ij = 0 for j < i, from the QR
/// factorization q = Q R (R with nonnegative diagonal, so a positive diagonal
/// Gram maps to A = I). Rows of A mix the trial functions so that the i-th
/// rotated function is orthogonal to the eigenfunctions u_1 .. u_(i-1).
inline OrthogonalizationResult orthogonalize(const Eigen::MatrixXd& q) {
    const int m = static_cast<int>(q.rows());
    if (q.cols() != m) throw std::invalid_argument("orthogonalize: Gram matrix must be square");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd R = Q.transpose() * q;
    for (int i = 0; i < m; ++i)
        if (R(i, i) < 0.0) {
            Q.col(i) = -Q.col(i);
            R.row(i) = -R.row(i);
        }
    OrthogonalizationResult out;
    out.gram_q = q;
    out.rotation_A = Q.transpose();
    const Eigen::MatrixXd Aq = out.rotation_A * q;
    double resid = 0.0;
    double scale = std::max(q.cwiseAbs().maxCoeff(), 1e-30);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) resid = std::max(resid, std::abs(Aq(i, j)));
    out.orthogonality_residual = resid;
    out.unitarity_defect =
        (out.rotation_A * out.rotation_A.transpose() - Eigen::MatrixXd::Identity(m, m))
            .cwiseAbs()
            .maxCoeff();
    for (int i = 0; i < m; ++i)
        if (std::abs(Aq(i, i)) < 1e-12 * scale) out.degenerate = true;
    return out;
}

// --- radial domain backend ----------------------------------------------------

namespace detail {

// int f(r) r^(m-1) e^(-r^2/2) dr over [a,b] with panels split at the trial
// profile's kink radius
template <class F>
double radial_integral_split(int m, double a, double b, double split, F&& f) {
    double total = 0.0;
    if (split > a && split < b) {
        total += integrate_radial(radial_rule(m, a, split), f);
        total += integrate_radial(radial_rule(m, split, b), f);
    } else {
        total += integrate_radial(radial_rule(m, a, b), f);
    }
    return total;
}

// numeric surface mean of a linear coordinate over the unit sphere: an
// explicit 1D integral that vanishes by antisymmetry; evaluating it keeps the
// symmetry check honest rather than assumed
inline double sphere_coordinate_mean(int m) {
    const auto rule_pts = 64;
    std::vector<double> gx, gw;
    gnl::detail::gauss_legendre(rule_pts, gx, gw);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < rule_pts; ++i) {
        const double phi = 0.5 * std::numbers::pi * (gx[i] + 1.0); // [0, pi]
        const double w = gw[i] * std::pow(std::sin(phi), m - 2);
        num += w * std::cos(phi);
        den += w;
    }
    return num / den;
}

} // namespace detail

/// Ball or annulus in any dimension m >= 2; every verification integral
/// reduces to weighted 1D quadrature times exact angular factors.
struct RadialVerifyDomain {
    int m = 2;
    double r_inner = 0.0; ///< 0 for a ball
    double r_outer = 1.0;
    Spectrum spectrum;
    std::vector<double> mu; ///< mu_0 .. mu_m
    TrialFunctionG G;       ///< profile of the matched ball
    double matched_radius = 0.0;
    GaussianVolume vol;

    struct ModeRef {
        int l = -1;        // angular index of the entry providing mu_j
        int n = 0;         // radial index
        int component = 0; // which angular component (1-based) within an l=1 entry
    };
    std::vector<ModeRef> mode_of; ///< for j = 1..m
    std::vector<RadialEigenpair> l1_pairs; ///< solved l = 1 modes, by radial index

    static RadialVerifyDomain ball(int m, double R, const ShootingConfig& cfg = {}) {
        return make(m, 0.0, R, cfg);
    }
    static RadialVerifyDomain annulus(int m, double R1, double R2, const ShootingConfig& cfg = {}) {
        if (!(0.0 < R1 && R1 < R2))
            throw std::invalid_argument("RadialVerifyDomain: requires 0 < R1 < R2");
        return make(m, R1, R2, cfg);
    }

    bool is_ball() const { return r_inner == 0.0; }
    int dimension() const { return m; }
    GaussianVolume volume() const { return vol; }
    double mu_error_estimate(int) const { return 1e-9; }

    /// int f(|x|) dgamma over the domain
    template <class F>
    double radial_weighted_integral(F&& f) const {
        return gaussian_radial_factor(m) *
               detail::radial_integral_split(m, r_inner, r_outer, G.matched_radius, f);
    }

    Eigen::MatrixXd matS() const { return moment_matrix([&](double r) {
        const double g = G.value(r);
        return g * g;
    }); }
    Eigen::MatrixXd matC() const { return moment_matrix([&](double r) {
        const double gp = G.derivative(r);
        return gp * gp;
    }); }
    Eigen::MatrixXd matD() const { return moment_matrix([&](double r) {
        const double g = G.value(r);
        return g * g / (r * r);
    }); }

    /// Gram q_kj = int v_k u_j dgamma: nonzero only against l = 1 modes, with
    /// the exact angular factor |S^(m-1)|/m folded in.
    Eigen::MatrixXd gram() const {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
        const double c_m = gaussian_radial_factor(m);
        for (int j = 1; j <= m; ++j) {
            const ModeRef& ref = mode_of[static_cast<std::size_t>(j - 1)];
            if (ref.l != 1 || ref.component > m) continue;
            const RadialEigenpair& pair = l1_pairs[static_cast<std::size_t>(ref.n)];
            const double radial = detail::radial_integral_split(
                m, r_inner, r_outer, G.matched_radius,
                [&](double r) { return G.value(r) * eval_pair(pair, r); });
            q(ref.component - 1, j - 1) = std::sqrt(c_m / m) * radial;
        }
        return q;
    }

    /// Largest pairwise weighted inner product among the eigenfunctions
    /// entering the Gram (they are orthogonal across angular labels exactly).
    double eigenfunction_ortho_defect() const {
        double worst = 0.0;
        for (std::size_t a = 0; a < l1_pairs.size(); ++a)
            for (std::size_t b = a + 1; b < l1_pairs.size(); ++b) {
                const double ip = detail::radial_integral_split(
                    m, r_inner, r_outer, 0.5 * (r_inner + r_outer), [&](double r) {
                        return eval_pair(l1_pairs[a], r) * eval_pair(l1_pairs[b], r);
                    });
                worst = std::max(worst, std::abs(ip));
            }
        return worst;
    }

    /// int v_i dgamma: exact-zero angular factor evaluated numerically.
    std::vector<double> trial_means() const {
        const double angular = detail::sphere_coordinate_mean(m);
        const double radial = radial_weighted_integral([&](double r) { return G.value(r); });
        return std::vector<double>(static_cast<std::size_t>(m), angular * radial);
    }

private:
    static RadialVerifyDomain make(int m, double r1, double r2, const ShootingConfig& cfg) {
        if (m < 2) throw std::invalid_argument("RadialVerifyDomain: m must be >= 2");
        RadialVerifyDomain d;
        d.m = m;
        d.r_inner = r1;
        d.r_outer = r2;
        d.spectrum = (r1 == 0.0) ? ball_neumann_spectrum(m, r2, m + 1, cfg)
                                 : annulus_neumann_spectrum(m, r1, r2, m + 1, cfg);
        d.mu = d.spectrum.expanded(static_cast<std::size_t>(m + 1));

        const double vol_outer = gaussian_ball_volume(m, r2).value;
        const double vol_inner = r1 > 0.0 ? gaussian_ball_volume(m, r1).value : 0.0;
        d.vol = GaussianVolume(vol_outer - vol_inner);
        d.matched_radius = volume_to_radius(m, d.vol);
        d.G = build_trial_profile(mu1_ball(m, d.matched_radius, cfg));

        // map expanded positions 1..m to labelled modes and solve the l = 1
        // radial family deep enough for the Gram
        int max_l1_n = -1;
        {
            std::size_t pos = 1; // position 0 is the constant mode
            for (const auto& e : d.spectrum.entries) {
                if (e.angular_index_l == 0 && e.radial_index_n == 0) continue;
                for (int c = 1; c <= e.multiplicity && pos <= static_cast<std::size_t>(m); ++c, ++pos)
                    d.mode_of.push_back({e.angular_index_l, e.radial_index_n, c});
                if (pos > static_cast<std::size_t>(m)) break;
            }
            for (const auto& ref : d.mode_of)
                if (ref.l == 1) max_l1_n = std::max(max_l1_n, ref.n);
        }
        if (max_l1_n >= 0) {
            const RadialProblem p1(m, 1, r1, r2);
            d.l1_pairs = eigenvalues(p1, max_l1_n + 1, cfg);
        }
        return d;
    }

    static double eval_pair(const RadialEigenpair& pair, double r) {
        const auto& x = pair.grid;
        const std::size_t n = x.size();
        const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
        double t = (r - x.front()) / h;
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0.0)), n - 2);
        t -= static_cast<double>(i);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * pair.g_values[i] +
               (t3 - 2 * t2 + t) * h * pair.g_prime_values[i] +
               (-2 * t3 + 3 * t2) * pair.g_values[i + 1] + (t3 - t2) * h * pair.g_prime_values[i + 1];
    }

    template <class F>
    Eigen::MatrixXd moment_matrix(F&& radial_part) const {
        // over a radially symmetric domain int f(r) theta_k theta_k' dgamma is
        // diagonal with the exact angular factor 1/m
        const double value = radial_weighted_integral(radial_part) / m;
        return value * Eigen::MatrixXd::Identity(m, m);
    }
};

/// General origin-symmetric planar domain (m = 2) through the FEM solver.
struct FemVerifyDomain {
    static constexpr int m = 2;
    Mesh mesh;
    AssembledSystem system;
    EigenResult eig;
    std::vector<double> mu;        ///< mu_0, mu_1, mu_2
    std::vector<double> mu_errors; ///< coarse-grid Richardson estimates
    Eigen::MatrixXd u;             ///< columns: u_1, u_2, normalized in L2(dgamma)
    TrialFunctionG G;
    double matched_radius = 0.0;
    GaussianVolume vol;
    bool ball_domain = false;

    static FemVerifyDomain from_domain(const Domain2D& dom, double h,
                                       const ShootingConfig& cfg = {}) {
        FemVerifyDomain d = from_mesh(mesh_domain(dom, h), cfg);
        d.ball_domain = (dom.kind == Domain2DKind::disk);
        // discretization error estimate from a coarser companion solve
        const auto coarse = mesh_domain(dom, 2.0 * h);
        const auto sys_c = assemble(coarse);
        const auto eig_c = solve_lowest(sys_c, m);
        d.mu_errors = {0.0, 0.0, 0.0};
        for (int i = 1; i <= m; ++i)
            d.mu_errors[static_cast<std::size_t>(i)] =
                std::abs(eig_c.eigenvalues[static_cast<std::size_t>(i)] -
                         d.mu[static_cast<std::size_t>(i)]) /
                3.0;
        return d;
    }

    static FemVerifyDomain from_mesh(Mesh mesh_in, const ShootingConfig& cfg = {}) {
        FemVerifyDomain d;
        d.mesh = std::move(mesh_in);
        d.system = assemble(d.mesh);
        d.eig = solve_lowest(d.system, m);
        d.mu = d.eig.eigenvalues;
        d.mu_errors.assign(m + 1, 0.0);

        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.system.size());
        const double two_pi = 2.0 * std::numbers::pi;
        d.vol = GaussianVolume(std::clamp(ones.dot(d.system.mass * ones) / two_pi, 0.0, 1.0));
        d.matched_radius = volume_to_radius(m, d.vol);
        d.G = build_trial_profile(mu1_ball(m, d.matched_radius, cfg));

        d.u.resize(d.system.size(), m);
        for (int j = 1; j <= m; ++j) {
            Eigen::VectorXd x = d.eig.eigenvectors.col(j);
            const double norm2 = x.dot(d.system.mass * x) / two_pi;
            d.u.col(j - 1) = x / std::sqrt(norm2);
        }
        return d;
    }

    bool is_ball() const { return ball_domain; }
    int dimension() const { return m; }
    GaussianVolume volume() const { return vol; }
    double mu_error_estimate(int i) const {
        return i < static_cast<int>(mu_errors.size()) ? mu_errors[static_cast<std::size_t>(i)] : 0.0;
    }

    /// Quadrature over the mesh: sum of f(point) against the Gaussian area
    /// measure dgamma (degree-4 rule per triangle).
    template <class F>
    double integrate(F&& f) const {
        const double two_pi = 2.0 * std::numbers::pi;
        double total = 0.0;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            const Vec2& A = mesh.nodes[tri[0]];
            const Vec2& B = mesh.nodes[tri[1]];
            const Vec2& C = mesh.nodes[tri[2]];
            const double area = mesh.triangle_area(t);
            for (int q = 0; q < TriangleRule6::size; ++q) {
                const double l1 = TriangleRule6::l1[q], l2 = TriangleRule6::l2[q];
                const double l3 = 1.0 - l1 - l2;
                const double x = l1 * A.x + l2 * B.x + l3 * C.x;
                const double y = l1 * A.y + l2 * B.y + l3 * C.y;
                const double w = TriangleRule6::w[q] * area * std::exp(-0.5 * (x * x + y * y));
                total += w * f(x, y, t, l1, l2, l3);
            }
        }
        return total / two_pi;
    }

    template <class F>
    double radial_weighted_integral(F&& f) const {
        return integrate([&](double x, double y, std::size_t, double, double, double) {
            return f(std::hypot(x, y));
        });
    }

    Eigen::MatrixXd matS() const { return moment_matrix([&](double r) {
        const double g = G.value(r);
        return g * g;
    }); }
    Eigen::MatrixXd matC() const { return moment_matrix([&](double r) {
        const double gp = G.derivative(r);
        return gp * gp;
    }); }
    Eigen::MatrixXd matD() const { return moment_matrix([&](double r) {
        const double g = G.value(r);
        return g * g / (r * r);
    }); }

    Eigen::MatrixXd gram() const {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < m; ++j)
                q(k, j) = integrate([&](double x, double y, std::size_t t, double l1, double l2,
                                        double l3) {
                    const double r = std::hypot(x, y);
                    if (r < 1e-14) return 0.0;
                    const double coord = (k == 0 ? x : y) / r;
                    const auto& tri = mesh.triangles[t];
                    const double uj = l1 * u(tri[0], j) + l2 * u(tri[1], j) + l3 * u(tri[2], j);
                    return G.value(r) * coord * uj;
                });
        return q;
    }

    double eigenfunction_ortho_defect() const {
        const double two_pi = 2.0 * std::numbers::pi;
        double worst = 0.0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                worst = std::max(worst,
                                 std::abs(u.col(a).dot(system.mass * u.col(b)) / two_pi));
        return worst;
    }

    std::vector<double> trial_means() const {
        std::vector<double> means(m, 0.0);
        for (int k = 0; k < m; ++k)
            means[static_cast<std::size_t>(k)] =
                integrate([&](double x, double y, std::size_t, double, double, double) {
                    const double r = std::hypot(x, y);
                    if (r < 1e-14) return 0.0;
                    return G.value(r) * (k == 0 ? x : y) / r;
                });
        return means;
    }

private:
    template <class F>
    Eigen::MatrixXd moment_matrix(F&& radial_part) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                M(a, b) = integrate([&](double x, double y, std::size_t, double, double, double) {
                    const double r2 = x * x + y * y;
                    if (r2 < 1e-28) return 0.0;
                    const double ca = (a == 0 ? x : y), cb = (b == 0 ? x : y);
                    return radial_part(std::sqrt(r2)) * ca * cb / r2;
                });
                M(b, a) = M(a, b);
            }
        return M;
    }
};

// --- inequality reports --------------------------------------------------------

struct ChainRecord {
    std::string name;
    double left = 0.0;
    double right = 0.0;
    double slack = 0.0; ///< right - left
    bool satisfied = false;
};

struct InequalityReport {
    double lhs = 0.0;    ///< sum of 1/mu_i, i = 1..m-1, over the domain
    double rhs = 0.0;    ///< (m-1)/mu_1(matched ball)
    double margin = 0.0; ///< lhs - rhs
    double tolerance = 0.0;
    bool holds = false;
    bool equality = false;
    double matched_radius = 0.0;
    std::vector<double> mu_domain; ///< mu_0..mu_m
    double mu1_ball = 0.0;
};

struct ChainReport {
    std::vector<ChainRecord> records;
    OrthogonalizationResult rotation;
    double tolerance = 0.0;
    double margin_direct = 0.0;
    double margin_from_chain = 0.0;
    bool all_hold = false;
};

namespace detail {

// shared integral bundle for the chain evaluation
struct ChainData {
    int m;
    std::vector<double> mu; // 0..m
    double mu1B;
    double IOG2, IOG2r2, IBG2, IBG2r2, IBGp2;
    Eigen::VectorXd S, P, Q; // rotated diagonal moments, size m
    OrthogonalizationResult rot;
};

template <class Dom>
ChainData gather_chain_data(const Dom& dom, const std::optional<std::vector<double>>& mu_override) {
    ChainData d;
    d.m = dom.dimension();
    d.mu = mu_override ? *mu_override : dom.mu;
    if (static_cast<int>(d.mu.size()) < d.m + 1)
        throw std::invalid_argument("chain verification: need mu_0..mu_m");
    const TrialFunctionG& G = dom.G;
    d.mu1B = G.mu1_ball;

    if (dom.eigenfunction_ortho_defect() > 1e-8)
        throw std::invalid_argument("chain verification: eigenfunctions are not orthogonal");

    const Eigen::MatrixXd S = dom.matS();
    const Eigen::MatrixXd C = dom.matC();
    const Eigen::MatrixXd D = dom.matD();
    d.rot = orthogonalize(dom.gram());
    const Eigen::MatrixXd& A = d.rot.rotation_A;

    const Eigen::MatrixXd Sr = A * S * A.transpose();
    const Eigen::MatrixXd Cr = A * C * A.transpose();
    const Eigen::MatrixXd Dr = A * D * A.transpose();
    d.S = Sr.diagonal();
    d.P = Cr.diagonal();
    d.IOG2 = S.trace();
    d.IOG2r2 = D.trace();
    d.Q = Eigen::VectorXd::Constant(d.m, d.IOG2r2) - Dr.diagonal();

    // ball-side integrals with the same profile
    const int m = d.m;
    const double c_m = gaussian_radial_factor(m);
    const double R = G.matched_radius;
    const auto rule = radial_rule(m, 0.0, R);
    d.IBG2 = c_m * integrate_radial(rule, [&](double r) {
        const double g = G.value(r);
        return g * g;
    });
    d.IBG2r2 = c_m * integrate_radial(rule, [&](double r) {
        const double g = G.value(r);
        return g * g / (r * r);
    });
    d.IBGp2 = c_m * integrate_radial(rule, [&](double r) {
        const double gp = G.derivative(r);
        return gp * gp;
    });
    return d;
}

} // namespace detail

/// Per-mode admissibility bounds: for each i, the rotated trial function must
/// satisfy int v_i^2 dgamma <= (1/mu_i) int |grad v_i|^2 dgamma.
template <class Dom>
std::vector<ChainRecord> verify_rayleigh_bounds(
    const Dom& dom, double tolerance = 1e-8,
    const std::optional<std::vector<double>>& mu_override = std::nullopt) {
    const auto d = detail::gather_chain_data(dom, mu_override);
    std::vector<ChainRecord> out;
    for (int i = 0; i < d.m; ++i) {
        ChainRecord rec;
        rec.name = "rayleigh_bound[" + std::to_string(i + 1) + "]";
        rec.left = d.S[i];
        rec.right = (d.P[i] + d.Q[i]) / d.mu[static_cast<std::size_t>(i + 1)];
        rec.slack = rec.right - rec.left;
        rec.satisfied = rec.slack >= -tolerance;
        out.push_back(rec);
    }
    return out;
}

/// Every displayed step of the comparison argument, evaluated numerically:
/// per-mode Rayleigh bounds, their sum, gradient concentration onto the
/// matched ball, the ordering/regrouping steps, both rearrangement
/// inequalities, and the recomposition into the final margin.
template <class Dom>
ChainReport verify_chain(const Dom& dom, double tolerance = 0.0,
                         const std::optional<std::vector<double>>& mu_override = std::nullopt) {
    const auto d = detail::gather_chain_data(dom, mu_override);
    const int m = d.m;
    auto mu_at = [&](int i) { return d.mu[static_cast<std::size_t>(i)]; };

    double solver_tol = 1e-8;
    for (int i = 1; i <= m; ++i)
        solver_tol += dom.mu_error_estimate(i) / (mu_at(i) * mu_at(i));
    const double tol = tolerance > 0.0 ? tolerance : solver_tol;

    ChainReport rep;
    rep.rotation = d.rot;
    rep.tolerance = tol;

    double W = 0.0; // sum over 1..m-1 of 1/mu_i
    for (int i = 1; i < m; ++i) W += 1.0 / mu_at(i);
    const double Wm = W + 1.0 / mu_at(m);

    double sum33_right = 0.0;
    double sigma33 = 0.0;
    for (int i = 0; i < m; ++i) {
        ChainRecord rec;
        rec.name = "rayleigh_bound[" + std::to_string(i + 1) + "]";
        rec.left = d.S[i];
        rec.right = (d.P[i] + d.Q[i]) / mu_at(i + 1);
        rec.slack = rec.right - rec.left;
        rec.satisfied = rec.slack >= -tol;
        sum33_right += rec.right;
        sigma33 += rec.slack;
        rep.records.push_back(rec);
    }

    { // summed bound: IOG2 <= sum_i (P_i + Q_i)/mu_i
        ChainRecord rec;
        rec.name = "summed_rayleigh";
        rec.left = d.IOG2;
        rec.right = sum33_right;
        rec.slack = rec.right - rec.left;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    double sigma5 = 0.0;
    bool grad_ok = true;
    {
        // gradient concentration: each P_i <= IBGp2 / m since G' vanishes
        // outside the matched ball
        ChainRecord rec;
        rec.name = "gradient_concentration";
        double left = 0.0;
        for (int i = 0; i < m; ++i) {
            left += d.P[i] / mu_at(i + 1);
            sigma5 += (d.IBGp2 / m - d.P[i]) / mu_at(i + 1);
            if (d.P[i] > d.IBGp2 / m + tol) grad_ok = false;
        }
        rec.left = left;
        rec.right = Wm * d.IBGp2 / m;
        rec.slack = rec.right - rec.left;
        rec.satisfied = grad_ok && rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    double sigma6 = 0.0;
    {
        // ordering step: sum_i Q_i/mu_i <= (sum_{i<m} 1/mu_i) IOG2r2
        ChainRecord rec;
        rec.name = "angular_ordering";
        double left = 0.0;
        for (int i = 0; i < m; ++i) left += d.Q[i] / mu_at(i + 1);
        rec.left = left;
        rec.right = W * d.IOG2r2;
        rec.slack = rec.right - rec.left;
        sigma6 = rec.slack;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    double sigma7 = 0.0;
    {
        // rearrangement of the nonincreasing integrand (G/r)^2
        ChainRecord rec;
        rec.name = "ratio_symmetrization";
        rec.left = d.IOG2r2;
        rec.right = d.IBG2r2;
        rec.slack = rec.right - rec.left;
        sigma7 = rec.slack;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    {
        // combined angular bound against the ball integral
        ChainRecord rec;
        rec.name = "angular_ordering_ball";
        double left = 0.0;
        for (int i = 0; i < m; ++i) left += d.Q[i] / mu_at(i + 1);
        rec.left = left;
        rec.right = W * d.IBG2r2;
        rec.slack = rec.right - rec.left;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    double sigma9 = 0.0;
    {
        // regrouping 1/m sums into 1/(m-1) sums using mu_i <= mu_m
        ChainRecord rec;
        rec.name = "harmonic_regrouping";
        rec.left = Wm * d.IBGp2 / m;
        rec.right = W * d.IBGp2 / (m - 1.0);
        rec.slack = rec.right - rec.left;
        sigma9 = rec.slack;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    double sigma10 = 0.0;
    {
        // rearrangement of the nondecreasing integrand G^2 (reversed)
        ChainRecord rec;
        rec.name = "amplitude_symmetrization";
        rec.left = d.IBG2;
        rec.right = d.IOG2;
        rec.slack = rec.right - rec.left;
        sigma10 = rec.slack;
        rec.satisfied = rec.slack >= -tol;
        rep.records.push_back(rec);
    }

    // recomposition: the slacks must reassemble into the main margin
    const double rho = (d.IBGp2 + (m - 1.0) * d.IBG2r2) - d.mu1B * d.IBG2;
    const double S_sum = sigma10 + sigma33 + sigma5 + sigma6 + W * sigma7 + sigma9;
    rep.margin_direct = W - (m - 1.0) / d.mu1B;
    rep.margin_from_chain =
        (m - 1.0) * (d.IBG2 + S_sum) / (d.mu1B * d.IBG2 + rho) - (m - 1.0) / d.mu1B;

    rep.all_hold = true;
    for (const auto& rec : rep.records)
        if (!rec.satisfied) rep.all_hold = false;
    return rep;
}

/// The final bound itself: lhs = sum_{i=1}^{m-1} 1/mu_i(Omega) against
/// rhs = (m-1)/mu_1(B), B the Gaussian-volume-matched ball. The equality flag
/// requires both a vanishing margin and the domain being the matched ball.
template <class Dom>
InequalityReport verify_main_inequality(
    const Dom& dom, double tolerance = 0.0,
    const std::optional<std::vector<double>>& mu_override = std::nullopt) {
    const int m = dom.dimension();
    const std::vector<double>& mu = mu_override ? *mu_override : dom.mu;
    if (static_cast<int>(mu.size()) < m)
        throw std::invalid_argument("verify_main_inequality: need mu_0..mu_(m-1)");

    InequalityReport rep;
    rep.mu_domain = mu;
    rep.matched_radius = dom.matched_radius;
    rep.mu1_ball = dom.G.mu1_ball;
    for (int i = 1; i < m; ++i) rep.lhs += 1.0 / mu[static_cast<std::size_t>(i)];
    rep.rhs = (m - 1.0) / rep.mu1_ball;
    rep.margin = rep.lhs - rep.rhs;

    double tol = 1e-8 * rep.rhs;
    for (int i = 1; i < m; ++i) {
        const double mu_i = mu[static_cast<std::size_t>(i)];
        tol += dom.mu_error_estimate(i) / (mu_i * mu_i);
    }
    rep.tolerance = tolerance > 0.0 ? tolerance : tol;
    rep.holds = rep.margin >= -rep.tolerance;
    rep.equality = std::abs(rep.margin) <= rep.tolerance && dom.is_ball();
    return rep;
}

// --- symmetrization ------------------------------------------------------------

/// Nonincreasing step function on [0, inf): value values[j] on
/// [knots[j-1], knots[j]) with knots[-1] = 0 and a constant tail.
struct NonincreasingStep {
    std::vector<double> knots;  ///< strictly increasing
    std::vector<double> values; ///< size knots.size() + 1, nonincreasing

    double operator()(double r) const {
        std::size_t j = 0;
        while (j < knots.size() && r >= knots[j]) ++j;
        return values[j];
    }

    /// int_a^b h(r) r^(m-1) e^(-r^2/2) dr, exact per piece.
    double weighted_integral(int m, double a, double b) const {
        double total = 0.0;
        double lo = a;
        for (std::size_t j = 0; j <= knots.size() && lo < b; ++j) {
            const double hi = j < knots.size() ? std::min(knots[j], b) : b;
            if (hi > lo) total += values[j] * radial_measure(m, lo, hi);
            lo = std::max(lo, hi);
        }
        return total;
    }

    bool is_nonincreasing() const {
        for (std::size_t j = 1; j < values.size(); ++j)
            if (values[j] > values[j - 1] + 1e-14) return false;
        return true;
    }
};

inline NonincreasingStep random_nonincreasing_step(std::mt19937& rng, int pieces = 6,
                                                   double extent = 5.0) {
    std::uniform_real_distribution<double> knot(0.05, extent);
    std::uniform_real_distribution<double> drop(0.0, 1.0);
    NonincreasingStep h;
    for (int i = 0; i < pieces; ++i) h.knots.push_back(knot(rng));
    std::sort(h.knots.begin(), h.knots.end());
    double v = 1.0 + drop(rng);
    for (int i = 0; i <= pieces; ++i) {
        h.values.push_back(v);
        v -= drop(rng) * v * 0.6;
    }
    return h;
}

struct SymmetrizationRecord {
    double omega_side = 0.0;
    double ball_side = 0.0;
    double slack = 0.0; ///< ball - omega, expected >= 0
    double matched_radius = 0.0;
    bool satisfied = false;
};

/// Rearrangement comparison for a nonincreasing radial integrand h on a
/// radially symmetric domain in dimension m:
/// int_Omega h(|x|) dgamma <= int_B h(|x|) dgamma for the matched ball B.
inline SymmetrizationRecord symmetrization_check_radial(int m, double r1, double r2,
                                                        const NonincreasingStep& h,
                                                        double tolerance = 1e-10) {
    if (!h.is_nonincreasing())
        throw std::invalid_argument("symmetrization_check: h is not nonincreasing");
    if (!(0.0 <= r1 && r1 < r2)) throw std::invalid_argument("symmetrization_check: bad interval");
    const double c_m = gaussian_radial_factor(m);
    const double vol = gaussian_ball_volume(m, r2).value -
                       (r1 > 0.0 ? gaussian_ball_volume(m, r1).value : 0.0);
    SymmetrizationRecord rec;
    rec.matched_radius = volume_to_radius(m, GaussianVolume(vol));
    rec.omega_side = c_m * h.weighted_integral(m, r1, r2);
    rec.ball_side = c_m * h.weighted_integral(m, 0.0, rec.matched_radius);
    rec.slack = rec.ball_side - rec.omega_side;
    rec.satisfied = rec.slack >= -tolerance;
    return rec;
}

/// Smooth-integrand variant: h is any callable, validated to be nonincreasing
/// on a dense grid before the two sides are compared by weighted quadrature.
inline SymmetrizationRecord symmetrization_check_radial(int m, double r1, double r2,
                                                        const std::function<double(double)>& h,
                                                        double tolerance = 1e-10) {
    if (!(0.0 <= r1 && r1 < r2)) throw std::invalid_argument("symmetrization_check: bad interval");
    const double c_m = gaussian_radial_factor(m);
    const double vol = gaussian_ball_volume(m, r2).value -
                       (r1 > 0.0 ? gaussian_ball_volume(m, r1).value : 0.0);
    SymmetrizationRecord rec;
    rec.matched_radius = volume_to_radius(m, GaussianVolume(vol));
    const double extent = std::max({r2, rec.matched_radius, gaussian_tail_radius});
    double prev = h(0.0);
    for (int i = 1; i <= 2048; ++i) {
        const double cur = h(extent * i / 2048.0);
        if (cur > prev + 1e-12 * (1.0 + std::abs(prev)))
            throw std::invalid_argument("symmetrization_check: h is not nonincreasing");
        prev = cur;
    }
    rec.omega_side = c_m * integrate_radial(radial_rule(m, r1, r2), h);
    rec.ball_side = c_m * integrate_radial(radial_rule(m, 0.0, rec.matched_radius), h);
    rec.slack = rec.ball_side - rec.omega_side;
    rec.satisfied = rec.slack >= -tolerance;
    return rec;
}

/// Same comparison for a planar domain via its angular sections: the
/// integral over Omega is (1/2pi) int_0^2pi [F(rho_hi) - F(rho_lo)] dtheta
/// with F the exact per-piece cumulative of the step function.
inline SymmetrizationRecord symmetrization_check_planar(const Domain2D& dom,
                                                        const NonincreasingStep& h,
                                                        double tolerance = 1e-9) {
    if (!h.is_nonincreasing())
        throw std::invalid_argument("symmetrization_check: h is not nonincreasing");

    // theta quadrature split at boundary corners
    std::vector<double> splits = dom.corner_angles();
    splits.push_back(0.0);
    splits.push_back(2.0 * std::numbers::pi);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 splits.end());

    std::vector<double> gx, gw;
    gnl::detail::gauss_legendre(32, gx, gw);

    auto segment_integral = [&](double t0, double t1, auto&& f) {
        double s = 0.0;
        const int panels = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 0.1)));
        const double w = (t1 - t0) / panels;
        for (int p = 0; p < panels; ++p)
            for (int k = 0; k < 32; ++k) {
                const double t = t0 + w * (p + 0.5 + 0.5 * gx[k]);
                s += 0.5 * w * gw[k] * f(t);
            }
        return s;
    };

    double omega = 0.0, area = 0.0;
    for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
        omega += segment_integral(splits[s], splits[s + 1], [&](double t) {
            const auto [lo, hi] = dom.radial_section(t);
            return h.weighted_integral(2, lo, hi);
        });
        area += segment_integral(splits[s], splits[s + 1], [&](double t) {
            const auto [lo, hi] = dom.radial_section(t);
            return radial_measure(2, lo, hi);
        });
    }
    const double two_pi = 2.0 * std::numbers::pi;
    SymmetrizationRecord rec;
    rec.omega_side = omega / two_pi;
    rec.matched_radius = volume_to_radius(2, GaussianVolume(std::clamp(area / two_pi, 0.0, 1.0)));
    rec.ball_side = h.weighted_integral(2, 0.0, rec.matched_radius); // c_2 = 1
    rec.slack = rec.ball_side - rec.omega_side;
    rec.satisfied = rec.slack >= -tolerance;
    return rec;
}

} // namespace gnl::verify

#endif // GNL_VERIFY_HPP
