#ifndef GNL_RADIAL_ODE_HPP
#define GNL_RADIAL_ODE_HPP

/// Singular Sturm-Liouville solver for the radial part of the Gaussian
/// Neumann eigenvalue problem,
///
///     g'' + ((m-1)/r - r) g' + (mu - l(l+m-2)/r^2) g = 0,
///
/// on [R1,R2] with a regularity condition at the origin (R1 = 0) or a Neumann
/// condition at R1 > 0, and a Neumann condition g'(R2) = 0. Eigenvalues are
/// located by shooting: the initial-value problem is launched from the inner
/// boundary (from the regular Frobenius branch g ~ r^l (1 + c2 r^2) when
/// R1 = 0) and mu is bracketed and bisected on sign changes of g'(R2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnl/errors.hpp"
#include "gnl/quadrature.hpp"

namespace gnl {

enum class InnerCondition { regular_origin, neumann };

struct RadialProblem {
    int dimension_m = 2;
    int angular_index_l = 1;
    double inner_radius = 0.0;
    double outer_radius = 1.0;

    RadialProblem(int m, int l, double r1, double r2)
        : dimension_m(m), angular_index_l(l), inner_radius(r1), outer_radius(r2) {
        if (m < 1) throw std::invalid_argument("RadialProblem: dimension must be >= 1");
        if (l < 0) throw std::invalid_argument("RadialProblem: angular index must be >= 0");
        if (!(r1 >= 0.0) || !(r2 > r1) || !std::isfinite(r2))
            throw std::invalid_argument("RadialProblem: requires 0 <= inner < outer < inf");
    }

    InnerCondition inner_condition() const {
        return inner_radius == 0.0 ? InnerCondition::regular_origin : InnerCondition::neumann;
    }

    /// Centrifugal coefficient l(l+m-2); equals m-1 for l = 1.
    double centrifugal() const {
        return static_cast<double>(angular_index_l) * (angular_index_l + dimension_m - 2);
    }

    double span() const { return outer_radius - inner_radius; }
};

struct ShootingConfig {
    double series_start_radius = 0.0; ///< 0 = auto: 1e-6 * span
    double mu_bracket_step = 0.25;
    double mu_tolerance = 1e-10;
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    int grid_points = 2049;           ///< stored samples per eigenpair (made odd)
    int max_bracket_halvings = 6;

    double start_radius(const RadialProblem& p) const {
        return series_start_radius > 0.0 ? series_start_radius : 1e-6 * p.span();
    }
};

struct RadialTrace {
    std::vector<double> r;
    std::vector<double> g;
    std::vector<double> g_prime;
    std::vector<double> g_second;
};

struct ShootResult {
    double mismatch = 0.0;        ///< g'(outer) for the unit-leading-coefficient launch
    double scaled_mismatch = 0.0; ///< r^(m-1) e^(-r^2/2) g'(outer) / max|g|, a weighted flux
    double max_abs_g = 0.0;
    /// g'(outer) of the unit-amplitude launch actually integrated (the
    /// regular branch is rescaled by r0^-l so its start value is O(1); the
    /// raw mismatch above is this times r0^l). Same sign as `mismatch`, free
    /// of the r0^l under/overflow at high angular index; root finding uses it.
    double mismatch_unit_launch = 0.0;
    double max_abs_unit_launch = 0.0;
    RadialTrace trace; ///< filled only when a capture grid was requested
};

struct RadialEigenpair {
    double mu = 0.0;
    std::vector<double> grid;
    std::vector<double> g_values;
    std::vector<double> g_prime_values;
    std::vector<double> g_second_values;
    int radial_index_n = 0;
    int dimension_m = 2;
    int angular_index_l = 0;
    double inner_radius = 0.0;
    double outer_radius = 1.0;

    double max_abs_g() const {
        double m = 0.0;
        for (double v : g_values) m = std::max(m, std::abs(v));
        return m;
    }
};

namespace detail {

// Dormand-Prince 5(4) embedded pair.
struct Dopri5 {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
};

struct RadialRhs {
    double m1; // m - 1
    double L;  // l(l+m-2)
    double mu;

    void operator()(double r, const double y[2], double dy[2]) const {
        dy[0] = y[1];
        dy[1] = (r - m1 / r) * y[1] + (L / (r * r) - mu) * y[0];
    }
};

// Adaptive Dormand-Prince integration of y from r0 to r1 (r1 > r0).
// Updates y in place; tracks max|g| seen. Throws solver_error on step underflow.
inline void integrate_segment(const RadialRhs& rhs, double r0, double r1, double y[2],
                              double rel_tol, double abs_tol, double& max_abs_g, double& h_hint) {
    using D = Dopri5;
    double r = r0;
    double h = h_hint > 0.0 ? std::min(h_hint, r1 - r0) : (r1 - r0);
    double k1[2];
    rhs(r, y, k1);
    int rejects_in_a_row = 0;
    while (r < r1) {
        h = std::min(h, r1 - r);
        if (h < 1e-14 * (1.0 + r))
            throw solver_error("radial shooting: step underflow at r = " + std::to_string(r));
        double k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2];

        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * D::a21 * k1[i];
        rhs(r + D::c2 * h, yt, k2);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (D::a31 * k1[i] + D::a32 * k2[i]);
        rhs(r + D::c3 * h, yt, k3);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        rhs(r + D::c4 * h, yt, k4);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
        rhs(r + D::c5 * h, yt, k5);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] + D::a64 * k4[i] +
                                D::a65 * k5[i]);
        rhs(r + h, yt, k6);
        double y5[2];
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + h * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i] +
                                D::b6 * k6[i]);
        rhs(r + h, y5, k7);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] +
                                   D::e6 * k6[i] + D::e7 * k7[i]);
            const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (err <= 1.0) {
            r += h;
            y[0] = y5[0];
            y[1] = y5[1];
            k1[0] = k7[0];
            k1[1] = k7[1];
            max_abs_g = std::max(max_abs_g, std::abs(y[0]));
            rejects_in_a_row = 0;
        } else if (++rejects_in_a_row > 60) {
            throw solver_error("radial shooting: repeated step rejection at r = " + std::to_string(r));
        }
        const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
    }
    h_hint = h;
}

// Frobenius launch state at r0 for the regular-origin branch, rescaled by
// r0^-l so the start value is O(1) and the integrator's absolute tolerance
// stays meaningful at high angular index: the true branch is
// g = r^l (1 + c2 r^2), c2 = (l - mu)/(2(2l+m)), and we integrate g / r0^l.
inline void series_launch_unit(const RadialProblem& p, double mu, double r0, double y[2]) {
    const int l = p.angular_index_l;
    const double c2 = (l - mu) / (2.0 * (2.0 * l + p.dimension_m));
    y[0] = 1.0 + c2 * r0 * r0;
    y[1] = (l > 0 ? l / r0 : 0.0) + c2 * (l + 2) * r0;
}

inline double second_derivative_from_ode(const RadialProblem& p, double mu, double r, double g,
                                         double gp) {
    const double m1 = p.dimension_m - 1.0;
    const double L = p.centrifugal();
    return (r - m1 / r) * gp + (L / (r * r) - mu) * g;
}

// Composite Simpson on a uniform odd-length grid.
inline double simpson_uniform(const std::vector<double>& grid, const std::vector<double>& f) {
    const std::size_t n = grid.size();
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace detail

/// Integrate the initial-value problem at a trial eigenvalue and report the
/// outer Neumann defect g'(outer). When `capture_points > 0`, the solution is
/// sampled on that many uniform grid points (g, g', and g'' from the equation).
inline ShootResult shoot(const RadialProblem& problem, double mu, const ShootingConfig& config = {},
                         int capture_points = 0) {
    const detail::RadialRhs rhs{problem.dimension_m - 1.0, problem.centrifugal(), mu};
    const bool regular = problem.inner_condition() == InnerCondition::regular_origin;
    double y[2];
    double r_launch;
    double launch_scale = 1.0; // r0^l: the integrated solution is g / launch_scale
    if (regular) {
        r_launch = config.start_radius(problem);
        detail::series_launch_unit(problem, mu, r_launch, y);
        launch_scale = std::pow(r_launch, problem.angular_index_l);
        if (launch_scale < 1e-280)
            throw solver_error("shoot: angular index too large for the series launch scaling");
    } else {
        r_launch = problem.inner_radius;
        y[0] = 1.0;
        y[1] = 0.0;
    }

    ShootResult out;
    out.max_abs_unit_launch = std::abs(y[0]);
    double h_hint = 0.0;

    if (capture_points > 0) {
        // The trace is stored in launch-normalized units; every consumer
        // renormalizes (weighted L2), which cancels the scale exactly.
        int n = capture_points;
        if (n % 2 == 0) ++n;
        out.trace.r.resize(n);
        out.trace.g.resize(n);
        out.trace.g_prime.resize(n);
        out.trace.g_second.resize(n);
        const double a = problem.inner_radius, b = problem.outer_radius;
        double r_cur = r_launch;
        for (int i = 0; i < n; ++i) {
            const double ri = a + (b - a) * static_cast<double>(i) / (n - 1);
            out.trace.r[i] = ri;
            if (ri <= r_cur) {
                // at or before the launch point: series / launch values
                if (regular && ri < r_cur) {
                    // r = 0 limits of the launch-normalized branch (r/r0)^l (1 + c2 r^2)
                    const int l = problem.angular_index_l;
                    const double c2 = (l - mu) / (2.0 * (2.0 * l + problem.dimension_m));
                    out.trace.g[i] = (l == 0 ? 1.0 : 0.0);
                    out.trace.g_prime[i] = (l == 1 ? 1.0 / r_launch : 0.0);
                    out.trace.g_second[i] = (l == 0 ? 2.0 * c2
                                             : (l == 2 ? 2.0 / (r_launch * r_launch) : 0.0));
                } else {
                    out.trace.g[i] = y[0];
                    out.trace.g_prime[i] = y[1];
                    out.trace.g_second[i] =
                        ri > 0.0 ? detail::second_derivative_from_ode(problem, mu, ri, y[0], y[1]) : 0.0;
                }
                continue;
            }
            detail::integrate_segment(rhs, r_cur, ri, y, config.rel_tol, config.abs_tol,
                                      out.max_abs_unit_launch, h_hint);
            r_cur = ri;
            out.trace.g[i] = y[0];
            out.trace.g_prime[i] = y[1];
            out.trace.g_second[i] = detail::second_derivative_from_ode(problem, mu, ri, y[0], y[1]);
        }
    } else {
        detail::integrate_segment(rhs, r_launch, problem.outer_radius, y, config.rel_tol,
                                  config.abs_tol, out.max_abs_unit_launch, h_hint);
    }

    out.mismatch_unit_launch = y[1];
    out.mismatch = y[1] * launch_scale;
    out.max_abs_g = out.max_abs_unit_launch * launch_scale;
    const double R = problem.outer_radius;
    const double flux_weight = std::pow(R, problem.dimension_m - 1) * std::exp(-0.5 * R * R);
    out.scaled_mismatch =
        out.mismatch_unit_launch * flux_weight / std::max(out.max_abs_unit_launch, 1e-300);
    return out;
}

namespace detail {

inline double normalized_defect(const ShootResult& s) {
    return std::abs(s.mismatch_unit_launch) / std::max(s.max_abs_unit_launch, 1e-300);
}

// Bisection + secant polish of the mismatch root inside [lo, hi].
inline double refine_root(const RadialProblem& p, double lo, double hi, double f_lo,
                          const ShootingConfig& cfg) {
    double a = lo, b = hi, fa = f_lo;
    while (b - a > cfg.mu_tolerance) {
        const double mid = 0.5 * (a + b);
        const double fm = shoot(p, mid, cfg).mismatch_unit_launch;
        if (fm == 0.0) return mid;
        if ((fa < 0.0) != (fm < 0.0))
            b = mid;
        else {
            a = mid;
            fa = fm;
        }
    }
    // secant polish: drive the normalized Neumann defect well under 1e-8
    double x0 = a, x1 = b;
    ShootResult s0 = shoot(p, x0, cfg), s1 = shoot(p, x1, cfg);
    double best = normalized_defect(s0) < normalized_defect(s1) ? x0 : x1;
    double best_defect = std::min(normalized_defect(s0), normalized_defect(s1));
    for (int it = 0; it < 12 && best_defect > 1e-10; ++it) {
        const double denom = s1.mismatch_unit_launch - s0.mismatch_unit_launch;
        if (denom == 0.0) break;
        double x2 = x1 - s1.mismatch_unit_launch * (x1 - x0) / denom;
        if (!std::isfinite(x2) || x2 < lo - cfg.mu_bracket_step || x2 > hi + cfg.mu_bracket_step)
            break;
        const ShootResult s2 = shoot(p, x2, cfg);
        if (normalized_defect(s2) < best_defect) {
            best_defect = normalized_defect(s2);
            best = x2;
        }
        x0 = x1;
        s0 = s1;
        x1 = x2;
        s1 = s2;
    }
    return best;
}

inline int count_sign_changes(const std::vector<double>& g, double max_abs) {
    const double tiny = 1e-8 * max_abs;
    int changes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) { // interior samples only
        if (std::abs(g[i]) <= tiny) continue;
        const int s = g[i] > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++changes;
        last_sign = s;
    }
    return changes;
}

// Scan mu upward collecting the first `count` mismatch roots. A scan point is
// taken as a root outright when its normalized Neumann defect is at rounding
// level (the exact constant mode at mu = 0 lands here); otherwise roots are
// bisected from sign changes of the mismatch.
inline std::vector<double> scan_roots(const RadialProblem& p, int count, double step,
                                      const ShootingConfig& cfg) {
    constexpr double mu_cap = 1e7;
    const double hit_tol = 1e-12;
    std::vector<double> roots;

    double mu_prev = 0.0;
    ShootResult s_prev = shoot(p, mu_prev, cfg);
    if (normalized_defect(s_prev) < hit_tol) {
        roots.push_back(mu_prev);
        mu_prev += 0.01 * step;
        s_prev = shoot(p, mu_prev, cfg);
    }
    while (static_cast<int>(roots.size()) < count && mu_prev < mu_cap) {
        const double mu = mu_prev + step;
        const ShootResult s = shoot(p, mu, cfg);
        if (normalized_defect(s) < hit_tol) {
            roots.push_back(mu);
            mu_prev = mu + 0.01 * step;
            s_prev = shoot(p, mu_prev, cfg);
            continue;
        }
        if ((s.mismatch_unit_launch < 0.0) != (s_prev.mismatch_unit_launch < 0.0)) {
            const double root = refine_root(p, mu_prev, mu, s_prev.mismatch_unit_launch, cfg);
            if (roots.empty() || root - roots.back() > 10.0 * cfg.mu_tolerance)
                roots.push_back(root);
        }
        mu_prev = mu;
        s_prev = s;
    }
    if (static_cast<int>(roots.size()) < count)
        throw solver_error("radial eigenvalue scan exhausted below requested count");
    return roots;
}

inline RadialEigenpair build_eigenpair(const RadialProblem& p, double mu,
                                       const ShootingConfig& cfg) {
    const ShootResult s = shoot(p, mu, cfg, cfg.grid_points);
    RadialEigenpair pair;
    pair.mu = mu;
    pair.grid = s.trace.r;
    pair.g_values = s.trace.g;
    pair.g_prime_values = s.trace.g_prime;
    pair.g_second_values = s.trace.g_second;
    pair.dimension_m = p.dimension_m;
    pair.angular_index_l = p.angular_index_l;
    pair.inner_radius = p.inner_radius;
    pair.outer_radius = p.outer_radius;

    // L2(gamma)-normalize against the radial weight, then fix the sign so the
    // largest sample is positive.
    const int m = p.dimension_m;
    std::vector<double> integrand(pair.grid.size());
    for (std::size_t i = 0; i < pair.grid.size(); ++i) {
        const double r = pair.grid[i];
        const double w = r > 0.0 ? std::pow(r, m - 1) * std::exp(-0.5 * r * r) : (m == 1 ? 1.0 : 0.0);
        integrand[i] = pair.g_values[i] * pair.g_values[i] * w;
    }
    const double norm2 = simpson_uniform(pair.grid, integrand);
    if (!(norm2 > 0.0))
        throw solver_error("radial eigenpair has vanishing weighted norm");
    double scale = 1.0 / std::sqrt(norm2);
    double peak = 0.0;
    std::size_t peak_i = 0;
    for (std::size_t i = 0; i < pair.g_values.size(); ++i)
        if (std::abs(pair.g_values[i]) > peak) {
            peak = std::abs(pair.g_values[i]);
            peak_i = i;
        }
    if (pair.g_values[peak_i] < 0.0) scale = -scale;
    for (std::size_t i = 0; i < pair.g_values.size(); ++i) {
        pair.g_values[i] *= scale;
        pair.g_prime_values[i] *= scale;
        pair.g_second_values[i] *= scale;
    }
    pair.radial_index_n = count_sign_changes(pair.g_values, pair.max_abs_g());
    return pair;
}

} // namespace detail

/// The `count` smallest eigenvalues of the radial problem, strictly
/// increasing, each with a normalized sampled eigenfunction. The n-th pair is
/// required to have exactly n interior sign changes; on a mismatch the scan is
/// retried with a halved bracket step before giving up.
inline std::vector<RadialEigenpair> eigenvalues(const RadialProblem& problem, int count,
                                                const ShootingConfig& config = {}) {
    if (count < 1) throw std::invalid_argument("eigenvalues: count must be >= 1");
    double step = config.mu_bracket_step;
    for (int attempt = 0;; ++attempt) {
        std::vector<RadialEigenpair> pairs;
        bool ok = true;
        try {
            const auto roots = detail::scan_roots(problem, count, step, config);
            for (double mu : roots) pairs.push_back(detail::build_eigenpair(problem, mu, config));
            for (int i = 0; i < count; ++i)
                if (pairs[i].radial_index_n != i) {
                    ok = false;
                    break;
                }
        } catch (const solver_error&) {
            ok = false;
        }
        if (ok) return pairs;
        if (attempt >= config.max_bracket_halvings)
            throw rescan_error(
                "radial eigenvalue ordering check failed; rerun with a smaller mu_bracket_step "
                "(reached " +
                std::to_string(step) + ")");
        step *= 0.5;
    }
}

/// First nonzero-mode eigenpair of the ball problem (l = 1), the radial factor
/// behind the first nonzero Neumann eigenvalue in dimension m.
inline RadialEigenpair mu1_ball(int m, double R, const ShootingConfig& config = {}) {
    if (m < 2) throw std::invalid_argument("mu1_ball: m must be >= 2");
    if (!(R > 0.0)) throw std::invalid_argument("mu1_ball: R must be > 0");
    const RadialProblem p(m, 1, 0.0, R);
    return eigenvalues(p, 1, config).front();
}

/// Weighted Rayleigh quotient of a sampled radial function:
/// int (g'^2 + l(l+m-2) g^2/r^2) w dr / int g^2 w dr with w = r^(m-1) e^(-r^2/2),
/// by composite Simpson on the stored grid.
inline double rayleigh_quotient(const RadialEigenpair& pair, const RadialProblem& problem) {
    const int m = problem.dimension_m;
    const double L = problem.centrifugal();
    const std::size_t n = pair.grid.size();
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("rayleigh_quotient: needs an odd-length sampled grid");
    std::vector<double> num(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pair.grid[i];
        const double g = pair.g_values[i];
        const double gp = pair.g_prime_values[i];
        if (r > 0.0) {
            const double w = std::pow(r, m - 1) * std::exp(-0.5 * r * r);
            num[i] = (gp * gp + L * g * g / (r * r)) * w;
            den[i] = g * g * w;
        } else {
            // r = 0 limit: weight r^(m-1) kills everything for m >= 2; for
            // m = 1 the centrifugal coefficient vanishes.
            num[i] = (m == 1) ? gp * gp : 0.0;
            den[i] = (m == 1) ? g * g : 0.0;
        }
    }
    const double denom = detail::simpson_uniform(pair.grid, den);
    if (!(denom > 1e-300))
        throw solver_error("rayleigh_quotient: degenerate function with vanishing weighted norm");
    return detail::simpson_uniform(pair.grid, num) / denom;
}

/// Max ODE residual of a sampled eigenpair, with g'' re-estimated from the
/// stored g' by a five-point finite difference (independent of the
/// integrator's own right-hand-side values).
inline double ode_residual(const RadialEigenpair& pair) {
    const std::size_t n = pair.grid.size();
    if (n < 7) return 0.0;
    const double h = (pair.grid.back() - pair.grid.front()) / static_cast<double>(n - 1);
    const double m1 = pair.dimension_m - 1.0;
    const double L =
        static_cast<double>(pair.angular_index_l) * (pair.angular_index_l + pair.dimension_m - 2);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double r = pair.grid[i];
        if (r <= 0.0) continue;
        const double gpp_fd = (pair.g_prime_values[i - 2] - 8.0 * pair.g_prime_values[i - 1] +
                               8.0 * pair.g_prime_values[i + 1] - pair.g_prime_values[i + 2]) /
                              (12.0 * h);
        const double res = gpp_fd + (m1 / r - r) * pair.g_prime_values[i] +
                           (pair.mu - L / (r * r)) * pair.g_values[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

/// Outer Neumann defect |g'(outer)| / max|g|.
inline double boundary_defect(const RadialEigenpair& pair) {
    return std::abs(pair.g_prime_values.back()) / std::max(pair.max_abs_g(), 1e-300);
}

/// Neumann defect measured in the Sturm-Liouville flux metric
/// r^(m-1) e^(-r^2/2) g'(r), normalized by the peak of the weight over the
/// interval. Equivalent to boundary_defect for small radii; stays meaningful
/// at large R where the raw defect is amplified by ~e^(R^2/2).
inline double weighted_boundary_defect(const RadialEigenpair& pair) {
    const int m = pair.dimension_m;
    auto p = [m](double r) { return std::pow(r, m - 1) * std::exp(-0.5 * r * r); };
    const double r_peak = std::clamp(std::sqrt(std::max(m - 1.0, 0.0)), pair.inner_radius,
                                     pair.outer_radius);
    const double p_max = std::max(p(r_peak), 1e-300);
    return std::abs(pair.g_prime_values.back()) * p(pair.outer_radius) /
           (std::max(pair.max_abs_g(), 1e-300) * p_max);
}

/// Scale-free self-consistency measure of a solved eigenpair: the worst of
/// the Rayleigh-quotient mismatch, the flux-metric Neumann defect and the
/// normalized finite-difference ODE residual.
inline double eigenpair_residual_measure(const RadialEigenpair& pair) {
    const RadialProblem problem(pair.dimension_m, pair.angular_index_l, pair.inner_radius,
                                pair.outer_radius);
    const double rq = rayleigh_quotient(pair, problem);
    const double rq_defect = std::abs(rq - pair.mu) / std::max(std::abs(pair.mu), 1.0);
    const double ode = ode_residual(pair) / ((1.0 + std::abs(pair.mu)) * pair.max_abs_g());
    return std::max({rq_defect, weighted_boundary_defect(pair), ode});
}

/// Sign diagnostics of a first l = 1 ball eigenfunction: its derivative must
/// be positive inside (0,R), the defect g'(r) - g(r)/r must stay <= 0 on
/// (0,R], and at the outer boundary that defect equals -g(R)/R < 0.
struct SignReport {
    double min_interior_g_prime = 0.0;
    double max_ratio_defect = 0.0; ///< max over (0,R] of g'(r) - g(r)/r
    double boundary_ratio_defect = 0.0;
    bool derivative_positive = false;
    bool ratio_defect_nonpositive = false;
    bool boundary_defect_negative = false;

    bool pass(double tol = 1e-8) const {
        return derivative_positive && ratio_defect_nonpositive && boundary_defect_negative &&
               max_ratio_defect <= tol;
    }
};

inline SignReport first_mode_sign_check(const RadialEigenpair& pair, double tol = 1e-8) {
    SignReport rep;
    const std::size_t n = pair.grid.size();
    double min_gp = std::numeric_limits<double>::infinity();
    double max_defect = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = pair.grid[i];
        if (r <= 0.0) continue;
        const bool interior = (i + 1 < n) && r > pair.inner_radius;
        if (interior) min_gp = std::min(min_gp, pair.g_prime_values[i]);
        max_defect = std::max(max_defect, pair.g_prime_values[i] - pair.g_values[i] / r);
    }
    rep.min_interior_g_prime = min_gp;
    rep.max_ratio_defect = max_defect;
    rep.boundary_ratio_defect =
        pair.g_prime_values.back() - pair.g_values.back() / pair.grid.back();
    rep.derivative_positive = min_gp > 0.0;
    rep.ratio_defect_nonpositive = max_defect <= tol;
    rep.boundary_defect_negative = rep.boundary_ratio_defect < 0.0;
    return rep;
}

/// Rayleigh quotient of an explicit admissible trial function on the ball
/// problem, via the weighted composite rule. Any phi with phi(0) = 0 and
/// phi'(R) = 0 bounds the first l = 1 eigenvalue from above.
template <class F, class dF>
inline double radial_trial_quotient(const RadialProblem& problem, F&& phi, dF&& dphi,
                                    int order = 16) {
    const double L = problem.centrifugal();
    const auto rule = radial_rule(problem.dimension_m, problem.inner_radius, problem.outer_radius, order);
    const double num = integrate_radial(rule, [&](double r) {
        const double f = phi(r), fp = dphi(r);
        return fp * fp + (L > 0.0 ? L * f * f / (r * r) : 0.0);
    });
    const double den = integrate_radial(rule, [&](double r) {
        const double f = phi(r);
        return f * f;
    });
    if (!(den > 0.0)) throw solver_error("radial_trial_quotient: vanishing trial norm");
    return num / den;
}

} // namespace gnl

#endif // GNL_RADIAL_ODE_HPP
