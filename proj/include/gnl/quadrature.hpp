#ifndef GNL_QUADRATURE_HPP
#define GNL_QUADRATURE_HPP

/// Gaussian-measure primitives: the regularized incomplete gamma function,
/// Gaussian volumes of origin-centered balls, volume <-> radius matching, and
/// composite Gauss-Legendre rules for radial integrals of the form
///
///     int_a^b f(r) r^(m-1) exp(-r^2/2) dr.
///
/// The Gaussian weight varies over many orders of magnitude, so rules are
/// built from fixed-order panels narrow enough that each panel resolves the
/// weight to near machine precision.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnl/errors.hpp"

namespace gnl {

namespace detail {

// Regularized lower incomplete gamma P(a,x), series branch (x < a+1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction branch for Q(a,x) = 1 - P(a,x), x >= a+1 (modified Lentz).
inline double gamma_q_cf(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

/// Radius beyond which the remaining Gaussian mass is below 1e-14 for every
/// dimension up to 6; integrals over unbounded radial ranges truncate here.
inline constexpr double gaussian_tail_radius = 12.0;

/// Regularized lower incomplete gamma function P(a,x) = gamma(a,x)/Gamma(a).
/// Series for x < a+1, continued fraction otherwise.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x))
        throw std::invalid_argument("gamma_p: requires a > 0 and finite x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

/// Normalized Gaussian measure of a set, a number in [0,1].
struct GaussianVolume {
    double value = 0.0;

    GaussianVolume() = default;
    explicit GaussianVolume(double v) : value(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("GaussianVolume: value must lie in [0,1]");
    }
};

/// gamma_m(B_R): Gaussian measure of the origin-centered ball of radius R in
/// dimension m. Equals P(m/2, R^2/2); strictly increasing in R, -> 1 as R -> inf.
inline GaussianVolume gaussian_ball_volume(int m, double R) {
    if (m < 1) throw std::invalid_argument("gaussian_ball_volume: m must be >= 1");
    if (!(R >= 0.0) || !std::isfinite(R))
        throw std::invalid_argument("gaussian_ball_volume: R must be finite and >= 0");
    if (R == 0.0) return GaussianVolume(0.0);
    double p = gamma_p(0.5 * m, 0.5 * R * R);
    if (p > 1.0) p = 1.0;
    return GaussianVolume(p);
}

/// Closed form of int_a^b r^(m-1) exp(-r^2/2) dr via the incomplete gamma
/// function: 2^(m/2-1) Gamma(m/2) [P(m/2, b^2/2) - P(m/2, a^2/2)].
inline double radial_measure(int m, double a, double b) {
    if (m < 1) throw std::invalid_argument("radial_measure: m must be >= 1");
    if (!(0.0 <= a && a < b)) throw std::invalid_argument("radial_measure: requires 0 <= a < b");
    const double half_m = 0.5 * m;
    const double scale = std::exp((half_m - 1.0) * std::numbers::ln2_v<double> + std::lgamma(half_m));
    const double pa = (a == 0.0) ? 0.0 : gamma_p(half_m, 0.5 * a * a);
    const double pb = gamma_p(half_m, 0.5 * b * b);
    return scale * (pb - pa);
}

/// Surface-normalization constant c_m = (2 pi)^(-m/2) |S^(m-1)|, so that
/// int f(|x|) dgamma_m = c_m * int f(r) r^(m-1) e^(-r^2/2) dr.
inline double gaussian_radial_factor(int m) {
    if (m < 1) throw std::invalid_argument("gaussian_radial_factor: m must be >= 1");
    return std::exp((1.0 - 0.5 * m) * std::numbers::ln2_v<double> - std::lgamma(0.5 * m));
}

/// Inverse of gaussian_ball_volume in R: returns the radius whose ball has
/// Gaussian measure V, to |volume error| < 1e-12. Safeguarded Newton; the
/// derivative dV/dR = R^(m-1) e^(-R^2/2) / (2^(m/2-1) Gamma(m/2)) is analytic.
inline double volume_to_radius(int m, GaussianVolume V) {
    if (m < 1) throw std::invalid_argument("volume_to_radius: m must be >= 1");
    const double v = V.value;
    if (v < 0.0) throw std::invalid_argument("volume_to_radius: negative volume");
    if (v >= 1.0) throw std::domain_error("volume_to_radius: volume >= 1 is unattainable by any ball");
    if (v == 0.0) return 0.0;

    double lo = 0.0;
    double hi = std::sqrt(static_cast<double>(m));
    while (gaussian_ball_volume(m, hi).value < v) {
        lo = hi;
        hi *= 2.0;
        if (hi > 64.0) break; // remaining mass far below 1e-12 past here
    }
    const double density_scale =
        std::exp(-((0.5 * m - 1.0) * std::numbers::ln2_v<double> + std::lgamma(0.5 * m)));
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = gaussian_ball_volume(m, r).value - v;
        if (std::abs(f) < 1e-13) return r;
        if (f > 0.0) hi = r; else lo = r;
        const double dens = density_scale * std::pow(r, m - 1) * std::exp(-0.5 * r * r);
        double next = (dens > 0.0) ? r - f / dens : r;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisect when Newton leaves the bracket
        if (hi - lo < 1e-15 * (1.0 + r)) return 0.5 * (lo + hi);
        r = next;
    }
    return r;
}

/// Nodes and weights approximating int f(r) r^(m-1) e^(-r^2/2) dr over
/// [interval_start, interval_end]; the weight function is folded into the
/// quadrature weights, so applying the rule to f is just a dot product.
struct QuadratureRule {
    double interval_start = 0.0;
    double interval_end = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    int dimension_m = 1;

    /// Measure of the interval, i.e. the rule applied to f == 1.
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int mhalf = (n + 1) / 2;
    for (int i = 0; i < mhalf; ++i) {
        double z = std::cos(std::numbers::pi_v<double> * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Panels narrow enough that `order` points resolve the Gaussian factor to
// ~1e-13: full width 0.25 from order 16 up, shrinking quadratically below.
inline double panel_width_for_order(int order) {
    if (order >= 16) return 0.25;
    const double f = static_cast<double>(order) / 16.0;
    return 0.25 * f * f * f;
}

} // namespace detail

/// Composite Gauss-Legendre rule for r |-> f(r) r^(m-1) e^(-r^2/2) on [a,b].
inline QuadratureRule radial_rule(int m, double a, double b, int order = 16) {
    if (m < 1) throw std::invalid_argument("radial_rule: m must be >= 1");
    if (!(0.0 <= a && a < b) || !std::isfinite(b))
        throw std::invalid_argument("radial_rule: requires 0 <= a < b < inf");
    if (order < 2) throw std::invalid_argument("radial_rule: order must be >= 2");

    std::vector<double> gx, gw;
    detail::gauss_legendre(order, gx, gw);

    const double width = detail::panel_width_for_order(order);
    const std::size_t panels = static_cast<std::size_t>(std::ceil((b - a) / width));

    QuadratureRule rule;
    rule.interval_start = a;
    rule.interval_end = b;
    rule.dimension_m = m;
    rule.nodes.reserve(panels * order);
    rule.weights.reserve(panels * order);
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double p0 = a + h * static_cast<double>(p);
        const double mid = p0 + 0.5 * h;
        for (int k = 0; k < order; ++k) {
            const double r = mid + 0.5 * h * gx[k];
            rule.nodes.push_back(r);
            rule.weights.push_back(0.5 * h * gw[k] * std::pow(r, m - 1) * std::exp(-0.5 * r * r));
        }
    }
    return rule;
}

/// Apply a radial rule: sum_i w_i f(r_i). Throws evaluation_error if f is
/// non-finite at a node.
template <class F>
inline double integrate_radial(const QuadratureRule& rule, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = f(rule.nodes[i]);
        if (!std::isfinite(v))
            throw evaluation_error("integrate_radial: non-finite integrand at node r = " +
                                   std::to_string(rule.nodes[i]));
        s += rule.weights[i] * v;
    }
    return s;
}

} // namespace gnl

#endif // GNL_QUADRATURE_HPP
