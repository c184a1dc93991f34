#include <catch2/catch.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "gnl/quadrature.hpp"

namespace {

// Independent adaptive Simpson integrator used as an oracle against the
// composite Gauss-Legendre rules. Deliberately naive: recursion on the
// plain integrand, no knowledge of the weight structure.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_oracle(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

TEST_CASE("gaussian_ball_volume basics", "[quadrature]") {
    for (int m = 1; m <= 6; ++m)
        CHECK(gnl::gaussian_ball_volume(m, 0.0).value == 0.0);

    // m=2 closed form: gamma_2(B_R) = 1 - exp(-R^2/2), so the half-mass radius
    // is sqrt(2 ln 2) = 1.17741002...
    const double r_half = std::sqrt(2.0 * std::log(2.0));
    CHECK(gnl::gaussian_ball_volume(2, 1.177410).value == Approx(0.5).margin(1e-6));
    CHECK(gnl::gaussian_ball_volume(2, r_half).value == Approx(0.5).epsilon(1e-12));

    // Gaussian tail: remaining mass of the m=1 line beyond R=10 is below
    // exp(-50), far under 1e-12.
    CHECK(gnl::gaussian_ball_volume(1, 10.0).value == Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(gnl::gaussian_ball_volume(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gnl::gaussian_ball_volume(2, -0.5), std::invalid_argument);
}

TEST_CASE("gaussian_ball_volume matches the m=2 closed form on a grid", "[quadrature]") {
    for (int k = 1; k <= 50; ++k) {
        const double R = 0.08 * k;
        const double exact = 1.0 - std::exp(-0.5 * R * R);
        CHECK(gnl::gaussian_ball_volume(2, R).value == Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("gaussian_ball_volume is strictly increasing in R", "[quadrature]") {
    for (int m = 1; m <= 6; ++m) {
        double prev = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double v = gnl::gaussian_ball_volume(m, 0.1 * k).value;
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("volume_to_radius inverts the ball volume", "[quadrature]") {
    CHECK(gnl::volume_to_radius(3, gnl::GaussianVolume(0.0)) == 0.0);
    CHECK(gnl::volume_to_radius(2, gnl::GaussianVolume(0.5)) ==
          Approx(std::sqrt(2.0 * std::log(2.0))).margin(1e-6));

    for (int m = 1; m <= 6; ++m)
        for (double R : {0.5, 1.0, 2.0}) {
            const double back = gnl::volume_to_radius(m, gnl::gaussian_ball_volume(m, R));
            CHECK(back == Approx(R).margin(1e-9));
        }

    // round trip on a denser grid, volume-side tolerance
    for (int m = 1; m <= 6; ++m)
        for (int k = 1; k <= 50; ++k) {
            const double R = 0.1 * k;
            const double back = gnl::volume_to_radius(m, gnl::gaussian_ball_volume(m, R));
            CHECK(back == Approx(R).margin(1e-9));
        }

    CHECK_THROWS_AS(gnl::volume_to_radius(2, gnl::GaussianVolume(1.0)), std::domain_error);
    CHECK_THROWS(gnl::volume_to_radius(2, gnl::GaussianVolume(-0.1)));
    CHECK_THROWS_AS(gnl::volume_to_radius(0, gnl::GaussianVolume(0.5)), std::invalid_argument);
}

TEST_CASE("radial_rule reproduces closed-form measures", "[quadrature]") {
    // f == 1, m=2 on [0,1]: exp(0) - exp(-1/2)
    const auto rule21 = gnl::radial_rule(2, 0.0, 1.0);
    const double exact21 = 1.0 - std::exp(-0.5);
    CHECK(gnl::integrate_radial(rule21, [](double) { return 1.0; }) ==
          Approx(0.393469).margin(1e-6));
    CHECK(rule21.total_weight() == Approx(exact21).epsilon(1e-13));

    // f == 1, m=1 truncated at 12: sqrt(pi/2)
    const auto rule1 = gnl::radial_rule(1, 0.0, 12.0);
    CHECK(rule1.total_weight() == Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-12));
    CHECK(rule1.total_weight() == Approx(1.253314).margin(1e-6));

    CHECK_THROWS_AS(gnl::radial_rule(2, 1.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(gnl::radial_rule(2, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("radial_rule unit integrand invariant across orders and dimensions", "[quadrature]") {
    for (int m : {1, 2, 3, 4, 5, 6})
        for (int order : {2, 4, 8, 16, 32})
            for (auto [a, b] : {std::pair{0.0, 1.0}, {0.3, 2.7}, {0.0, 12.0}}) {
                const auto rule = gnl::radial_rule(m, a, b, order);
                const double exact = gnl::radial_measure(m, a, b);
                CHECK(rule.total_weight() == Approx(exact).epsilon(1e-12));
                for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                    REQUIRE(rule.nodes[i] >= a);
                    REQUIRE(rule.nodes[i] <= b);
                    REQUIRE(rule.weights[i] > 0.0);
                }
            }
}

TEST_CASE("doubling the order sharpens r^4 integration", "[quadrature]") {
    // exact value of int r^4 r^(m-1) e^(-r^2/2) dr = radial_measure(m+4, a, b)
    const int m = 2;
    const double a = 0.0, b = 3.0;
    const double exact = gnl::radial_measure(m + 4, a, b);
    const auto f = [](double r) { return r * r * r * r; };
    const double e2 = std::abs(gnl::integrate_radial(gnl::radial_rule(m, a, b, 2), f) - exact);
    const double e4 = std::abs(gnl::integrate_radial(gnl::radial_rule(m, a, b, 4), f) - exact);
    CHECK((e4 < e2 / 10.0 || e4 < 1e-15 * exact));
}

TEST_CASE("integrate_radial against an adaptive oracle", "[quadrature]") {
    const auto rule = gnl::radial_rule(3, 0.0, 12.0);
    CHECK(gnl::integrate_radial(rule, [](double) { return 0.0; }) == 0.0);
    CHECK(gnl::integrate_radial(rule, [](double) { return 1.0; }) ==
          Approx(rule.total_weight()).epsilon(1e-15));

    // f(r) = r^2, m = 3: whole-line value is 3 sqrt(pi/2); the [0,12] truncation
    // is below 1e-12 of it. Cross-check against the independent adaptive
    // integrator and the closed form.
    const double got = gnl::integrate_radial(rule, [](double r) { return r * r; });
    const double oracle = integrate_oracle(
        [](double r) { return r * r * r * r * std::exp(-0.5 * r * r); }, 0.0, 12.0);
    CHECK(got == Approx(oracle).epsilon(1e-11));
    CHECK(got == Approx(3.0 * std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-12));
    CHECK(got == Approx(gnl::radial_measure(5, 0.0, 12.0)).epsilon(1e-13));

    const double pole = rule.nodes[3];
    CHECK_THROWS_AS(gnl::integrate_radial(rule, [pole](double r) { return 1.0 / (r - pole); }),
                    gnl::evaluation_error);
}

TEST_CASE("random polynomial integrands match closed-form moments", "[quadrature]") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const double a = 0.25 * (rng() % 4);
        const double b = a + 0.5 + 0.25 * (rng() % 10);
        double c0 = coeff(rng), c2 = coeff(rng), c4 = coeff(rng);
        const auto rule = gnl::radial_rule(m, a, b);
        const double got = gnl::integrate_radial(
            rule, [&](double r) { return c0 + c2 * r * r + c4 * r * r * r * r; });
        const double exact = c0 * gnl::radial_measure(m, a, b) +
                             c2 * gnl::radial_measure(m + 2, a, b) +
                             c4 * gnl::radial_measure(m + 4, a, b);
        CHECK(got == Approx(exact).margin(1e-12 * (1.0 + std::abs(exact))));
    }
}
