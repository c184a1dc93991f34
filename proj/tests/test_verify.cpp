#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "gnl/verify.hpp"

using gnl::verify::RadialVerifyDomain;
using gnl::verify::FemVerifyDomain;

namespace {

// annulus outer radius matched so the Gaussian volume equals that of B_R
double matched_annulus_outer(int m, double r1, double R_ball) {
    const double v = gnl::gaussian_ball_volume(m, R_ball).value +
                     gnl::gaussian_ball_volume(m, r1).value;
    return gnl::volume_to_radius(m, gnl::GaussianVolume(v));
}

} // namespace

TEST_CASE("matched ball radii", "[verify]") {
    // volume of B_1 in m=2 is 1 - e^{-1/2} = 0.393469...
    const double v = gnl::gaussian_ball_volume(2, 1.0).value;
    CHECK(v == Approx(0.393469).margin(1e-6));
    CHECK(gnl::verify::matched_ball(2, gnl::GaussianVolume(v)) == Approx(1.0).margin(1e-9));
    CHECK(gnl::verify::matched_ball(3, gnl::GaussianVolume(1e-12)) < 1e-3);

    // annulus volume via quadrature matches the closed-form difference
    const auto rule = gnl::radial_rule(3, 0.5, 1.2);
    const double vol_quad = gnl::gaussian_radial_factor(3) * rule.total_weight();
    const double vol_exact =
        gnl::gaussian_ball_volume(3, 1.2).value - gnl::gaussian_ball_volume(3, 0.5).value;
    CHECK(vol_quad == Approx(vol_exact).epsilon(1e-12));
    const double R = gnl::verify::matched_ball(3, gnl::GaussianVolume(vol_quad));
    CHECK(gnl::gaussian_ball_volume(3, R).value == Approx(vol_quad).margin(1e-10));
}

TEST_CASE("trial profile monotonicity", "[verify]") {
    for (int m : {2, 3, 4})
        for (double R : {0.75, 1.5}) {
            const auto G = gnl::verify::build_trial_profile(gnl::mu1_ball(m, R));
            const auto rep = gnl::verify::check_trial_monotonicity(G);
            INFO("m=" << m << " R=" << R);
            CHECK(rep.nondecreasing);
            CHECK(rep.ratio_nonincreasing);
            // constant extension: value fixed, derivative zero past R
            CHECK(G.value(R + 0.5) == Approx(G.tail_value));
            CHECK(G.derivative(R + 0.5) == 0.0);
        }
}

TEST_CASE("trial functions vanish at the origin and have zero mean", "[verify]") {
    const auto G = gnl::verify::build_trial_profile(gnl::mu1_ball(3, 1.0));
    const auto fns = gnl::verify::build_trial_functions(G, 3);
    CHECK(fns.value(0, {0.0, 0.0, 0.0}) == 0.0);
    CHECK(fns.value(1, {0.3, 0.4, 0.0}) ==
          Approx(G.value(0.5) * 0.4 / 0.5).epsilon(1e-12));

    const auto dom = RadialVerifyDomain::annulus(3, 0.5, 1.2);
    for (double mean : dom.trial_means()) CHECK(std::abs(mean) < 1e-9);

    // asymmetric region (half disk, raw mesh import path): nonzero means
    auto mesh = gnl::mesh_domain(gnl::Domain2D::disk(1.0), 0.1);
    gnl::Mesh half;
    std::vector<int> remap(mesh.nodes.size(), -1);
    for (const auto& tri : mesh.triangles) {
        const double cy = (mesh.nodes[tri[0]].y + mesh.nodes[tri[1]].y + mesh.nodes[tri[2]].y) / 3.0;
        if (cy < 0.0) continue;
        std::array<int, 3> t2;
        for (int c = 0; c < 3; ++c) {
            if (remap[tri[c]] < 0) {
                remap[tri[c]] = static_cast<int>(half.nodes.size());
                half.nodes.push_back(mesh.nodes[tri[c]]);
            }
            t2[c] = remap[tri[c]];
        }
        half.triangles.push_back(t2);
    }
    const auto half_dom = FemVerifyDomain::from_mesh(half);
    const auto means = half_dom.trial_means();
    CHECK(std::abs(means[1]) > 1e-3); // y-mean clearly nonzero on the upper half disk
}

TEST_CASE("orthogonalize: diagonal Gram gives the identity rotation", "[verify]") {
    Eigen::MatrixXd q = Eigen::Vector3d(0.7, 0.2, 1.3).asDiagonal();
    const auto res = gnl::verify::orthogonalize(q);
    CHECK((res.rotation_A - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(res.orthogonality_residual < 1e-14);
    CHECK_FALSE(res.degenerate);
}

TEST_CASE("orthogonalize a random system, verified by direct quadrature", "[verify]") {
    // Synthetic weighted function system on [0,2] with the m=3 radial measure:
    // u_j = orthonormalized {1, r, r^2}, trial family v_k = exp(-k r).
    const int m = 3;
    const auto rule = gnl::radial_rule(m, 0.0, 2.0);
    auto ip = [&](auto&& f, auto&& g) {
        return gnl::integrate_radial(rule, [&](double r) { return f(r) * g(r); });
    };
    std::vector<std::function<double(double)>> u;
    for (int j = 0; j < 3; ++j) {
        std::function<double(double)> base = [j](double r) { return std::pow(r, j); };
        for (const auto& prev : u) {
            const double c = ip(base, prev);
            base = [base, prev, c](double r) { return base(r) - c * prev(r); };
        }
        const double n = std::sqrt(ip(base, base));
        u.push_back([base, n](double r) { return base(r) / n; });
    }
    std::vector<std::function<double(double)>> v;
    for (int k = 1; k <= 3; ++k)
        v.push_back([k](double r) { return std::exp(-k * r); });

    Eigen::MatrixXd q(3, 3);
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) q(k, j) = ip(v[k], u[j]);

    const auto res = gnl::verify::orthogonalize(q);
    CHECK(res.unitarity_defect < 1e-10);
    CHECK(res.orthogonality_residual < 1e-10);

    // brute-force check: quadrature of the rotated functions against u_j
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) {
            const double val = ip(
                [&](double r) {
                    double s = 0.0;
                    for (int k = 0; k < 3; ++k) s += res.rotation_A(i, k) * v[k](r);
                    return s;
                },
                u[j]);
            CHECK(std::abs(val) < 1e-10);
        }
}

TEST_CASE("orthogonalize flags a rank-deficient Gram but still rotates", "[verify]") {
    Eigen::MatrixXd q(3, 3);
    q << 0.8, 0.1, 0.0, 0.2, 0.5, 0.0, 0.1, 0.3, 0.0; // zero third column
    const auto res = gnl::verify::orthogonalize(q);
    CHECK(res.degenerate);
    CHECK(res.unitarity_defect < 1e-12);
    CHECK(res.orthogonality_residual < 1e-12);
}

TEST_CASE("disk Gram through the FEM backend is orthogonalized cleanly", "[verify]") {
    const auto dom = FemVerifyDomain::from_domain(gnl::Domain2D::disk(1.0), 0.08);
    const auto res = gnl::verify::orthogonalize(dom.gram());
    CHECK(res.orthogonality_residual < 1e-8);
    CHECK(res.unitarity_defect < 1e-10);
}

TEST_CASE("admissibility bounds on an annulus and saturation on the ball", "[verify]") {
    const auto ann = RadialVerifyDomain::annulus(3, 0.5, 1.2);
    for (const auto& rec : gnl::verify::verify_rayleigh_bounds(ann)) {
        CHECK(rec.satisfied);
        CHECK(rec.slack > 0.0);
    }

    const auto ball = RadialVerifyDomain::ball(3, 1.0);
    for (const auto& rec : gnl::verify::verify_rayleigh_bounds(ball)) {
        CHECK(rec.satisfied);
        CHECK(std::abs(rec.slack) < 1e-6 * std::abs(rec.left));
        // on the ball the trial functions are eigenfunctions: their Rayleigh
        // quotients reproduce mu_1(B)
        const double quotient = rec.right * ball.mu[1] / rec.left;
        CHECK(quotient == Approx(ball.mu[1]).margin(1e-7));
    }

    // inflating the eigenvalues by 10% must break the saturated bounds
    std::vector<double> inflated = ball.mu;
    for (double& x : inflated) x *= 1.1;
    bool violated = false;
    for (const auto& rec : gnl::verify::verify_rayleigh_bounds(ball, 1e-8, inflated))
        if (!rec.satisfied) violated = true;
    CHECK(violated);
}

TEST_CASE("chain saturates on balls", "[verify]") {
    for (int m : {2, 3}) {
        const auto dom = RadialVerifyDomain::ball(m, 1.0);
        const auto rep = gnl::verify::verify_chain(dom);
        INFO("m=" << m);
        CHECK(rep.all_hold);
        for (const auto& rec : rep.records) {
            INFO(rec.name);
            CHECK(std::abs(rec.slack) <= 1e-6 * (1.0 + std::abs(rec.left)));
        }
        CHECK(std::abs(rep.margin_direct) < 1e-7);
        CHECK(std::abs(rep.margin_direct - rep.margin_from_chain) <
              1e-6 * (m - 1.0) / dom.G.mu1_ball);
    }
}

TEST_CASE("chain is strict on a volume-matched annulus", "[verify]") {
    const int m = 3;
    const double r1 = 0.5;
    const double r2 = matched_annulus_outer(m, r1, 1.0);
    const auto dom = RadialVerifyDomain::annulus(m, r1, r2);
    const auto rep = gnl::verify::verify_chain(dom);
    CHECK(rep.all_hold);
    double s35 = 0, s37 = 0, s310 = 0;
    for (const auto& rec : rep.records) {
        CHECK(rec.satisfied);
        if (rec.name == "gradient_concentration") s35 = rec.slack;
        if (rec.name == "ratio_symmetrization") s37 = rec.slack;
        if (rec.name == "amplitude_symmetrization") s310 = rec.slack;
    }
    CHECK(s35 > 1e-4);
    CHECK(s37 > 1e-4);
    CHECK(s310 > 1e-4);
    CHECK(rep.margin_direct > 0.0);
    CHECK(std::abs(rep.margin_direct - rep.margin_from_chain) <
          1e-6 * std::max(std::abs(rep.margin_direct), (m - 1.0) / dom.G.mu1_ball));
}

TEST_CASE("chain holds on a planar ellipse through the FEM backend", "[verify]") {
    const auto dom = FemVerifyDomain::from_domain(gnl::Domain2D::ellipse(2.0, 1.0), 0.1);
    const auto rep = gnl::verify::verify_chain(dom);
    for (const auto& rec : rep.records) {
        INFO(rec.name);
        CHECK(rec.satisfied);
    }
    CHECK(std::abs(rep.margin_direct - rep.margin_from_chain) <
          1e-6 * std::max(std::abs(rep.margin_direct), 1.0 / dom.G.mu1_ball));
}

TEST_CASE("main inequality: equality case on balls", "[verify]") {
    for (int m : {2, 3, 4})
        for (double R : {0.75, 1.0, 2.0}) {
            const auto dom = RadialVerifyDomain::ball(m, R);
            const auto rep = gnl::verify::verify_main_inequality(dom);
            INFO("m=" << m << " R=" << R);
            CHECK(rep.holds);
            CHECK(std::abs(rep.margin) <= 1e-7);
            CHECK(rep.equality);
        }
}

TEST_CASE("main inequality: strict on annuli and never equality off the ball family",
          "[verify]") {
    const int m = 4;
    const double r2 = matched_annulus_outer(m, 0.3, 1.0);
    const auto dom = RadialVerifyDomain::annulus(m, 0.3, r2);
    const auto rep = gnl::verify::verify_main_inequality(dom);
    CHECK(rep.holds);
    CHECK(rep.margin > rep.tolerance);
    CHECK_FALSE(rep.equality);

    // a thin annulus is spectrally close to the ball but must not be flagged
    const double r2b = matched_annulus_outer(3, 0.1, 1.0);
    const auto thin = RadialVerifyDomain::annulus(3, 0.1, r2b);
    const auto rep2 = gnl::verify::verify_main_inequality(thin);
    CHECK_FALSE(rep2.equality);
    CHECK(rep2.holds);
}

TEST_CASE("main inequality on a matched ellipse via FEM", "[verify]") {
    // aspect ratio 2, Gaussian area matched to B_1 by scaling (solved in-test)
    const double target = gnl::gaussian_ball_volume(2, 1.0).value;
    double lo = 0.5, hi = 1.5;
    for (int it = 0; it < 60; ++it) {
        const double c = 0.5 * (lo + hi);
        gnl::verify::NonincreasingStep one{{}, {1.0}};
        const auto rec =
            gnl::verify::symmetrization_check_planar(gnl::Domain2D::ellipse(c * std::sqrt(2.0),
                                                                            c / std::sqrt(2.0)),
                                                     one);
        // matched radius of the ellipse reproduces its Gaussian area
        (gnl::gaussian_ball_volume(2, rec.matched_radius).value < target ? lo : hi) = c;
    }
    const double c = 0.5 * (lo + hi);
    const auto dom = FemVerifyDomain::from_domain(
        gnl::Domain2D::ellipse(c * std::sqrt(2.0), c / std::sqrt(2.0)), 0.07);
    CHECK(dom.matched_radius == Approx(1.0).margin(5e-3));
    const auto rep = gnl::verify::verify_main_inequality(dom);
    CHECK(rep.holds);
    CHECK(rep.margin > rep.tolerance); // 1/mu_1(ellipse) > 1/mu_1(ball)
    CHECK_FALSE(rep.equality);
}

TEST_CASE("symmetrization comparisons", "[verify]") {
    // h == 1: both sides are the common Gaussian volume
    gnl::verify::NonincreasingStep one{{}, {1.0}};
    const auto rec1 = gnl::verify::symmetrization_check_radial(3, 0.4, 1.1, one);
    CHECK(rec1.slack == Approx(0.0).margin(1e-12));
    CHECK(rec1.satisfied);

    // smooth h(r) = e^{-r} on an m=2 annulus: strictly better on the ball
    const auto rec2 = gnl::verify::symmetrization_check_radial(
        2, 0.5, 1.3, [](double r) { return std::exp(-r); });
    CHECK(rec2.satisfied);
    CHECK(rec2.slack > 1e-4);

    // increasing h must be rejected up front
    CHECK_THROWS_AS(gnl::verify::symmetrization_check_radial(2, 0.5, 1.3,
                                                             [](double r) { return r; }),
                    std::invalid_argument);

    // planar ellipse with a step integrand
    gnl::verify::NonincreasingStep h{{0.5, 1.0}, {2.0, 1.0, 0.25}};
    const auto rec3 =
        gnl::verify::symmetrization_check_planar(gnl::Domain2D::ellipse(1.6, 0.7), h);
    CHECK(rec3.satisfied);
    CHECK(rec3.slack > 0.0);
}

TEST_CASE("random nonincreasing steps satisfy symmetrization on random domains", "[verify]") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> rad(0.1, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = gnl::verify::random_nonincreasing_step(rng);
        REQUIRE(h.is_nonincreasing());
        const int m = 2 + static_cast<int>(rng() % 4);
        double r1 = rad(rng), r2 = rad(rng);
        if (r1 > r2) std::swap(r1, r2);
        if (r2 - r1 < 0.05) r2 = r1 + 0.05;
        const auto rec = gnl::verify::symmetrization_check_radial(m, r1, r2, h);
        INFO("m=" << m << " [" << r1 << "," << r2 << "]");
        CHECK(rec.satisfied);
    }
}

TEST_CASE("chain margin consistency across verified domains", "[verify]") {
    const double r2 = matched_annulus_outer(2, 0.4, 0.9);
    const auto doms = {RadialVerifyDomain::ball(2, 1.3), RadialVerifyDomain::annulus(2, 0.4, r2)};
    for (const auto& dom : doms) {
        const auto rep = gnl::verify::verify_chain(dom);
        const double scale = std::max(std::abs(rep.margin_direct), 1.0 / dom.G.mu1_ball);
        CHECK(std::abs(rep.margin_direct - rep.margin_from_chain) <= 1e-6 * scale);
    }
}
