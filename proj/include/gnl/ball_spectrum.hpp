#ifndef GNL_BALL_SPECTRUM_HPP
#define GNL_BALL_SPECTRUM_HPP

/// Full Neumann spectra of origin-centered balls and origin-symmetric annuli:
/// radial modes solved per angular index l, merged in increasing order with
/// spherical-harmonic multiplicities. An entry (mu, l, n, mult) stands for
/// `mult` eigenvalues sharing the radial factor g_{l,n}(r).

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnl/radial_ode.hpp"

namespace gnl {

/// Dimension of the space of degree-l spherical harmonics on S^(m-1):
/// N(m,0) = 1 and N(m,l) = (2l+m-2) (l+m-3)! / (l! (m-2)!).
inline std::int64_t harmonic_multiplicity(int m, int l) {
    if (m < 2) throw std::invalid_argument("harmonic_multiplicity: m must be >= 2");
    if (l < 0) throw std::invalid_argument("harmonic_multiplicity: l must be >= 0");
    if (l == 0) return 1;
    // (2l+m-2)/l * C(l+m-3, m-2), computed without overflow for desk-scale m,l
    std::int64_t binom = 1;
    for (int j = 1; j <= m - 2; ++j) binom = binom * (l + j - 1) / j;
    return binom * (2 * l + m - 2) / l;
}

struct SpectrumEntry {
    double mu = 0.0;
    int angular_index_l = 0;
    int radial_index_n = 0;
    std::int64_t multiplicity = 1;
};

enum class DomainKind { ball, annulus };

/// Sorted Neumann spectrum of a radially symmetric domain. Expanding each
/// entry by its multiplicity yields the ordered eigenvalue list
/// mu_0 <= mu_1 <= ... of the full problem.
struct Spectrum {
    std::vector<SpectrumEntry> entries;
    int dimension_m = 2;
    DomainKind domain = DomainKind::ball;
    double inner_radius = 0.0;
    double outer_radius = 1.0;
    /// Ground eigenvalue of the first angular index that was not included;
    /// exceeds every returned eigenvalue (checked at assembly time).
    double excluded_l_ground = 0.0;

    /// Eigenvalues repeated by multiplicity: [mu_0, mu_1, ..., mu_(count-1)].
    std::vector<double> expanded(std::size_t count) const {
        std::vector<double> out;
        out.reserve(count);
        for (const auto& e : entries)
            for (std::int64_t k = 0; k < e.multiplicity && out.size() < count; ++k)
                out.push_back(e.mu);
        if (out.size() < count)
            throw std::invalid_argument("Spectrum::expanded: not enough entries for requested count");
        return out;
    }
};

namespace detail {

inline Spectrum assemble_radial_spectrum(int m, double r1, double r2, int count,
                                         const ShootingConfig& config, DomainKind kind) {
    if (count < 1) throw std::invalid_argument("spectrum: count must be >= 1");

    Spectrum spec;
    spec.dimension_m = m;
    spec.domain = kind;
    spec.inner_radius = r1;
    spec.outer_radius = r2;

    std::vector<SpectrumEntry> all;
    std::int64_t total = 0;
    double worst_needed = std::numeric_limits<double>::infinity();

    // Increasing-l scan: the ground eigenvalue grows with l (the centrifugal
    // term is monotone in l), so once a ground mode clears the current
    // count-th value no later l can contribute. The cutoff value is recorded
    // and asserted rather than silently assumed. Solving ceil(count/mult)
    // modes per included l guarantees nothing below the count-th overall
    // value is missed from that family.
    for (int l = 0;; ++l) {
        const RadialProblem problem(m, l, r1, r2);
        const std::int64_t mult = harmonic_multiplicity(m, l);
        const int per_l = static_cast<int>((count + mult - 1) / mult);
        const std::vector<RadialEigenpair> pairs = eigenvalues(problem, per_l, config);
        if (l > 0 && total >= count && pairs.front().mu > worst_needed) {
            spec.excluded_l_ground = pairs.front().mu;
            break;
        }
        for (const auto& p : pairs) {
            all.push_back({p.mu, l, p.radial_index_n, mult});
            total += mult;
        }
        std::sort(all.begin(), all.end(),
                  [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.mu < b.mu; });
        // value of the count-th eigenvalue with multiplicities expanded
        std::int64_t seen = 0;
        for (const auto& e : all) {
            seen += e.multiplicity;
            if (seen >= count) {
                worst_needed = e.mu;
                break;
            }
        }
    }

    if (spec.excluded_l_ground <= worst_needed)
        throw solver_error("spectrum assembly: angular cutoff is not sound; increase count");

    // keep only entries contributing to the first `count` eigenvalues
    std::int64_t kept = 0;
    for (const auto& e : all) {
        if (kept >= count) break;
        spec.entries.push_back(e);
        kept += e.multiplicity;
    }
    return spec;
}

} // namespace detail

/// Lowest `count` Neumann eigenvalues (with multiplicity) of the ball B_R in
/// dimension m. The first entry is the constant mode (0, l=0, n=0, mult 1);
/// the first nonzero entry has l = 1 and multiplicity m.
inline Spectrum ball_neumann_spectrum(int m, double R, int count,
                                      const ShootingConfig& config = {}) {
    if (m < 2) throw std::invalid_argument("ball_neumann_spectrum: m must be >= 2");
    if (!(R > 0.0)) throw std::invalid_argument("ball_neumann_spectrum: R must be > 0");
    return detail::assemble_radial_spectrum(m, 0.0, R, count, config, DomainKind::ball);
}

/// Same assembly for the annulus R1 < |x| < R2 with Neumann conditions at
/// both radii.
inline Spectrum annulus_neumann_spectrum(int m, double R1, double R2, int count,
                                         const ShootingConfig& config = {}) {
    if (m < 2) throw std::invalid_argument("annulus_neumann_spectrum: m must be >= 2");
    if (!(0.0 < R1 && R1 < R2))
        throw std::invalid_argument("annulus_neumann_spectrum: requires 0 < R1 < R2");
    return detail::assemble_radial_spectrum(m, R1, R2, count, config, DomainKind::annulus);
}

} // namespace gnl

#endif // GNL_BALL_SPECTRUM_HPP
