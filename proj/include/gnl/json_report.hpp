#ifndef GNL_JSON_REPORT_HPP
#define GNL_JSON_REPORT_HPP

/// JSON emission of verification records: one object per verified domain with
/// the domain description, matched ball data, spectra, per-inequality slacks
/// and the verdicts. Consumed by the CLI and by anything scripting sweeps.

#include <string>

#include <json.hpp>

#include "gnl/ball_spectrum.hpp"
#include "gnl/verify.hpp"

namespace gnl {

inline nlohmann::json to_json(const Spectrum& spec) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : spec.entries)
        entries.push_back({{"mu", e.mu},
                           {"l", e.angular_index_l},
                           {"n", e.radial_index_n},
                           {"mult", e.multiplicity}});
    return entries;
}

inline nlohmann::json to_json(const verify::ChainRecord& rec) {
    return {{"name", rec.name},
            {"left", rec.left},
            {"right", rec.right},
            {"slack", rec.slack},
            {"satisfied", rec.satisfied}};
}

inline nlohmann::json to_json(const verify::InequalityReport& rep) {
    return {{"lhs", rep.lhs},
            {"rhs", rep.rhs},
            {"margin", rep.margin},
            {"tolerance", rep.tolerance},
            {"holds", rep.holds},
            {"equality", rep.equality},
            {"matched_radius", rep.matched_radius},
            {"mu1_ball", rep.mu1_ball},
            {"mu", rep.mu_domain}};
}

inline nlohmann::json to_json(const verify::ChainReport& rep) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : rep.records) records.push_back(to_json(rec));
    return {{"records", records},
            {"tolerance", rep.tolerance},
            {"orthogonality_residual", rep.rotation.orthogonality_residual},
            {"rotation_unitarity_defect", rep.rotation.unitarity_defect},
            {"degenerate_gram", rep.rotation.degenerate},
            {"margin_direct", rep.margin_direct},
            {"margin_from_chain", rep.margin_from_chain},
            {"all_hold", rep.all_hold}};
}

inline nlohmann::json to_json(const verify::SymmetrizationRecord& rec) {
    return {{"omega_side", rec.omega_side},
            {"ball_side", rec.ball_side},
            {"slack", rec.slack},
            {"matched_radius", rec.matched_radius},
            {"satisfied", rec.satisfied}};
}

/// Full verification record for one domain.
template <class Dom>
nlohmann::json verification_record(const Dom& dom, nlohmann::json domain_description,
                                   const verify::InequalityReport& main,
                                   const verify::ChainReport& chain) {
    nlohmann::json rec;
    rec["domain"] = std::move(domain_description);
    rec["m"] = dom.dimension();
    rec["gaussian_volume"] = dom.volume().value;
    rec["matched_radius"] = dom.matched_radius;
    rec["mu1_ball"] = dom.G.mu1_ball;
    rec["mu"] = dom.mu;
    const auto means = dom.trial_means();
    rec["trial_means"] = means;

    const auto mono = verify::check_trial_monotonicity(dom.G);
    rec["trial_profile"] = {{"nondecreasing", mono.nondecreasing},
                            {"ratio_nonincreasing", mono.ratio_nonincreasing},
                            {"min_increment", mono.min_G_increment},
                            {"max_ratio_increment", mono.max_ratio_increment}};

    rec["inequality"] = to_json(main);
    rec["chain"] = to_json(chain);

    double worst_mean = 0.0;
    for (double v : means) worst_mean = std::max(worst_mean, std::abs(v));
    const bool means_ok = worst_mean < 1e-8;
    rec["verdicts"] = {{"main", main.holds},
                       {"chain", chain.all_hold},
                       {"orthogonality", chain.rotation.orthogonality_residual < 1e-8},
                       {"trial_means_zero", means_ok},
                       {"trial_profile_monotone", mono.pass()}};
    bool pass = main.holds && chain.all_hold && means_ok && mono.pass() &&
                chain.rotation.orthogonality_residual < 1e-8;
    rec["pass"] = pass;
    return rec;
}

} // namespace gnl

#endif // GNL_JSON_REPORT_HPP
