// gnl - Gaussian Neumann eigenvalue laboratory.
//
// Subcommands:
//   sweep     first-eigenvalue sweep over ball radii (CSV)
//   spectrum  Neumann spectrum of a ball/annulus/planar domain (JSON)
//   verify    harmonic-mean inequality verification record (JSON)
//   lemmas    property battery: monotonicity, lower bound, sign structure,
//             symmetrization (CSV or JSON)
//
// Exit codes: 0 success, 1 verdict failure, 2 usage error, 3 solver failure.
// GNL_THREADS caps internal parallelism. All output is buffered and written
// atomically at the end; identical configuration (including --seed) produces
// byte-identical output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnl/ball_spectrum.hpp"
#include "gnl/fem2d.hpp"
#include "gnl/json_report.hpp"
#include "gnl/parallel.hpp"
#include "gnl/quadrature.hpp"
#include "gnl/radial_ode.hpp"
#include "gnl/verify.hpp"

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + out_path);
    os << text;
}

struct DomainSpec {
    std::string kind = "ball";
    int m = 2;
    double R = 1.0;
    double r1 = 0.5, r2 = 1.0;
    double a = 1.0, b = 1.0;
    std::vector<gnl::Vec2> vertices;

    nlohmann::json describe() const {
        nlohmann::json j{{"kind", kind}, {"m", m}};
        if (kind == "ball") j["R"] = R;
        if (kind == "annulus") {
            j["r1"] = r1;
            j["r2"] = r2;
        }
        if (kind == "ellipse" || kind == "rectangle") {
            j["a"] = a;
            j["b"] = b;
        }
        if (kind == "polygon") {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& p : vertices) v.push_back({p.x, p.y});
            j["vertices"] = v;
        }
        return j;
    }

    bool radial() const { return kind == "ball" || kind == "annulus"; }

    gnl::Domain2D planar() const {
        if (kind == "ellipse") return gnl::Domain2D::ellipse(a, b);
        if (kind == "rectangle") return gnl::Domain2D::rectangle(a, b);
        if (kind == "polygon") return gnl::Domain2D::polygon(vertices);
        if (kind == "ball") return gnl::Domain2D::disk(R);
        return gnl::Domain2D::annulus(r1, r2);
    }
};

// --domain-file JSON: {"kind": ..., "m": ..., kind-specific params}
DomainSpec parse_domain_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--domain-file", "cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--domain-file", std::string("parse error: ") + e.what());
    }
    DomainSpec spec;
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field))
            throw CLI::ValidationError("--domain-file", std::string("missing field $.") + field);
        return j.at(field);
    };
    try {
        spec.kind = need("kind").get<std::string>();
        if (j.contains("m")) spec.m = j.at("m").get<int>();
        if (spec.kind == "ball") {
            spec.R = need("R").get<double>();
        } else if (spec.kind == "annulus") {
            spec.r1 = need("r1").get<double>();
            spec.r2 = need("r2").get<double>();
        } else if (spec.kind == "ellipse" || spec.kind == "rectangle") {
            spec.a = need("a").get<double>();
            spec.b = need("b").get<double>();
        } else if (spec.kind == "polygon") {
            for (const auto& v : need("vertices"))
                spec.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        } else {
            throw CLI::ValidationError("--domain-file", "unknown kind " + spec.kind);
        }
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--domain-file", std::string("bad field: ") + e.what());
    }
    return spec;
}

std::vector<gnl::Vec2> parse_vertices(const std::string& text) {
    std::vector<gnl::Vec2> out;
    std::stringstream ss(text);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        double x = 0, y = 0;
        if (std::sscanf(pair.c_str(), "%lf,%lf", &x, &y) != 2)
            throw CLI::ValidationError("--vertices", "expected x,y;x,y;...");
        out.push_back({x, y});
    }
    return out;
}

// ---------------------------------------------------------------- sweep ----

int cmd_sweep(int m, double r_min, double r_max, double r_step, double tol,
              const std::string& out) {
    if (!(r_step > 0.0) || r_max < r_min) throw CLI::ValidationError("sweep", "empty radius range");
    std::vector<double> radii;
    for (double R = r_min; R <= r_max + 1e-12; R += r_step) radii.push_back(R);
    if (radii.empty()) throw CLI::ValidationError("sweep", "empty radius range");

    std::vector<gnl::RadialEigenpair> pairs(radii.size());
    gnl::parallel_for(static_cast<int>(radii.size()), [&](int i) {
        pairs[static_cast<std::size_t>(i)] = gnl::mu1_ball(m, radii[static_cast<std::size_t>(i)]);
    });

    std::string csv = "R,mu1,mu1_minus_1,residual\n";
    bool ok = true;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double res = gnl::eigenpair_residual_measure(pairs[i]);
        if (res > tol) ok = false;
        csv += fmt12(radii[i]) + "," + fmt12(pairs[i].mu) + "," + fmt12(pairs[i].mu - 1.0) + "," +
               fmt12(res) + "\n";
    }
    emit(csv, out);
    return ok ? 0 : 1;
}

// ------------------------------------------------------------- spectrum ----

int cmd_spectrum(const DomainSpec& spec, int count, double h, const std::string& out) {
    nlohmann::json j;
    j["domain"] = spec.describe();
    j["m"] = spec.m;
    if (spec.radial()) {
        const auto s = spec.kind == "ball"
                           ? gnl::ball_neumann_spectrum(spec.m, spec.R, count)
                           : gnl::annulus_neumann_spectrum(spec.m, spec.r1, spec.r2, count);
        j["entries"] = gnl::to_json(s);
    } else {
        if (spec.m != 2) throw CLI::ValidationError("spectrum", "planar domains require --m 2");
        const auto mesh = gnl::mesh_domain(spec.planar(), h);
        const auto res = gnl::solve_lowest(gnl::assemble(mesh), count - 1);
        nlohmann::json entries = nlohmann::json::array();
        for (double mu : res.eigenvalues) entries.push_back({{"mu", mu}, {"mult", 1}});
        j["entries"] = entries;
    }
    emit(j.dump(2) + "\n", out);
    return 0;
}

// --------------------------------------------------------------- verify ----

std::optional<std::vector<double>> load_spectrum_override(const std::string& path) {
    if (path.empty()) return std::nullopt;
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("--spectrum-override", "cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--spectrum-override", std::string("parse error: ") + e.what());
    }
    std::vector<double> mu;
    try {
        if (j.contains("mu"))
            mu = j.at("mu").get<std::vector<double>>();
        else
            for (const auto& e : j.at("entries"))
                for (int k = 0; k < e.value("mult", 1); ++k) mu.push_back(e.at("mu").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw CLI::ValidationError("--spectrum-override", std::string("bad field: ") + e.what());
    }
    return mu;
}

template <class Dom>
int run_verification(const Dom& dom, const DomainSpec& spec, double tol,
                     const std::optional<std::vector<double>>& mu_override, bool explore_full_sum,
                     const std::string& out) {
    const auto main_rep = gnl::verify::verify_main_inequality(dom, tol, mu_override);
    const auto chain_rep = gnl::verify::verify_chain(dom, tol, mu_override);
    nlohmann::json rec = gnl::verification_record(dom, spec.describe(), main_rep, chain_rep);
    if (explore_full_sum) {
        // exploratory only: reciprocal sum including the m-th eigenvalue; no
        // verdict is attached to it
        const auto& mu = mu_override ? *mu_override : dom.mu;
        double s = 0.0;
        for (int i = 1; i <= dom.dimension() && i < static_cast<int>(mu.size()); ++i)
            s += 1.0 / mu[static_cast<std::size_t>(i)];
        rec["exploratory_full_reciprocal_sum"] = s;
    }
    emit(rec.dump(2) + "\n", out);
    return rec["pass"].get<bool>() ? 0 : 1;
}

int cmd_verify(const DomainSpec& spec, double tol, double h, const std::string& override_path,
               bool explore_full_sum, const std::string& out) {
    const auto mu_override = load_spectrum_override(override_path);
    if (spec.radial()) {
        const auto dom = spec.kind == "ball"
                             ? gnl::verify::RadialVerifyDomain::ball(spec.m, spec.R)
                             : gnl::verify::RadialVerifyDomain::annulus(spec.m, spec.r1, spec.r2);
        return run_verification(dom, spec, tol, mu_override, explore_full_sum, out);
    }
    if (spec.m != 2) throw CLI::ValidationError("verify", "planar domains require --m 2");
    const auto dom = gnl::verify::FemVerifyDomain::from_domain(spec.planar(), h);
    return run_verification(dom, spec, tol, mu_override, explore_full_sum, out);
}

// --------------------------------------------------------------- lemmas ----

struct LemmaRecord {
    std::string property;
    int m = 0;
    std::string param;
    double value = 0.0;
    double slack = 0.0;
    bool pass = false;
};

int cmd_lemmas(const std::vector<int>& ms, double r_min, double r_max, double r_step, int steps,
               unsigned seed, bool inject_increasing, const std::string& out,
               const std::string& format) {
    if (!(r_step > 0.0) || r_max < r_min) throw CLI::ValidationError("lemmas", "empty radius range");
    std::vector<LemmaRecord> records;

    std::vector<std::pair<int, double>> grid;
    for (int m : ms)
        for (double R = r_min; R <= r_max + 1e-12; R += r_step) grid.emplace_back(m, R);

    std::vector<gnl::RadialEigenpair> modes(grid.size());
    gnl::parallel_for(static_cast<int>(grid.size()), [&](int i) {
        const auto [m, R] = grid[static_cast<std::size_t>(i)];
        modes[static_cast<std::size_t>(i)] = gnl::mu1_ball(m, R);
    });

    // strict monotonicity in R and the lower bound mu1 > 1, per dimension,
    // plus the first-mode sign structure
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto [m, R] = grid[i];
        const auto& pair = modes[i];
        records.push_back(
            {"mu1_above_one", m, "R=" + fmt12(R), pair.mu, pair.mu - 1.0, pair.mu > 1.0});
        if (i + 1 < grid.size() && grid[i + 1].first == m) {
            const double gap = pair.mu - modes[i + 1].mu;
            records.push_back({"mu1_strictly_decreasing", m,
                               "R=" + fmt12(R) + "->" + fmt12(grid[i + 1].second), gap, gap,
                               gap > 0.0});
        }
        const auto sign = gnl::first_mode_sign_check(pair);
        records.push_back({"first_mode_derivative_positive", m, "R=" + fmt12(R),
                           sign.min_interior_g_prime, sign.min_interior_g_prime,
                           sign.derivative_positive});
        records.push_back({"first_mode_ratio_defect", m, "R=" + fmt12(R), sign.max_ratio_defect,
                           -sign.max_ratio_defect,
                           sign.ratio_defect_nonpositive && sign.boundary_defect_negative});
    }

    // symmetrization on seeded random annuli with random nonincreasing steps
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> rad(0.15, 2.2);
    for (int k = 0; k < steps; ++k) {
        const auto h = gnl::verify::random_nonincreasing_step(rng);
        const int m = ms[static_cast<std::size_t>(k) % ms.size()];
        double a = rad(rng), b = rad(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 0.05) b = a + 0.05;
        const auto rec = gnl::verify::symmetrization_check_radial(m, a, b, h);
        records.push_back({"radial_symmetrization", m,
                           "annulus=[" + fmt12(a) + "-" + fmt12(b) + "] index=" + std::to_string(k),
                           rec.omega_side, rec.slack, rec.satisfied});
    }

    if (inject_increasing) {
        // deliberately increasing integrand: the precondition must fire and is
        // recorded as a failure
        bool rejected = false;
        try {
            gnl::verify::symmetrization_check_radial(2, 0.5, 1.5, [](double r) { return r; });
        } catch (const std::invalid_argument&) {
            rejected = true;
        }
        records.push_back(
            {"symmetrization_precondition", 2, rejected ? "h=increasing rejected" : "h=increasing",
             0.0, 0.0, false});
    }

    bool all_pass = true;
    for (const auto& r : records)
        if (!r.pass) all_pass = false;

    std::string text;
    if (format == "csv") {
        text = "property,m,param,value,slack,pass\n";
        for (const auto& r : records)
            text += r.property + "," + std::to_string(r.m) + "," + r.param + "," + fmt12(r.value) +
                    "," + fmt12(r.slack) + "," + (r.pass ? "1" : "0") + "\n";
    } else {
        nlohmann::json j;
        j["records"] = nlohmann::json::array();
        for (const auto& r : records)
            j["records"].push_back({{"property", r.property},
                                    {"m", r.m},
                                    {"param", r.param},
                                    {"value", r.value},
                                    {"slack", r.slack},
                                    {"pass", r.pass}});
        j["pass"] = all_pass;
        text = j.dump(2) + "\n";
    }
    emit(text, out);
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian Neumann eigenvalue laboratory"};
    app.require_subcommand(1);

    double tol = 0.0;
    std::string out, format = "json";
    unsigned seed = 42;

    DomainSpec spec;
    std::string domain_file, vertices_text;

    auto add_domain_flags = [&](CLI::App* cmd) {
        cmd->add_option("--domain", spec.kind, "ball|annulus|ellipse|rectangle|polygon");
        cmd->add_option("--domain-file", domain_file, "JSON domain description");
        cmd->add_option("--R", spec.R, "ball radius");
        cmd->add_option("--r1", spec.r1, "annulus inner radius");
        cmd->add_option("--r2", spec.r2, "annulus outer radius");
        cmd->add_option("--a", spec.a, "ellipse semi-axis / rectangle half-width (x)");
        cmd->add_option("--b", spec.b, "ellipse semi-axis / rectangle half-width (y)");
        cmd->add_option("--vertices", vertices_text, "polygon vertices x,y;x,y;...");
    };

    auto* sweep = app.add_subcommand("sweep", "first-eigenvalue sweep over ball radii (CSV)");
    int sweep_m = 2;
    double r_min = 0.5, r_max = 4.0, r_step = 0.5;
    sweep->add_option("--m", sweep_m, "dimension");
    sweep->add_option("--r-min", r_min, "smallest radius");
    sweep->add_option("--r-max", r_max, "largest radius");
    sweep->add_option("--r-step", r_step, "radius increment");
    sweep->add_option("--tol", tol, "residual tolerance (default 1e-6)");
    sweep->add_option("--out", out, "output path (default stdout)");
    sweep->add_option("--format", format, "csv (fixed for sweep)");
    sweep->add_option("--seed", seed, "unused, accepted for interface uniformity");

    auto* spectrum = app.add_subcommand("spectrum", "Neumann spectrum (JSON)");
    int count = 8;
    double mesh_h = 0.08;
    spectrum->add_option("--m", spec.m, "dimension");
    spectrum->add_option("--count", count, "number of eigenvalues (with multiplicity)");
    spectrum->add_option("--mesh-h", mesh_h, "mesh size for planar domains");
    spectrum->add_option("--tol", tol, "unused, accepted for interface uniformity");
    spectrum->add_option("--out", out, "output path");
    spectrum->add_option("--format", format, "json (fixed for spectrum)");
    spectrum->add_option("--seed", seed, "unused");
    add_domain_flags(spectrum);

    auto* verify_cmd = app.add_subcommand("verify", "harmonic-mean inequality record (JSON)");
    std::string override_path;
    bool explore_full_sum = false;
    verify_cmd->add_option("--m", spec.m, "dimension");
    verify_cmd->add_option("--tol", tol, "combined verdict tolerance (default: auto)");
    verify_cmd->add_option("--mesh-h", mesh_h, "mesh size for planar domains");
    verify_cmd->add_option("--spectrum-override", override_path,
                           "JSON spectrum replacing the computed eigenvalues");
    verify_cmd->add_flag("--explore-full-sum", explore_full_sum,
                         "also print the reciprocal sum including the m-th eigenvalue (no verdict)");
    verify_cmd->add_option("--out", out, "output path");
    verify_cmd->add_option("--format", format, "json (fixed for verify)");
    verify_cmd->add_option("--seed", seed, "unused");
    add_domain_flags(verify_cmd);

    auto* lemmas = app.add_subcommand("lemmas", "property battery over configured grids");
    std::vector<int> lemma_ms{2, 3};
    double lr_min = 0.5, lr_max = 4.0, lr_step = 0.5;
    int sym_steps = 20;
    bool inject_increasing = false;
    lemmas->add_option("--m", lemma_ms, "dimensions (repeatable)")->expected(-1);
    lemmas->add_option("--r-min", lr_min, "smallest radius");
    lemmas->add_option("--r-max", lr_max, "largest radius");
    lemmas->add_option("--r-step", lr_step, "radius increment");
    lemmas->add_option("--sym-steps", sym_steps, "number of random symmetrization checks");
    lemmas->add_option("--seed", seed, "random seed for the symmetrization battery");
    lemmas->add_flag("--inject-increasing-h", inject_increasing,
                     "add one increasing integrand; records a precondition failure");
    lemmas->add_option("--tol", tol, "unused, accepted for interface uniformity");
    lemmas->add_option("--out", out, "output path");
    lemmas->add_option("--format", format, "csv|json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (!domain_file.empty()) {
            const int m_flag = spec.m;
            const bool m_given = spectrum->count("--m") > 0 || verify_cmd->count("--m") > 0;
            spec = parse_domain_file(domain_file);
            if (m_given) spec.m = m_flag;
        }
        if (!vertices_text.empty()) spec.vertices = parse_vertices(vertices_text);

        if (sweep->parsed())
            return cmd_sweep(sweep_m, r_min, r_max, r_step, tol > 0 ? tol : 1e-6, out);
        if (spectrum->parsed()) return cmd_spectrum(spec, count, mesh_h, out);
        if (verify_cmd->parsed())
            return cmd_verify(spec, tol, mesh_h, override_path, explore_full_sum, out);
        if (lemmas->parsed())
            return cmd_lemmas(lemma_ms, lr_min, lr_max, lr_step, sym_steps, seed,
                              inject_increasing, out, format);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
