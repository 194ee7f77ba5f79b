#pragma once

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "octodyson/charpoly_calculus.hpp"
#include "octodyson/dyson_sim.hpp"
#include "octodyson/identity_report.hpp"
#include "octodyson/octo_matrix.hpp"
#include "octodyson/octonion.hpp"
#include "octodyson/version.hpp"

namespace octodyson {

using json = nlohmann::ordered_json;

inline json to_json(const IdentityReport& r) {
    return json{{"suite", r.suite},           {"cases", r.cases},
                {"failures", r.failures},     {"max_residual", r.max_residual},
                {"seed", r.seed},             {"elapsed_ms", r.elapsed_ms},
                {"passed", r.passed()}};
}

inline json to_json(const std::vector<IdentityReport>& reports) {
    json arr = json::array();
    IdentityReport total{.suite = "total"};
    for (const auto& r : reports) {
        arr.push_back(to_json(r));
        total.absorb(r);
    }
    if (!reports.empty()) total.seed = reports.front().seed;
    return json{{"suites", arr}, {"total", to_json(total)}};
}

inline bool all_passed(const std::vector<IdentityReport>& reports) {
    for (const auto& r : reports)
        if (!r.passed()) return false;
    return true;
}

/// Shortest-safe decimal with 17 significant digits (round-trips doubles).
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Algebra battery: table structure, exhaustive sign identities with the
/// Theta sum, Moufang and alternative laws, norm multiplicativity,
/// conjugation, orthogonality, e^2 = -7, and a nonassociativity witness.
inline std::vector<IdentityReport> run_verify_algebra(const SignTable& table, std::uint64_t seed) {
    std::vector<IdentityReport> out;
    out.push_back(check_table_structure(table));
    const SignIdentityReport signs = verify_sign_identities(table, true);
    for (const auto& r : signs.identities) out.push_back(r);
    out.push_back(*signs.theta);
    const MoufangReport mf = verify_moufang(table, 10000, seed);
    out.push_back(mf.basis);
    out.push_back(mf.random);
    out.push_back(verify_norm_multiplicativity(table, 100000, seed));
    out.push_back(verify_conjugate_norm(table, 10000, seed));
    out.push_back(verify_orthogonality(table, 1000, seed));
    out.push_back(verify_e_squared(table));
    IdentityReport witness{.suite = "nonassociativity_witness"};
    witness.record_exact(find_nonassociative_triple(table).has_value());
    out.push_back(witness);
    for (auto& r : out) r.seed = seed;
    return out;
}

namespace detail {

/// A draw of the model whose real-part component has condition number <= 1e8.
inline OctonionicMatrix well_conditioned_draw(const DiffusionModel& model, const CounterRng& rng,
                                              std::uint64_t trial, double t = 1.0) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        OctonionicMatrix m = gaussian_increment(model, rng, trial | (attempt << 40), 0, t);
        Eigen::JacobiSVD<Matrix> svd(m[SubsetLabel(0)]);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= 1e8) return m;
    }
}

inline std::pair<double, double> off_spectrum_pair(const CounterRng& rng, std::uint64_t trial,
                                                   std::uint32_t stream, double rho) {
    const double x = draw_off_spectrum(rng, {trial, stream, 0}, rho);
    double y = draw_off_spectrum(rng, {trial, stream, 1}, rho);
    for (std::uint32_t k = 2; std::abs(y - x) < 0.1; ++k) y = draw_off_spectrum(rng, {trial, stream, k}, rho);
    return {x, y};
}

}  // namespace detail

inline constexpr double kClosedFormTolerance = 1e-8;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr double kInverseTolerance = 1e-9;
inline constexpr double kCoefficientTolerance = 1e-6;
inline constexpr double kLogDetTolerance = 1e-5;
inline constexpr double kQuadraticTolerance = 1e-12;

/// Gamma and L closed forms for one model (relative residuals), `trials` draws.
inline std::pair<IdentityReport, IdentityReport> closed_form_suites(const DiffusionModel& model,
                                                                    std::uint64_t trials,
                                                                    std::uint64_t seed) {
    IdentityReport g{.suite = "gamma_closed_form", .seed = seed};
    IdentityReport l{.suite = "L_closed_form", .seed = seed};
    {
        ScopedTimer tg(g);
        const CounterRng rng(seed);
        const LogPClosedForm cf = model.closed_form();
        for (std::uint64_t k = 0; k < trials; ++k) {
            const OctonionicMatrix m = detail::well_conditioned_draw(model, rng, k);
            const Matrix r = real_form(m);
            const ComplexVector eigs = eigenvalues_of(r);
            const auto [x, y] = detail::off_spectrum_pair(rng, k, 7, spectral_radius(eigs));
            const Matrix ux = resolvent_from_real_form(r, eigs, x).u;
            const Matrix uy = resolvent_from_real_form(r, eigs, y).u;
            const LogDerivatives lx = log_derivatives(eigs, x);
            const LogDerivatives ly = log_derivatives(eigs, y);
            g.record(relative_residual(gamma_quadruple_sum(ux, uy, model), gamma_closed_form(cf, lx, ly, x, y)),
                     kClosedFormTolerance);
            l.record(relative_residual(generator_quadruple_sum(ux, model), L_closed_form(cf, lx)),
                     kClosedFormTolerance);
        }
    }
    l.elapsed_ms = g.elapsed_ms;
    return {g, l};
}

inline IdentityReport trace_identity_suite(const DiffusionModel& model, std::uint64_t trials,
                                           std::uint64_t seed) {
    IdentityReport rep{.suite = "trace_identities", .seed = seed};
    ScopedTimer t(rep);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const OctonionicMatrix m = detail::well_conditioned_draw(model, rng, k);
        const double rho = spectral_radius(eigenvalues_of(real_form(m)));
        const auto [x, y] = detail::off_spectrum_pair(rng, k, 8, rho);
        rep.record(trace_identities(m, x, y).worst(), kTraceTolerance);
    }
    return rep;
}

/// |real_form(N) real_form(M) - Id|_inf for N = oct_inverse(M).
inline IdentityReport inverse_suite(const DiffusionModel& model, std::uint64_t trials,
                                    std::uint64_t seed) {
    IdentityReport rep{.suite = "oct_inverse", .seed = seed};
    ScopedTimer t(rep);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const OctonionicMatrix m = detail::well_conditioned_draw(model, rng, k);
        const Matrix prod = real_form(oct_inverse(m)) * real_form(m);
        rep.record(inf_norm(prod - Matrix::Identity(prod.rows(), prod.cols())), kInverseTolerance);
    }
    return rep;
}

/// Measured (alpha1, alpha2, alpha3) against the closed-form coefficients.
inline IdentityReport coefficient_suite(const DiffusionModel& model, std::uint64_t trials,
                                        std::uint64_t seed) {
    IdentityReport rep{.suite = "coefficient_recovery", .seed = seed};
    ScopedTimer t(rep);
    const CounterRng rng(seed);
    const ExponentProblem expected = L_P_coefficients(model);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const OctonionicMatrix m = detail::well_conditioned_draw(model, rng, k);
        const double rho = spectral_radius(eigenvalues_of(real_form(m)));
        const MeasuredCoefficients got =
            measure_coefficients(m, model, rho + 1.2, -rho - 1.7, -rho - 1.4, rho + 1.9);
        rep.record(std::max({std::abs(got.alphas.alpha1 - expected.alpha1),
                             std::abs(got.alphas.alpha2 - expected.alpha2),
                             std::abs(got.alphas.alpha3 - expected.alpha3)}),
                   kCoefficientTolerance);
    }
    return rep;
}

/// Multiplicity a = 8 with quadratic residual below 1e-12.
inline IdentityReport multiplicity_suite(const DiffusionModel& model) {
    IdentityReport rep{.suite = "multiplicity_root"};
    const MultiplicitySolution sol = solve_multiplicity(L_P_coefficients(model));
    rep.record(sol.residual, kQuadraticTolerance);
    rep.record_exact(sol.is_integer && sol.a == 8.0);
    return rep;
}

/// Central differences of log|det R| on random well-conditioned R.
inline IdentityReport logdet_suite(std::uint64_t trials, std::uint64_t seed) {
    IdentityReport rep{.suite = "logdet_derivatives", .seed = seed};
    ScopedTimer t(rep);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const Index n = 3 + static_cast<Index>(rng.below({k, 9, 0}, 3));
        Matrix r(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                r(i, j) = rng.normal({k, 9, static_cast<std::uint32_t>(1 + i * n + j)});
        r += static_cast<double>(n) * Matrix::Identity(n, n);
        const LogDetCheck c = logdet_derivative_check(r, 1e-5);
        rep.record(c.first, kLogDetTolerance);
        rep.record(c.second, kLogDetTolerance);
    }
    return rep;
}

/// Dimension-2 suites that hold mathematically (the product-of-traces
/// relation is checked with its factor 2).
inline std::vector<IdentityReport> dim2_suites(std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) return {};
    const Dim2Report d = dim2_remark_checks(trials, seed);
    return {d.product_of_traces_factor2, d.sandwich_imaginary, d.sandwich_real, d.scalar_2x2,
            d.counterexample};
}

inline std::vector<IdentityReport> run_verify_identities(ModelKind kind, Index n, std::uint64_t trials,
                                                         std::uint64_t seed) {
    const DiffusionModel model(kind, n);
    std::vector<IdentityReport> out;
    auto [g, l] = closed_form_suites(model, trials, seed);
    out.push_back(g);
    out.push_back(l);
    out.push_back(trace_identity_suite(model, trials, seed));
    out.push_back(inverse_suite(model, trials, seed));
    out.push_back(coefficient_suite(model, std::min<std::uint64_t>(trials, 10), seed));
    if (trials > 0) out.push_back(multiplicity_suite(model));
    out.push_back(logdet_suite(trials, seed));
    for (auto& r : dim2_suites(trials, seed)) out.push_back(r);
    for (auto& r : out) r.seed = seed;
    return out;
}

// ---------------------------------------------------------------------------
// Spectrum CSV and statistics JSON
// ---------------------------------------------------------------------------

inline void write_spectrum_csv_header(std::ostream& os, Index n) {
    os << "sample_id,model,n,t";
    for (Index i = 1; i <= n; ++i) os << ",x" << i;
    for (Index i = 1; i <= n; ++i) os << ",mult" << i;
    os << ",spread\n";
}

/// One row per sample; rows whose cluster count is not n carry nan / 0.
inline void write_spectrum_csv_row(std::ostream& os, std::uint64_t id, const SimulationConfig& cfg,
                                   const SpectralSample& s) {
    const bool shaped = static_cast<Index>(s.distinct.size()) == cfg.n;
    os << id << ',' << model_name(cfg.model) << ',' << cfg.n << ',' << format_double(cfg.t);
    for (Index i = 0; i < cfg.n; ++i)
        os << ',' << (shaped ? format_double(s.distinct[static_cast<std::size_t>(i)]) : std::string("nan"));
    for (Index i = 0; i < cfg.n; ++i)
        os << ',' << (shaped ? s.multiplicities[static_cast<std::size_t>(i)] : 0);
    os << ',' << format_double(s.raw_spread) << '\n';
}

inline void write_spectrum_csv(std::ostream& os, const SimulationConfig& cfg,
                               const std::vector<SpectralSample>& samples) {
    write_spectrum_csv_header(os, cfg.n);
    for (std::size_t k = 0; k < samples.size(); ++k) write_spectrum_csv_row(os, k, cfg, samples[k]);
}

inline json stats_json(const SimulationConfig& cfg, const GapStatistics& st) {
    return json{{"model", model_name(cfg.model)},
                {"n", cfg.n},
                {"t", cfg.t},
                {"samples", st.samples},
                {"moment2", st.moment2},
                {"moment4", st.moment4},
                {"ratio", st.ratio},
                {"implied_beta", st.implied_beta},
                {"stderr", st.stderr_beta},
                {"seed", cfg.seed}};
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::system_error(errno, std::generic_category(), "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Everything needed to reproduce a run. No timestamps, so reruns produce
/// byte-identical manifests.
struct RunManifest {
    std::vector<std::string> command_line;
    json config = json::object();
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

    void add_output(const std::string& path) { outputs.emplace_back(path, sha256_hex(read_file(path))); }

    json to_json() const {
        json outs = json::array();
        for (const auto& [path, digest] : outputs) outs.push_back({{"path", path}, {"sha256", digest}});
        return json{{"command_line", command_line},
                    {"config", config},
                    {"seed", seed},
                    {"version", kVersion},
                    {"outputs", outs}};
    }
};

}  // namespace octodyson
