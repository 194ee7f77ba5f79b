#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "octodyson/charpoly_calculus.hpp"
#include "octodyson/errors.hpp"
#include "octodyson/octo_matrix.hpp"
#include "octodyson/rng.hpp"

namespace octodyson {

enum class SamplingMode { ExactGaussian, EulerPath };

struct SimulationConfig {
    ModelKind model = ModelKind::A;
    Index n = 2;
    double t = 1.0;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::ExactGaussian;
    std::uint32_t steps = 1;
    double cluster_tol = 1e-6;

    void validate() const {
        if (model == ModelKind::A && n != 2)
            throw std::invalid_argument("model a requires n = 2");
        if (n < 2) throw std::invalid_argument("n must be at least 2");
        if (samples < 1) throw std::invalid_argument("samples must be at least 1");
        if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
        if (mode == SamplingMode::EulerPath && steps < 1)
            throw std::invalid_argument("steps must be at least 1");
        if (!(cluster_tol > 0.0)) throw std::invalid_argument("cluster_tol must be positive");
    }

    DiffusionModel diffusion() const { return {model, n}; }
};

/// Runs fn(i) for i in [0, count) over `threads` workers with static
/// chunking. Each index writes only to its own slot, so results do not
/// depend on the worker count.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::uint64_t lo = w * chunk;
        const std::uint64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::uint64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

namespace detail {

inline std::uint32_t entry_id(SubsetLabel c, Index i, Index j, Index n) {
    return static_cast<std::uint32_t>(c.bits * n * n + i * n + j);
}

/// Gaussian matrix whose entries have variance `scale` * Gamma(entry, entry).
/// Draws are addressed by (sample, step, entry) only.
inline OctonionicMatrix gaussian_increment(const DiffusionModel& model, const CounterRng& rng,
                                           std::uint64_t sample, std::uint32_t step, double scale) {
    const Index n = model.dim();
    OctonionicMatrix m(n);
    const SubsetLabel real_label(0);
    Matrix& base = m[real_label];
    for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) {
            const double sd = std::sqrt(scale * model.covariance(real_label, i, j, real_label, i, j));
            base(i, j) = base(j, i) = sd * rng.normal({sample, step, entry_id(real_label, i, j, n)});
        }
    auto antisymmetric = [&](SubsetLabel c) {
        Matrix a = Matrix::Zero(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) {
                const double sd = std::sqrt(scale * model.covariance(c, i, j, c, i, j));
                a(i, j) = sd * rng.normal({sample, step, entry_id(c, i, j, n)});
                a(j, i) = -a(i, j);
            }
        return a;
    };
    if (model.kind() == ModelKind::A) {
        for (auto c : kAllLabels)
            if (!c.empty()) m[c] = antisymmetric(c);
    } else {
        const Matrix shared = antisymmetric(SubsetLabel(1));
        for (auto c : kAllLabels)
            if (!c.empty()) m[c] = shared;
    }
    return m;
}

}  // namespace detail

/// Exact time-t law: every coordinate is Gaussian with variance t * Gamma.
/// Deterministic in (seed, index).
inline OctonionicMatrix sample_matrix(const SimulationConfig& cfg, std::uint64_t index) {
    cfg.validate();
    if (index >= cfg.samples) throw std::out_of_range("sample_matrix: index >= samples");
    return detail::gaussian_increment(cfg.diffusion(), CounterRng(cfg.seed), index, 0, cfg.t);
}

/// Distinct eigenvalues of the real form with multiplicities.
struct SpectralSample {
    std::vector<double> distinct;
    std::vector<int> multiplicities;
    double raw_spread = 0.0;  // widest cluster
    double spectral_radius = 0.0;

    int total_multiplicity() const {
        int s = 0;
        for (int m : multiplicities) s += m;
        return s;
    }
    /// n clusters, each of multiplicity `mult`.
    bool has_structure(Index n, int mult = 8) const {
        if (static_cast<Index>(distinct.size()) != n) return false;
        return std::all_of(multiplicities.begin(), multiplicities.end(),
                           [mult](int m) { return m == mult; });
    }
};

/// Greedy clustering of sorted eigenvalues: a new cluster starts when the
/// gap exceeds cluster_tol * (1 + rho).
inline SpectralSample cluster_eigenvalues(const Vector& sorted, double cluster_tol) {
    SpectralSample out;
    if (sorted.size() == 0) return out;
    out.spectral_radius = sorted.cwiseAbs().maxCoeff();
    const double threshold = cluster_tol * (1.0 + out.spectral_radius);
    Index start = 0;
    auto close_cluster = [&](Index end) {  // [start, end)
        out.distinct.push_back(sorted.segment(start, end - start).mean());
        out.multiplicities.push_back(static_cast<int>(end - start));
        out.raw_spread = std::max(out.raw_spread, sorted(end - 1) - sorted(start));
    };
    for (Index k = 1; k < sorted.size(); ++k) {
        if (sorted(k) - sorted(k - 1) > threshold) {
            close_cluster(k);
            start = k;
        }
    }
    close_cluster(sorted.size());
    return out;
}

inline SpectralSample spectrum(const OctonionicMatrix& m, double cluster_tol = 1e-6) {
    double scale = 0.0;
    for (const auto& c : m.components()) scale = std::max(scale, max_abs(c));
    if (!m.is_symmetric(1e-12 * (1.0 + scale)))
        throw std::invalid_argument("spectrum: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(real_form(m), Eigen::EigenvaluesOnly);
    return cluster_eigenvalues(es.eigenvalues(), cluster_tol);
}

/// Model B reduces to the complex Hermitian H = M^0 + i sqrt(7) A: the real
/// form's spectrum is that of H with every eigenvalue repeated 8 times.
/// Returns the max absolute mismatch between the two sorted lists.
inline double hermitian_equivalence_check(const OctonionicMatrix& m) {
    const Matrix& shared = m[SubsetLabel(1)];
    for (auto c : kAllLabels)
        if (!c.empty() && m[c] != shared)
            throw std::invalid_argument("hermitian_equivalence_check: imaginary components differ");
    const Index n = m.dim();
    const Eigen::MatrixXcd h = m[SubsetLabel(0)].cast<std::complex<double>>() +
                               std::complex<double>(0.0, std::sqrt(7.0)) * shared.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> rs(real_form(m), Eigen::EigenvaluesOnly);
    Vector repeated(8 * n);
    for (Index k = 0; k < n; ++k) repeated.segment(8 * k, 8).setConstant(hs.eigenvalues()(k));
    return (repeated - rs.eigenvalues()).cwiseAbs().maxCoeff();
}

inline std::vector<SpectralSample> sample_spectra(const SimulationConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    std::vector<SpectralSample> out(cfg.samples);
    const DiffusionModel model = cfg.diffusion();
    const CounterRng rng(cfg.seed);
    parallel_for(cfg.samples, threads, [&](std::uint64_t i) {
        out[i] = spectrum(detail::gaussian_increment(model, rng, i, 0, cfg.t), cfg.cluster_tol);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Gap statistics
// ---------------------------------------------------------------------------

/// Moments of the gap s = x2 - x1 for n = 2. Under a gap density
/// proportional to s^beta exp(-c s^2 / 2), E[s^4]/E[s^2]^2 = 1 + 2/(beta + 1)
/// whatever c is, so beta = 2/(ratio - 1) - 1.
struct GapStatistics {
    std::uint64_t samples = 0;
    double moment2 = 0.0;
    double moment4 = 0.0;
    double ratio = 0.0;
    double implied_beta = 0.0;
    double stderr_beta = 0.0;   // bootstrap standard error of implied_beta
    double stderr_ratio = 0.0;  // bootstrap standard error of ratio
};

inline double beta_from_ratio(double ratio) { return 2.0 / (ratio - 1.0) - 1.0; }
inline double ratio_from_beta(double beta) { return 1.0 + 2.0 / (beta + 1.0); }

inline constexpr std::size_t kMinGapSamples = 100;

inline GapStatistics gap_statistics_from_gaps(const std::vector<double>& gaps,
                                              std::uint32_t resamples = 1000, std::uint64_t seed = 0,
                                              unsigned threads = 1) {
    if (gaps.size() < kMinGapSamples) throw InsufficientData(gaps.size(), kMinGapSamples);
    const std::size_t count = gaps.size();
    auto moments = [&](auto&& pick) {
        double m2 = 0.0, m4 = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double s2 = gaps[pick(k)] * gaps[pick(k)];
            m2 += s2;
            m4 += s2 * s2;
        }
        return std::pair{m2 / count, m4 / count};
    };
    GapStatistics out;
    out.samples = count;
    std::tie(out.moment2, out.moment4) = moments([](std::size_t k) { return k; });
    out.ratio = out.moment4 / (out.moment2 * out.moment2);
    out.implied_beta = beta_from_ratio(out.ratio);

    // Bootstrap, one counter-addressed stream per resample.
    const CounterRng rng(seed ^ 0xB0075712A9ull);
    std::vector<double> ratios(resamples), betas(resamples);
    parallel_for(resamples, threads, [&](std::uint64_t b) {
        const auto [m2, m4] = moments([&](std::size_t k) {
            return static_cast<std::size_t>(
                rng.below({b, 0x5A3Du, static_cast<std::uint32_t>(k)}, count));
        });
        ratios[b] = m4 / (m2 * m2);
        betas[b] = beta_from_ratio(ratios[b]);
    });
    auto sd = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    out.stderr_ratio = sd(ratios);
    out.stderr_beta = sd(betas);
    return out;
}

inline GapStatistics gap_statistics(const std::vector<SpectralSample>& samples,
                                    std::uint32_t resamples = 1000, std::uint64_t seed = 0,
                                    unsigned threads = 1) {
    if (samples.size() < kMinGapSamples) throw InsufficientData(samples.size(), kMinGapSamples);
    std::vector<double> gaps;
    gaps.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.distinct.size() != 2)
            throw std::invalid_argument("gap_statistics: every sample needs exactly two clusters");
        gaps.push_back(s.distinct[1] - s.distinct[0]);
    }
    return gap_statistics_from_gaps(gaps, resamples, seed, threads);
}

// ---------------------------------------------------------------------------
// Discrete-time paths
// ---------------------------------------------------------------------------

struct EulerPathResult {
    std::vector<SpectralSample> spectra;  // one per step, after the increment
    OctonionicMatrix final_matrix{1};
    bool structure_ok = true;  // n clusters of multiplicity 8 at every step
    bool crossing = false;     // two clusters met at some step
    double min_gap = std::numeric_limits<double>::infinity();
};

/// Brownian path with `steps` Gaussian increments of variance (t/steps) Gamma.
/// Step k draws with step index k, so steps = 1 reproduces sample_matrix.
inline EulerPathResult euler_path(const SimulationConfig& cfg, std::uint64_t path_index) {
    cfg.validate();
    if (cfg.mode != SamplingMode::EulerPath)
        throw std::invalid_argument("euler_path: config mode must be EulerPath");
    const DiffusionModel model = cfg.diffusion();
    const CounterRng rng(cfg.seed);
    const double dt = cfg.t / cfg.steps;
    EulerPathResult out;
    out.final_matrix = OctonionicMatrix(cfg.n);
    out.spectra.reserve(cfg.steps);
    for (std::uint32_t k = 0; k < cfg.steps; ++k) {
        const OctonionicMatrix inc = detail::gaussian_increment(model, rng, path_index, k, dt);
        for (auto c : kAllLabels) out.final_matrix[c] += inc[c];
        SpectralSample s = spectrum(out.final_matrix, cfg.cluster_tol);
        if (!s.has_structure(cfg.n)) out.structure_ok = false;
        if (static_cast<Index>(s.distinct.size()) < cfg.n) out.crossing = true;
        for (std::size_t i = 1; i < s.distinct.size(); ++i)
            out.min_gap = std::min(out.min_gap, s.distinct[i] - s.distinct[i - 1]);
        out.spectra.push_back(std::move(s));
    }
    return out;
}

}  // namespace octodyson
