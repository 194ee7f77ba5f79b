#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "octodyson/errors.hpp"
#include "octodyson/identity_report.hpp"
#include "octodyson/octonion.hpp"
#include "octodyson/rng.hpp"

namespace octodyson {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Matrix with octonion entries, held as eight real n x n components M^A
/// (M = sum_A M^A w_A). Component storage follows mask order of SubsetLabel.
class OctonionicMatrix {
  public:
    explicit OctonionicMatrix(Index n) : n_(n) {
        if (n <= 0) throw std::invalid_argument("OctonionicMatrix: dimension must be positive");
        for (auto& c : components_) c = Matrix::Zero(n, n);
    }

    explicit OctonionicMatrix(std::array<Matrix, 8> components)
        : n_(components[0].rows()), components_(std::move(components)) {
        if (n_ <= 0) throw std::invalid_argument("OctonionicMatrix: dimension must be positive");
        for (const auto& c : components_)
            if (c.rows() != n_ || c.cols() != n_)
                throw std::invalid_argument("OctonionicMatrix: components must all be n x n");
    }

    /// mu * Id on the real component only.
    static OctonionicMatrix scalar(Index n, double mu) {
        OctonionicMatrix m(n);
        m.components_[0] = mu * Matrix::Identity(n, n);
        return m;
    }

    Index dim() const noexcept { return n_; }
    Index real_dim() const noexcept { return 8 * n_; }

    const Matrix& operator[](SubsetLabel a) const { return components_[a.index()]; }
    Matrix& operator[](SubsetLabel a) { return components_[a.index()]; }
    const std::array<Matrix, 8>& components() const noexcept { return components_; }

    /// (M^A)^t = (A|A) M^A for every A: M^0 symmetric, the rest antisymmetric.
    bool is_symmetric(double tol = 0.0) const {
        for (auto a : kAllLabels) {
            const Matrix& c = components_[a.index()];
            const double s = sign(a, a);
            if ((c.transpose() - s * c).cwiseAbs().maxCoeff() > tol) return false;
        }
        return true;
    }

    OctonionicMatrix shifted(double x) const {
        OctonionicMatrix m = *this;
        m.components_[0] -= x * Matrix::Identity(n_, n_);
        return m;
    }

  private:
    Index n_;
    std::array<Matrix, 8> components_;
};

/// 8n x 8n real matrix whose (A, B) block is (A.B|B) M^{A.B}.
inline Matrix real_form(const OctonionicMatrix& m, const SignTable& table = kOctonionSigns) {
    const Index n = m.dim();
    Matrix r(8 * n, 8 * n);
    for (auto a : kAllLabels)
        for (auto b : kAllLabels)
            r.block(a.index() * n, b.index() * n, n, n) = table(a ^ b, b) * m[a ^ b];
    return r;
}

/// Reads N^A off the (A, {}) block column. No consistency check.
inline OctonionicMatrix components_from_real_form(const Matrix& r) {
    if (r.rows() != r.cols() || r.rows() % 8 != 0)
        throw std::invalid_argument("real form must be square with dimension divisible by 8");
    const Index n = r.rows() / 8;
    std::array<Matrix, 8> comps;
    for (auto a : kAllLabels) comps[a.index()] = r.block(a.index() * n, 0, n, n);
    return OctonionicMatrix(std::move(comps));
}

/// Max-abs deviation of every block from (A.B|B) N^{A.B}.
inline double octonionic_residual(const Matrix& r) {
    const OctonionicMatrix comps = components_from_real_form(r);
    const Index n = comps.dim();
    double worst = 0.0;
    for (auto a : kAllLabels)
        for (auto b : kAllLabels) {
            const Matrix expected = sign(a ^ b, b) * comps[a ^ b];
            worst = std::max(worst, (r.block(a.index() * n, b.index() * n, n, n) - expected)
                                        .cwiseAbs()
                                        .maxCoeff());
        }
    return worst;
}

inline bool is_octonionic(const Matrix& r, double tol) { return octonionic_residual(r) <= tol; }

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Operator infinity norm (max row sum).
inline double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& m, bool& singular) {
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rc = lu.rcond();
    singular = !(rc > 1e3 * std::numeric_limits<double>::epsilon());
    return lu;
}

}  // namespace detail

/// Worst relative violation of M^A (M^0)^-1 M^B = M^B (M^0)^-1 M^A, scaled by
/// 1 + |M^A||M^B| (max-abs norms).
inline double commutation_residual(const OctonionicMatrix& m) {
    bool singular = false;
    const auto lu = detail::checked_lu(m[SubsetLabel(0)], singular);
    if (singular) throw SingularBase();
    const Matrix base_inv = lu.inverse();
    double worst = 0.0;
    for (auto a : kAllLabels)
        for (auto b : kAllLabels) {
            if (b.bits <= a.bits) continue;
            const Matrix lhs = m[a] * base_inv * m[b];
            const Matrix rhs = m[b] * base_inv * m[a];
            worst = std::max(worst, max_abs(lhs - rhs) / (1.0 + max_abs(m[a]) * max_abs(m[b])));
        }
    return worst;
}

inline constexpr double kCommutationTolerance = 1e-10;

/// Octonionic inverse N of M, valid when M^0 is invertible, the components
/// commute through (M^0)^-1, and sum_C M^C (M^0)^-1 M^C is invertible:
///   N^0 = (sum_C M^C (M^0)^-1 M^C)^-1,   N^A = -N^0 M^A (M^0)^-1  (A != {}).
inline OctonionicMatrix oct_inverse(const OctonionicMatrix& m,
                                    double commutation_tol = kCommutationTolerance) {
    const Index n = m.dim();
    bool singular = false;
    const auto base_lu = detail::checked_lu(m[SubsetLabel(0)], singular);
    if (singular) throw SingularBase();
    const Matrix base_inv = base_lu.inverse();

    const double resid = commutation_residual(m);
    if (resid > commutation_tol) throw NotSymmCompatible(resid);

    Matrix core = Matrix::Zero(n, n);
    for (auto c : kAllLabels) core += m[c] * base_inv * m[c];
    const auto core_lu = detail::checked_lu(core, singular);
    if (singular) throw SingularCore();

    OctonionicMatrix inv(n);
    inv[SubsetLabel(0)] = core_lu.inverse();
    for (auto a : kAllLabels) {
        if (a.empty()) continue;
        inv[a] = -inv[SubsetLabel(0)] * m[a] * base_inv;
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Spectrum, resolvent, characteristic polynomial
// ---------------------------------------------------------------------------

using ComplexVector = Eigen::VectorXcd;

/// Eigenvalues of a real square matrix. Symmetric input goes through the
/// self-adjoint solver and comes back sorted with zero imaginary parts.
inline ComplexVector eigenvalues_of(const Matrix& r) {
    if ((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cast<std::complex<double>>();
    }
    Eigen::EigenSolver<Matrix> es(r, false);
    return es.eigenvalues();
}

inline double spectral_radius(const ComplexVector& eigs) {
    double rho = 0.0;
    for (Index k = 0; k < eigs.size(); ++k) rho = std::max(rho, std::abs(eigs[k]));
    return rho;
}

inline double distance_to_spectrum(const ComplexVector& eigs, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < eigs.size(); ++k) d = std::min(d, std::abs(eigs[k] - x));
    return d;
}

/// Minimum admissible distance between a shift and the spectrum:
/// 0.5 (1 + rho) / (8n).
inline double shift_guard(double rho, Index n) { return 0.5 * (1.0 + rho) / (8.0 * n); }

/// Uniform draw from [-rho-2, -rho-1] U [rho+1, rho+2].
inline double draw_off_spectrum(const CounterRng& rng, const DrawAddress& at, double rho) {
    const auto [u, side] = rng.uniform_pair(at);
    const double mag = rho + 1.0 + u;
    return side < 0.5 ? -mag : mag;
}

/// U(X) = (real_form(M) - X Id)^-1 with its components U^A.
struct Resolvent {
    double shift = 0.0;
    Matrix u;
    OctonionicMatrix components{1};
    /// Max-abs deviation of U from octonionic block structure.
    double octonionic_residual = 0.0;

    bool is_octonionic(double tol = 1e-9) const {
        return octonionic_residual <= tol * (1.0 + max_abs(u));
    }
    const Matrix& operator[](SubsetLabel a) const { return components[a]; }
};

inline Resolvent resolvent_from_real_form(const Matrix& r, const ComplexVector& eigs, double x) {
    const Index n8 = r.rows();
    const double rho = spectral_radius(eigs);
    const double dist = distance_to_spectrum(eigs, x);
    const double guard = shift_guard(rho, n8 / 8);
    if (dist <= guard) throw NearSingularShift(x, guard);
    Resolvent out;
    out.shift = x;
    out.u = (r - x * Matrix::Identity(n8, n8)).partialPivLu().inverse();
    out.components = components_from_real_form(out.u);
    out.octonionic_residual = octonionic_residual(out.u);
    return out;
}

inline Resolvent resolvent(const OctonionicMatrix& m, double x) {
    const Matrix r = real_form(m);
    return resolvent_from_real_form(r, eigenvalues_of(r), x);
}

/// P(X) = det(real_form - X Id) and its first two X-derivatives.
struct CharPolyEval {
    double x = 0.0;
    double p = 0.0;
    double dp = 0.0;
    double d2p = 0.0;
};

/// P'/P and P''/P from the eigenvalue list:
/// P'/P = -sum r_k,  P''/P = (sum r_k)^2 - sum r_k^2,  r_k = 1/(lambda_k - X).
struct LogDerivatives {
    double d1 = 0.0;  // P'/P
    double d2 = 0.0;  // P''/P

    /// P'^2/P^2 - P''/P = trace U(X)^2.
    double curvature() const noexcept { return d1 * d1 - d2; }
};

inline LogDerivatives log_derivatives(const ComplexVector& eigs, double x) {
    std::complex<double> s1 = 0.0, s2 = 0.0;
    for (Index k = 0; k < eigs.size(); ++k) {
        const std::complex<double> r = 1.0 / (eigs[k] - x);
        s1 += r;
        s2 += r * r;
    }
    return {.d1 = -s1.real(), .d2 = (s1 * s1 - s2).real()};
}

/// P from an LU determinant; P' and P'' in product form
///   P'  = -sum_k prod_{j != k} (lambda_j - X)
///   P'' =  sum_{k != l} prod_{j != k,l} (lambda_j - X)
/// which stays finite at eigenvalues.
inline CharPolyEval charpoly_probe_real_form(const Matrix& r, const ComplexVector& eigs, double x) {
    const Index n8 = r.rows();
    CharPolyEval out;
    out.x = x;
    out.p = (r - x * Matrix::Identity(n8, n8)).partialPivLu().determinant();
    const Index m = eigs.size();
    std::vector<std::complex<double>> f(static_cast<std::size_t>(m));
    for (Index k = 0; k < m; ++k) f[static_cast<std::size_t>(k)] = eigs[k] - x;
    std::complex<double> d1 = 0.0, d2 = 0.0;
    for (Index k = 0; k < m; ++k) {
        std::complex<double> pk = 1.0;
        for (Index j = 0; j < m; ++j)
            if (j != k) pk *= f[static_cast<std::size_t>(j)];
        d1 -= pk;
        for (Index l = 0; l < m; ++l) {
            if (l == k) continue;
            std::complex<double> pkl = 1.0;
            for (Index j = 0; j < m; ++j)
                if (j != k && j != l) pkl *= f[static_cast<std::size_t>(j)];
            d2 += pkl;
        }
    }
    out.dp = d1.real();
    out.d2p = d2.real();
    return out;
}

inline CharPolyEval charpoly_probe(const OctonionicMatrix& m, double x) {
    const Matrix r = real_form(m);
    return charpoly_probe_real_form(r, eigenvalues_of(r), x);
}

// ---------------------------------------------------------------------------
// Trace identities
// ---------------------------------------------------------------------------

/// |a - b| / max(|a|, |b|, floor).
inline double scaled_residual(double a, double b, double floor) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor, 1e-300});
}

/// Worst residual of each resolvent trace identity at one (X, Y) pair.
struct TraceIdentityResiduals {
    double trace_split = 0.0;         // tr U = 8 tr U^0
    double component_product = 0.0;  // tr[U^F V^F] = sum_ij U^F_ji V^F_ij
    double component_sign = 0.0;     // (F|F) tr[U^F V^F] = sum_ij U^F_ji V^F_ji
    double product_split = 0.0;      // tr[U V] = 8 sum_C (C|C) tr[U^C V^C]
    double log_derivative = 0.0;     // tr U = -P'/P
    double square = 0.0;             // tr U^2 = P'^2/P^2 - P''/P
    double resolvent_eq = 0.0;       // tr[U V] = (P'/P(X) - P'/P(Y)) / (Y - X)

    double worst() const {
        return std::max({trace_split, component_product, component_sign, product_split,
                         log_derivative, square, resolvent_eq});
    }
};

inline TraceIdentityResiduals trace_identities(const OctonionicMatrix& m, double x, double y) {
    const Matrix r = real_form(m);
    const ComplexVector eigs = eigenvalues_of(r);
    const Resolvent ux = resolvent_from_real_form(r, eigs, x);
    const Resolvent uy = resolvent_from_real_form(r, eigs, y);
    const LogDerivatives lx = log_derivatives(eigs, x);
    const LogDerivatives ly = log_derivatives(eigs, y);

    TraceIdentityResiduals out;
    const double tr_u = ux.u.trace();
    const double tr_uv = (ux.u * uy.u).trace();
    out.trace_split = relative_residual(tr_u, 8.0 * ux[SubsetLabel(0)].trace());

    double split_sum = 0.0;
    for (auto f : kAllLabels) {
        const Matrix& a = ux[f];
        const Matrix& b = uy[f];
        const double floor = a.norm() * b.norm();
        const double tr_ab = (a * b).trace();
        const double direct = a.transpose().cwiseProduct(b).sum();  // sum_ij a_ji b_ij
        const double same = a.cwiseProduct(b).sum();                 // sum_ij a_ji b_ji
        out.component_product = std::max(out.component_product, scaled_residual(tr_ab, direct, floor));
        out.component_sign =
            std::max(out.component_sign, scaled_residual(sign(f, f) * tr_ab, same, floor));
        split_sum += sign(f, f) * tr_ab;
    }
    out.product_split = relative_residual(tr_uv, 8.0 * split_sum);
    out.log_derivative = relative_residual(tr_u, -lx.d1);
    out.square = relative_residual((ux.u * ux.u).trace(), lx.curvature());
    out.resolvent_eq = relative_residual(tr_uv, (lx.d1 - ly.d1) / (y - x));
    return out;
}

// ---------------------------------------------------------------------------
// Log-determinant derivatives
// ---------------------------------------------------------------------------

struct LogDetCheck {
    double first = 0.0;   // worst relative residual of d/dR_ij log|det R| = (R^-1)_ji
    double second = 0.0;  // worst relative residual of d2/dR_ij dR_kl = -(R^-1)_jk (R^-1)_li
};

namespace detail {

using Quad = __float128;

/// Determinant by partial-pivot elimination in binary128.
inline Quad det_quad(std::vector<Quad> a, Index n) {
    Quad det = 1;
    for (Index c = 0; c < n; ++c) {
        Index piv = c;
        for (Index r = c + 1; r < n; ++r) {
            const Quad x = a[r * n + c] < 0 ? -a[r * n + c] : a[r * n + c];
            const Quad y = a[piv * n + c] < 0 ? -a[piv * n + c] : a[piv * n + c];
            if (x > y) piv = r;
        }
        if (piv != c) {
            for (Index k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        const Quad d = a[c * n + c];
        if (d == 0) return 0;
        det *= d;
        for (Index r = c + 1; r < n; ++r) {
            const Quad m = a[r * n + c] / d;
            for (Index k = c + 1; k < n; ++k) a[r * n + k] -= m * a[c * n + k];
        }
    }
    return det;
}

}  // namespace detail

/// Central differences of log|det R| with step h against the analytic
/// derivatives. Function values are log|det(R + D) / det R|, the ratio formed
/// in binary128. Residuals are relative to max(|analytic|, 1% of the natural
/// scale max|R^-1| or max|R^-1|^2).
inline LogDetCheck logdet_derivative_check(const Matrix& r, double h = 1e-5) {
    using detail::Quad;
    const Index n = r.rows();
    const Matrix inv = r.partialPivLu().inverse();
    const double inv_max = max_abs(inv);
    const double scale1 = 0.01 * inv_max;
    const double scale2 = 0.01 * inv_max * inv_max;
    std::vector<Quad> base(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) base[i * n + j] = r(i, j);
    const Quad det0 = detail::det_quad(base, n);
    if (det0 == 0) throw std::invalid_argument("logdet_derivative_check: singular matrix");

    auto f = [&](Index i, Index j, double di, Index k, Index l, double dk) {
        std::vector<Quad> p = base;
        p[i * n + j] += di;
        p[k * n + l] += dk;
        const Quad ratio = detail::det_quad(std::move(p), n) / det0;
        const Quad mag = ratio < 0 ? -ratio : ratio;
        return std::log1p(static_cast<long double>(mag - 1));
    };

    LogDetCheck out;
    const long double hl = h;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const long double fd = (f(i, j, h, i, j, 0) - f(i, j, -h, i, j, 0)) / (2 * hl);
            out.first = std::max(out.first, scaled_residual(static_cast<double>(fd), inv(j, i), scale1));
            for (Index k = 0; k < n; ++k)
                for (Index l = 0; l < n; ++l) {
                    const long double fd2 = (f(i, j, h, k, l, h) - f(i, j, h, k, l, -h) -
                                             f(i, j, -h, k, l, h) + f(i, j, -h, k, l, -h)) /
                                            (4 * hl * hl);
                    const double analytic = -inv(j, k) * inv(l, i);
                    out.second = std::max(
                        out.second, scaled_residual(static_cast<double>(fd2), analytic, scale2));
                }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Dimension-2 checks for the rank-one model M^C = x_C A0
// ---------------------------------------------------------------------------

struct Dim2Report {
    /// tr(U(X)^C A0) tr(U(Y)^C A0) = -tr(U(X)^C U(Y)^C), as usually written.
    IdentityReport product_of_traces;
    /// Same with the factor 2 that tr(A0^2) = -2 forces.
    IdentityReport product_of_traces_factor2;
    /// tr(U^C A0 U^C A0) = -tr((U^C)^2).
    IdentityReport sandwich_imaginary;
    /// tr(U^0 A0 U^0 A0) = tr((U^0)^2) - (tr U^0)^2.
    IdentityReport sandwich_real;
    /// tr(S^2) - (tr S)^2 = -2 det S for 2 x 2 S.
    IdentityReport scalar_2x2;
    /// n = 3, M^0 = diag(1,2,3): passes when |(M^0 A0)^2 + det(M^0) Id| > 0.1,
    /// i.e. when the 2 x 2 relation demonstrably fails.
    IdentityReport counterexample;
    double counterexample_residual = 0.0;

    bool passed_as_written() const {
        return product_of_traces.passed() && sandwich_imaginary.passed() && sandwich_real.passed() &&
               scalar_2x2.passed() && counterexample.passed();
    }
    bool passed_with_factor2() const {
        return product_of_traces_factor2.passed() && sandwich_imaginary.passed() &&
               sandwich_real.passed() && scalar_2x2.passed() && counterexample.passed();
    }
};

inline Matrix rotation_generator() {
    Matrix a0(2, 2);
    a0 << 0.0, -1.0, 1.0, 0.0;
    return a0;
}

inline double dim3_counterexample_residual() {
    const Matrix base = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
    Matrix a0(3, 3);
    a0 << 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0;
    const Matrix ma = base * a0;
    return max_abs(ma * ma + base.determinant() * Matrix::Identity(3, 3));
}

inline Dim2Report dim2_remark_checks(std::uint64_t trials, std::uint64_t seed,
                                     double tolerance = 1e-10) {
    Dim2Report out;
    out.product_of_traces.suite = "dim2_product_of_traces";
    out.product_of_traces_factor2.suite = "dim2_product_of_traces_factor2";
    out.sandwich_imaginary.suite = "dim2_sandwich_imaginary";
    out.sandwich_real.suite = "dim2_sandwich_real";
    out.scalar_2x2.suite = "dim2_scalar_identity";
    out.counterexample.suite = "dim3_counterexample";
    for (auto* r : {&out.product_of_traces, &out.product_of_traces_factor2, &out.sandwich_imaginary,
                    &out.sandwich_real, &out.scalar_2x2, &out.counterexample})
        r->seed = seed;

    const CounterRng rng(seed);
    const Matrix a0 = rotation_generator();
    for (std::uint64_t t = 0; t < trials; ++t) {
        OctonionicMatrix m(2);
        Matrix& base = m[SubsetLabel(0)];
        base(0, 0) = rng.normal({t, 0, 0});
        base(1, 1) = rng.normal({t, 0, 1});
        base(0, 1) = base(1, 0) = std::sqrt(0.5) * rng.normal({t, 0, 2});
        for (auto c : kAllLabels)
            if (!c.empty()) m[c] = rng.normal({t, 0, 3u + c.bits}) * a0;

        const Matrix r = real_form(m);
        const ComplexVector eigs = eigenvalues_of(r);
        const double rho = spectral_radius(eigs);
        const double x = draw_off_spectrum(rng, {t, 1, 0}, rho);
        double y = draw_off_spectrum(rng, {t, 1, 1}, rho);
        for (std::uint32_t k = 2; std::abs(y - x) < 0.1; ++k) y = draw_off_spectrum(rng, {t, 1, k}, rho);
        const Resolvent ux = resolvent_from_real_form(r, eigs, x);
        const Resolvent uy = resolvent_from_real_form(r, eigs, y);

        for (auto c : kAllLabels) {
            if (c.empty()) continue;
            const Matrix& a = ux[c];
            const Matrix& b = uy[c];
            const double lhs = (a * a0).trace() * (b * a0).trace();
            const double rhs = -(a * b).trace();
            const double floor_ab = a.norm() * b.norm();
            out.product_of_traces.record(scaled_residual(lhs, rhs, floor_ab), tolerance);
            out.product_of_traces_factor2.record(scaled_residual(lhs, 2.0 * rhs, floor_ab), tolerance);
            out.sandwich_imaginary.record(
                scaled_residual((a * a0 * a * a0).trace(), -(a * a).trace(), a.squaredNorm()),
                tolerance);
        }
        const Matrix& u0 = ux[SubsetLabel(0)];
        const double tr0 = u0.trace();
        out.sandwich_real.record(
            scaled_residual((u0 * a0 * u0 * a0).trace(), (u0 * u0).trace() - tr0 * tr0, u0.squaredNorm()),
            tolerance);
        const double trb = base.trace();
        out.scalar_2x2.record(scaled_residual((base * base).trace() - trb * trb, -2.0 * base.determinant(),
                                              base.squaredNorm()),
                              tolerance);
    }
    out.counterexample_residual = dim3_counterexample_residual();
    out.counterexample.record_exact(out.counterexample_residual > 0.1);
    return out;
}

}  // namespace octodyson
