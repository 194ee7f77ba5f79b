#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "octodyson/errors.hpp"
#include "octodyson/octo_matrix.hpp"

namespace octodyson {

enum class ModelKind { A, B };

inline std::string_view model_name(ModelKind k) { return k == ModelKind::A ? "a" : "b"; }

/// One nonzero covariance Gamma(M^c_ij, M^d_kl).
struct CovarianceTerm {
    SubsetLabel c;
    Index i, j;
    SubsetLabel d;
    Index k, l;
    double coef;
};

/// Coefficients of the closed forms
///   L(log P)              = curvature (P'^2/P^2 - P''/P) + square P'^2/P^2
///   Gamma(log P(X), log P(Y)) = gamma / (Y - X) (P'/P(X) - P'/P(Y))
struct LogPClosedForm {
    double curvature = 0.0;
    double square = 0.0;
    double gamma = 0.0;
};

/// Entry-level covariance and drift of one of the two Brownian models.
///
/// Model A (n = 2): every component is an independent Brownian matrix,
///   Gamma(M^A_ij, M^B_kl) = 1/2 delta_AB (d_ik d_jl + (A|A) d_il d_jk).
/// Model B (any n): M^0 symmetric Brownian, one antisymmetric Brownian matrix
/// shared by all seven imaginary components,
///   Gamma(M^0_ij, M^0_kl) = 1/2 (d_ik d_jl + d_il d_jk)
///   Gamma(M^C_ij, M^D_kl) = 1/14 (d_ik d_jl - d_il d_jk)   C, D != {}
/// Both models are driftless.
class DiffusionModel {
  public:
    DiffusionModel(ModelKind kind, Index n) : kind_(kind), n_(n) {
        if (n < 2) throw std::invalid_argument("DiffusionModel: n must be at least 2");
        if (kind == ModelKind::A && n != 2)
            throw std::invalid_argument("DiffusionModel: model A is defined for n = 2 only");
        for (auto c : kAllLabels)
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    for (auto d : kAllLabels)
                        for (Index k = 0; k < n; ++k)
                            for (Index l = 0; l < n; ++l) {
                                const double g = covariance(c, i, j, d, k, l);
                                if (g != 0.0) terms_.push_back({c, i, j, d, k, l, g});
                            }
    }

    static DiffusionModel model_a() { return {ModelKind::A, 2}; }
    static DiffusionModel model_b(Index n) { return {ModelKind::B, n}; }

    ModelKind kind() const noexcept { return kind_; }
    Index dim() const noexcept { return n_; }
    std::string_view name() const { return model_name(kind_); }

    double covariance(SubsetLabel c, Index i, Index j, SubsetLabel d, Index k, Index l) const {
        const double same = (i == k && j == l) ? 1.0 : 0.0;
        const double swap = (i == l && j == k) ? 1.0 : 0.0;
        if (kind_ == ModelKind::A) {
            if (!(c == d)) return 0.0;
            return 0.5 * (same + sign(c, c) * swap);
        }
        if (c.empty() && d.empty()) return 0.5 * (same + swap);
        if (!c.empty() && !d.empty()) return (same - swap) / 14.0;
        return 0.0;
    }

    double drift(SubsetLabel, Index, Index) const { return 0.0; }

    const std::vector<CovarianceTerm>& covariance_terms() const noexcept { return terms_; }

    LogPClosedForm closed_form() const {
        if (kind_ == ModelKind::A) return {.curvature = 3.0, .square = -0.5, .gamma = 8.0};
        return {.curvature = 0.0, .square = -0.125, .gamma = 8.0};
    }

  private:
    ModelKind kind_;
    Index n_;
    std::vector<CovarianceTerm> terms_;
};

// ---------------------------------------------------------------------------
// Chain-rule sums over component coordinates
// ---------------------------------------------------------------------------

namespace detail {

/// d log P / d M^C_ij = sum_B (C|B) U[(B, j), (C.B, i)].
inline double log_p_gradient(const Matrix& u, Index n, SubsetLabel c, Index i, Index j) {
    double g = 0.0;
    for (auto b : kAllLabels)
        g += sign(c, b) * u(b.index() * n + j, (c ^ b).index() * n + i);
    return g;
}

/// d2 log P / d M^C_ij d M^D_kl
///   = -sum_{B,B'} (C|B)(D|B') U[(B, j), (D.B', k)] U[(B', l), (C.B, i)].
inline double log_p_hessian(const Matrix& u, Index n, SubsetLabel c, Index i, Index j,
                            SubsetLabel d, Index k, Index l) {
    double h = 0.0;
    for (auto b : kAllLabels) {
        const Index row_b = b.index() * n + j;
        const Index col_cb = (c ^ b).index() * n + i;
        for (auto b2 : kAllLabels) {
            h -= sign(c, b) * sign(d, b2) * u(row_b, (d ^ b2).index() * n + k) *
                 u(b2.index() * n + l, col_cb);
        }
    }
    return h;
}

inline void check_dims(const OctonionicMatrix& m, const DiffusionModel& model) {
    if (m.dim() != model.dim())
        throw std::invalid_argument("matrix dimension does not match the diffusion model");
}

}  // namespace detail

/// sum Gamma(M_a, M_b) d_a log P(X) d_b log P(Y) from two resolvents.
/// X = Y is allowed here (pass the same matrix twice).
inline double gamma_quadruple_sum(const Matrix& ux, const Matrix& uy, const DiffusionModel& model) {
    const Index n = model.dim();
    double s = 0.0;
    for (const auto& t : model.covariance_terms())
        s += t.coef * detail::log_p_gradient(ux, n, t.c, t.i, t.j) *
             detail::log_p_gradient(uy, n, t.d, t.k, t.l);
    return s;
}

/// sum L(M_a) d_a log P + sum Gamma(M_a, M_b) d2_ab log P at one resolvent.
inline double generator_quadruple_sum(const Matrix& u, const DiffusionModel& model) {
    const Index n = model.dim();
    double s = 0.0;
    for (auto c : kAllLabels)
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                const double drift = model.drift(c, i, j);
                if (drift != 0.0) s += drift * detail::log_p_gradient(u, n, c, i, j);
            }
    for (const auto& t : model.covariance_terms())
        s += t.coef * detail::log_p_hessian(u, n, t.c, t.i, t.j, t.d, t.k, t.l);
    return s;
}

/// Gamma(log P(X), log P(Y)) evaluated entry by entry from the model's covariance rule.
inline double gamma_logP(const OctonionicMatrix& m, double x, double y, const DiffusionModel& model) {
    detail::check_dims(m, model);
    if (x == y) throw std::invalid_argument("gamma_logP: X and Y must differ");
    const Matrix r = real_form(m);
    const ComplexVector eigs = eigenvalues_of(r);
    return gamma_quadruple_sum(resolvent_from_real_form(r, eigs, x).u,
                               resolvent_from_real_form(r, eigs, y).u, model);
}

/// L(log P(X)) evaluated entry by entry.
inline double L_logP(const OctonionicMatrix& m, double x, const DiffusionModel& model) {
    detail::check_dims(m, model);
    const Matrix r = real_form(m);
    return generator_quadruple_sum(resolvent_from_real_form(r, eigenvalues_of(r), x).u, model);
}

/// Closed-form Gamma(log P(X), log P(Y)); X = Y gives the confluent limit
/// gamma * (P'^2/P^2 - P''/P).
inline double gamma_closed_form(const LogPClosedForm& cf, const LogDerivatives& lx,
                                const LogDerivatives& ly, double x, double y) {
    if (x == y) return cf.gamma * lx.curvature();
    return cf.gamma / (y - x) * (lx.d1 - ly.d1);
}

inline double L_closed_form(const LogPClosedForm& cf, const LogDerivatives& lx) {
    return cf.curvature * lx.curvature() + cf.square * lx.d1 * lx.d1;
}

/// Coefficients of L(P) = alpha1 P'' + alpha2 P'^2/P and of the Gamma closed form.
struct ExponentProblem {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
};

/// L(P)/P = L(log P) + Gamma(log P, log P), so with the closed forms
/// alpha1 = -(curvature + gamma) and alpha2 = curvature + square + gamma.
inline ExponentProblem L_P_coefficients(const DiffusionModel& model) {
    const LogPClosedForm cf = model.closed_form();
    return {.alpha1 = -(cf.curvature + cf.gamma),
            .alpha2 = cf.curvature + cf.square + cf.gamma,
            .alpha3 = cf.gamma};
}

struct MeasuredCoefficients {
    ExponentProblem alphas;
    double alpha3_spread = 0.0;  // |alpha3(pair 1) - alpha3(pair 2)|
};

/// Recovers (alpha1, alpha2, alpha3) from the entry-level sums alone:
/// alpha3 from Gamma at two (X, Y) pairs, alpha1 and alpha2 from L(P)/P at
/// two shifts via a 2 x 2 solve.
inline MeasuredCoefficients measure_coefficients(const OctonionicMatrix& m, const DiffusionModel& model,
                                                 double x1, double x2, double y1, double y2) {
    detail::check_dims(m, model);
    const Matrix r = real_form(m);
    const ComplexVector eigs = eigenvalues_of(r);
    auto u = [&](double s) { return resolvent_from_real_form(r, eigs, s).u; };
    const Matrix u1 = u(x1), u2 = u(x2), v1 = u(y1), v2 = u(y2);
    const LogDerivatives l1 = log_derivatives(eigs, x1), l2 = log_derivatives(eigs, x2);
    const LogDerivatives k1 = log_derivatives(eigs, y1), k2 = log_derivatives(eigs, y2);

    const double a3_first = gamma_quadruple_sum(u1, v1, model) * (y1 - x1) / (l1.d1 - k1.d1);
    const double a3_second = gamma_quadruple_sum(u2, v2, model) * (y2 - x2) / (l2.d1 - k2.d1);

    const double lp1 = generator_quadruple_sum(u1, model) + gamma_quadruple_sum(u1, u1, model);
    const double lp2 = generator_quadruple_sum(u2, model) + gamma_quadruple_sum(u2, u2, model);
    Eigen::Matrix2d sys;
    sys << l1.d2, l1.d1 * l1.d1, l2.d2, l2.d1 * l2.d1;
    const Eigen::Vector2d sol = sys.fullPivLu().solve(Eigen::Vector2d(lp1, lp2));

    MeasuredCoefficients out;
    out.alphas = {.alpha1 = sol(0), .alpha2 = sol(1), .alpha3 = 0.5 * (a3_first + a3_second)};
    out.alpha3_spread = std::abs(a3_first - a3_second);
    return out;
}

// ---------------------------------------------------------------------------
// Multiplicity and invariant-measure exponent
// ---------------------------------------------------------------------------

struct MultiplicitySolution {
    std::vector<double> roots;  // ascending
    double a = 0.0;             // the positive root
    bool is_integer = false;
    double residual = 0.0;      // |quadratic(a)|
};

inline double multiplicity_quadratic(const ExponentProblem& p, double a) {
    return a * a * (p.alpha1 + p.alpha2) - a * (p.alpha1 + p.alpha3) + p.alpha3;
}

/// Positive root of a^2 (alpha1 + alpha2) - a (alpha1 + alpha3) + alpha3 = 0.
inline MultiplicitySolution solve_multiplicity(const ExponentProblem& p) {
    const double qa = p.alpha1 + p.alpha2;
    const double qb = -(p.alpha1 + p.alpha3);
    const double qc = p.alpha3;
    if (qa == 0.0) throw std::invalid_argument("solve_multiplicity: alpha1 + alpha2 must be nonzero");
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) throw NoAdmissibleRoot();

    MultiplicitySolution out;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (qb + std::copysign(sq, qb == 0.0 ? 1.0 : qb));
    if (q == 0.0) {
        out.roots = {0.0};
    } else {
        out.roots = {q / qa, qc / q};
        std::sort(out.roots.begin(), out.roots.end());
    }
    double best = -1.0;
    for (double r : out.roots)
        if (r > 0.0) best = std::max(best, r);
    if (best <= 0.0) throw NoAdmissibleRoot();

    out.a = best;
    out.is_integer = std::abs(best - std::round(best)) < 1e-9 * std::max(1.0, best);
    out.residual = std::abs(multiplicity_quadratic(p, best));
    return out;
}

struct InvariantExponent {
    double kappa = 0.0;  // power of prod (x_i - x_j)^2
    double beta = 0.0;   // power of prod |x_i - x_j|, = 2 kappa
};

/// kappa = -a^2 (alpha1 + alpha2) / alpha3.
inline InvariantExponent invariant_exponent(const ExponentProblem& p, double a) {
    if (p.alpha3 == 0.0) throw std::invalid_argument("invariant_exponent: alpha3 must be nonzero");
    InvariantExponent out;
    out.kappa = -a * a * (p.alpha1 + p.alpha2) / p.alpha3;
    if (out.kappa == 0.0) out.kappa = 0.0;  // drop the sign of -0
    out.beta = 2.0 * out.kappa;
    return out;
}

}  // namespace octodyson
