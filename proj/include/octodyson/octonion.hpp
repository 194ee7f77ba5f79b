#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "octodyson/identity_report.hpp"
#include "octodyson/rng.hpp"

namespace octodyson {

/// A subset A of {1,2,3}, stored as a 3-bit mask (bit i set <=> i+1 in A).
/// Symmetric difference A.B is XOR.
struct SubsetLabel {
    std::uint8_t bits = 0;

    constexpr SubsetLabel() = default;
    constexpr explicit SubsetLabel(unsigned mask) : bits(static_cast<std::uint8_t>(mask & 7u)) {}

    constexpr bool empty() const noexcept { return bits == 0; }
    constexpr bool contains(int element) const noexcept { return (bits >> (element - 1)) & 1u; }
    constexpr std::size_t index() const noexcept { return bits; }

    friend constexpr SubsetLabel operator^(SubsetLabel a, SubsetLabel b) noexcept {
        return SubsetLabel(a.bits ^ b.bits);
    }
    friend constexpr bool operator==(SubsetLabel, SubsetLabel) = default;

    std::string to_string() const {
        if (empty()) return "{}";
        std::string s = "{";
        for (int e = 1; e <= 3; ++e) {
            if (!contains(e)) continue;
            if (s.size() > 1) s += ',';
            s += static_cast<char>('0' + e);
        }
        return s + "}";
    }
};

inline constexpr std::size_t kOctonionDim = 8;

/// Row/column order of the printed multiplication table:
/// {}, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}.
inline constexpr std::array<SubsetLabel, 8> kTableOrder = {
    SubsetLabel(0b000), SubsetLabel(0b001), SubsetLabel(0b010), SubsetLabel(0b100),
    SubsetLabel(0b011), SubsetLabel(0b101), SubsetLabel(0b110), SubsetLabel(0b111)};

/// All eight labels in mask order (the storage order used everywhere else).
inline constexpr std::array<SubsetLabel, 8> kAllLabels = {
    SubsetLabel(0), SubsetLabel(1), SubsetLabel(2), SubsetLabel(3),
    SubsetLabel(4), SubsetLabel(5), SubsetLabel(6), SubsetLabel(7)};

/// The sign table (A|B) with w_A w_B = (A|B) w_{A.B}.
class SignTable {
  public:
    using Rows = std::array<std::array<int, 8>, 8>;

    /// The octonion table, rows and columns in kTableOrder.
    static constexpr Rows kPrinted = {{
        {1, 1, 1, 1, 1, 1, 1, 1},
        {1, -1, 1, 1, -1, -1, 1, -1},
        {1, -1, -1, 1, 1, -1, -1, 1},
        {1, -1, -1, -1, 1, 1, 1, -1},
        {1, 1, -1, -1, -1, -1, 1, 1},
        {1, 1, 1, -1, 1, -1, -1, -1},
        {1, -1, 1, -1, -1, 1, -1, 1},
        {1, 1, -1, 1, -1, 1, -1, -1},
    }};

    static constexpr SignTable octonions() noexcept { return from_table_order(kPrinted); }

    /// Builds a table from rows given in kTableOrder.
    static constexpr SignTable from_table_order(const Rows& rows) noexcept {
        SignTable t;
        for (std::size_t r = 0; r < 8; ++r)
            for (std::size_t c = 0; c < 8; ++c)
                t.signs_[kTableOrder[r].index()][kTableOrder[c].index()] =
                    static_cast<std::int8_t>(rows[r][c]);
        return t;
    }

    constexpr int operator()(SubsetLabel a, SubsetLabel b) const noexcept {
        return signs_[a.index()][b.index()];
    }

    /// Negative-control hook: a copy with one cell negated.
    constexpr SignTable with_flipped(SubsetLabel a, SubsetLabel b) const noexcept {
        SignTable t = *this;
        t.signs_[a.index()][b.index()] = static_cast<std::int8_t>(-t.signs_[a.index()][b.index()]);
        return t;
    }

    friend constexpr bool operator==(const SignTable&, const SignTable&) = default;

  private:
    std::array<std::array<std::int8_t, 8>, 8> signs_{};
};

inline constexpr SignTable kOctonionSigns = SignTable::octonions();

/// (A|B) for the octonion table.
constexpr int sign(SubsetLabel a, SubsetLabel b) noexcept { return kOctonionSigns(a, b); }

/// Structural rules of the table: identity row/column, (A|A) = -1 off the
/// identity, anticommutation of distinct imaginary units. 64 exact cases.
inline IdentityReport check_table_structure(const SignTable& table = kOctonionSigns) {
    IdentityReport report{.suite = "sign_table_structure"};
    ScopedTimer timer(report);
    for (auto a : kAllLabels) {
        for (auto b : kAllLabels) {
            bool ok = true;
            if (a.empty() || b.empty()) {
                ok = table(a, b) == 1;
            } else if (a == b) {
                ok = table(a, b) == -1;
            } else {
                ok = table(a, b) == -table(b, a);
            }
            report.record_exact(ok);
        }
    }
    return report;
}

/// An element sum_A x_A w_A, coordinates stored in mask order.
class Octonion {
  public:
    constexpr Octonion() = default;
    constexpr explicit Octonion(const std::array<double, 8>& coords) : coords_(coords) {}

    static constexpr Octonion real(double value) {
        Octonion x;
        x.coords_[0] = value;
        return x;
    }
    static constexpr Octonion basis(SubsetLabel a, double scale = 1.0) {
        Octonion x;
        x.coords_[a.index()] = scale;
        return x;
    }

    constexpr double operator[](SubsetLabel a) const noexcept { return coords_[a.index()]; }
    constexpr double& operator[](SubsetLabel a) noexcept { return coords_[a.index()]; }
    constexpr const std::array<double, 8>& coords() const noexcept { return coords_; }

    constexpr double dot(const Octonion& other) const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < 8; ++i) s += coords_[i] * other.coords_[i];
        return s;
    }
    constexpr double norm_squared() const noexcept { return dot(*this); }
    double norm() const noexcept { return std::sqrt(norm_squared()); }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : coords_) m = std::max(m, std::abs(v));
        return m;
    }

    friend constexpr Octonion operator+(Octonion x, const Octonion& y) noexcept {
        for (std::size_t i = 0; i < 8; ++i) x.coords_[i] += y.coords_[i];
        return x;
    }
    friend constexpr Octonion operator-(Octonion x, const Octonion& y) noexcept {
        for (std::size_t i = 0; i < 8; ++i) x.coords_[i] -= y.coords_[i];
        return x;
    }
    friend constexpr Octonion operator*(double s, Octonion x) noexcept {
        for (double& v : x.coords_) v *= s;
        return x;
    }
    friend constexpr bool operator==(const Octonion&, const Octonion&) = default;

  private:
    std::array<double, 8> coords_{};
};

/// xy = sum_{A,B} x_A y_B (A|B) w_{A.B}.
constexpr Octonion multiply(const Octonion& x, const Octonion& y,
                            const SignTable& table = kOctonionSigns) noexcept {
    Octonion z;
    for (auto a : kAllLabels) {
        if (x[a] == 0.0) continue;
        for (auto b : kAllLabels) z[a ^ b] += table(a, b) * x[a] * y[b];
    }
    return z;
}

constexpr Octonion operator*(const Octonion& x, const Octonion& y) noexcept {
    return multiply(x, y);
}

/// x* = sum_A x_A (A|A) w_A.
constexpr Octonion conj(const Octonion& x, const SignTable& table = kOctonionSigns) noexcept {
    Octonion y;
    for (auto a : kAllLabels) y[a] = table(a, a) * x[a];
    return y;
}

/// e = sum_{C != {}} w_C.
constexpr Octonion imaginary_sum() noexcept {
    Octonion e;
    for (auto c : kAllLabels)
        if (!c.empty()) e[c] = 1.0;
    return e;
}

inline Octonion random_octonion(const CounterRng& rng, std::uint64_t sample, std::uint32_t stream,
                                std::uint32_t slot) {
    std::array<double, 8> c{};
    for (std::uint32_t k = 0; k < 8; ++k) c[k] = rng.normal({sample, stream, slot * 8 + k});
    return Octonion(c);
}

// ---------------------------------------------------------------------------
// Exhaustive identity suites
// ---------------------------------------------------------------------------

struct ThetaSum {
    long sum = 0;
    long quadruples = 0;
};

/// Sum of (B.C|C)(C.D|D)(D.A|A)(A.B|B) over A != B, C != D, B != C, A != D.
inline ThetaSum theta_sum(const SignTable& table = kOctonionSigns) {
    ThetaSum out;
    for (auto a : kAllLabels)
        for (auto b : kAllLabels)
            for (auto c : kAllLabels)
                for (auto d : kAllLabels) {
                    if (a == b || c == d || b == c || a == d) continue;
                    out.sum += table(b ^ c, c) * table(c ^ d, d) * table(d ^ a, a) * table(a ^ b, b);
                    ++out.quadruples;
                }
    return out;
}

inline constexpr long kExpectedThetaSum = 8 * 49;

struct SignIdentityReport {
    /// One report per identity, in the order they are usually stated.
    std::array<IdentityReport, 4> identities;
    std::optional<IdentityReport> theta;

    IdentityReport total() const {
        IdentityReport t{.suite = "sign_identities"};
        for (const auto& r : identities) t.absorb(r);
        if (theta) t.absorb(*theta);
        return t;
    }
};

/// Exact sign identities over every subset tuple:
///   (1) (A.B|B) = (A|B)(B|B)                          all 64 pairs
///   (2) (A.B|A)(A.B|B) = (A.B|A.B)                    all 64 pairs
///   (3) (A.C|A)(B.C|B) = -(A.C|B)(B.C|A)              triples with A.B != {}
///   (4) (B.C|C)(C.D|D)(D.A|A)(A.B|B) = (B.D|B.D)      quadruples with A.B.C.D = {}
/// `extended` adds the Theta sum check (== 2^3 * 7^2).
inline SignIdentityReport verify_sign_identities(const SignTable& table = kOctonionSigns,
                                                 bool extended = false) {
    SignIdentityReport out;
    out.identities[0].suite = "sign_identity_1";
    out.identities[1].suite = "sign_identity_2";
    out.identities[2].suite = "sign_identity_3";
    out.identities[3].suite = "sign_identity_4";
    {
        ScopedTimer t0(out.identities[0]);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels)
                out.identities[0].record_exact(table(a ^ b, b) == table(a, b) * table(b, b));
    }
    {
        ScopedTimer t1(out.identities[1]);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels)
                out.identities[1].record_exact(table(a ^ b, a) * table(a ^ b, b) ==
                                               table(a ^ b, a ^ b));
    }
    {
        ScopedTimer t2(out.identities[2]);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels) {
                if ((a ^ b).empty()) continue;
                for (auto c : kAllLabels)
                    out.identities[2].record_exact(table(a ^ c, a) * table(b ^ c, b) ==
                                                   -table(a ^ c, b) * table(b ^ c, a));
            }
    }
    {
        ScopedTimer t3(out.identities[3]);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels)
                for (auto c : kAllLabels)
                    for (auto d : kAllLabels) {
                        if (!(a ^ b ^ c ^ d).empty()) continue;
                        const int theta =
                            table(b ^ c, c) * table(c ^ d, d) * table(d ^ a, a) * table(a ^ b, b);
                        out.identities[3].record_exact(theta == table(b ^ d, b ^ d));
                    }
    }
    if (extended) {
        IdentityReport r{.suite = "theta_sum"};
        ScopedTimer t(r);
        const ThetaSum ts = theta_sum(table);
        r.record(static_cast<double>(std::abs(ts.sum - kExpectedThetaSum)), 0.0);
        out.theta = r;
    }
    return out;
}

struct MoufangReport {
    IdentityReport basis;   // exact, all 8^3 basis triples
    IdentityReport random;  // floating point, random real triples

    IdentityReport total() const {
        IdentityReport t{.suite = "moufang"};
        t.absorb(basis);
        t.absorb(random);
        return t;
    }
};

namespace detail {

/// Residuals of the four Moufang identities and the two alternative laws,
/// each as the max-abs coordinate difference.
inline std::array<double, 6> moufang_residuals(const Octonion& x, const Octonion& y,
                                               const Octonion& z, const SignTable& t) {
    auto m = [&t](const Octonion& p, const Octonion& q) { return multiply(p, q, t); };
    const Octonion zxz = m(m(z, x), z);
    const Octonion zyz = m(m(z, y), z);
    const Octonion zx_yz = m(m(z, x), m(y, z));
    return {
        (m(z, m(x, m(z, y))) - m(zxz, y)).max_abs(),
        (m(m(m(x, z), y), z) - m(x, zyz)).max_abs(),
        (zx_yz - m(m(z, m(x, y)), z)).max_abs(),
        (zx_yz - m(z, m(m(x, y), z))).max_abs(),
        (m(m(x, x), y) - m(x, m(x, y))).max_abs(),
        (m(m(y, x), x) - m(y, m(x, x))).max_abs(),
    };
}

}  // namespace detail

/// Moufang identities z(x(zy)) = (zxz)y, ((xz)y)z = x(zyz), (zx)(yz) = (z(xy))z,
/// (zx)(yz) = z((xy)z), plus (xx)y = x(xy) and (yx)x = y(xx).
/// Basis triples are compared exactly; random triples use a residual
/// normalised by |x||y||z|^2.
inline MoufangReport verify_moufang(const SignTable& table = kOctonionSigns,
                                    std::uint64_t random_trials = 10000, std::uint64_t seed = 0,
                                    double tolerance = 1e-12) {
    MoufangReport out;
    out.basis.suite = "moufang_basis";
    out.random.suite = "moufang_random";
    out.random.seed = seed;
    {
        ScopedTimer t(out.basis);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels)
                for (auto c : kAllLabels) {
                    const auto r = detail::moufang_residuals(Octonion::basis(a), Octonion::basis(b),
                                                             Octonion::basis(c), table);
                    for (double v : r) out.basis.record_exact(v == 0.0);
                }
    }
    {
        ScopedTimer t(out.random);
        const CounterRng rng(seed);
        for (std::uint64_t k = 0; k < random_trials; ++k) {
            const Octonion x = random_octonion(rng, k, 1, 0);
            const Octonion y = random_octonion(rng, k, 1, 1);
            const Octonion z = random_octonion(rng, k, 1, 2);
            const double scale = x.norm() * y.norm() * z.norm_squared();
            const double alt_scale = x.norm_squared() * y.norm();
            const auto r = detail::moufang_residuals(x, y, z, table);
            for (std::size_t i = 0; i < 4; ++i) out.random.record(r[i] / scale, tolerance);
            out.random.record(r[4] / alt_scale, tolerance);
            out.random.record(r[5] / alt_scale, tolerance);
        }
    }
    return out;
}

/// |xy| = |x||y| on random pairs, relative residual.
inline IdentityReport verify_norm_multiplicativity(const SignTable& table = kOctonionSigns,
                                                   std::uint64_t pairs = 100000,
                                                   std::uint64_t seed = 0,
                                                   double tolerance = 1e-12) {
    IdentityReport report{.suite = "norm_multiplicativity", .seed = seed};
    ScopedTimer timer(report);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < pairs; ++k) {
        const Octonion x = random_octonion(rng, k, 2, 0);
        const Octonion y = random_octonion(rng, k, 2, 1);
        report.record(relative_residual(multiply(x, y, table).norm(), x.norm() * y.norm()),
                      tolerance);
    }
    return report;
}

/// x x* = |x|^2 w_0 on random x (all non-scalar parts vanish).
inline IdentityReport verify_conjugate_norm(const SignTable& table = kOctonionSigns,
                                            std::uint64_t trials = 10000, std::uint64_t seed = 0,
                                            double tolerance = 1e-12) {
    IdentityReport report{.suite = "conjugate_norm", .seed = seed};
    ScopedTimer timer(report);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const Octonion x = random_octonion(rng, k, 3, 0);
        const Octonion diff = multiply(x, conj(x, table), table) - Octonion::real(x.norm_squared());
        report.record(diff.max_abs() / x.norm_squared(), tolerance);
    }
    return report;
}

/// <x w_A, x w_B> = 0 for A != B on random x.
inline IdentityReport verify_orthogonality(const SignTable& table = kOctonionSigns,
                                           std::uint64_t trials = 1000, std::uint64_t seed = 0,
                                           double tolerance = 1e-12) {
    IdentityReport report{.suite = "orthogonality", .seed = seed};
    ScopedTimer timer(report);
    const CounterRng rng(seed);
    for (std::uint64_t k = 0; k < trials; ++k) {
        const Octonion x = random_octonion(rng, k, 4, 0);
        for (auto a : kAllLabels)
            for (auto b : kAllLabels) {
                if (a == b) continue;
                const double ip = multiply(x, Octonion::basis(a), table)
                                      .dot(multiply(x, Octonion::basis(b), table));
                report.record(std::abs(ip) / x.norm_squared(), tolerance);
            }
    }
    return report;
}

/// e^2 = -7 exactly for e = sum of the seven imaginary units.
inline IdentityReport verify_e_squared(const SignTable& table = kOctonionSigns) {
    IdentityReport report{.suite = "e_squared"};
    const Octonion e = imaginary_sum();
    report.record_exact(multiply(e, e, table) == Octonion::real(-7.0));
    return report;
}

/// First basis triple (in mask order) with (w_A w_B) w_C != w_A (w_B w_C).
inline std::optional<std::array<SubsetLabel, 3>> find_nonassociative_triple(
    const SignTable& table = kOctonionSigns) {
    for (auto a : kAllLabels)
        for (auto b : kAllLabels)
            for (auto c : kAllLabels) {
                const int left = table(a, b) * table(a ^ b, c);
                const int right = table(b, c) * table(a, b ^ c);
                if (left != right) return std::array{a, b, c};
            }
    return std::nullopt;
}

}  // namespace octodyson
