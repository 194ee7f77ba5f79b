#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace octodyson {

/// Outcome of one verification suite. Failures are data: a suite never
/// throws because an identity did not hold.
struct IdentityReport {
    std::string suite;
    std::uint64_t cases = 0;
    std::uint64_t failures = 0;
    double max_residual = 0.0;
    std::uint64_t seed = 0;
    std::int64_t elapsed_ms = 0;

    bool passed() const noexcept { return failures == 0 && std::isfinite(max_residual); }

    /// Records one case. A non-finite residual always counts as a failure.
    void record(double residual, double tolerance) {
        ++cases;
        if (!std::isfinite(residual)) {
            max_residual = std::numeric_limits<double>::infinity();
            ++failures;
            return;
        }
        max_residual = std::max(max_residual, residual);
        if (residual > tolerance) ++failures;
    }

    /// Exact (integer) case.
    void record_exact(bool ok) {
        ++cases;
        if (!ok) {
            ++failures;
            max_residual = std::max(max_residual, 1.0);
        }
    }

    void absorb(const IdentityReport& other) {
        cases += other.cases;
        failures += other.failures;
        max_residual = std::max(max_residual, other.max_residual);
        elapsed_ms += other.elapsed_ms;
    }
};

/// |a - b| relative to the larger magnitude.
inline double relative_residual(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

class ScopedTimer {
  public:
    explicit ScopedTimer(IdentityReport& report)
        : report_(report), start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        report_.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
    }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

  private:
    IdentityReport& report_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace octodyson
