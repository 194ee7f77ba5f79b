#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

/// Composite Simpson rule on [a, b] with an even number of panels.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int k = 1; k < panels; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// E[s^4] / E[s^2]^2 for the density s^beta exp(-s^2/2) on s > 0, by quadrature.
inline double gap_ratio_by_quadrature(double beta) {
    auto moment = [beta](double p) {
        return simpson([&](double s) { return std::pow(s, beta + p) * std::exp(-0.5 * s * s); }, 0.0,
                       40.0, 40000);
    };
    const double m0 = moment(0), m2 = moment(2), m4 = moment(4);
    return (m4 / m0) / ((m2 / m0) * (m2 / m0));
}

/// Draws from s^beta exp(-s^2/2) by rejection from a uniform envelope on [0, smax].
inline std::vector<double> rejection_gaps(double beta, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double mode = std::sqrt(beta);
    const double peak = std::pow(mode, beta) * std::exp(-0.5 * beta);
    const double smax = mode + 12.0;
    std::vector<double> out;
    out.reserve(count);
    while (out.size() < count) {
        const double s = smax * unit(gen);
        const double f = std::pow(s, beta) * std::exp(-0.5 * s * s);
        if (unit(gen) * peak <= f) out.push_back(s);
    }
    return out;
}

/// Full-pivot LU inverse; a different factorization from the library's.
inline Eigen::MatrixXd dense_inverse(const Eigen::MatrixXd& m) { return m.fullPivLu().inverse(); }

/// Sorted eigenvalues of a real symmetric matrix via the general complex solver.
inline Eigen::VectorXd sorted_real_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.cast<std::complex<double>>(), false);
    Eigen::VectorXd v = es.eigenvalues().real();
    std::sort(v.data(), v.data() + v.size());
    return v;
}

/// det(R - X Id) by full-pivot LU.
inline double charpoly_det(const Eigen::MatrixXd& r, double x) {
    return (r - x * Eigen::MatrixXd::Identity(r.rows(), r.cols())).fullPivLu().determinant();
}

}  // namespace oracle
