#pragma once

#include <span>

#include <Eigen/Dense>

namespace hdmean {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x p block of observations; row t is the observation at time t.
///
/// Construction validates n >= 2, p >= 1 and that every entry is finite,
/// throwing InvalidData otherwise. Instances are immutable.
class SampleMatrix {
public:
    explicit SampleMatrix(Matrix data);

    [[nodiscard]] Index n() const noexcept { return data_.rows(); }
    [[nodiscard]] Index p() const noexcept { return data_.cols(); }
    [[nodiscard]] const Matrix& values() const noexcept { return data_; }
    [[nodiscard]] auto row(Index t) const { return data_.row(t); }

    [[nodiscard]] Vector mean() const;
    /// Rows minus the column means.
    [[nodiscard]] Matrix centered() const;

private:
    Matrix data_;
};

/// Gram matrix of centered rows: g(t, s) = <X_t - mean, X_s - mean>.
struct GramMatrix {
    Matrix g;

    [[nodiscard]] Index n() const noexcept { return g.rows(); }
};

[[nodiscard]] GramMatrix centered_gram(const SampleMatrix& x);

/// max(1, ||a||_F); the reference scale for relative tolerances.
[[nodiscard]] double tolerance_scale(const Matrix& a);

/// Unnormalized lagged product sum over a cross-Gram matrix K = Z1 Z2^T:
///
///     sum_{t, s} K(t + a, s) * K(t, s + b)
///
/// over all t, s keeping every index in range. With Z1 = Z2 = Z and
/// Gamma(h) = n^-1 sum_{u - t = h} Z_t Z_u^T this is n^2 tr(Gamma(a) Gamma(b));
/// with two different samples it is n1 n2 tr(Gamma1(a) Gamma2(b)).
[[nodiscard]] double lagged_cross_trace(const Matrix& k, int a, int b);

/// tr(Gamma(a) Gamma(b)) for the naive sample autocovariances, from the Gram
/// matrix alone. Negative lags follow Gamma(-h) = Gamma(h)^T.
/// Throws LagError unless |a|, |b| <= n - 1.
[[nodiscard]] double trace_autocov_product(const GramMatrix& gram, int a, int b, Index n);

/// tr(W1-weighted autocovariance of sample 1 times W2-weighted autocovariance
/// of sample 2), i.e. sum_{a,b} w1(a) w2(b) lagged_cross_trace(K, a, b), where
/// the weights are indexed by lag -L..L (weights[L + h] is lag h).
///
/// Evaluated as tr(W1 K W2 K^T) with banded Toeplitz W(t, u) = w(u - t), so the cost is
/// O(n1 n2 (2L + 1)) rather than quadratic in the number of lags.
[[nodiscard]] double weighted_cross_trace(const Matrix& k, std::span<const double> w1,
                                          std::span<const double> w2);

/// Symmetric square root of a symmetric positive semidefinite matrix.
/// Small negative eigenvalues (roundoff) are clipped to zero.
/// Throws NotPSD when s is asymmetric beyond 1e-8 * scale or has an
/// eigenvalue below -1e-10 * scale.
[[nodiscard]] Matrix psd_sqrt(const Matrix& s);

}  // namespace hdmean
