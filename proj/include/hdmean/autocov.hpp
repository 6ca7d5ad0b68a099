#pragma once

#include "hdmean/linalg.hpp"

namespace hdmean {

/// Naive sample autocovariance
///
///     Gamma_hat(h) = n^-1 sum_{t=1}^{n-h} (X_t - mean)(X_{t+h} - mean)^T,
///
/// with Gamma_hat(-h) = Gamma_hat(h)^T. Throws LagError when |h| >= n.
[[nodiscard]] Matrix sample_autocov(const SampleMatrix& x, int h);

/// (tr Gamma_hat(0), ..., tr Gamma_hat(M)). Uses only the lag-h diagonals of
/// the centered Gram matrix, O(n p M). Throws LagError when M >= n.
[[nodiscard]] Vector lag_traces(const SampleMatrix& x, int M);

/// b_n with tr(Omega_n) = b_n^T (tr Gamma(0), ..., tr Gamma(M)):
/// b(0) = 1, b(h) = 2 (1 - h/n).
[[nodiscard]] Vector weight_vector(Index n, int M);

/// Theta_n with E[lag_traces(X, M)] = Theta_n (tr Gamma(0), ..., tr Gamma(M))
/// for any stationary M-dependent X. Exact closed form from index-pair counting.
/// Requires n > 2M + 2; throws SystemError otherwise or if cond > 1e8.
[[nodiscard]] Matrix coefficient_matrix(Index n, int M);

/// Coefficients of the unbiased estimator beta^T gamma_hat of tr(Omega_n).
/// Since E[gamma_hat] = theta gamma, unbiasedness for every gamma requires
/// theta^T beta = b; theta is not symmetric for M >= 1, so this differs from
/// theta^-1 b.
struct EstimatorSystem {
    Index n = 0;
    int M = 0;
    Vector b;
    Matrix theta;
    Vector beta;  ///< theta^-T b
    double cond = 0.0;
};

[[nodiscard]] EstimatorSystem estimator_system(Index n, int M);

/// Same as estimator_system(n, M) except b targets Omega at length
/// `target_n`. Used when a sub-sample of length n estimates the long-run
/// covariance of a longer series.
[[nodiscard]] EstimatorSystem estimator_system(Index n, int M, Index target_n);

/// beta^T lag_traces(X, M); unbiased for tr(Omega_n).
/// Throws InvalidData if sys.n != X.n().
[[nodiscard]] double trace_omega_hat(const SampleMatrix& x, const EstimatorSystem& sys);

/// Matrix-valued counterpart: sum_h beta(h) sym(Gamma_hat(h)) with
/// sym(A) = (A + A^T)/2. Unbiased for the matrix Omega targeted by sys, and
/// its trace equals trace_omega_hat.
[[nodiscard]] Matrix omega_hat(const SampleMatrix& x, const EstimatorSystem& sys);

/// Lag weights (index L + h for lag h = -L..L) such that
/// omega_hat = sum_h w(h) Gamma_hat(h).
[[nodiscard]] std::vector<double> omega_hat_lag_weights(const EstimatorSystem& sys);

/// Quadratic-form weights pi(t, s) with sum_{t,s} pi(t, s) X_t^T X_s = M_n(X).
struct PiWeights {
    Matrix weights;

    /// sum_{t,s} pi(t, s) X_t^T X_s.
    [[nodiscard]] double apply(const SampleMatrix& x) const;
};

/// Symmetric weights obtained by expanding
/// M_n = mean^T mean - n^-1 beta^T gamma_hat as a quadratic form in the rows.
[[nodiscard]] PiWeights pi_weights(const EstimatorSystem& sys);

/// Weights from the expansion before symmetrization:
///
///   pi(t, s) = n^-2 {1 - n^-1 sum_h (1 - h/n) beta(h)}
///              - sum_h { beta(h) n^-2 I(t + h = s) - beta(h) n^-3 (I(t <= n - h) + I(s > h)) }.
[[nodiscard]] Matrix pi_weights_unsymmetrized(const EstimatorSystem& sys);

/// The historically printed form of the weights:
///
///   pi(t, s) = n^-2 {1 - n^-1 sum_h (1 - h/n) beta(h)}
///              - sum_h { beta(h) n^-1 I(t + h = s) - beta(h) n^-2 (I(t <= n - h) + I(t > h)) },
///
/// with h running over 0..M. Kept so its deviation can be measured.
[[nodiscard]] Matrix pi_weights_printed(const EstimatorSystem& sys);

struct PiDiscrepancy {
    double max_abs_diff = 0.0;        ///< max |printed - unsymmetrized derived|
    double identity_residual = 0.0;   ///< |sum printed(t,s) X_t^T X_s - M_n(X)| on the probe sample
    bool printed_satisfies_identity = false;
};

/// Compares the printed weights against the derived ones on a probe sample.
[[nodiscard]] PiDiscrepancy pi_discrepancy(const EstimatorSystem& sys, const SampleMatrix& probe);

}  // namespace hdmean
