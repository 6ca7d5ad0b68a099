#pragma once

#include "hdmean/linalg.hpp"
#include "hdmean/procsim.hpp"

namespace hdmean {

/// Partition of times 1..n into k blocks of width w plus a remainder r.
/// Block i covers ((i-1)w, iw]; its trimmed part drops the last M indices,
/// so distinct trimmed blocks are more than M apart.
struct BlockScheme {
    Index n = 0;
    int M = 0;
    Index w = 0;
    Index k = 0;
    Index r = 0;
    double alpha_exp = 0.0;  ///< 0 when the width was given explicitly
    double C = 0.0;

    /// Explicit width. Throws BlockError unless M < w <= n.
    [[nodiscard]] static BlockScheme with_width(Index n, int M, Index w);
};

inline constexpr double kDefaultBlockAlpha = 0.5;
inline constexpr double kDefaultBlockC = 1.0;

/// w = max(ceil(C n^alpha), (M + 1) ceil(sqrt(n))), k = floor(n / w), r = n - w k.
/// Throws BlockError for alpha outside (0, 1), C <= 0, w > n or k < 2.
[[nodiscard]] BlockScheme block_scheme(Index n, int M, double alpha_exp = kDefaultBlockAlpha,
                                       double C = kDefaultBlockC);

/// Omega_w = sum_{|h| <= M} (1 - |h|/(w - M)) Gamma(h).
[[nodiscard]] Matrix omega_w(const AutocovSequence& gam, const BlockScheme& scheme);

/// sigma_n^2 = 2 k (k - 1) (w - M)^2 tr(Omega_w^2) / n^4; exact variance of the
/// off-diagonal block sum for Gaussian data. Throws BlockError when k < 2.
[[nodiscard]] double sigma_n_sq(const BlockScheme& scheme, const Matrix& omega_w);

/// Var(B_11) = 2 (w - M)^2 tr(Omega_w^2) / n^4.
[[nodiscard]] double var_b11(const BlockScheme& scheme, const Matrix& omega_w);

/// Block decomposition of sum_{t,s} A_ts with
/// A_ts = n^-2 [X_t^T X_s - tr Gamma(t - s)].
struct BlockDecomposition {
    Matrix Y;   ///< k x p trimmed block means
    Matrix B;   ///< k x k trimmed-block sums of A
    Matrix D;   ///< k x k full-block sums of A minus B
    double F = 0.0;       ///< sum of A over pairs touching the remainder
    double sum_a = 0.0;   ///< sum of A over all pairs, as mean^T mean - tr(Omega_n)/n
    double var_mn = 0.0;  ///< (2/n^2) tr(Omega_n^2) from the supplied Gamma
    double delta11 = 0.0; ///< sum B / sqrt(var_mn)
    double delta12 = 0.0; ///< (sum D + F) / sqrt(var_mn)
    double sigma_sq = 0.0;          ///< sigma_n^2 (0 when k = 1)
    double var_b11 = 0.0;
    double delta11_standardized = 0.0;  ///< sum B / sqrt(sigma_n^2 + k Var(B_11))
};

/// Throws BlockError if the scheme does not match X or Gamma has a different dimension.
[[nodiscard]] BlockDecomposition decompose(const SampleMatrix& x, const AutocovSequence& gam,
                                           const BlockScheme& scheme);

}  // namespace hdmean
