#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "hdmean/linalg.hpp"

namespace hdmean {

/// Gaussian moving average of order M:
///
///     X_t = mu + sum_{j=0}^{M} A_j eps_{t-j},   eps_s iid N(0, I_p),
///
/// which is M-dependent and strictly stationary with
/// Gamma(h) = sum_j A_j A_{j+h}^T.
class ProcessSpec {
public:
    ProcessSpec(Vector mu, std::vector<Matrix> coeffs);

    [[nodiscard]] Index p() const noexcept { return mu_.size(); }
    [[nodiscard]] int M() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] const Vector& mu() const noexcept { return mu_; }
    [[nodiscard]] const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }

    /// Same loadings, different mean.
    [[nodiscard]] ProcessSpec with_mean(Vector mu) const;

private:
    Vector mu_;
    std::vector<Matrix> coeffs_;
};

/// Autocovariances Gamma(0..M) of a stationary process.
class AutocovSequence {
public:
    explicit AutocovSequence(std::vector<Matrix> gammas);

    [[nodiscard]] int M() const noexcept { return static_cast<int>(gammas_.size()) - 1; }
    [[nodiscard]] Index p() const noexcept { return gammas_.front().rows(); }

    /// Gamma(h) for any integer h: Gamma(-h) = Gamma(h)^T, zero beyond M.
    [[nodiscard]] Matrix at(int h) const;
    /// tr Gamma(h); symmetric in h.
    [[nodiscard]] double trace(int h) const;
    [[nodiscard]] const std::vector<Matrix>& gammas() const noexcept { return gammas_; }

    /// Every Gamma(h) multiplied by c.
    [[nodiscard]] AutocovSequence scaled(double c) const;

private:
    std::vector<Matrix> gammas_;
};

[[nodiscard]] AutocovSequence implied_autocov(const ProcessSpec& spec);

/// n consecutive observations of the process. Deterministic in (spec, n, seed):
/// innovation eps_s is drawn from its own stream keyed by (seed, s), with M
/// innovations before t = 1 so the first row is already stationary.
/// Throws InvalidData for n < 2.
[[nodiscard]] SampleMatrix sample_path(const ProcessSpec& spec, Index n, std::uint64_t seed);

/// Omega_n = sum_{|h| <= M} (1 - |h|/n) Gamma(h). Throws BlockError if n <= M.
[[nodiscard]] Matrix omega_n(const AutocovSequence& gam, Index n);

/// JSON layout: {"p": int, "M": int, "mu": [..p..], "coeffs": [[..p*p row-major..], ...]}.
/// On input, "mu" may also be a single number (constant vector) and each
/// coefficient may be a number c (c * I) or {"diag": [..p..]}.
[[nodiscard]] nlohmann::json to_json(const ProcessSpec& spec);
[[nodiscard]] ProcessSpec process_spec_from_json(const nlohmann::json& j);

}  // namespace hdmean
