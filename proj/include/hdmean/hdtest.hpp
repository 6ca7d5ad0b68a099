#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hdmean/linalg.hpp"
#include "hdmean/procsim.hpp"

namespace hdmean {

/// How var(M_n) is estimated from data.
///
/// plugin: substitutes the naive autocovariances into (2/n^2) tr(Omega_n^2).
/// split:  (2/n^2) tr(Omega_hat_1 Omega_hat_2) from two halves of the series
///         separated by an M-gap; each half's Omega_hat is unbiased for
///         Omega_n and the halves are independent, so the product is unbiased.
enum class VarianceMethod { plugin, split };

[[nodiscard]] std::string_view to_string(VarianceMethod m) noexcept;
/// Throws InvalidData for unknown names.
[[nodiscard]] VarianceMethod parse_variance_method(std::string_view name);

struct TestMeta {
    Index n1 = 0;
    std::optional<Index> n2;
    Index p = 0;
    int M = 0;
    VarianceMethod method = VarianceMethod::split;
};

struct TestResult {
    double m_stat = 0.0;
    double var_hat = 0.0;
    double z = 0.0;
    double p_value = 1.0;  ///< 1 - Phi(z), upper tail
    bool reject = false;   ///< z > z_alpha
    double alpha = 0.05;
    TestMeta meta;
};

[[nodiscard]] nlohmann::json to_json(const TestResult& r);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double z);
/// 1 - Phi(z), accurate in the upper tail; values below 1e-300 become 0.
[[nodiscard]] double normal_upper_tail(double z);
/// z_alpha = Phi^-1(1 - alpha).
[[nodiscard]] double upper_critical_value(double alpha);

/// M_n = mean^T mean - n^-1 tr_hat(Omega_n).
[[nodiscard]] double m_statistic(const SampleMatrix& x, int M);

/// (2/n^2) tr(Omega_n^2).
[[nodiscard]] double var_mn_population(const AutocovSequence& gam, Index n);

/// Plug-in estimate sum_{h,k} (1 - |h|/n)(1 - |k|/n) tr(Gamma_hat(h) Gamma_hat(k)).
[[nodiscard]] double trace_omega_sq_plugin(const SampleMatrix& x, int M);

/// Split-sample estimate tr(Omega_hat_1 Omega_hat_2); see VarianceMethod.
/// Throws BlockError if a half is too short for its estimator system.
[[nodiscard]] double trace_omega_sq_split(const SampleMatrix& x, int M);

/// Estimate of var(M_n) = (2/n^2) tr(Omega_n^2). Requires 4M < n.
/// Throws DegenerateVariance if the estimate is not strictly positive.
[[nodiscard]] double var_mn_hat(const SampleMatrix& x, int M, VarianceMethod method);

/// One-sided upper test of mu = 0 at level alpha.
[[nodiscard]] TestResult one_sample_test(const SampleMatrix& x, int M, double alpha,
                                         VarianceMethod method = VarianceMethod::split);

/// (mean1 - mean2)^T (mean1 - mean2) - tr_hat(Omega^(1))/n1 - tr_hat(Omega^(2))/n2.
[[nodiscard]] double two_sample_statistic(const SampleMatrix& x1, const SampleMatrix& x2, int M);

/// (2/n1^2) tr(O1^2) + (2/n2^2) tr(O2^2) + (4/(n1 n2)) tr(O1 O2), O_g = Omega_{n_g}^(g).
[[nodiscard]] double two_sample_variance(const AutocovSequence& gam1, const AutocovSequence& gam2,
                                         Index n1, Index n2);

/// Data estimate of two_sample_variance. The cross term uses the full-sample
/// Omega estimates of each group (independent groups, so no bias from squaring).
[[nodiscard]] double two_sample_var_hat(const SampleMatrix& x1, const SampleMatrix& x2, int M,
                                        VarianceMethod method);

[[nodiscard]] TestResult two_sample_test(const SampleMatrix& x1, const SampleMatrix& x2, int M,
                                         double alpha,
                                         VarianceMethod method = VarianceMethod::split);

struct PowerReport {
    double power = 0.0;
    double ncp = 0.0;  ///< n mu^T mu / sqrt(2 tr Omega_n^2)
    /// Entry h: mu^T [Gamma(h) Gamma(-h)]^{1/2} mu / ((M+1)^-1 n^-1 tr Omega_n^2).
    /// Finite-sample diagnostic for the local-alternative rate condition.
    Vector local_alt_ratios;
};

/// Phi(-z_alpha + ncp).
[[nodiscard]] PowerReport asymptotic_power(const Vector& mu, const AutocovSequence& gam, Index n,
                                           double alpha);

}  // namespace hdmean
