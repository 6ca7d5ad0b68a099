#pragma once

#include <span>

namespace hdmean {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  ///< sd / sqrt(count)
    double sd = 0.0;  ///< sample standard deviation (divisor count - 1)
};

[[nodiscard]] MeanSe mean_se(std::span<const double> v);

/// Sample variance with an approximate standard error, sqrt((m4 - s^4) / count).
struct VarianceSe {
    double variance = 0.0;
    double se = 0.0;
};

[[nodiscard]] VarianceSe variance_se(std::span<const double> v);

[[nodiscard]] double median(std::span<const double> v);

/// Pearson correlation.
[[nodiscard]] double correlation(std::span<const double> a, std::span<const double> b);

/// Sample covariance with the standard error of the mean of centered cross products.
struct CovarianceSe {
    double covariance = 0.0;
    double se = 0.0;
};

[[nodiscard]] CovarianceSe covariance_se(std::span<const double> a, std::span<const double> b);

struct KsResult {
    double statistic = 0.0;  ///< sup |F_n - Phi|
    double p_value = 1.0;    ///< asymptotic Kolmogorov distribution
};

/// One-sample Kolmogorov-Smirnov test against N(0, 1).
[[nodiscard]] KsResult ks_test_normal(std::span<const double> v);

/// P(K > lambda) for the Kolmogorov limiting distribution.
[[nodiscard]] double kolmogorov_upper_tail(double lambda);

}  // namespace hdmean
