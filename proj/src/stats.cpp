#include "hdmean/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hdmean/errors.hpp"
#include "hdmean/hdtest.hpp"

namespace hdmean {

MeanSe mean_se(std::span<const double> v) {
    if (v.size() < 2) throw InvalidData("need at least two values for a standard error");
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return MeanSe{mean, sd / std::sqrt(n), sd};
}

VarianceSe variance_se(std::span<const double> v) {
    if (v.size() < 2) throw InvalidData("need at least two values for a variance");
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var = m2 / (n - 1.0);
    const double pop2 = m2 / n;
    return VarianceSe{var, std::sqrt(std::max(0.0, m4 / n - pop2 * pop2) / n)};
}

double median(std::span<const double> v) {
    if (v.empty()) throw InvalidData("median of an empty sample");
    std::vector<double> s(v.begin(), v.end());
    const auto mid = s.size() / 2;
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid), s.end());
    const double upper = s[mid];
    if (s.size() % 2 == 1) return upper;
    const double lower = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidData("correlation needs paired samples");
    const MeanSe ma = mean_se(a);
    const MeanSe mb = mean_se(b);
    double sxy = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sxy += (a[i] - ma.mean) * (b[i] - mb.mean);
    sxy /= static_cast<double>(a.size()) - 1.0;
    return sxy / (ma.sd * mb.sd);
}

CovarianceSe covariance_se(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidData("covariance needs paired samples");
    const double ma = mean_se(a).mean;
    const double mb = mean_se(b).mean;
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - ma) * (b[i] - mb);
    const MeanSe m = mean_se(prod);
    const double n = static_cast<double>(a.size());
    return CovarianceSe{m.mean * n / (n - 1.0), m.se};
}

double kolmogorov_upper_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> v) {
    if (v.empty()) throw InvalidData("KS test of an empty sample");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = normal_cdf(s[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double rn = std::sqrt(n);
    // Stephens' small-sample adjustment.
    const double lambda = (rn + 0.12 + 0.11 / rn) * d;
    return KsResult{d, kolmogorov_upper_tail(lambda)};
}

}  // namespace hdmean
