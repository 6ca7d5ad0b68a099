#pragma once

// Shared helpers for the Monte Carlo suites.

#include <cmath>
#include <vector>

#include "hdmean/hdtest.hpp"
#include "hdmean/procsim.hpp"
#include "hdmean/stats.hpp"

namespace mc {

using hdmean::Index;
using hdmean::Matrix;
using hdmean::Vector;

/// Constant mean vector giving noncentrality `ncp` for the one-sample test.
inline Vector mean_for_ncp(const hdmean::AutocovSequence& gam, Index n, double ncp) {
    const Matrix o = hdmean::omega_n(gam, n);
    const double tr2 = (o * o).trace();
    const double p = static_cast<double>(gam.p());
    const double c = std::sqrt(ncp * std::sqrt(2.0 * tr2) / (static_cast<double>(n) * p));
    return Vector::Constant(gam.p(), c);
}

/// |mean - target| <= k * se.
inline bool within_se(const hdmean::MeanSe& est, double target, double k = 3.0) {
    return std::abs(est.mean - target) <= k * est.se;
}

}  // namespace mc
