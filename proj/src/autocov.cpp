#include "hdmean/autocov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hdmean/errors.hpp"

namespace hdmean {

Matrix sample_autocov(const SampleMatrix& x, int h) {
    const Index n = x.n();
    const int a = std::abs(h);
    if (a >= n) {
        throw LagError("lag " + std::to_string(h) + " out of range for n = " + std::to_string(n));
    }
    const Matrix z = x.centered();
    Matrix g = z.topRows(n - a).transpose() * z.bottomRows(n - a) / static_cast<double>(n);
    if (h < 0) g.transposeInPlace();
    return g;
}

Vector lag_traces(const SampleMatrix& x, int M) {
    const Index n = x.n();
    if (M < 0 || M >= n) {
        throw LagError("max lag " + std::to_string(M) + " out of range for n = " + std::to_string(n));
    }
    const Matrix z = x.centered();
    Vector out(M + 1);
    for (int h = 0; h <= M; ++h) {
        out(h) = z.topRows(n - h).cwiseProduct(z.bottomRows(n - h)).sum() / static_cast<double>(n);
    }
    return out;
}

Vector weight_vector(Index n, int M) {
    if (M < 0 || n <= M) {
        throw SystemError("weight vector needs 0 <= M < n");
    }
    Vector b(M + 1);
    b(0) = 1.0;
    for (int h = 1; h <= M; ++h) b(h) = 2.0 * (1.0 - static_cast<double>(h) / static_cast<double>(n));
    return b;
}

namespace {

// #{t in [1, len] : t + d in [1, n]}
double shifted_count(Index len, Index n, Index d) {
    const Index lo = std::max<Index>(1, 1 - d);
    const Index hi = std::min<Index>(len, n - d);
    return hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
}

double condition_number(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

Matrix coefficient_matrix(Index n, int M) {
    if (M < 0) throw SystemError("lag M must be nonnegative");
    if (n <= 2 * static_cast<Index>(M) + 2) {
        throw SystemError("coefficient matrix needs n > 2M + 2 (n = " + std::to_string(n) +
                          ", M = " + std::to_string(M) + ")");
    }
    const double nn = static_cast<double>(n);
    Matrix theta(M + 1, M + 1);
    for (int h = 0; h <= M; ++h) {
        const Index len = n - h;
        for (int k = 0; k <= M; ++k) {
            // Lags d with tr Gamma(d) = tr Gamma(k).
            const Index ds[2] = {k, -k};
            const int nd = k == 0 ? 1 : 2;
            double own_row = 0.0;   // pairs (t, s) with s - t = d
            double lead_row = 0.0;  // pairs (t + h, s) with s - t - h = d
            double all_pairs = 0.0;
            for (int i = 0; i < nd; ++i) {
                own_row += shifted_count(len, n, ds[i]);
                lead_row += shifted_count(len, n, h + ds[i]);
                all_pairs += nn - static_cast<double>(k);
            }
            const double direct = h == k ? static_cast<double>(len) : 0.0;
            theta(h, k) = (direct - (own_row + lead_row) / nn +
                           static_cast<double>(len) * all_pairs / (nn * nn)) / nn;
        }
    }
    const double cond = condition_number(theta);
    if (!(cond <= 1e8)) {
        throw SystemError("coefficient matrix is ill-conditioned (cond = " + std::to_string(cond) + ")");
    }
    return theta;
}

EstimatorSystem estimator_system(Index n, int M) { return estimator_system(n, M, n); }

EstimatorSystem estimator_system(Index n, int M, Index target_n) {
    EstimatorSystem sys;
    sys.n = n;
    sys.M = M;
    sys.theta = coefficient_matrix(n, M);
    sys.b = weight_vector(target_n, M);
    // E[beta^T gamma_hat] = (theta^T beta)^T gamma, so unbiasedness needs theta^T beta = b.
    sys.beta = sys.theta.transpose().fullPivLu().solve(sys.b);
    sys.cond = condition_number(sys.theta);
    const double residual = (sys.theta.transpose() * sys.beta - sys.b).norm();
    if (!(residual <= 1e-9 * std::max(1.0, sys.b.norm()))) {
        throw SystemError("estimator system solve residual " + std::to_string(residual));
    }
    return sys;
}

double trace_omega_hat(const SampleMatrix& x, const EstimatorSystem& sys) {
    if (x.n() != sys.n) {
        throw InvalidData("estimator system built for n = " + std::to_string(sys.n) +
                          " applied to n = " + std::to_string(x.n()));
    }
    return sys.beta.dot(lag_traces(x, sys.M));
}

Matrix omega_hat(const SampleMatrix& x, const EstimatorSystem& sys) {
    if (x.n() != sys.n) {
        throw InvalidData("estimator system built for n = " + std::to_string(sys.n) +
                          " applied to n = " + std::to_string(x.n()));
    }
    Matrix out = sys.beta(0) * sample_autocov(x, 0);
    for (int h = 1; h <= sys.M; ++h) {
        const Matrix g = sample_autocov(x, h);
        out += 0.5 * sys.beta(h) * (g + g.transpose());
    }
    return 0.5 * (out + out.transpose());
}

std::vector<double> omega_hat_lag_weights(const EstimatorSystem& sys) {
    std::vector<double> w(static_cast<std::size_t>(2 * sys.M + 1), 0.0);
    const auto mid = static_cast<std::size_t>(sys.M);
    w[mid] = sys.beta(0);
    for (int h = 1; h <= sys.M; ++h) {
        w[mid + static_cast<std::size_t>(h)] = 0.5 * sys.beta(h);
        w[mid - static_cast<std::size_t>(h)] = 0.5 * sys.beta(h);
    }
    return w;
}

double PiWeights::apply(const SampleMatrix& x) const {
    if (weights.rows() != x.n()) {
        throw InvalidData("pi weights built for n = " + std::to_string(weights.rows()) +
                          " applied to n = " + std::to_string(x.n()));
    }
    const Matrix& v = x.values();
    return (weights * v).cwiseProduct(v).sum();
}

namespace {

double pi_constant(const EstimatorSystem& sys) {
    const double nn = static_cast<double>(sys.n);
    double s = 0.0;
    for (int h = 0; h <= sys.M; ++h) s += (1.0 - h / nn) * sys.beta(h);
    return (1.0 - s / nn) / (nn * nn);
}

}  // namespace

Matrix pi_weights_unsymmetrized(const EstimatorSystem& sys) {
    const Index n = sys.n;
    const double nn = static_cast<double>(n);
    Matrix pi = Matrix::Constant(n, n, pi_constant(sys));
    // 0-based t, s: I(t <= n - h) -> t < n - h, I(s > h) -> s >= h.
    for (int h = 0; h <= sys.M; ++h) {
        const double bh = sys.beta(h);
        for (Index t = 0; t + h < n; ++t) pi(t, t + h) -= bh / (nn * nn);
        const double edge = bh / (nn * nn * nn);
        pi.topRows(n - h).array() += edge;
        pi.rightCols(n - h).array() += edge;
    }
    return pi;
}

PiWeights pi_weights(const EstimatorSystem& sys) {
    const Matrix pi = pi_weights_unsymmetrized(sys);
    return PiWeights{0.5 * (pi + pi.transpose())};
}

Matrix pi_weights_printed(const EstimatorSystem& sys) {
    const Index n = sys.n;
    const double nn = static_cast<double>(n);
    Matrix pi = Matrix::Constant(n, n, pi_constant(sys));
    for (int h = 0; h <= sys.M; ++h) {
        const double bh = sys.beta(h);
        for (Index t = 0; t + h < n; ++t) pi(t, t + h) -= bh / nn;
        const double edge = bh / (nn * nn);
        pi.topRows(n - h).array() += edge;     // I(t <= n - h)
        pi.bottomRows(n - h).array() += edge;  // I(t > h)
    }
    return pi;
}

PiDiscrepancy pi_discrepancy(const EstimatorSystem& sys, const SampleMatrix& probe) {
    const Matrix printed = pi_weights_printed(sys);
    const Matrix derived = pi_weights_unsymmetrized(sys);
    PiDiscrepancy out;
    out.max_abs_diff = (printed - derived).cwiseAbs().maxCoeff();
    const double via_printed = PiWeights{printed}.apply(probe);
    const Vector mean = probe.mean();
    const double m_n = mean.squaredNorm() - trace_omega_hat(probe, sys) / static_cast<double>(sys.n);
    out.identity_residual = std::abs(via_printed - m_n);
    const double scale = std::max(1.0, probe.values().squaredNorm() / static_cast<double>(sys.n));
    out.printed_satisfies_identity = out.identity_residual <= 1e-10 * scale;
    return out;
}

}  // namespace hdmean
