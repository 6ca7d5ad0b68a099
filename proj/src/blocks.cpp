#include "hdmean/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hdmean/errors.hpp"

namespace hdmean {

BlockScheme BlockScheme::with_width(Index n, int M, Index w) {
    if (M < 0) throw BlockError("lag M must be nonnegative");
    if (w <= M || w > n) {
        throw BlockError("block width " + std::to_string(w) + " must satisfy M < w <= n (M = " +
                         std::to_string(M) + ", n = " + std::to_string(n) + ")");
    }
    BlockScheme s;
    s.n = n;
    s.M = M;
    s.w = w;
    s.k = n / w;
    s.r = n - s.w * s.k;
    return s;
}

BlockScheme block_scheme(Index n, int M, double alpha_exp, double C) {
    if (!(alpha_exp > 0.0 && alpha_exp < 1.0)) throw BlockError("block exponent must lie in (0, 1)");
    if (!(C > 0.0)) throw BlockError("block width constant must be positive");
    if (n < 1 || M < 0) throw BlockError("invalid block scheme arguments");
    const double nn = static_cast<double>(n);
    // Guard against pow/sqrt landing a hair above an exact integer.
    const auto ceil_tol = [](double v) { return static_cast<Index>(std::ceil(v - 1e-9)); };
    const Index by_rate = ceil_tol(C * std::pow(nn, alpha_exp));
    const Index by_lag = static_cast<Index>(M + 1) * ceil_tol(std::sqrt(nn));
    const Index w = std::max(by_rate, by_lag);
    if (w > n) {
        throw BlockError("block width " + std::to_string(w) + " exceeds n = " + std::to_string(n));
    }
    BlockScheme s = BlockScheme::with_width(n, M, w);
    if (s.k < 2) {
        throw BlockError("block scheme has k = " + std::to_string(s.k) + " < 2 blocks (n = " +
                         std::to_string(n) + ", w = " + std::to_string(w) + ")");
    }
    s.alpha_exp = alpha_exp;
    s.C = C;
    return s;
}

Matrix omega_w(const AutocovSequence& gam, const BlockScheme& scheme) {
    if (gam.M() != scheme.M) throw BlockError("autocovariance order differs from the scheme's M");
    const double len = static_cast<double>(scheme.w - scheme.M);
    Matrix out = gam.gammas().front();
    for (int h = 1; h <= gam.M(); ++h) {
        const Matrix& g = gam.gammas()[static_cast<std::size_t>(h)];
        out += (1.0 - h / len) * (g + g.transpose());
    }
    return out;
}

namespace {

double block_factor(const BlockScheme& s) {
    const double wm = static_cast<double>(s.w - s.M);
    const double n2 = static_cast<double>(s.n) * static_cast<double>(s.n);
    return wm * wm / (n2 * n2);
}

// Half-open index range [lo, hi), 0-based.
struct Range {
    Index lo;
    Index hi;
};

// sum_{k in I, l in J} tr Gamma(k - l), counting pairs at each lag.
double trace_mass(const AutocovSequence& gam, Range i, Range j) {
    double total = 0.0;
    for (int d = -gam.M(); d <= gam.M(); ++d) {
        // pairs with k - l = d: k in I and k - d in J
        const Index lo = std::max(i.lo, j.lo + d);
        const Index hi = std::min(i.hi, j.hi + d);
        if (hi > lo) total += static_cast<double>(hi - lo) * gam.trace(d);
    }
    return total;
}

}  // namespace

double sigma_n_sq(const BlockScheme& scheme, const Matrix& omega_w) {
    if (scheme.k < 2) throw BlockError("sigma_n^2 needs at least two blocks");
    const double k = static_cast<double>(scheme.k);
    return 2.0 * k * (k - 1.0) * block_factor(scheme) * omega_w.squaredNorm();
}

double var_b11(const BlockScheme& scheme, const Matrix& omega_w) {
    return 2.0 * block_factor(scheme) * omega_w.squaredNorm();
}

BlockDecomposition decompose(const SampleMatrix& x, const AutocovSequence& gam,
                             const BlockScheme& scheme) {
    if (scheme.n != x.n()) {
        throw BlockError("scheme built for n = " + std::to_string(scheme.n) + " but data has n = " +
                         std::to_string(x.n()));
    }
    if (scheme.w <= scheme.M || scheme.k < 1 || scheme.w * scheme.k + scheme.r != scheme.n ||
        scheme.r < 0 || scheme.r >= scheme.w) {
        throw BlockError("inconsistent block scheme");
    }
    if (gam.p() != x.p()) throw BlockError("autocovariance dimension differs from the data");
    if (gam.M() != scheme.M) throw BlockError("autocovariance order differs from the scheme's M");

    const Matrix& v = x.values();
    const Index k = scheme.k;
    const Index w = scheme.w;
    const Index trimmed = w - scheme.M;
    const double n2 = static_cast<double>(x.n()) * static_cast<double>(x.n());

    Matrix trimmed_sums(k, x.p());
    Matrix full_sums(k, x.p());
    for (Index i = 0; i < k; ++i) {
        trimmed_sums.row(i) = v.middleRows(i * w, trimmed).colwise().sum();
        full_sums.row(i) = v.middleRows(i * w, w).colwise().sum();
    }

    BlockDecomposition out;
    out.Y = trimmed_sums / static_cast<double>(trimmed);
    const Matrix trimmed_inner = trimmed_sums * trimmed_sums.transpose();
    const Matrix full_inner = full_sums * full_sums.transpose();
    out.B.resize(k, k);
    out.D.resize(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            const Range ti{i * w, i * w + trimmed};
            const Range tj{j * w, j * w + trimmed};
            const Range fi{i * w, i * w + w};
            const Range fj{j * w, j * w + w};
            out.B(i, j) = (trimmed_inner(i, j) - trace_mass(gam, ti, tj)) / n2;
            const double full = (full_inner(i, j) - trace_mass(gam, fi, fj)) / n2;
            out.D(i, j) = full - out.B(i, j);
        }
    }

    // Pairs (t, s) with t or s in the remainder: tail x all + head x tail.
    const Index head = w * k;
    const Range head_r{0, head};
    const Range tail_r{head, x.n()};
    const Range all_r{0, x.n()};
    const Vector total = v.colwise().sum().transpose();
    if (scheme.r > 0) {
        const Vector tail = v.bottomRows(scheme.r).colwise().sum().transpose();
        const Vector head_sum = total - tail;
        out.F = (tail.dot(total) + head_sum.dot(tail) - trace_mass(gam, tail_r, all_r) -
                 trace_mass(gam, head_r, tail_r)) / n2;
    }

    const Matrix omega = omega_n(gam, x.n());
    out.sum_a = x.mean().squaredNorm() - omega.trace() / static_cast<double>(x.n());
    out.var_mn = 2.0 * omega.squaredNorm() / n2;
    const double sd = std::sqrt(out.var_mn);
    out.delta11 = out.B.sum() / sd;
    out.delta12 = (out.D.sum() + out.F) / sd;

    const Matrix ow = omega_w(gam, scheme);
    const double kk = static_cast<double>(k);
    out.var_b11 = var_b11(scheme, ow);
    out.sigma_sq = k >= 2 ? sigma_n_sq(scheme, ow) : 0.0;
    out.delta11_standardized = out.B.sum() / std::sqrt(out.sigma_sq + kk * out.var_b11);
    return out;
}

}  // namespace hdmean
