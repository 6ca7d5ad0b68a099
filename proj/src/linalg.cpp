#include "hdmean/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "hdmean/errors.hpp"

namespace hdmean {

SampleMatrix::SampleMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 2) {
        throw InvalidData("sample matrix needs at least 2 rows, got " +
                          std::to_string(data_.rows()));
    }
    if (data_.cols() < 1) {
        throw InvalidData("sample matrix needs at least 1 column");
    }
    if (!data_.allFinite()) {
        throw InvalidData("sample matrix contains non-finite entries");
    }
}

Vector SampleMatrix::mean() const { return data_.colwise().mean().transpose(); }

Matrix SampleMatrix::centered() const {
    return data_.rowwise() - data_.colwise().mean();
}

GramMatrix centered_gram(const SampleMatrix& x) {
    const Matrix z = x.centered();
    Matrix g = Matrix::Zero(x.n(), x.n());
    g.selfadjointView<Eigen::Lower>().rankUpdate(z);
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return GramMatrix{std::move(g)};
}

double tolerance_scale(const Matrix& a) { return std::max(1.0, a.norm()); }

double lagged_cross_trace(const Matrix& k, int a, int b) {
    const Index n1 = k.rows();
    const Index n2 = k.cols();
    const Index t0 = std::max<Index>(0, -a);
    const Index t1 = std::min<Index>(n1, n1 - a);
    const Index s0 = std::max<Index>(0, -b);
    const Index s1 = std::min<Index>(n2, n2 - b);
    if (t1 <= t0 || s1 <= s0) return 0.0;
    const Index len = t1 - t0;
    double total = 0.0;
    for (Index s = s0; s < s1; ++s) {
        total += k.col(s).segment(t0 + a, len).dot(k.col(s + b).segment(t0, len));
    }
    return total;
}

double trace_autocov_product(const GramMatrix& gram, int a, int b, Index n) {
    if (n != gram.n()) {
        throw InvalidData("Gram matrix is " + std::to_string(gram.n()) + "x" +
                          std::to_string(gram.n()) + " but n = " + std::to_string(n));
    }
    if (std::abs(a) > n - 1 || std::abs(b) > n - 1) {
        throw LagError("lags (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") out of range for n = " + std::to_string(n));
    }
    const double nn = static_cast<double>(n);
    return lagged_cross_trace(gram.g, a, b) / (nn * nn);
}

namespace {

// Banded Toeplitz product W * K with W(t, u) = w(u - t), lags -L..L.
Matrix band_left(std::span<const double> w, const Matrix& k) {
    const int lmax = static_cast<int>(w.size() / 2);
    const Index n = k.rows();
    Matrix out = Matrix::Zero(n, k.cols());
    for (int h = -lmax; h <= lmax; ++h) {
        const double wh = w[static_cast<std::size_t>(h + lmax)];
        if (wh == 0.0) continue;
        const Index t0 = std::max<Index>(0, -h);
        const Index t1 = std::min<Index>(n, n - h);
        if (t1 <= t0) continue;
        out.middleRows(t0, t1 - t0) += wh * k.middleRows(t0 + h, t1 - t0);
    }
    return out;
}

// K * W with W(s, v) = w(v - s).
Matrix band_right(const Matrix& k, std::span<const double> w) {
    const int lmax = static_cast<int>(w.size() / 2);
    const Index n = k.cols();
    Matrix out = Matrix::Zero(k.rows(), n);
    for (int h = -lmax; h <= lmax; ++h) {
        const double wh = w[static_cast<std::size_t>(h + lmax)];
        if (wh == 0.0) continue;
        // out(:, v) += w(h) K(:, v - h)
        const Index v0 = std::max<Index>(0, h);
        const Index v1 = std::min<Index>(n, n + h);
        if (v1 <= v0) continue;
        out.middleCols(v0, v1 - v0) += wh * k.middleCols(v0 - h, v1 - v0);
    }
    return out;
}

}  // namespace

double weighted_cross_trace(const Matrix& k, std::span<const double> w1,
                            std::span<const double> w2) {
    if (w1.size() % 2 == 0 || w2.size() % 2 == 0) {
        throw InvalidData("lag weight vectors must have odd length 2L + 1");
    }
    const Matrix wk = band_right(band_left(w1, k), w2);
    return wk.cwiseProduct(k).sum();
}

Matrix psd_sqrt(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw NotPSD("matrix is not square");
    }
    const double scale = tolerance_scale(s);
    if ((s - s.transpose()).norm() > 1e-8 * scale) {
        throw NotPSD("matrix is not symmetric");
    }
    const Matrix sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw NotPSD("eigendecomposition failed");
    }
    Vector lambda = eig.eigenvalues();
    if (lambda.size() > 0 && lambda.minCoeff() < -1e-10 * scale) {
        throw NotPSD("matrix has a negative eigenvalue " + std::to_string(lambda.minCoeff()));
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    const Matrix& v = eig.eigenvectors();
    Matrix r = v * lambda.asDiagonal() * v.transpose();
    return 0.5 * (r + r.transpose());
}

}  // namespace hdmean
