#include "hdmean/procsim.hpp"

#include <random>
#include <string>

#include "hdmean/errors.hpp"
#include "hdmean/rng.hpp"

namespace hdmean {

ProcessSpec::ProcessSpec(Vector mu, std::vector<Matrix> coeffs)
    : mu_(std::move(mu)), coeffs_(std::move(coeffs)) {
    if (mu_.size() < 1) throw InvalidData("process dimension must be at least 1");
    if (coeffs_.empty()) throw InvalidData("process needs at least one loading matrix A_0");
    if (!mu_.allFinite()) throw InvalidData("process mean has non-finite entries");
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
        const Matrix& a = coeffs_[j];
        if (a.rows() != mu_.size() || a.cols() != mu_.size()) {
            throw InvalidData("loading A_" + std::to_string(j) + " is not " +
                              std::to_string(mu_.size()) + "x" + std::to_string(mu_.size()));
        }
        if (!a.allFinite()) {
            throw InvalidData("loading A_" + std::to_string(j) + " has non-finite entries");
        }
    }
}

ProcessSpec ProcessSpec::with_mean(Vector mu) const { return ProcessSpec(std::move(mu), coeffs_); }

AutocovSequence::AutocovSequence(std::vector<Matrix> gammas) : gammas_(std::move(gammas)) {
    if (gammas_.empty()) throw InvalidData("autocovariance sequence is empty");
    const Index p = gammas_.front().rows();
    for (const Matrix& g : gammas_) {
        if (g.rows() != p || g.cols() != p) {
            throw InvalidData("autocovariance matrices must all be square of the same size");
        }
        if (!g.allFinite()) throw InvalidData("autocovariance has non-finite entries");
    }
    const Matrix& g0 = gammas_.front();
    if ((g0 - g0.transpose()).norm() > 1e-8 * tolerance_scale(g0)) {
        throw InvalidData("Gamma(0) is not symmetric");
    }
}

Matrix AutocovSequence::at(int h) const {
    const int a = h < 0 ? -h : h;
    if (a > M()) return Matrix::Zero(p(), p());
    const Matrix& g = gammas_[static_cast<std::size_t>(a)];
    return h < 0 ? Matrix(g.transpose()) : g;
}

double AutocovSequence::trace(int h) const {
    const int a = h < 0 ? -h : h;
    return a > M() ? 0.0 : gammas_[static_cast<std::size_t>(a)].trace();
}

AutocovSequence AutocovSequence::scaled(double c) const {
    std::vector<Matrix> out;
    out.reserve(gammas_.size());
    for (const Matrix& g : gammas_) out.emplace_back(c * g);
    return AutocovSequence(std::move(out));
}

AutocovSequence implied_autocov(const ProcessSpec& spec) {
    const auto& a = spec.coeffs();
    const int m = spec.M();
    std::vector<Matrix> gammas;
    gammas.reserve(a.size());
    for (int h = 0; h <= m; ++h) {
        Matrix g = Matrix::Zero(spec.p(), spec.p());
        for (int j = 0; j + h <= m; ++j) {
            g.noalias() += a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j + h)].transpose();
        }
        gammas.push_back(std::move(g));
    }
    // Gamma(0) = sum A_j A_j^T is symmetric in exact arithmetic.
    gammas.front() = 0.5 * (gammas.front() + gammas.front().transpose()).eval();
    return AutocovSequence(std::move(gammas));
}

SampleMatrix sample_path(const ProcessSpec& spec, Index n, std::uint64_t seed) {
    if (n < 2) throw InvalidData("sample path length must be at least 2");
    const int m = spec.M();
    const Index p = spec.p();
    // Row i holds eps_{i - M + 1} (1-based time), i.e. M burn-in innovations first.
    Matrix eps(n + m, p);
    for (Index i = 0; i < n + m; ++i) {
        SplitMix64 engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index c = 0; c < p; ++c) eps(i, c) = normal(engine);
    }
    Matrix x = spec.mu().transpose().replicate(n, 1);
    for (int j = 0; j <= m; ++j) {
        const Matrix& a = spec.coeffs()[static_cast<std::size_t>(j)];
        const Vector d = a.diagonal();
        if ((a - Matrix(d.asDiagonal())).isZero(0.0)) {
            x.noalias() += eps.middleRows(m - j, n) * d.asDiagonal();
        } else {
            x.noalias() += eps.middleRows(m - j, n) * a.transpose();
        }
    }
    return SampleMatrix(std::move(x));
}

Matrix omega_n(const AutocovSequence& gam, Index n) {
    if (n <= gam.M()) {
        throw BlockError("Omega_n needs n > M (n = " + std::to_string(n) +
                         ", M = " + std::to_string(gam.M()) + ")");
    }
    Matrix omega = gam.gammas().front();
    const double nn = static_cast<double>(n);
    for (int h = 1; h <= gam.M(); ++h) {
        const Matrix& g = gam.gammas()[static_cast<std::size_t>(h)];
        omega += (1.0 - h / nn) * (g + g.transpose());
    }
    return omega;
}

nlohmann::json to_json(const ProcessSpec& spec) {
    nlohmann::json j;
    j["p"] = spec.p();
    j["M"] = spec.M();
    j["mu"] = std::vector<double>(spec.mu().data(), spec.mu().data() + spec.p());
    nlohmann::json coeffs = nlohmann::json::array();
    for (const Matrix& a : spec.coeffs()) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(a.size()));
        for (Index r = 0; r < a.rows(); ++r) {
            for (Index c = 0; c < a.cols(); ++c) flat.push_back(a(r, c));
        }
        coeffs.push_back(std::move(flat));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

ProcessSpec process_spec_from_json(const nlohmann::json& j) {
    try {
        const auto p = j.at("p").get<Index>();
        const auto m = j.at("M").get<int>();
        if (p < 1) throw InvalidData("spec field p must be >= 1");
        if (m < 0) throw InvalidData("spec field M must be >= 0");
        const auto& mu_j = j.at("mu");
        const auto mu = mu_j.is_number() ? std::vector<double>(static_cast<std::size_t>(p), mu_j.get<double>())
                                         : mu_j.get<std::vector<double>>();
        if (static_cast<Index>(mu.size()) != p) {
            throw InvalidData("spec mu has " + std::to_string(mu.size()) + " entries, expected p = " +
                              std::to_string(p));
        }
        const auto& cj = j.at("coeffs");
        if (!cj.is_array() || static_cast<int>(cj.size()) != m + 1) {
            throw InvalidData("spec coeffs must hold M + 1 = " + std::to_string(m + 1) + " matrices");
        }
        std::vector<Matrix> coeffs;
        for (const auto& flat_j : cj) {
            if (flat_j.is_number()) {
                coeffs.emplace_back(flat_j.get<double>() * Matrix::Identity(p, p));
                continue;
            }
            if (flat_j.is_object()) {
                const auto diag = flat_j.at("diag").get<std::vector<double>>();
                if (static_cast<Index>(diag.size()) != p) {
                    throw InvalidData("diagonal loading needs p = " + std::to_string(p) + " entries");
                }
                coeffs.emplace_back(Eigen::Map<const Vector>(diag.data(), p).asDiagonal());
                continue;
            }
            const auto flat = flat_j.get<std::vector<double>>();
            if (static_cast<Index>(flat.size()) != p * p) {
                throw InvalidData("each coefficient matrix needs p*p = " + std::to_string(p * p) +
                                  " row-major entries");
            }
            Matrix a(p, p);
            for (Index r = 0; r < p; ++r) {
                for (Index c = 0; c < p; ++c) a(r, c) = flat[static_cast<std::size_t>(r * p + c)];
            }
            coeffs.push_back(std::move(a));
        }
        return ProcessSpec(Eigen::Map<const Vector>(mu.data(), p), std::move(coeffs));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidData(std::string("malformed process spec: ") + e.what());
    }
}

}  // namespace hdmean
