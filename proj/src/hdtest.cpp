#include "hdmean/hdtest.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "hdmean/autocov.hpp"
#include "hdmean/errors.hpp"

namespace hdmean {

std::string_view to_string(VarianceMethod m) noexcept {
    switch (m) {
        case VarianceMethod::plugin: return "plugin";
        case VarianceMethod::split: return "split";
    }
    return "unknown";
}

VarianceMethod parse_variance_method(std::string_view name) {
    if (name == "plugin") return VarianceMethod::plugin;
    if (name == "split") return VarianceMethod::split;
    throw InvalidData("unknown variance method '" + std::string(name) + "' (expected plugin or split)");
}

nlohmann::json to_json(const TestResult& r) {
    nlohmann::json meta{{"n", r.meta.n1}, {"p", r.meta.p}, {"M", r.meta.M},
                        {"variance_method", std::string(to_string(r.meta.method))}};
    if (r.meta.n2) {
        meta.erase("n");
        meta["n1"] = r.meta.n1;
        meta["n2"] = *r.meta.n2;
    }
    return nlohmann::json{{"m_stat", r.m_stat}, {"var_hat", r.var_hat}, {"z", r.z},
                          {"p_value", r.p_value}, {"reject", r.reject}, {"alpha", r.alpha},
                          {"meta", std::move(meta)}};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_upper_tail(double z) {
    const double q = 0.5 * std::erfc(z / std::sqrt(2.0));
    return q < 1e-300 ? 0.0 : q;
}

double upper_critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidData("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(boost::math::complement(standard, alpha));
}

double m_statistic(const SampleMatrix& x, int M) {
    if (M < 0 || M >= x.n()) {
        throw LagError("lag M = " + std::to_string(M) + " out of range for n = " + std::to_string(x.n()));
    }
    const EstimatorSystem sys = estimator_system(x.n(), M);
    return x.mean().squaredNorm() - trace_omega_hat(x, sys) / static_cast<double>(x.n());
}

double var_mn_population(const AutocovSequence& gam, Index n) {
    const Matrix omega = omega_n(gam, n);
    const double nn = static_cast<double>(n);
    return 2.0 * omega.squaredNorm() / (nn * nn);
}

namespace {

std::vector<double> taper_weights(Index n, int M) {
    std::vector<double> w(static_cast<std::size_t>(2 * M + 1));
    for (int h = -M; h <= M; ++h) {
        w[static_cast<std::size_t>(h + M)] = 1.0 - std::abs(h) / static_cast<double>(n);
    }
    return w;
}

struct Halves {
    Matrix first;
    Matrix second;
};

Halves split_halves(const SampleMatrix& x, int M) {
    const Index n = x.n();
    const Index n1 = (n - M) / 2;
    const Index n2 = n - n1 - M;
    const Index need = 2 * static_cast<Index>(M) + 3;
    if (n1 < need || n2 < need) {
        throw BlockError("series of length " + std::to_string(n) + " is too short to split with M = " +
                         std::to_string(M));
    }
    const Matrix& v = x.values();
    Halves h{v.topRows(n1), v.bottomRows(n2)};
    h.first = h.first.rowwise() - h.first.colwise().mean();
    h.second = h.second.rowwise() - h.second.colwise().mean();
    return h;
}

// tr(Gamma_hat(0))^2 / p lower-bounds tr(Omega^2)-sized quantities; used as the
// reference for the degeneracy floor.
double degeneracy_floor(const SampleMatrix& x) {
    const double g0 = x.centered().squaredNorm() / static_cast<double>(x.n());
    return 1e-12 * g0 * g0 / static_cast<double>(x.p());
}

double checked(double estimate, double floor, const char* what) {
    if (!(estimate > floor)) {
        throw DegenerateVariance(std::string(what) + " is not positive (" + std::to_string(estimate) + ")");
    }
    return estimate;
}

}  // namespace

double trace_omega_sq_plugin(const SampleMatrix& x, int M) {
    const GramMatrix gram = centered_gram(x);
    const auto w = taper_weights(x.n(), M);
    const double nn = static_cast<double>(x.n());
    return weighted_cross_trace(gram.g, w, w) / (nn * nn);
}

double trace_omega_sq_split(const SampleMatrix& x, int M) {
    const Halves h = split_halves(x, M);
    const Index n1 = h.first.rows();
    const Index n2 = h.second.rows();
    const auto w1 = omega_hat_lag_weights(estimator_system(n1, M, x.n()));
    const auto w2 = omega_hat_lag_weights(estimator_system(n2, M, x.n()));
    const Matrix k = h.first * h.second.transpose();
    return weighted_cross_trace(k, w1, w2) / (static_cast<double>(n1) * static_cast<double>(n2));
}

double var_mn_hat(const SampleMatrix& x, int M, VarianceMethod method) {
    if (M < 0 || 4 * static_cast<Index>(M) >= x.n()) {
        throw LagError("variance estimation needs 0 <= M < n/4 (n = " + std::to_string(x.n()) +
                       ", M = " + std::to_string(M) + ")");
    }
    const double tr2 = method == VarianceMethod::plugin ? trace_omega_sq_plugin(x, M)
                                                        : trace_omega_sq_split(x, M);
    const double nn = static_cast<double>(x.n());
    const double scale = 2.0 / (nn * nn);
    return checked(scale * tr2, scale * degeneracy_floor(x), "variance estimate");
}

TestResult one_sample_test(const SampleMatrix& x, int M, double alpha, VarianceMethod method) {
    const double z_alpha = upper_critical_value(alpha);
    TestResult r;
    r.alpha = alpha;
    r.m_stat = m_statistic(x, M);
    r.var_hat = var_mn_hat(x, M, method);
    r.z = r.m_stat / std::sqrt(r.var_hat);
    r.p_value = normal_upper_tail(r.z);
    r.reject = r.z > z_alpha;
    r.meta = TestMeta{x.n(), std::nullopt, x.p(), M, method};
    return r;
}

namespace {

void require_same_dimension(const SampleMatrix& x1, const SampleMatrix& x2) {
    if (x1.p() != x2.p()) {
        throw InvalidData("groups have different dimensions (" + std::to_string(x1.p()) + " vs " +
                          std::to_string(x2.p()) + ")");
    }
}

}  // namespace

double two_sample_statistic(const SampleMatrix& x1, const SampleMatrix& x2, int M) {
    require_same_dimension(x1, x2);
    if (M < 0 || M >= std::min(x1.n(), x2.n())) {
        throw LagError("lag M = " + std::to_string(M) + " out of range for the group sizes");
    }
    const double n1 = static_cast<double>(x1.n());
    const double n2 = static_cast<double>(x2.n());
    const double tr1 = trace_omega_hat(x1, estimator_system(x1.n(), M));
    const double tr2 = trace_omega_hat(x2, estimator_system(x2.n(), M));
    return (x1.mean() - x2.mean()).squaredNorm() - tr1 / n1 - tr2 / n2;
}

double two_sample_variance(const AutocovSequence& gam1, const AutocovSequence& gam2, Index n1,
                           Index n2) {
    if (gam1.p() != gam2.p()) throw InvalidData("autocovariance dimensions differ");
    const Matrix o1 = omega_n(gam1, n1);
    const Matrix o2 = omega_n(gam2, n2);
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    return 2.0 * o1.squaredNorm() / (a * a) + 2.0 * o2.squaredNorm() / (b * b) +
           4.0 * o1.cwiseProduct(o2).sum() / (a * b);
}

double two_sample_var_hat(const SampleMatrix& x1, const SampleMatrix& x2, int M,
                          VarianceMethod method) {
    require_same_dimension(x1, x2);
    for (const SampleMatrix* x : {&x1, &x2}) {
        if (M < 0 || 4 * static_cast<Index>(M) >= x->n()) {
            throw LagError("variance estimation needs 0 <= M < n/4 in each group");
        }
    }
    const double a = static_cast<double>(x1.n());
    const double b = static_cast<double>(x2.n());
    const Matrix k = x1.centered() * x2.centered().transpose();
    double own1 = 0.0;
    double own2 = 0.0;
    double cross = 0.0;
    if (method == VarianceMethod::plugin) {
        own1 = trace_omega_sq_plugin(x1, M);
        own2 = trace_omega_sq_plugin(x2, M);
        cross = weighted_cross_trace(k, taper_weights(x1.n(), M), taper_weights(x2.n(), M));
    } else {
        own1 = trace_omega_sq_split(x1, M);
        own2 = trace_omega_sq_split(x2, M);
        cross = weighted_cross_trace(k, omega_hat_lag_weights(estimator_system(x1.n(), M)),
                                     omega_hat_lag_weights(estimator_system(x2.n(), M)));
    }
    cross /= a * b;
    const double estimate = 2.0 * own1 / (a * a) + 2.0 * own2 / (b * b) + 4.0 * cross / (a * b);
    const double floor = 2.0 * std::min(degeneracy_floor(x1) / (a * a), degeneracy_floor(x2) / (b * b));
    return checked(estimate, floor, "two-sample variance estimate");
}

TestResult two_sample_test(const SampleMatrix& x1, const SampleMatrix& x2, int M, double alpha,
                           VarianceMethod method) {
    const double z_alpha = upper_critical_value(alpha);
    TestResult r;
    r.alpha = alpha;
    r.m_stat = two_sample_statistic(x1, x2, M);
    r.var_hat = two_sample_var_hat(x1, x2, M, method);
    r.z = r.m_stat / std::sqrt(r.var_hat);
    r.p_value = normal_upper_tail(r.z);
    r.reject = r.z > z_alpha;
    r.meta = TestMeta{x1.n(), x2.n(), x1.p(), M, method};
    return r;
}

PowerReport asymptotic_power(const Vector& mu, const AutocovSequence& gam, Index n, double alpha) {
    if (mu.size() != gam.p()) throw InvalidData("mean vector and autocovariance dimensions differ");
    const double z_alpha = upper_critical_value(alpha);
    const Matrix omega = omega_n(gam, n);
    const double tr_omega_sq = omega.squaredNorm();
    const double nn = static_cast<double>(n);
    PowerReport out;
    out.ncp = nn * mu.squaredNorm() / std::sqrt(2.0 * tr_omega_sq);
    out.power = normal_cdf(-z_alpha + out.ncp);
    const double denom = tr_omega_sq / (static_cast<double>(gam.M() + 1) * nn);
    out.local_alt_ratios.resize(gam.M() + 1);
    for (int h = 0; h <= gam.M(); ++h) {
        const Matrix g = gam.at(h);
        const Matrix root = psd_sqrt(g * g.transpose());
        out.local_alt_ratios(h) = mu.dot(root * mu) / denom;
    }
    return out;
}

}  // namespace hdmean
