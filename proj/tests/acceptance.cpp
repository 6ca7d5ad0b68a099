// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hdmean/autocov.hpp"
#include "hdmean/blocks.hpp"
#include "hdmean/hdtest.hpp"
#include "hdmean/linalg.hpp"
#include "hdmean/procsim.hpp"
#include "hdmean/rng.hpp"
#include "hdmean/stats.hpp"
#include "hdmean/study.hpp"
#include "mc_support.hpp"
#include "oracles.hpp"

using namespace hdmean;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

nlohmann::json aggregates(const StudyConfig& cfg) { return run_study(cfg).to_json()["aggregates"]; }

const ProcessSpec& ma1_p50() {
    static const ProcessSpec spec = oracle::diagonal_ma(50, {1.0, 0.5}, 101);
    return spec;
}

// 1. tr_hat(Omega_n) is unbiased.
void unbiased_trace(Outcome& o) {
    StudyConfig cfg;
    cfg.scenario = Scenario::bias;
    cfg.spec = ma1_p50();
    cfg.n = 100;
    cfg.M = 1;
    cfg.reps = 5000;
    cfg.seed = 1001;
    const auto a = aggregates(cfg);
    const double z = a["trace_bias_z"];
    o.require(std::abs(z) <= 3.0, "mean " + fmt(a["mean_trace_omega_hat"]) + " vs " + fmt(a["true_trace_omega"]) +
                                      ", z = " + fmt(z));
}

// 2. E(M_n) = mu^T mu.
void unbiased_statistic(Outcome& o) {
    Vector mu = Vector::LinSpaced(50, 1.0, 2.0);
    mu /= mu.norm();
    int i = 0;
    for (const Vector& m : {Vector(Vector::Zero(50)), mu}) {
        StudyConfig cfg;
        cfg.scenario = Scenario::bias;
        cfg.spec = ma1_p50().with_mean(m);
        cfg.n = 100;
        cfg.M = 1;
        cfg.reps = 5000;
        cfg.seed = 1002 + static_cast<std::uint64_t>(i++);
        const auto a = aggregates(cfg);
        const double z = a["m_stat_bias_z"];
        o.require(std::abs(z) <= 3.0, "|mu|^2 = " + fmt(m.squaredNorm()) + ": mean " + fmt(a["mean_m_stat"]) +
                                          ", z = " + fmt(z));
    }
}

// 3. var(M_n) against (2/n^2) tr(Omega_n^2).
void variance_formula(Outcome& o) {
    const ProcessSpec spec = oracle::diagonal_ma(100, {1.0, 0.5}, 103);
    const Index n = 500;
    const auto stats = run_replicates<double>(100'000, 0, [&](std::size_t r) {
        return m_statistic(sample_path(spec, n, derive_seed(1003, r)), 1);
    });
    const VarianceSe v = variance_se(stats);
    const double pop = var_mn_population(implied_autocov(spec), n);
    const double ratio = v.variance / pop;
    o.require(std::abs(ratio - 1.0) <= 0.10, "var ratio " + fmt(ratio) + " (se " + fmt(v.se / pop) + ")");
}

// 4. Null normality and size, p = 200, n = 400.
void null_normality(Outcome& o) {
    const std::vector<std::vector<double>> scales{{1.0}, {1.0, 0.5}, {1.0, 0.5, 0.3}};
    for (int M = 0; M <= 2; ++M) {
        StudyConfig cfg;
        cfg.scenario = Scenario::size;
        cfg.spec = oracle::diagonal_ma(200, scales[static_cast<std::size_t>(M)], 104 + static_cast<std::uint64_t>(M));
        cfg.n = 400;
        cfg.M = M;
        cfg.reps = 2000;
        cfg.seed = 1004 + static_cast<std::uint64_t>(M);
        const auto a = aggregates(cfg);
        const double ks = a["ks_p_value"];
        const double rate = a["rejection_rate"];
        o.require(ks > 0.01, "M=" + std::to_string(M) + " KS p " + fmt(ks));
        o.require(std::abs(rate - 0.05) <= 0.015, "size " + fmt(rate));
    }
}

// 5. Power curve.
void power_curve(Outcome& o) {
    const ProcessSpec base = oracle::diagonal_ma(200, {1.0, 0.5}, 105);
    const AutocovSequence gam = implied_autocov(base);
    double prev = 0.0;
    int i = 0;
    for (double ncp : {0.5, 1.5, 3.0}) {
        StudyConfig cfg;
        cfg.scenario = Scenario::power;
        cfg.spec = base.with_mean(mc::mean_for_ncp(gam, 400, ncp));
        cfg.n = 400;
        cfg.M = 1;
        cfg.reps = 2000;
        cfg.seed = 1010 + static_cast<std::uint64_t>(i++);
        const auto a = aggregates(cfg);
        const double rate = a["rejection_rate"];
        const double theory = normal_cdf(-upper_critical_value(0.05) + ncp);
        o.require(std::abs(rate - theory) <= 0.10, "ncp " + fmt(ncp) + ": " + fmt(rate) + " vs " + fmt(theory));
        o.require(rate > prev, "monotone");
        prev = rate;
    }
}

// Shared block run for criteria 6 and 7.
const nlohmann::json& block_run() {
    static const nlohmann::json a = [] {
        StudyConfig cfg;
        cfg.scenario = Scenario::blocks;
        cfg.spec = oracle::diagonal_ma(10, {1.0, 0.5}, 106);
        cfg.n = 200;
        cfg.M = 1;
        cfg.reps = 100'000;
        cfg.seed = 1006;
        return aggregates(cfg);
    }();
    return a;
}

// 6. Block identities and variance formulas.
void block_identities(Outcome& o) {
    const auto& a = block_run();
    o.require(a["max_partition_residual"].get<double>() <= 1e-12, "partition " + fmt(a["max_partition_residual"]));
    o.require(a["max_bij_residual"].get<double>() <= 1e-12, "B_ij " + fmt(a["max_bij_residual"]));
    const double r11 = a["var_b11_ratio"];
    const double rs = a["sigma_ratio"];
    o.require(std::abs(r11 - 1.0) <= 0.05, "Var(B11) ratio " + fmt(r11));
    o.require(std::abs(rs - 1.0) <= 0.05, "sigma_n^2 ratio " + fmt(rs));
}

// 7. Uncorrelated but dependent blocks.
void block_dependence(Outcome& o) {
    const auto& a = block_run();
    const double bound = 4.0 / std::sqrt(1e5);
    const double c13 = a["corr_b12_b13"];
    const double c34 = a["corr_b12_b34"];
    const double z = a["cov_b12sq_b13sq_z"];
    o.require(std::abs(c13) < bound, "corr(B12,B13) " + fmt(c13));
    o.require(std::abs(c34) < bound, "corr(B12,B34) " + fmt(c34));
    o.require(z > 4.0, "cov(B12^2,B13^2) z " + fmt(z));
}

// 8. Two-sample size and variance.
void two_sample(Outcome& o) {
    StudyConfig cfg;
    cfg.scenario = Scenario::size;
    cfg.two_sample = true;
    cfg.spec = oracle::diagonal_ma(100, {1.0, 0.5}, 108);
    cfg.n = 300;
    cfg.M = 1;
    cfg.reps = 2000;
    cfg.seed = 1008;
    const auto a = aggregates(cfg);
    const double rate = a["rejection_rate"];
    const double ratio = a["var_ratio"];
    o.require(std::abs(rate - 0.05) <= 0.015, "size " + fmt(rate));
    o.require(std::abs(ratio - 1.0) <= 0.10, "var ratio " + fmt(ratio));
}

// 9. Quadratic-form weights reproduce M_n.
void pi_identity(Outcome& o) {
    std::mt19937_64 gen(1009);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int M = std::uniform_int_distribution<int>(0, 3)(gen);
        const Index n = std::uniform_int_distribution<Index>(2 * M + 3, 30)(gen);
        const Index p = std::uniform_int_distribution<Index>(1, 6)(gen);
        const Matrix x = oracle::random_matrix(n, p, gen()) +
                         Matrix::Constant(n, p, std::uniform_real_distribution<double>(-1.0, 1.0)(gen));
        const SampleMatrix s(x);
        const double m = m_statistic(s, M);
        const double q = pi_weights(estimator_system(n, M)).apply(s);
        worst = std::max(worst, std::abs(q - m) / std::max(1.0, std::abs(m)));
    }
    o.require(worst <= 1e-10, "max relative error " + fmt(worst));
}

// 10. Gram-path kernels against explicit p x p matrices.
void kernel_equivalence(Outcome& o) {
    std::mt19937_64 gen(1010);
    double worst = 0.0;
    int count = 0;
    for (Index p : {1, 3, 40, 150}) {
        for (Index n : {8, 25, 60}) {
            const Matrix x = oracle::random_matrix(n, p, gen());
            const GramMatrix g = centered_gram(SampleMatrix(x));
            for (int a = -3; a <= 3; ++a)
                for (int b = -3; b <= 3; ++b) {
                    const double ref = oracle::trace_product(x, a, b);
                    const double got = trace_autocov_product(g, a, b, n);
                    worst = std::max(worst, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
                    ++count;
                }
            const Vector lt = lag_traces(SampleMatrix(x), 3);
            for (int h = 0; h <= 3; ++h) {
                const double ref = oracle::autocov(x, h).trace();
                worst = std::max(worst, std::abs(lt(h) - ref) / std::max(1.0, std::abs(ref)));
            }
        }
    }
    o.require(worst <= 1e-8, std::to_string(count) + " lag pairs, max relative error " + fmt(worst));
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select criteria by number; default runs all.
    std::vector<bool> selected;
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"unbiased trace estimator", unbiased_trace},
        {"E(M_n) = mu^T mu", unbiased_statistic},
        {"variance of M_n", variance_formula},
        {"null normality and size", null_normality},
        {"power curve", power_curve},
        {"block identities", block_identities},
        {"uncorrelated but dependent blocks", block_dependence},
        {"two-sample size and variance", two_sample},
        {"quadratic-form weights", pi_identity},
        {"kernel equivalence", kernel_equivalence},
    };
    selected.assign(criteria.size(), argc < 2);
    for (int a = 1; a < argc; ++a) {
        const int k = std::atoi(argv[a]);
        if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[static_cast<std::size_t>(k - 1)] = true;
    }
    int failures = 0;
    int ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected[i]) continue;
        ++ran;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("criterion %2zu %s  %-34s %s (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
