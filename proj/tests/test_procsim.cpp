#include "doctest.h"

#include <cmath>
#include <vector>

#include "hdmean/errors.hpp"
#include "hdmean/procsim.hpp"
#include "hdmean/stats.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace hdmean;

namespace {

ProcessSpec scalar_ma(std::vector<double> a, double mu = 0.0) {
    std::vector<Matrix> coeffs;
    for (double v : a) coeffs.push_back(Matrix::Constant(1, 1, v));
    return ProcessSpec(Vector::Constant(1, mu), std::move(coeffs));
}

}  // namespace

TEST_CASE("implied_autocov") {
    SUBCASE("white noise") {
        const ProcessSpec spec(Vector::Zero(3), {Matrix::Identity(3, 3)});
        const AutocovSequence gam = implied_autocov(spec);
        CHECK(gam.M() == 0);
        CHECK((gam.at(0) - Matrix::Identity(3, 3)).norm() == 0.0);
    }
    SUBCASE("scalar MA(1)") {
        const AutocovSequence gam = implied_autocov(scalar_ma({1.0, 0.5}));
        CHECK(gam.at(0)(0, 0) == doctest::Approx(1.25));
        CHECK(gam.at(1)(0, 0) == doctest::Approx(0.5));
        CHECK(gam.at(-1)(0, 0) == doctest::Approx(0.5));
        CHECK(gam.at(2)(0, 0) == 0.0);
    }
    SUBCASE("negative lags transpose and vanish past M") {
        const AutocovSequence gam = implied_autocov(oracle::dense_ma(4, 2, 7));
        for (int h = 0; h <= 2; ++h) {
            CHECK((gam.at(-h) - gam.at(h).transpose()).norm() == 0.0);
            CHECK(gam.trace(-h) == gam.trace(h));
        }
        CHECK(gam.at(3).norm() == 0.0);
        CHECK(gam.at(-3).norm() == 0.0);
        CHECK((gam.at(0) - gam.at(0).transpose()).norm() <= 1e-12);
        CHECK((gam.scaled(3.0).at(1) - 3.0 * gam.at(1)).norm() <= 1e-12);
    }
    SUBCASE("matches long-path lagged products of a scalarized path") {
        const ProcessSpec spec = oracle::dense_ma(4, 2, 99);
        const AutocovSequence gam = implied_autocov(spec);
        const Index n = 1'000'000;
        const SampleMatrix x = sample_path(spec, n, 2024);
        const Vector v = Vector::Ones(4) / 2.0;
        const Vector y = x.values() * v;
        for (int h = 0; h <= 3; ++h) {
            // mu = 0 is known, so the lag-h products are unbiased; SE by batch means.
            const Index batch = 5000;
            std::vector<double> batches;
            for (Index start = 0; start + batch + h <= n; start += batch) {
                double acc = 0.0;
                for (Index t = start; t < start + batch; ++t) acc += y(t) * y(t + h);
                batches.push_back(acc / static_cast<double>(batch));
            }
            const MeanSe est = mean_se(batches);
            const double truth = v.dot(gam.at(h) * v);
            CHECK(std::abs(est.mean - truth) <= 3.0 * est.se + 1e-12);
        }
    }
}

TEST_CASE("sample_path") {
    SUBCASE("zero loadings reproduce the mean") {
        Vector mu(3);
        mu << 1.0, -2.0, 0.5;
        const ProcessSpec spec(mu, {Matrix::Zero(3, 3), Matrix::Zero(3, 3)});
        const SampleMatrix x = sample_path(spec, 6, 1);
        for (Index t = 0; t < 6; ++t) CHECK((x.values().row(t).transpose() - mu).norm() == 0.0);
    }
    SUBCASE("determinism contract") {
        const ProcessSpec spec = oracle::dense_ma(5, 1, 3);
        const Matrix a = sample_path(spec, 40, 17).values();
        const Matrix b = sample_path(spec, 40, 17).values();
        const Matrix c = sample_path(spec, 40, 18).values();
        CHECK((a - b).norm() == 0.0);
        CHECK((a - c).norm() > 0.0);
    }
    SUBCASE("prefix stability: a longer path extends a shorter one") {
        const ProcessSpec spec = oracle::dense_ma(3, 2, 5);
        const Matrix a = sample_path(spec, 20, 9).values();
        const Matrix b = sample_path(spec, 50, 9).values();
        CHECK((a - b.topRows(20)).norm() == 0.0);
    }
    SUBCASE("scalar white noise has unit variance") {
        const SampleMatrix x = sample_path(scalar_ma({1.0}), 100'000, 77);
        const Vector col = x.values().col(0);
        const VarianceSe v = variance_se(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        CHECK(std::abs(v.variance - 1.0) <= 3.0 * v.se);
    }
    SUBCASE("replicate means centre on mu") {
        Vector mu(3);
        mu << 0.3, -1.0, 2.0;
        const ProcessSpec spec = oracle::dense_ma(3, 1, 11).with_mean(mu);
        const int reps = 2000;
        std::vector<std::vector<double>> means(3);
        for (int r = 0; r < reps; ++r) {
            const Vector m = sample_path(spec, 20, 1000 + static_cast<std::uint64_t>(r)).mean();
            for (Index j = 0; j < 3; ++j) means[static_cast<std::size_t>(j)].push_back(m(j));
        }
        for (Index j = 0; j < 3; ++j) {
            const MeanSe est = mean_se(means[static_cast<std::size_t>(j)]);
            CHECK(std::abs(est.mean - mu(j)) <= 3.0 * est.se);
        }
    }
    SUBCASE("too short") {
        CHECK_THROWS_AS((void)sample_path(scalar_ma({1.0}), 1, 0), InvalidData);
    }
}

TEST_CASE("omega_n") {
    SUBCASE("M = 0 gives Gamma(0)") {
        const AutocovSequence gam = implied_autocov(oracle::dense_ma(4, 0, 1));
        CHECK((omega_n(gam, 10) - gam.at(0)).norm() == 0.0);
    }
    SUBCASE("hand example") {
        const AutocovSequence gam({Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)});
        const Matrix o = omega_n(gam, 4);
        CHECK((o - 1.75 * Matrix::Identity(2, 2)).norm() <= 1e-15);
        CHECK(o.trace() == doctest::Approx(3.5));
    }
    SUBCASE("term-by-term oracle and symmetry") {
        const AutocovSequence gam = implied_autocov(oracle::dense_ma(5, 3, 21));
        for (Index n : {4, 7, 100}) {
            const Matrix o = omega_n(gam, n);
            CHECK((o - oracle::omega_by_terms(gam, n)).norm() <= 1e-12 * tolerance_scale(o));
            CHECK((o - o.transpose()).norm() <= 1e-12);
        }
    }
    SUBCASE("converges to the long-run sum") {
        const AutocovSequence gam = implied_autocov(oracle::dense_ma(3, 2, 4));
        Matrix total = gam.at(0);
        for (int h = 1; h <= 2; ++h) total += gam.at(h) + gam.at(-h);
        double prev = (omega_n(gam, 10) - total).norm();
        for (Index n : {100, 1000, 10000}) {
            const double d = (omega_n(gam, n) - total).norm();
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 1e-3);
    }
    SUBCASE("n <= M") {
        const AutocovSequence gam = implied_autocov(oracle::dense_ma(2, 3, 2));
        CHECK_THROWS_AS((void)omega_n(gam, 3), BlockError);
    }
}

TEST_CASE("ProcessSpec JSON") {
    SUBCASE("round trip") {
        const ProcessSpec spec = oracle::dense_ma(3, 2, 8).with_mean(Vector::LinSpaced(3, -1.0, 1.0));
        const ProcessSpec back = process_spec_from_json(to_json(spec));
        CHECK(back.M() == 2);
        CHECK(back.p() == 3);
        CHECK((back.mu() - spec.mu()).norm() == 0.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK((back.coeffs()[j] - spec.coeffs()[j]).norm() == 0.0);
        const nlohmann::json j = to_json(spec);
        CHECK(j.at("p") == 3);
        CHECK(j.at("M") == 2);
        CHECK(j.at("coeffs").size() == 3);
        CHECK(j.at("coeffs")[0].size() == 9);
        CHECK(j.at("coeffs")[0][1].get<double>() == spec.coeffs()[0](0, 1));
    }
    SUBCASE("shorthand forms") {
        const auto j = nlohmann::json::parse(R"({"p": 2, "M": 1, "mu": 0.5, "coeffs": [1, {"diag": [0.5, 0.25]}]})");
        const ProcessSpec spec = process_spec_from_json(j);
        CHECK(spec.mu()(1) == 0.5);
        CHECK(spec.coeffs()[0](1, 1) == 1.0);
        CHECK(spec.coeffs()[0](0, 1) == 0.0);
        CHECK(spec.coeffs()[1](1, 1) == 0.25);
    }
    SUBCASE("invalid documents") {
        CHECK_THROWS_AS((void)process_spec_from_json(nlohmann::json::parse(R"({"p": 2, "M": 0, "mu": [0], "coeffs": [1]})")),
                        InvalidData);
        CHECK_THROWS_AS((void)process_spec_from_json(nlohmann::json::parse(R"({"p": 1, "M": 1, "mu": [0], "coeffs": [1]})")),
                        InvalidData);
        CHECK_THROWS_AS((void)process_spec_from_json(nlohmann::json::parse(R"({"p": 1, "M": 0, "mu": [0], "coeffs": [[1, 2]]})")),
                        InvalidData);
        CHECK_THROWS_AS((void)process_spec_from_json(nlohmann::json::parse(R"({"p": 1, "M": 0, "mu": [0]})")), InvalidData);
    }
}
