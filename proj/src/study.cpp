#include "hdmean/study.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include "hdmean/autocov.hpp"
#include "hdmean/blocks.hpp"
#include "hdmean/rng.hpp"
#include "hdmean/stats.hpp"

namespace hdmean {

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::size: return "size";
        case Scenario::power: return "power";
        case Scenario::bias: return "bias";
        case Scenario::blocks: return "blocks";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name) {
    if (name == "size") return Scenario::size;
    if (name == "power") return Scenario::power;
    if (name == "bias") return Scenario::bias;
    if (name == "blocks") return Scenario::blocks;
    throw InvalidData("unknown scenario '" + std::string(name) + "'");
}

namespace {

ProcessSpec load_spec(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (j.is_string()) {
        std::filesystem::path path = j.get<std::string>();
        if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
        std::ifstream in(path);
        if (!in) throw InvalidData("cannot open spec file '" + path.string() + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidData("spec file '" + path.string() + "' is not valid JSON: " + e.what());
        }
        return process_spec_from_json(doc);
    }
    return process_spec_from_json(j);
}

Vector zeros_like(const ProcessSpec& s) { return Vector::Zero(s.p()); }

}  // namespace

StudyConfig study_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    try {
        StudyConfig cfg;
        cfg.scenario = parse_scenario(j.at("scenario").get<std::string>());
        cfg.spec = load_spec(j.at("spec"), base_dir);
        if (j.contains("spec2")) cfg.spec2 = load_spec(j.at("spec2"), base_dir);
        cfg.two_sample = j.value("two_sample", cfg.spec2.has_value());
        cfg.n = j.at("n").get<Index>();
        if (j.contains("n2")) cfg.n2 = j.at("n2").get<Index>();
        cfg.M = j.value("M", cfg.spec.M());
        cfg.alpha = j.value("alpha", 0.05);
        cfg.reps = j.value("reps", std::size_t{1});
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.variance_method = parse_variance_method(j.value("variance_method", std::string("split")));
        cfg.threads = j.value("threads", 0u);
        cfg.keep_replicates = j.value("keep_replicates", false);
        if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
        if (j.contains("csv_path")) cfg.csv_path = j.at("csv_path").get<std::string>();
        cfg.block_alpha = j.value("block_alpha", kDefaultBlockAlpha);
        cfg.block_C = j.value("block_C", kDefaultBlockC);
        if (j.contains("block_width")) cfg.block_width = j.at("block_width").get<Index>();

        if (cfg.reps < 1) throw InvalidData("reps must be at least 1");
        if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidData("alpha must lie in (0, 1)");
        if (cfg.n < 2 || (cfg.n2 && *cfg.n2 < 2)) throw InvalidData("sample sizes must be at least 2");
        if (cfg.M < 0) throw InvalidData("M must be nonnegative");
        if (cfg.spec2 && cfg.spec2->p() != cfg.spec.p()) {
            throw InvalidData("spec and spec2 have different dimensions");
        }
        if (cfg.csv_path && !cfg.keep_replicates) cfg.keep_replicates = true;
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidData(std::string("malformed study config: ") + e.what());
    }
}

nlohmann::json to_json(const StudyConfig& cfg) {
    nlohmann::json j{{"scenario", std::string(to_string(cfg.scenario))},
                     {"spec", to_json(cfg.spec)},
                     {"two_sample", cfg.two_sample},
                     {"n", cfg.n},
                     {"M", cfg.M},
                     {"alpha", cfg.alpha},
                     {"reps", cfg.reps},
                     {"seed", cfg.seed},
                     {"variance_method", std::string(to_string(cfg.variance_method))},
                     {"keep_replicates", cfg.keep_replicates},
                     {"block_alpha", cfg.block_alpha},
                     {"block_C", cfg.block_C}};
    if (cfg.spec2) j["spec2"] = to_json(*cfg.spec2);
    if (cfg.n2) j["n2"] = *cfg.n2;
    if (cfg.block_width) j["block_width"] = *cfg.block_width;
    if (cfg.output_path) j["output_path"] = cfg.output_path->string();
    if (cfg.csv_path) j["csv_path"] = cfg.csv_path->string();
    return j;
}

nlohmann::json StudyReport::to_json(bool include_wall_clock) const {
    nlohmann::json j{{"scenario", std::string(hdmean::to_string(scenario))},
                     {"config", config},
                     {"aggregates", aggregates},
                     {"se", se},
                     {"version", kVersion}};
    if (replicates) j["replicates"] = *replicates;
    if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
}

void StudyReport::write_replicate_csv(std::ostream& out) const {
    if (!replicates) return;
    for (std::size_t c = 0; c < replicate_columns.size(); ++c) out << (c ? "," : "") << replicate_columns[c];
    out << '\n';
    for (const auto& row : *replicates) {
        for (std::size_t c = 0; c < replicate_columns.size(); ++c) {
            const auto& v = row.at(replicate_columns[c]);
            out << (c ? "," : "") << (v.is_null() ? std::string("nan") : v.dump());
        }
        out << '\n';
    }
}

namespace {

using Row = std::vector<double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    [[nodiscard]] std::vector<double> column(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        const auto c = static_cast<std::size_t>(it - columns.begin());
        std::vector<double> out;
        out.reserve(rows.size());
        for (const Row& r : rows) out.push_back(r[c]);
        return out;
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const Row& r : rows) {
            nlohmann::json o = nlohmann::json::object();
            for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
            arr.push_back(std::move(o));
        }
        return arr;
    }
};

std::uint64_t group_seed(const StudyConfig& cfg, std::size_t rep, int group) {
    return derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(rep) + static_cast<std::uint64_t>(group));
}

double se_of_rate(double r, std::size_t reps) {
    return std::sqrt(r * (1.0 - r) / static_cast<double>(reps));
}

// MeanSe needs two points; a single replicate reports a zero SE.
MeanSe summarize(const std::vector<double>& v) {
    if (v.size() < 2) return MeanSe{v.empty() ? 0.0 : v.front(), 0.0, 0.0};
    return mean_se(v);
}

VarianceSe summarize_var(const std::vector<double>& v) {
    if (v.size() < 2) return VarianceSe{0.0, 0.0};
    return variance_se(v);
}

struct Groups {
    ProcessSpec s1;
    ProcessSpec s2;
    Index n1;
    Index n2;
};

Groups groups_for(const StudyConfig& cfg, bool null_means) {
    ProcessSpec s1 = cfg.spec;
    ProcessSpec s2 = cfg.spec2.value_or(cfg.spec);
    if (null_means) {
        s1 = s1.with_mean(zeros_like(s1));
        s2 = s2.with_mean(zeros_like(s2));
    }
    return Groups{std::move(s1), std::move(s2), cfg.n, cfg.n2.value_or(cfg.n)};
}

void testing_study(const StudyConfig& cfg, StudyReport& report, Table& table) {
    const bool null_means = cfg.scenario == Scenario::size;
    const Groups g = groups_for(cfg, null_means);
    table.columns = {"m_stat", "var_hat", "z", "reject"};
    table.rows = run_replicates<Row>(cfg.reps, cfg.threads, [&](std::size_t rep) {
        const SampleMatrix x1 = sample_path(g.s1, g.n1, group_seed(cfg, rep, 0));
        TestResult r;
        if (cfg.two_sample) {
            const SampleMatrix x2 = sample_path(g.s2, g.n2, group_seed(cfg, rep, 1));
            r = two_sample_test(x1, x2, cfg.M, cfg.alpha, cfg.variance_method);
        } else {
            r = one_sample_test(x1, cfg.M, cfg.alpha, cfg.variance_method);
        }
        return Row{r.m_stat, r.var_hat, r.z, r.reject ? 1.0 : 0.0};
    });

    const auto reject = table.column("reject");
    const auto z = table.column("z");
    const auto m = table.column("m_stat");
    const auto var_hat = table.column("var_hat");
    const double rate = summarize(reject).mean;
    const MeanSe mz = summarize(z);
    const MeanSe mm = summarize(m);
    const VarianceSe vm = summarize_var(m);
    const AutocovSequence gam1 = implied_autocov(g.s1);
    const AutocovSequence gam2 = implied_autocov(g.s2);
    const double var_pop = cfg.two_sample ? two_sample_variance(gam1, gam2, g.n1, g.n2)
                                          : var_mn_population(gam1, g.n1);
    std::vector<double> ratio(var_hat.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = var_hat[i] / var_pop;

    auto& a = report.aggregates;
    auto& se = report.se;
    a["rejection_rate"] = rate;
    se["rejection_rate"] = se_of_rate(rate, cfg.reps);
    a["mean_z"] = mz.mean;
    se["mean_z"] = mz.se;
    a["sd_z"] = mz.sd;
    a["mean_m_stat"] = mm.mean;
    se["mean_m_stat"] = mm.se;
    a["var_m_stat"] = vm.variance;
    se["var_m_stat"] = vm.se;
    a["var_m_population"] = var_pop;
    a["var_ratio"] = vm.variance / var_pop;
    se["var_ratio"] = vm.se / var_pop;
    a["median_var_hat_ratio"] = median(ratio);
    if (z.size() >= 2) {
        const KsResult ks = ks_test_normal(z);
        a["ks_statistic"] = ks.statistic;
        a["ks_p_value"] = ks.p_value;
    }

    if (cfg.scenario == Scenario::power) {
        if (cfg.two_sample) {
            const Vector delta = g.s1.mu() - g.s2.mu();
            const double ncp = delta.squaredNorm() / std::sqrt(var_pop);
            a["ncp"] = ncp;
            a["theoretical_power"] = normal_cdf(-upper_critical_value(cfg.alpha) + ncp);
        } else {
            const PowerReport pw = asymptotic_power(g.s1.mu(), gam1, g.n1, cfg.alpha);
            a["ncp"] = pw.ncp;
            a["theoretical_power"] = pw.power;
            a["local_alt_ratios"] = std::vector<double>(
                pw.local_alt_ratios.data(), pw.local_alt_ratios.data() + pw.local_alt_ratios.size());
        }
        a["power_gap"] = rate - a["theoretical_power"].get<double>();
        se["power_gap"] = se_of_rate(rate, cfg.reps);
    }
    a["mu_sq_norm"] = (g.s1.mu() - g.s2.mu()).squaredNorm();
}

void bias_study(const StudyConfig& cfg, StudyReport& report, Table& table) {
    if (cfg.two_sample) throw InvalidData("the bias scenario is one-sample only");
    const ProcessSpec& spec = cfg.spec;
    const Index n = cfg.n;
    const EstimatorSystem sys = estimator_system(n, cfg.M);
    table.columns = {"trace_omega_hat", "m_stat", "var_hat"};
    table.rows = run_replicates<Row>(cfg.reps, cfg.threads, [&](std::size_t rep) {
        const SampleMatrix x = sample_path(spec, n, group_seed(cfg, rep, 0));
        const double tr = trace_omega_hat(x, sys);
        const double m = x.mean().squaredNorm() - tr / static_cast<double>(n);
        return Row{tr, m, var_mn_hat(x, cfg.M, cfg.variance_method)};
    });
    const AutocovSequence gam = implied_autocov(spec);
    const double true_trace = omega_n(gam, n).trace();
    const double var_pop = var_mn_population(gam, n);
    const MeanSe tr = summarize(table.column("trace_omega_hat"));
    const auto m_col = table.column("m_stat");
    const MeanSe m = summarize(m_col);
    const VarianceSe vm = summarize_var(m_col);
    auto var_hat = table.column("var_hat");
    for (double& v : var_hat) v /= var_pop;
    const double mu2 = spec.mu().squaredNorm();

    auto& a = report.aggregates;
    auto& se = report.se;
    a["mean_trace_omega_hat"] = tr.mean;
    se["mean_trace_omega_hat"] = tr.se;
    a["true_trace_omega"] = true_trace;
    a["trace_bias_z"] = tr.se > 0.0 ? (tr.mean - true_trace) / tr.se : 0.0;
    a["mean_m_stat"] = m.mean;
    se["mean_m_stat"] = m.se;
    a["mu_sq_norm"] = mu2;
    a["m_stat_bias_z"] = m.se > 0.0 ? (m.mean - mu2) / m.se : 0.0;
    a["var_m_stat"] = vm.variance;
    se["var_m_stat"] = vm.se;
    a["var_m_population"] = var_pop;
    a["var_ratio"] = vm.variance / var_pop;
    se["var_ratio"] = vm.se / var_pop;
    a["median_var_hat_ratio"] = median(var_hat);
}

void blocks_study(const StudyConfig& cfg, StudyReport& report, Table& table) {
    if (cfg.two_sample) throw InvalidData("the blocks scenario is one-sample only");
    if (cfg.M != cfg.spec.M()) throw InvalidData("the blocks scenario needs M equal to the spec's order");
    const ProcessSpec spec = cfg.spec.with_mean(zeros_like(cfg.spec));
    const AutocovSequence gam = implied_autocov(spec);
    const BlockScheme scheme = cfg.block_width ? BlockScheme::with_width(cfg.n, cfg.M, *cfg.block_width)
                                               : block_scheme(cfg.n, cfg.M, cfg.block_alpha, cfg.block_C);
    const bool has_b13 = scheme.k >= 3;
    const bool has_b34 = scheme.k >= 4;
    table.columns = {"partition_residual", "bij_residual", "b11", "offdiag_sum", "b12", "b13", "b34",
                     "delta11", "delta12", "delta11_standardized"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.rows = run_replicates<Row>(cfg.reps, cfg.threads, [&](std::size_t rep) {
        const SampleMatrix x = sample_path(spec, cfg.n, group_seed(cfg, rep, 0));
        const BlockDecomposition d = decompose(x, gam, scheme);
        const double sum_b = d.B.sum();
        const double sum_d = d.D.sum();
        const double mag = std::max({std::abs(sum_b), std::abs(sum_d), std::abs(d.F), std::abs(d.sum_a),
                                     std::numeric_limits<double>::min()});
        const double partition = std::abs(sum_b + sum_d + d.F - d.sum_a) / mag;
        const double wm = static_cast<double>(scheme.w - scheme.M);
        const double n2 = static_cast<double>(cfg.n) * static_cast<double>(cfg.n);
        double bij = 0.0;
        for (Index i = 0; i < scheme.k; ++i) {
            for (Index j = 0; j < scheme.k; ++j) {
                if (i == j) continue;
                const double expected = wm * wm * d.Y.row(i).dot(d.Y.row(j));
                const double ref = std::max(wm * wm * d.Y.row(i).norm() * d.Y.row(j).norm(),
                                            std::numeric_limits<double>::min());
                bij = std::max(bij, std::abs(n2 * d.B(i, j) - expected) / ref);
            }
        }
        return Row{partition,
                   bij,
                   d.B(0, 0),
                   sum_b - d.B.trace(),
                   scheme.k >= 2 ? d.B(0, 1) : nan,
                   has_b13 ? d.B(0, 2) : nan,
                   has_b34 ? d.B(2, 3) : nan,
                   d.delta11,
                   d.delta12,
                   d.delta11_standardized};
    });

    const Matrix ow = omega_w(gam, scheme);
    auto& a = report.aggregates;
    auto& se = report.se;
    a["w"] = scheme.w;
    a["k"] = scheme.k;
    a["r"] = scheme.r;
    const auto part = table.column("partition_residual");
    const auto bij = table.column("bij_residual");
    a["max_partition_residual"] = *std::max_element(part.begin(), part.end());
    a["max_bij_residual"] = *std::max_element(bij.begin(), bij.end());

    const VarianceSe vb11 = summarize_var(table.column("b11"));
    const double vb11_formula = var_b11(scheme, ow);
    a["var_b11"] = vb11.variance;
    se["var_b11"] = vb11.se;
    a["var_b11_formula"] = vb11_formula;
    a["var_b11_ratio"] = vb11.variance / vb11_formula;
    se["var_b11_ratio"] = vb11.se / vb11_formula;
    if (scheme.k >= 2) {
        const VarianceSe voff = summarize_var(table.column("offdiag_sum"));
        const double sigma = sigma_n_sq(scheme, ow);
        a["var_offdiag"] = voff.variance;
        se["var_offdiag"] = voff.se;
        a["sigma_n_sq"] = sigma;
        a["sigma_ratio"] = voff.variance / sigma;
        se["sigma_ratio"] = voff.se / sigma;
    }
    if (has_b13 && cfg.reps >= 2) {
        const auto b12 = table.column("b12");
        const auto b13 = table.column("b13");
        a["corr_b12_b13"] = correlation(b12, b13);
        se["corr_b12_b13"] = 1.0 / std::sqrt(static_cast<double>(cfg.reps));
        std::vector<double> sq12(b12.size());
        std::vector<double> sq13(b13.size());
        for (std::size_t i = 0; i < b12.size(); ++i) {
            sq12[i] = b12[i] * b12[i];
            sq13[i] = b13[i] * b13[i];
        }
        const CovarianceSe c = covariance_se(sq12, sq13);
        a["cov_b12sq_b13sq"] = c.covariance;
        se["cov_b12sq_b13sq"] = c.se;
        a["cov_b12sq_b13sq_z"] = c.se > 0.0 ? c.covariance / c.se : 0.0;
        if (has_b34) {
            a["corr_b12_b34"] = correlation(b12, table.column("b34"));
            se["corr_b12_b34"] = 1.0 / std::sqrt(static_cast<double>(cfg.reps));
        }
    }
    const auto d12 = table.column("delta12");
    std::vector<double> abs_d12(d12.size());
    std::transform(d12.begin(), d12.end(), abs_d12.begin(), [](double v) { return std::abs(v); });
    const MeanSe md12 = summarize(abs_d12);
    a["mean_abs_delta12"] = md12.mean;
    se["mean_abs_delta12"] = md12.se;
    const auto std11 = table.column("delta11_standardized");
    const VarianceSe v11 = summarize_var(std11);
    a["var_delta11_standardized"] = v11.variance;
    se["var_delta11_standardized"] = v11.se;
    if (cfg.reps >= 2) {
        const KsResult ks = ks_test_normal(std11);
        a["ks_delta11_statistic"] = ks.statistic;
        a["ks_delta11_p_value"] = ks.p_value;
    }
}

}  // namespace

StudyReport run_study(const StudyConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    StudyReport report;
    report.scenario = cfg.scenario;
    report.config = to_json(cfg);
    report.aggregates = nlohmann::json::object();
    report.se = nlohmann::json::object();
    Table table;
    switch (cfg.scenario) {
        case Scenario::size:
        case Scenario::power: testing_study(cfg, report, table); break;
        case Scenario::bias: bias_study(cfg, report, table); break;
        case Scenario::blocks: blocks_study(cfg, report, table); break;
    }
    report.aggregates["reps"] = cfg.reps;
    if (cfg.keep_replicates) {
        report.replicates = table.to_json();
        report.replicate_columns = table.columns;
    }
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace hdmean
