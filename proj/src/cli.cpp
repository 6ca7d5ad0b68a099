#include "hdmean/cli.hpp"

#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hdmean/csv.hpp"
#include "hdmean/errors.hpp"
#include "hdmean/hdtest.hpp"
#include "hdmean/procsim.hpp"
#include "hdmean/study.hpp"

namespace hdmean {

namespace {

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ReplicateError& r) {
        return exit_code_for(r.cause());
    } catch (const DegenerateVariance&) {
        return kExitNumeric;
    } catch (const SystemError&) {
        return kExitNumeric;
    } catch (const NotPSD&) {
        return kExitNumeric;
    } catch (const Error&) {
        return kExitData;
    } catch (...) {
        return kExitData;
    }
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidData("cannot open '" + path + "'");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidData("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidData("cannot write '" + path + "'");
    out << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"High-dimensional mean tests for M-dependent data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string input;
    std::string input1;
    std::string input2;
    int lag = 0;
    double alpha = 0.05;
    std::string method = "split";

    auto* test = app.add_subcommand("test", "one-sample test of a zero mean");
    test->add_option("--input", input, "CSV file, rows = time")->required();
    test->add_option("--lag", lag, "dependence lag M")->required()->check(CLI::NonNegativeNumber);
    test->add_option("--alpha", alpha, "significance level")->required();
    test->add_option("--method", method, "variance estimator")->check(CLI::IsMember({"plugin", "split"}));

    auto* test2 = app.add_subcommand("test2", "two-sample test of equal means");
    test2->add_option("--input1", input1, "CSV file for group 1")->required();
    test2->add_option("--input2", input2, "CSV file for group 2")->required();
    test2->add_option("--lag", lag, "dependence lag M")->required()->check(CLI::NonNegativeNumber);
    test2->add_option("--alpha", alpha, "significance level")->required();
    test2->add_option("--method", method, "variance estimator")->check(CLI::IsMember({"plugin", "split"}));

    std::string spec_path;
    long long n = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    auto* simulate = app.add_subcommand("simulate", "draw a sample path from a process spec");
    simulate->add_option("--spec", spec_path, "process spec JSON")->required();
    simulate->add_option("--n", n, "path length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "random seed")->required();
    simulate->add_option("--out", out_path, "output CSV")->required();

    std::string config_path;
    unsigned threads = 0;
    std::string report_path;
    auto* study = app.add_subcommand("study", "run a Monte Carlo study");
    study->add_option("--config", config_path, "study config JSON")->required();
    study->add_option("--threads", threads, "worker threads (default: config or all cores)");
    study->add_option("--output", report_path, "report path (default: config output_path or stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (test->parsed()) {
            const SampleMatrix x = load_csv(input);
            const TestResult r = one_sample_test(x, lag, alpha, parse_variance_method(method));
            out << to_json(r).dump(2) << '\n';
        } else if (test2->parsed()) {
            const SampleMatrix x1 = load_csv(input1);
            const SampleMatrix x2 = load_csv(input2);
            const TestResult r = two_sample_test(x1, x2, lag, alpha, parse_variance_method(method));
            out << to_json(r).dump(2) << '\n';
        } else if (simulate->parsed()) {
            const ProcessSpec spec = process_spec_from_json(read_json_file(spec_path));
            const SampleMatrix x = sample_path(spec, static_cast<Index>(n), seed);
            save_csv(out_path, x.values());
        } else if (study->parsed()) {
            const std::filesystem::path cfg_file(config_path);
            StudyConfig cfg = study_config_from_json(read_json_file(config_path), cfg_file.parent_path());
            if (study->count("--threads") > 0) cfg.threads = threads;
            if (!report_path.empty()) cfg.output_path = report_path;
            const StudyReport report = run_study(cfg);
            const std::string doc = report.to_json().dump(2) + "\n";
            if (cfg.output_path) {
                write_text(cfg.output_path->string(), doc);
            } else {
                out << doc;
            }
            if (cfg.csv_path) {
                std::ofstream csv(*cfg.csv_path);
                if (!csv) throw InvalidData("cannot write '" + cfg.csv_path->string() + "'");
                report.write_replicate_csv(csv);
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    }
    return kExitOk;
}

}  // namespace hdmean
