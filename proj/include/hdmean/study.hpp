#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hdmean/errors.hpp"
#include "hdmean/hdtest.hpp"
#include "hdmean/procsim.hpp"

namespace hdmean {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario { size, power, bias, blocks };

[[nodiscard]] std::string_view to_string(Scenario s) noexcept;
[[nodiscard]] Scenario parse_scenario(std::string_view name);

struct StudyConfig {
    Scenario scenario = Scenario::size;
    ProcessSpec spec{Vector::Zero(1), {Matrix::Identity(1, 1)}};
    std::optional<ProcessSpec> spec2;  ///< second group; defaults to spec
    bool two_sample = false;
    Index n = 0;
    std::optional<Index> n2;  ///< defaults to n
    int M = 0;                ///< lag used by the estimators
    double alpha = 0.05;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    VarianceMethod variance_method = VarianceMethod::split;
    unsigned threads = 0;  ///< 0: hardware concurrency
    bool keep_replicates = false;
    std::optional<std::filesystem::path> output_path;
    std::optional<std::filesystem::path> csv_path;
    double block_alpha = 0.5;
    double block_C = 1.0;
    std::optional<Index> block_width;
};

/// Parses a StudyConfig document. "spec"/"spec2" may be inline objects or
/// paths to spec files, resolved against `base_dir`. "M" defaults to the spec's
/// order. Throws InvalidData on missing or invalid fields.
[[nodiscard]] StudyConfig study_config_from_json(const nlohmann::json& j,
                                                 const std::filesystem::path& base_dir = {});
[[nodiscard]] nlohmann::json to_json(const StudyConfig& cfg);

struct StudyReport {
    Scenario scenario = Scenario::size;
    nlohmann::json config;
    nlohmann::json aggregates;
    nlohmann::json se;
    std::optional<nlohmann::json> replicates;
    std::vector<std::string> replicate_columns;  ///< column order for write_replicate_csv
    double wall_clock_seconds = 0.0;

    /// Report document; wall-clock is the only field that varies between
    /// runs of the same config.
    [[nodiscard]] nlohmann::json to_json(bool include_wall_clock = true) const;
    /// One row per replicate (requires keep_replicates).
    void write_replicate_csv(std::ostream& out) const;
};

/// Runs the Monte Carlo study. Results depend only on the config (replicate r
/// uses streams derived from (seed, r) and aggregation is in replicate order),
/// never on the thread count. A failing replicate aborts the study with a
/// ReplicateError naming the lowest failing index.
[[nodiscard]] StudyReport run_study(const StudyConfig& cfg);

/// Error from replicate `index`; `cause` holds the original exception.
class ReplicateError : public Error {
public:
    ReplicateError(std::size_t index, std::exception_ptr cause, const std::string& what)
        : Error("replicate " + std::to_string(index) + ": " + what), index_(index), cause_(std::move(cause)) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }
    [[nodiscard]] const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::size_t index_;
    std::exception_ptr cause_;
};

/// Evaluates fn(0..reps-1) on a worker pool and returns results in index order.
template <class T, class Fn>
std::vector<T> run_replicates(std::size_t reps, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(reps, 1)));
    std::vector<T> out(reps);
    std::vector<std::exception_ptr> errors(reps);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        // Every claimed index is evaluated, so all indices below a failure complete.
        while (!failed.load()) {
            const std::size_t i = next++;
            if (i >= reps) break;
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < reps; ++i) {
        if (!errors[i]) continue;
        std::string what = "unknown error";
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        throw ReplicateError(i, errors[i], what);
    }
    return out;
}

}  // namespace hdmean
