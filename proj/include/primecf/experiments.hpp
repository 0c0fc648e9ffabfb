#ifndef PRIMECF_EXPERIMENTS_HPP_
#define PRIMECF_EXPERIMENTS_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "primecf/cf_stream.hpp"
#include "primecf/gauss.hpp"
#include "primecf/primes.hpp"
#include "primecf/rng.hpp"

namespace primecf::experiments {

inline constexpr const char* kVersion = "0.1.0";

// Flat configuration; every field maps one-to-one onto a config-file key
// and a CLI flag of the same name. Zero / empty fields mean "use the
// experiment's documented default".
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t n = 0;
  std::uint64_t trajectories = 0;
  std::uint64_t seed = 20250809;
  std::string backend = "natural-extension";  // or "lazy-real"
  std::string initialLaw;                     // "gauss" | "lebesgue" | "" (default)
  double gamma = 0;                           // 0 = default
  std::uint64_t level = 0;                    // l; 0 = default
  double theta = 0;                           // 0 = default
  std::uint64_t modulus = 0;                  // m; 0 = default
  std::string family;                         // clt event family: threshold|equality|interval
  std::string out;                            // output path; empty = stdout
  std::string format = "csv";                 // csv | json
  unsigned threads = 0;                       // 0 = hardware concurrency
  std::uint64_t sieveBound = 100000000ULL;
};

struct StatRow {
  std::string statistic;
  double value = 0;
  double reference = 0;
  double errLow = 0;   // acceptance interval around the statistic, when applicable
  double errHigh = 0;
  std::string verdict;  // pass | fail | report-only
};

struct ExperimentReport {
  ExperimentConfig config;  // echo, with defaults resolved
  std::vector<StatRow> rows;
  double wallSeconds = 0;  // not serialized; reports must be byte-reproducible
  std::string version = kVersion;
  bool any_fail() const {
    for (const auto& r : rows)
      if (r.verdict == "fail") return true;
    return false;
  }
};

// Shared heavyweight state (sieve + prime-sum tables), reusable across
// experiment runs.
class LabContext {
 public:
  explicit LabContext(std::uint64_t sieveBound);
  const primes::PrimeTable& table() const { return *table_; }
  const gauss::GaussTables& tables() const { return *gauss_; }
  std::uint64_t sieve_bound() const { return table_->bound(); }

 private:
  std::unique_ptr<primes::PrimeTable> table_;
  std::unique_ptr<gauss::GaussTables> gauss_;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
};
const std::vector<ExperimentInfo>& list_experiments();

// Runs one experiment. When a context is supplied and its sieve bound
// matches the config, it is reused instead of rebuilding the sieve.
ExperimentReport run_experiment(const ExperimentConfig& config, const LabContext* shared = nullptr);

std::string to_csv(const ExperimentReport& report);
std::string to_json(const ExperimentReport& report);
// Writes in the requested format; empty path means stdout.
void write_report(const ExperimentReport& report, const std::string& path,
                  const std::string& format);

// key=value lines, '#' comments; keys match the CLI flag names.
ExperimentConfig parse_config_file(const std::string& path);
void apply_key_value(ExperimentConfig& config, const std::string& key, const std::string& value);

using rng::derive_seed;

// Runs fn(index) for index in [0, count) on a small worker pool; results
// must be written into caller-owned per-index slots so that aggregation
// can be an ordered reduction independent of scheduling.
template <class Fn>
void parallel_for_index(std::uint64_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > count) threads = static_cast<unsigned>(count ? count : 1);
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace primecf::experiments

#endif  // PRIMECF_EXPERIMENTS_HPP_
