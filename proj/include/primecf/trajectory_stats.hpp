#ifndef PRIMECF_TRAJECTORY_STATS_HPP_
#define PRIMECF_TRAJECTORY_STATS_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "primecf/cf_stream.hpp"
#include "primecf/gauss.hpp"
#include "primecf/primes.hpp"

namespace primecf::stats {

using cf::Digit;

struct SummaryConfig {
  // capacity of the bounded heap holding the largest prime-digit values
  std::size_t topCapacity = 0;
  // exponents gamma for which sum (a'_k)^gamma is accumulated
  std::vector<double> powerExponents;
};

// Single-pass statistics of one digit trajectory. Integer sums and maxima
// are exact; power sums accumulate in extended precision in digit order,
// so results are reproducible for a fixed trajectory.
class TrajectorySummary {
 public:
  TrajectorySummary() = default;
  explicit TrajectorySummary(SummaryConfig cfg)
      : cfg_(std::move(cfg)), powSums_(cfg_.powerExponents.size(), 0.0L) {
    top_.reserve(cfg_.topCapacity);
  }

  void update(Digit d, const primes::PrimeTable& table) {
    update_with(d, table.is_prime(d) ? d : 0);
  }

  // Variant for callers that already computed a' = prime_digit_value(d).
  void update_with(Digit d, Digit primeValue);

  std::uint64_t n() const { return n_; }
  std::uint64_t sum_full() const { return sumFull_; }
  std::uint64_t sum_prime() const { return sumPrime_; }
  std::uint64_t max_full() const { return maxFull_; }
  std::uint64_t max_prime() const { return maxPrime_; }
  std::uint64_t prime_count() const { return primeCount_; }

  long double sum_prime_pow(double gamma) const;

  // the held largest prime-digit values, descending
  std::vector<std::uint64_t> top_values() const;

  // sum (a'_k)^gamma minus the b largest terms. Ties among equal values
  // are broken by removing later indices first; the trimmed value does
  // not depend on that choice. Requires b < n and b <= topCapacity.
  long double trimmed_sum(std::size_t b, double gamma) const;

  // sumPrime - maxPrime, exact in integers
  std::uint64_t light_trimmed_sum() const { return sumPrime_ - maxPrime_; }

 private:
  SummaryConfig cfg_;
  std::uint64_t n_ = 0;
  std::uint64_t sumFull_ = 0;
  std::uint64_t sumPrime_ = 0;
  std::uint64_t maxFull_ = 0;
  std::uint64_t maxPrime_ = 0;
  std::uint64_t primeCount_ = 0;
  std::vector<long double> powSums_;
  std::vector<std::uint64_t> top_;  // min-heap
};

// Event families for counting statistics. Threshold: {a'_n >= b_n}
// (or strict >); Equality: {a'_n = d_n}; Interval:
// {d_n <= a'_n <= d_n (1 + 1/c_n)} with the hypothesis c_n <= d_n^0.475.
struct EventFamily {
  enum class Kind { Threshold, Equality, Interval };
  Kind kind = Kind::Threshold;
  bool strict = false;
  bool ceilD = false;  // Interval: round the d-schedule up to an integer
  gauss::ParametricSequence b{2, 0, 0, 0};
  gauss::ParametricSequence d{3, 0, 0, 0};
  gauss::ParametricSequence c{1, 0, 0, 0};

  // first index at which every schedule involved is defined
  std::uint64_t first_index() const;
  // checks the interval-family exponent hypothesis over [first_index, horizon]
  void validate(std::uint64_t horizon) const;
  bool occurs(std::uint64_t index, Digit primeValue) const;
};

class EventCounter {
 public:
  explicit EventCounter(EventFamily family) : fam_(std::move(family)), first_(fam_.first_index()) {}
  void update(std::uint64_t index, Digit primeValue) {
    if (index >= first_ && fam_.occurs(index, primeValue)) ++count_;
  }
  std::uint64_t count() const { return count_; }
  const EventFamily& family() const { return fam_; }

 private:
  EventFamily fam_;
  std::uint64_t first_;
  std::uint64_t count_ = 0;
};

struct EventCountResult {
  std::uint64_t observed;
  double expected;       // exact centering sum of mu_G(A_k)
  double expectedError;  // accumulated enclosure width
};

// Exact centering sum_{k <= n} mu_G(A_k) for an event family.
double expected_event_sum(const EventFamily& family, std::uint64_t n,
                          const gauss::GaussTables& tables, double* errorOut = nullptr);

EventCountResult count_events(const EventCounter& counter, std::uint64_t n,
                              const gauss::GaussTables& tables);

// Hitting times of {a' >= l} with size and residue marks.
struct HittingRecord {
  std::uint64_t level = 0;          // l
  std::uint64_t sizeThreshold = 0;  // ceil(l / theta)
  std::uint64_t modulus = 0;        // m
  std::vector<std::uint64_t> positions;  // absolute digit indices of hits (1-based)
  std::vector<std::uint64_t> gaps;       // waiting times; positions[i] = sum of gaps[0..i]
  std::vector<std::uint8_t> sizeMarks;   // 1 iff digit >= sizeThreshold
  std::vector<std::uint32_t> residueMarks;  // digit mod modulus
};

// Runs the source until `hits` occurrences of {a' >= l}. Requires
// l > m >= 2 and theta in (0,1).
HittingRecord hitting_process(cf::DigitSource& source, const primes::PrimeTable& table,
                              std::uint64_t l, std::size_t hits, double theta, std::uint64_t m);

// Running ratio statistics a'_n vs prior sums. Ratios are emitted only
// once the prior prime sum is positive.
class RatioTracker {
 public:
  RatioTracker() = default;
  explicit RatioTracker(std::function<double(double)> g) : g_(std::move(g)) {}

  void update(Digit d, Digit primeValue);

  std::uint64_t n() const { return n_; }
  std::uint64_t exceedance_count() const { return exceed_; }
  double max_prime_over_prime_sum() const { return maxPrimeOverPrime_; }
  double max_g_over_prime_sum() const { return maxGOverPrime_; }
  double max_prime_over_full_sum() const { return maxPrimeOverFull_; }
  double prime_over_full_sums() const {
    return sumFull_ ? static_cast<double>(sumPrime_) / static_cast<double>(sumFull_) : 0.0;
  }

 private:
  std::function<double(double)> g_;
  std::uint64_t n_ = 0;
  std::uint64_t sumFull_ = 0;
  std::uint64_t sumPrime_ = 0;
  std::uint64_t exceed_ = 0;
  double maxPrimeOverPrime_ = 0;
  double maxGOverPrime_ = 0;
  double maxPrimeOverFull_ = 0;
};

}  // namespace primecf::stats

#endif  // PRIMECF_TRAJECTORY_STATS_HPP_
