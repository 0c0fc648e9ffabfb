#ifndef PRIMECF_GAUSS_HPP_
#define PRIMECF_GAUSS_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "primecf/primes.hpp"

// Exact Gauss-measure computations with rigorous truncation bounds.
//
// Notation guard: in this library "loglog" is always the iterated
// logarithm log(log(n)) (the paper-style subscripted log), while "log2"
// written in formulas below always denotes the constant log(2); a base-2
// logarithm never appears except as division by log(2).
namespace primecf::gauss {

inline constexpr double kLog2 = 0.69314718055994530942;

// A value together with a rigorous bound on |true - value|. Results of
// asymptotic formulas carry heuristic=true: their error field is 0 by
// convention and not a certified enclosure.
struct MeasureValue {
  double value = 0;
  double error = 0;
  bool heuristic = false;
  double lower() const { return value - error; }
  double upper() const { return value + error; }
};

// mu_G(I_k) = log((k+1)^2 / (k(k+2))) / log 2
MeasureValue cylinder_measure(std::uint64_t k);

// mu_G({a >= K}) = log((K+1)/K) / log 2
MeasureValue digit_tail(std::uint64_t K);
// asymptotic companion 1/(log2 * K)
double digit_tail_asymptotic(std::uint64_t K);

// mu_G([a,b]) for 0 <= a <= b <= 1
MeasureValue interval_measure(double a, double b);

enum class TailMode { Exact, Asymptotic };
enum class TruncationKind { FullDigits, PrimeDigits };

// Prime-sum machinery over a sieve. Splits every constant into the exact
// finite sum over sieved primes plus a certified enclosure of the
// remainder from Rosser-Schoenfeld bounds on pi(t). Immutable and
// thread-safe after construction.
class GaussTables {
 public:
  explicit GaussTables(const primes::PrimeTable& table);

  const primes::PrimeTable& table() const { return *table_; }

  // mu_G({a' >= K}), K >= 2. Exact mode sums cylinder measures over the
  // sieved primes >= K and brackets the remainder; asymptotic mode
  // returns 1/(log2 * K * log K) flagged heuristic.
  MeasureValue prime_tail(std::uint64_t K, TailMode mode = TailMode::Exact) const;

  // mu_G({a' >= b}) / mu_G({a' > b}) for a real threshold, using the
  // fact that a' takes values in {0} union primes.
  MeasureValue prime_threshold_measure(double b, bool strict) const;

  // sum of mu_G(I_p) over primes p in [lo, hi]; requires hi <= bound.
  MeasureValue prime_interval_measure(std::uint64_t lo, std::uint64_t hi) const;

  // Asymptotic frequency of prime digits: sum over all primes of
  // mu_G(I_p); identical series as prime_tail(2).
  MeasureValue freq_constant() const { return prime_tail(2); }
  // Same constant via the product form (1/log2) log prod (1 + 1/(p(p+2))).
  MeasureValue freq_constant_product_form() const;

  // K_gamma = sum_p p^gamma mu_G(I_p), gamma < 1.
  MeasureValue moment_constant(double gamma) const;

  // L(N) = int (a wedge N) dmu  (closed form log(N+1)/log2) or
  // L'(N) = int (a' wedge N) dmu = sum_{p<=N} p mu(I_p) + N mu(a'>N),
  // computed by partial summation over primes.
  MeasureValue truncated_expectation(std::uint64_t N, TruncationKind which) const;

 private:
  double tail_nats_mid(std::uint64_t K, double* halfWidth) const;  // sum_{p>=K} log(1+1/(p(p+2))), bracketed
  const primes::PrimeTable* table_;
  std::vector<std::uint32_t> primes_;
  // suffix sums (in nats) of log1p(1/(p(p+2))), anchored every kAnchor primes
  std::vector<long double> suffixAnchors_;
  // prefix sums (in nats) of p*log1p(1/(p(p+2))), anchored every kAnchor primes
  std::vector<long double> weightedPrefixAnchors_;
  long double tailBeyondLo_ = 0, tailBeyondHi_ = 0;  // sum_{p > bound} log(1+1/(p(p+2)))
  static constexpr std::size_t kAnchor = 16;
};

// ---- norming sequences -----------------------------------------------

// b_n = C * n^alpha * (log n)^beta * (loglog n)^gamma
struct ParametricSequence {
  double C = 1;
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  double operator()(double n) const;
  // smallest index at which all factors are defined and positive
  double min_index() const;
};

enum class NormingKind { APrime, BPrime, DGamma, DFunny };

struct NormingSequence {
  NormingKind kind = NormingKind::BPrime;
  double gamma = 2.0;                // DGamma
  ParametricSequence bSchedule{100, 0, 0, 0};  // DGamma
};

// n_bar(j) = e^{j log^2 j}; the block norming d'_n uses the block of n.
double n_bar(unsigned j);

// Evaluates the norming sequence at n. APrime requires tables (it is
// N/L'(N)). Kinds and first valid indices:
//   APrime: n >= 1;  BPrime: n >= 3;  DGamma: gamma > 1, n >= 3;
//   DFunny: n > n_bar(3) (about 37.4).
double norming(const NormingSequence& seq, std::uint64_t n, const GaussTables* tables = nullptr);

// ---- series and integral classifiers ---------------------------------

enum class SeriesVerdict { Divergent, Convergent };

// Classifies sum 1/(b_n log b_n) for the parametric family above by
// Bertrand-series rules.
SeriesVerdict series_classifier(const ParametricSequence& b);

// Sufficient divergence condition for sequences with b_n/n non-decreasing:
// limsup (n loglog n)/b_n > 0. When true, series_classifier must report
// Divergent.
bool series_lemma_check(const ParametricSequence& b);

enum class RatioDenominator { PrimeSum, FullSum };

// g(t) = t * (log t)^rho * (loglog t)^(-gamma)
struct RatioFamily {
  double rho = 0;
  double gamma = 0;
};

// Classifies int g(y)/loglog g(y) * dy/(y^2 log y) (PrimeSum) or
// int g(y)/log g(y) * dy/(y^2 log y) (FullSum).
SeriesVerdict ratio_integral_classifier(const RatioFamily& g, RatioDenominator which);

// Numeric partial-sum/partial-integral probes for arbitrary callables.
// Reported, never asserted: the flag stays inconclusive by construction.
struct NumericProbe {
  std::vector<double> checkpoints;
  std::vector<double> partialValues;
  bool inconclusive = true;
};
NumericProbe series_numeric_probe(const std::function<double(double)>& b, double upTo);
NumericProbe ratio_integral_numeric_probe(const std::function<double(double)>& g,
                                          RatioDenominator which, double upTo);

}  // namespace primecf::gauss

#endif  // PRIMECF_GAUSS_HPP_
