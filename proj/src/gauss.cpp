#include "primecf/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace primecf::gauss {

namespace {

constexpr long double kLn2 = 0.693147180559945309417232121458L;
// Rosser-Schoenfeld: pi(t) < 1.25506 t/log t for t > 1, and
// pi(t) > t/log t for t >= 17.
constexpr long double kRSUpper = 1.25506L;

long double term_nats(long double p) { return std::log1p(1.0L / (p * (p + 2.0L))); }

}  // namespace

MeasureValue cylinder_measure(std::uint64_t k) {
  if (k < 1) throw std::domain_error("cylinder_measure: digit must be >= 1");
  const long double kd = static_cast<long double>(k);
  const double v = static_cast<double>(term_nats(kd) / kLn2);
  return {v, 4e-16 * v, false};
}

MeasureValue digit_tail(std::uint64_t K) {
  if (K < 1) throw std::domain_error("digit_tail: K must be >= 1");
  const double v = static_cast<double>(std::log1p(1.0L / static_cast<long double>(K)) / kLn2);
  return {v, 4e-16 * v, false};
}

double digit_tail_asymptotic(std::uint64_t K) {
  return 1.0 / (kLog2 * static_cast<double>(K));
}

MeasureValue interval_measure(double a, double b) {
  if (!(0.0 <= a && a <= b && b <= 1.0))
    throw std::domain_error("interval_measure: requires 0 <= a <= b <= 1");
  const double v =
      static_cast<double>((std::log1p(static_cast<long double>(b)) -
                           std::log1p(static_cast<long double>(a))) / kLn2);
  return {v, 4e-16 * (v + 1e-30), false};
}

GaussTables::GaussTables(const primes::PrimeTable& table) : table_(&table) {
  if (table.bound() > 0xFFFFFFFFull)
    throw std::domain_error("GaussTables: sieve bound beyond 2^32 is not supported");
  primes_.reserve(table.prime_count());
  table.for_each_prime([this](std::uint64_t p) { primes_.push_back(static_cast<std::uint32_t>(p)); });

  const std::size_t n = primes_.size();
  suffixAnchors_.assign(n / kAnchor + 1, 0.0L);
  {
    long double run = 0.0L;
    std::size_t j = n;
    while (j > 0) {
      --j;
      run += term_nats(static_cast<long double>(primes_[j]));
      if (j % kAnchor == 0) suffixAnchors_[j / kAnchor] = run;
    }
    // anchor past the end stays 0; anchors at j%kAnchor==0 positions filled above
  }
  weightedPrefixAnchors_.assign(n / kAnchor + 1, 0.0L);
  {
    long double run = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      if (j % kAnchor == 0) weightedPrefixAnchors_[j / kAnchor] = run;
      run += static_cast<long double>(primes_[j]) * term_nats(static_cast<long double>(primes_[j]));
    }
    if (n % kAnchor == 0) weightedPrefixAnchors_[n / kAnchor] = run;
  }

  // enclosure of sum_{p > B} log(1 + 1/(p(p+2))) via partial summation
  // against the Rosser-Schoenfeld pi(t) bounds:
  //   T2(B) = sum_{p>B} p^-2 = -pi(B)/B^2 + 2 int_B^inf pi(t) t^-3 dt
  //   J(B)  = int_B^inf t^-2/log t dt  in  [1/(B(log B + 1)), 1/(B log B)]
  const long double B = static_cast<long double>(table.bound());
  const long double piB = static_cast<long double>(table.prime_count());
  const long double logB = std::log(B);
  const long double jHi = 1.0L / (B * logB);
  const long double jLo = 1.0L / (B * (logB + 1.0L));
  long double t2Lo = -piB / (B * B) + 2.0L * jLo;
  const long double t2Hi = -piB / (B * B) + 2.0L * kRSUpper * jHi;
  if (table.bound() < 17 || t2Lo < 0) t2Lo = 0;
  // x_p = 1/(p(p+2)) >= (1-2/B)/p^2 for p > B, and log(1+x) >= x(1-x/2)
  tailBeyondLo_ = t2Lo * (1.0L - 2.0L / B) * (1.0L - 0.5L / (B * B));
  tailBeyondHi_ = t2Hi;
}

// sum_{p >= K, p sieved} log(1+1/(p(p+2))) plus the beyond-bound bracket;
// returns the midpoint, writes the half-width.
double GaussTables::tail_nats_mid(std::uint64_t K, double* halfWidth) const {
  const std::uint64_t bound = table_->bound();
  if (K <= bound) {
    const auto it = std::lower_bound(primes_.begin(), primes_.end(), K);
    std::size_t idx = static_cast<std::size_t>(it - primes_.begin());
    long double partial = 0.0L;
    const std::size_t n = primes_.size();
    std::size_t nextAnchor = ((idx + kAnchor - 1) / kAnchor) * kAnchor;
    if (nextAnchor > n) nextAnchor = n;
    for (std::size_t j = idx; j < nextAnchor; ++j)
      partial += term_nats(static_cast<long double>(primes_[j]));
    if (nextAnchor % kAnchor == 0) partial += suffixAnchors_[nextAnchor / kAnchor];
    const long double lo = partial + tailBeyondLo_;
    const long double hi = partial + tailBeyondHi_;
    *halfWidth = static_cast<double>((hi - lo) / 2);
    return static_cast<double>((hi + lo) / 2);
  }
  // beyond the sieve: bracket everything, with pi(K) itself enclosed by RS
  const long double Kl = static_cast<long double>(K);
  const long double logK = std::log(Kl);
  const long double jHi = 1.0L / (Kl * logK);
  const long double jLo = 1.0L / (Kl * (logK + 1.0L));
  const long double piLo = Kl / logK;          // valid K >= 17
  const long double piHi = kRSUpper * Kl / logK;
  long double t2Lo = -piHi / (Kl * Kl) + 2.0L * jLo;
  long double t2Hi = -piLo / (Kl * Kl) + 2.0L * kRSUpper * jHi;
  if (K < 17 || t2Lo < 0) t2Lo = 0;
  const long double lo = t2Lo * (1.0L - 2.0L / Kl) * (1.0L - 0.5L / (Kl * Kl));
  const long double hi = t2Hi;
  *halfWidth = static_cast<double>((hi - lo) / 2);
  return static_cast<double>((hi + lo) / 2);
}

MeasureValue GaussTables::prime_tail(std::uint64_t K, TailMode mode) const {
  if (K < 2) throw std::domain_error("prime_tail: K must be >= 2");
  if (mode == TailMode::Asymptotic) {
    const double v = 1.0 / (kLog2 * static_cast<double>(K) * std::log(static_cast<double>(K)));
    return {v, 0.0, true};
  }
  double half = 0;
  const double mid = tail_nats_mid(K, &half);
  const double v = static_cast<double>(mid / static_cast<double>(kLn2));
  return {v, half / kLog2 + 1e-15 * (std::abs(v) + 1.0), false};
}

MeasureValue GaussTables::prime_threshold_measure(double b, bool strict) const {
  if (strict) {
    if (b < 0) return {1.0, 0.0, false};
    const double f = std::floor(b);
    const std::uint64_t K = static_cast<std::uint64_t>(f) + 1;
    return prime_tail(std::max<std::uint64_t>(2, K));
  }
  if (b <= 0) return {1.0, 0.0, false};
  const double c = std::ceil(b);
  const std::uint64_t K = static_cast<std::uint64_t>(c);
  return prime_tail(std::max<std::uint64_t>(2, K));
}

MeasureValue GaussTables::prime_interval_measure(std::uint64_t lo, std::uint64_t hi) const {
  if (hi > table_->bound())
    throw std::domain_error("prime_interval_measure: upper end beyond sieve bound");
  if (lo > hi) return {0.0, 0.0, false};
  const auto itLo = std::lower_bound(primes_.begin(), primes_.end(), lo);
  const auto itHi = std::upper_bound(primes_.begin(), primes_.end(), hi);
  long double s = 0.0L;
  for (auto it = itLo; it != itHi; ++it) s += term_nats(static_cast<long double>(*it));
  const double v = static_cast<double>(s / kLn2);
  return {v, 1e-15 * (v + 1e-30), false};
}

MeasureValue GaussTables::freq_constant_product_form() const {
  long double prod = 1.0L;
  for (std::uint32_t p : primes_) {
    const long double pl = static_cast<long double>(p);
    prod *= 1.0L + 1.0L / (pl * (pl + 2.0L));
  }
  const long double lo = std::log(prod) + tailBeyondLo_;
  const long double hi = std::log(prod) + tailBeyondHi_;
  const double v = static_cast<double>((hi + lo) / (2 * kLn2));
  return {v, static_cast<double>((hi - lo) / (2 * kLn2)) + 1e-12 * v, false};
}

MeasureValue GaussTables::moment_constant(double gamma) const {
  if (!(gamma < 1.0))
    throw std::domain_error("moment_constant: requires gamma < 1 (the series diverges at 1)");
  long double s = 0.0L;
  for (std::uint32_t p : primes_) {
    const long double pl = static_cast<long double>(p);
    s += std::pow(pl, static_cast<long double>(gamma)) * term_nats(pl);
  }
  // tail: sum_{p>B} p^gamma log(1+1/(p(p+2))) bracketed through
  // G(B) = sum_{p>B} p^(gamma-2)
  const long double B = static_cast<long double>(table_->bound());
  const long double logB = std::log(B);
  const long double g = static_cast<long double>(gamma);
  const long double Bg1 = std::pow(B, g - 1.0L);
  const long double jHi = Bg1 / ((1.0L - g) * logB);
  const long double jLo = Bg1 / ((1.0L - g) * logB + 1.0L);
  const long double piB = static_cast<long double>(table_->prime_count());
  long double gLo = -piB * std::pow(B, g - 2.0L) + (2.0L - g) * jLo;
  const long double gHi = -piB * std::pow(B, g - 2.0L) + (2.0L - g) * kRSUpper * jHi;
  if (table_->bound() < 17 || gLo < 0) gLo = 0;
  const long double tLo = gLo * (1.0L - 2.0L / B) * (1.0L - 0.5L / (B * B));
  const long double tHi = gHi;
  const double v = static_cast<double>((s + (tLo + tHi) / 2) / kLn2);
  return {v, static_cast<double>((tHi - tLo) / (2 * kLn2)) + 1e-14 * (std::abs(v) + 1e-30), false};
}

MeasureValue GaussTables::truncated_expectation(std::uint64_t N, TruncationKind which) const {
  if (N < 1) throw std::domain_error("truncated_expectation: N must be >= 1");
  if (which == TruncationKind::FullDigits) {
    // sum_{K=1..N} log(1+1/K) telescopes to log(N+1)
    const double v = static_cast<double>(std::log1p(static_cast<long double>(N)) / kLn2);
    return {v, 4e-16 * v, false};
  }
  if (N > table_->bound())
    throw std::domain_error("truncated_expectation: N beyond sieve bound for prime digits");
  // L'(N) = sum_{p<=N} p mu(I_p) + N mu(a' >= N+1)
  const auto it = std::upper_bound(primes_.begin(), primes_.end(), N);
  const std::size_t idx = static_cast<std::size_t>(it - primes_.begin());
  const std::size_t anchor = (idx / kAnchor) * kAnchor;
  long double wp = weightedPrefixAnchors_[idx / kAnchor];
  for (std::size_t j = anchor; j < idx; ++j)
    wp += static_cast<long double>(primes_[j]) * term_nats(static_cast<long double>(primes_[j]));
  const MeasureValue tail = prime_tail(N + 1);
  const double v = static_cast<double>(wp / kLn2) + static_cast<double>(N) * tail.value;
  return {v, static_cast<double>(N) * tail.error + 1e-14 * (v + 1.0), false};
}

// ---- norming sequences -----------------------------------------------

double ParametricSequence::operator()(double n) const {
  double v = C;
  if (alpha != 0) v *= std::pow(n, alpha);
  if (beta != 0) v *= std::pow(std::log(n), beta);
  if (gamma != 0) v *= std::pow(std::log(std::log(n)), gamma);
  return v;
}

double ParametricSequence::min_index() const {
  if (gamma != 0) return 3;  // loglog positive from n = 3
  if (beta != 0) return 2;
  return 1;
}

double n_bar(unsigned j) {
  if (j < 1) throw std::domain_error("n_bar: j must be >= 1");
  const double lj = std::log(static_cast<double>(j));
  return std::exp(static_cast<double>(j) * lj * lj);
}

double norming(const NormingSequence& seq, std::uint64_t n, const GaussTables* tables) {
  const double nd = static_cast<double>(n);
  switch (seq.kind) {
    case NormingKind::APrime: {
      if (n < 1) throw std::domain_error("norming: aPrime requires n >= 1");
      if (!tables) throw std::domain_error("norming: aPrime requires GaussTables");
      return nd / tables->truncated_expectation(n, TruncationKind::PrimeDigits).value;
    }
    case NormingKind::BPrime: {
      if (n < 3) throw std::domain_error("norming: bPrime requires n >= 3");
      return nd * std::log(std::log(nd)) / kLog2;
    }
    case NormingKind::DGamma: {
      if (!(seq.gamma > 1.0)) throw std::domain_error("norming: dGamma requires gamma > 1");
      if (nd < std::max(3.0, seq.bSchedule.min_index()))
        throw std::domain_error("norming: dGamma index below first valid n");
      const double b = seq.bSchedule(nd);
      if (!(b >= 1.0)) throw std::domain_error("norming: dGamma requires b_n >= 1");
      const double g = seq.gamma;
      return std::pow(nd, g) * std::pow(b, 1.0 - g) /
             ((g - 1.0) * std::pow(kLog2, g) * std::pow(std::log(nd), g));
    }
    case NormingKind::DFunny: {
      if (nd <= n_bar(3))
        throw std::domain_error("norming: dFunny requires n > n_bar(3) (about 37.4)");
      unsigned j = 4;
      while (nd > n_bar(j)) ++j;
      const double nb = n_bar(j);
      // loglog n_bar(j) = log(j log^2 j)
      const double lj = std::log(static_cast<double>(j));
      const double loglogNb = std::log(static_cast<double>(j) * lj * lj);
      return nb * loglogNb / kLog2;
    }
  }
  throw std::logic_error("norming: unknown kind");
}

// ---- series and integral classifiers ---------------------------------

namespace {

void validate_growth(const ParametricSequence& b) {
  if (!(b.C > 0)) throw std::domain_error("series family: C must be positive");
  if (b.alpha < 0) throw std::domain_error("series family: alpha must be >= 0");
  if (b.alpha == 0) {
    if (b.beta < 0) throw std::domain_error("series family: decaying log factor with alpha = 0");
    if (b.beta == 0) {
      if (b.gamma < 0) throw std::domain_error("series family: decaying loglog factor");
      if (b.gamma == 0 && b.C <= 1)
        throw std::domain_error("series family: constant sequence must exceed 1");
    }
  }
}

}  // namespace

SeriesVerdict series_classifier(const ParametricSequence& b) {
  validate_growth(b);
  // b_n log b_n ~ alpha C n^alpha (log n)^(beta+1) (loglog n)^gamma for
  // alpha > 0; Bertrand rules on sum 1/(n^a (log n)^s (loglog n)^t).
  if (b.alpha > 1) return SeriesVerdict::Convergent;
  if (b.alpha < 1) return SeriesVerdict::Divergent;
  if (b.beta > 0) return SeriesVerdict::Convergent;
  if (b.beta < 0) return SeriesVerdict::Divergent;
  return b.gamma <= 1 ? SeriesVerdict::Divergent : SeriesVerdict::Convergent;
}

bool series_lemma_check(const ParametricSequence& b) {
  validate_growth(b);
  const bool ratioNonDecreasing =
      b.alpha > 1 || (b.alpha == 1 && (b.beta > 0 || (b.beta == 0 && b.gamma >= 0)));
  if (!ratioNonDecreasing)
    throw std::domain_error("series_lemma_check: requires b_n/n non-decreasing");
  // limsup (n loglog n)/b_n > 0
  return b.alpha == 1 && b.beta == 0 && b.gamma <= 1;
}

SeriesVerdict ratio_integral_classifier(const RatioFamily& g, RatioDenominator which) {
  if (which == RatioDenominator::FullSum) {
    // integrand ~ (log y)^(rho-2) (loglog y)^(-gamma) / y
    if (g.rho > 1) return SeriesVerdict::Divergent;
    if (g.rho < 1) return SeriesVerdict::Convergent;
    return g.gamma <= 1 ? SeriesVerdict::Divergent : SeriesVerdict::Convergent;
  }
  // PrimeSum: integrand ~ (log y)^(rho-1) (loglog y)^(-gamma-1) / y
  if (g.rho > 0) return SeriesVerdict::Divergent;
  if (g.rho < 0) return SeriesVerdict::Convergent;
  return g.gamma <= 0 ? SeriesVerdict::Divergent : SeriesVerdict::Convergent;
}

NumericProbe series_numeric_probe(const std::function<double(double)>& b, double upTo) {
  NumericProbe probe;
  double sum = 0;
  double nextCheckpoint = 10;
  for (double n = 4; n <= upTo; ++n) {
    const double bn = b(n);
    if (bn > 1) sum += 1.0 / (bn * std::log(bn));
    if (n >= nextCheckpoint) {
      probe.checkpoints.push_back(n);
      probe.partialValues.push_back(sum);
      nextCheckpoint *= 10;
    }
  }
  probe.checkpoints.push_back(upTo);
  probe.partialValues.push_back(sum);
  return probe;
}

NumericProbe ratio_integral_numeric_probe(const std::function<double(double)>& g,
                                          RatioDenominator which, double upTo) {
  NumericProbe probe;
  // log-spaced trapezoid of the integrand from y0 = 16
  const double y0 = 16;
  const int stepsPerDecade = 256;
  double integral = 0;
  double nextCheckpoint = 100;
  auto integrand = [&](double y) {
    const double gy = g(y);
    const double den = which == RatioDenominator::FullSum ? std::log(gy) : std::log(std::log(gy));
    return gy / den / (y * y * std::log(y));
  };
  double prevY = y0, prevF = integrand(y0);
  const double ratio = std::pow(10.0, 1.0 / stepsPerDecade);
  for (double y = y0 * ratio; prevY < upTo; y *= ratio) {
    if (y > upTo) y = upTo;
    const double f = integrand(y);
    integral += 0.5 * (prevF + f) * (y - prevY);
    if (y >= nextCheckpoint || y == upTo) {
      probe.checkpoints.push_back(y);
      probe.partialValues.push_back(integral);
      while (nextCheckpoint <= y) nextCheckpoint *= 10;
    }
    prevY = y;
    prevF = f;
    if (y == upTo) break;
  }
  return probe;
}

}  // namespace primecf::gauss
