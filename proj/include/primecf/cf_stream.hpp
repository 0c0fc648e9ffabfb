#ifndef PRIMECF_CF_STREAM_HPP_
#define PRIMECF_CF_STREAM_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "primecf/primes.hpp"
#include "primecf/rng.hpp"

namespace primecf::cf {

// A continued-fraction digit a_n >= 1.
using Digit = std::uint64_t;
using BigInt = boost::multiprecision::cpp_int;

// Digit extraction follows the cylinder convention I_k = (1/(k+1), 1/k],
// i.e. a(x) = floor(1/x) on (0,1]; in particular a(1/2) = 2 and a(1) = 1.

// Exact CF digits of numerator/denominator, truncated at maxDigits.
// Requires 0 < numerator <= denominator; the gcd is taken internally.
std::vector<Digit> digits_of_rational(std::uint64_t numerator, std::uint64_t denominator,
                                      std::size_t maxDigits);
std::vector<Digit> digits_of_rational(const BigInt& numerator, const BigInt& denominator,
                                      std::size_t maxDigits);

// a'(d): d if d is prime, else 0.
inline Digit prime_digit_value(Digit d, const primes::PrimeTable& table) {
  if (d < 1) throw std::domain_error("prime_digit_value: digit must be >= 1");
  return table.is_prime(d) ? d : 0;
}

class RefinementLimitError : public std::runtime_error {
 public:
  explicit RefinementLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Finite source over the exact expansion of a rational.
class ExactRationalSource {
 public:
  ExactRationalSource(std::uint64_t numerator, std::uint64_t denominator);
  std::optional<Digit> next();

 private:
  BigInt num_, den_;
};

// Exact digit extraction for a uniformly random real, one bit at a time.
// State is x_n = (a*u + b)/(c*u + d) with u pinned to the half-open
// dyadic interval [p/2^m, (p+1)/2^m); a digit k is emitted only once
// floor(1/x) is constant on the (half-open) image interval, after which
// the matrix absorbs the Gauss-map step (a,b,c,d) -> (c, d, a-kc, b-kd).
class LazyRealSource {
 public:
  explicit LazyRealSource(std::uint64_t bitSeed, std::uint64_t precisionBudget = 4096);

  // Throws RefinementLimitError once the bit budget is exhausted without
  // the next digit resolving.
  Digit next_digit();

  struct LftState {
    BigInt a, b, c, d;
    BigInt det() const { return a * d - b * c; }
  };
  const LftState& lft() const { return lft_; }
  // u-interval [p/2^m, (p+1)/2^m)
  const BigInt& u_numerator() const { return p_; }
  std::uint64_t u_bits() const { return m_; }
  std::uint64_t bits_consumed() const { return bits_.bits_consumed(); }
  std::uint64_t precision_budget() const { return budget_; }

 private:
  bool try_extract(Digit& out) const;
  void consume_bit();

  LftState lft_{1, 0, 0, 1};
  BigInt p_ = 0;
  std::uint64_t m_ = 0;
  rng::BitStream bits_;
  std::uint64_t budget_;
};

enum class InitialLaw { Lebesgue, Gauss };

// O(1)-per-digit sampler that is exact in distribution: the chain keeps
// the continuant ratio r = q_{n-1}/q_n, draws the next Gauss-map iterate
// from its conditional law F(s) = (1+r)s/(1+rs) by inversion, and emits
// k = floor(1/s), r <- 1/(k+r).
class NaturalExtensionSource {
 public:
  NaturalExtensionSource(std::uint64_t seed, InitialLaw law);

  Digit next_digit() { return step_with_uniform(gen_.uniform_open01()); }

  // One deterministic step driven by an explicit uniform V in (0,1).
  Digit step_with_uniform(double v) {
    const double s = v / (1.0 + r_ - r_ * v);
    const Digit k = static_cast<Digit>(1.0 / s);
    r_ = 1.0 / (static_cast<double>(k) + r_);
    return k;
  }

  double continuant_ratio() const { return r_; }

 private:
  double r_;
  rng::SplitMix64 gen_;
};

struct ExactRationalBackend {
  std::uint64_t numerator;
  std::uint64_t denominator;
};
struct LazyRealBackend {
  std::uint64_t bitSeed;
  std::uint64_t precisionBudget = 4096;
};
struct NaturalExtensionBackend {
  std::uint64_t seed;
  InitialLaw initialLaw = InitialLaw::Lebesgue;
};
using Backend = std::variant<ExactRationalBackend, LazyRealBackend, NaturalExtensionBackend>;

// Single-owner sequential digit source over any backend, with a position
// counter. Safe to move across threads, not to share mutably.
class DigitSource {
 public:
  explicit DigitSource(const Backend& backend);

  // nullopt signals end of sequence (exact rationals only). LazyReal
  // budget exhaustion surfaces as RefinementLimitError.
  std::optional<Digit> next();

  std::uint64_t position() const { return position_; }

 private:
  std::variant<ExactRationalSource, LazyRealSource, NaturalExtensionSource> impl_;
  std::uint64_t position_ = 0;
};

enum class BackendKind { LazyReal, NaturalExtension };

// Deterministic digit trajectory for (seed, n, backend, initialLaw).
// The Gauss initial law draws r0 = 2^W - 1 (W uniform); Lebesgue starts
// at r0 = 0. The lazy-real backend samples the uniform law only.
std::vector<Digit> sample_trajectory(std::uint64_t seed, std::size_t n, BackendKind backend,
                                     InitialLaw law,
                                     std::uint64_t precisionBudget = 1u << 20);

// Interprets the first `bits` random bits of the seed's stream as the
// dyadic rational u = k/2^bits, expands u exactly with the Euclidean
// path, runs the lazy-real source over the same bit stream, and checks
// that every digit the lazy source resolves before running out of bits
// agrees with the Euclidean expansion.
bool cross_validate_sources(std::uint64_t bitSeed, unsigned bits);

}  // namespace primecf::cf

#endif  // PRIMECF_CF_STREAM_HPP_
