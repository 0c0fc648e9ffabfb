#ifndef PRIMECF_PRIMES_HPP_
#define PRIMECF_PRIMES_HPP_

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace primecf::primes {

// Deterministic Miller-Rabin, valid for the full 64-bit range.
bool is_prime_u64(std::uint64_t n);

// Number of prime factors counted with multiplicity (of "big Omega" type).
// Trial division over small primes plus Pollard-Brent for the cofactor.
unsigned prime_omega(std::uint64_t n);

// Euler totient; factors m on the fly, any 64-bit m >= 1.
std::uint64_t totient(std::uint64_t m);

// Residue class of a prime p modulo m. Requires p > m >= 2; the result is
// automatically coprime to m.
std::uint64_t residue_of_prime(std::uint64_t p, std::uint64_t m);

// Bit-packed odd-only sieve of Eratosthenes with block-level cumulative
// counts. Immutable after construction; safe to share across threads.
class PrimeTable {
 public:
  // Sieves [2, bound]. bound >= 2.
  explicit PrimeTable(std::uint64_t bound);

  std::uint64_t bound() const { return bound_; }

  // Membership for any 64-bit v: table lookup up to the sieve bound,
  // deterministic Miller-Rabin beyond it (large sampled digits).
  bool is_prime(std::uint64_t v) const {
    if (v <= bound_) return is_prime_below_bound(v);
    return is_prime_u64(v);
  }

  // pi(x) = #{p <= x}. Requires x <= bound.
  std::uint64_t pi(std::uint64_t x) const;

  // p_n with p_1 = 2. Requires n >= 1 and p_n <= bound.
  std::uint64_t nth_prime(std::uint64_t n) const;

  // #{p : lo < p <= hi}. Requires lo <= hi <= bound.
  std::uint64_t count_primes_in_interval(std::uint64_t lo, std::uint64_t hi) const;

  // pi(bound)
  std::uint64_t prime_count() const { return primeCount_; }

  std::size_t memory_bytes() const {
    return bits_.size() * sizeof(std::uint64_t) +
           blockCounts_.size() * sizeof(std::uint64_t) + sizeof(*this);
  }

  // Visits every prime in [lo, hi] (intersected with [2, bound]) in
  // ascending order.
  template <class Fn>
  void for_each_prime_in(std::uint64_t lo, std::uint64_t hi, Fn&& fn) const {
    if (hi > bound_) hi = bound_;
    if (lo < 2) lo = 2;
    if (lo > hi) return;
    if (lo <= 2) fn(std::uint64_t{2});
    // odd candidates: indices i with value 2i+1 in [max(lo,3), hi]
    std::uint64_t iLo = (std::max<std::uint64_t>(lo, 3) - 1) / 2;
    if (2 * iLo + 1 < lo) ++iLo;
    std::uint64_t iHi = (hi - 1) / 2;  // hi >= 2 here; value 2*iHi+1 <= hi
    if (2 * iHi + 1 > hi) --iHi;
    if (iLo > iHi) return;
    std::uint64_t w = iLo / 64, wEnd = iHi / 64;
    for (; w <= wEnd; ++w) {
      std::uint64_t word = bits_[w];
      if (w == iLo / 64) word &= ~0ULL << (iLo % 64);
      if (w == wEnd && (iHi % 64) != 63) word &= (1ULL << ((iHi % 64) + 1)) - 1;
      while (word) {
        unsigned b = std::countr_zero(word);
        word &= word - 1;
        fn(2 * (64 * w + b) + 1);
      }
    }
  }

  template <class Fn>
  void for_each_prime(Fn&& fn) const {
    for_each_prime_in(2, bound_, fn);
  }

 private:
  bool is_prime_below_bound(std::uint64_t v) const {
    if (v < 2) return false;
    if (v == 2) return true;
    if (v % 2 == 0) return false;
    std::uint64_t i = (v - 1) / 2;
    return (bits_[i / 64] >> (i % 64)) & 1u;
  }

  std::uint64_t bound_;
  std::uint64_t primeCount_ = 0;
  // bit i <=> 2i+1 is prime (bit 0, the number 1, is never set)
  std::vector<std::uint64_t> bits_;
  // cumulative set-bit count strictly before each block of kWordsPerBlock words
  std::vector<std::uint64_t> blockCounts_;
  static constexpr std::uint64_t kWordsPerBlock = 8;  // 512 odds per block
};

// Pluggable digit-class predicate. The prime class is the default
// everywhere; other classes get empirical statistics only.
struct DigitClass {
  std::string label;
  std::function<bool(std::uint64_t)> contains;
};

DigitClass prime_digit_class(const PrimeTable& table);
// Integers that are the product of exactly k primes counted with
// multiplicity (k = 1 reduces to the primes).
DigitClass almost_prime_class(unsigned k);

}  // namespace primecf::primes

#endif  // PRIMECF_PRIMES_HPP_
