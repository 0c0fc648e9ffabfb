#include "primecf/primes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace primecf::primes {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Witness set covering all n < 3.3e24 (Sorenson & Webster), hence all u64.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

std::uint64_t pollard_brent(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  std::uint64_t x0 = 2, c = 1;
  while (true) {
    std::uint64_t x = x0, y = x0, d = 1;
    std::uint64_t power = 1, lam = 0;
    while (d == 1) {
      if (power == lam) {
        x = y;
        power <<= 1;
        lam = 0;
      }
      y = (mulmod(y, y, n) + c) % n;
      ++lam;
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
    ++x0;
    ++c;
  }
}

void factorize(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL, 41ULL, 43ULL, 47ULL}) {
    if (n % p == 0) {
      while (n % p == 0) {
        out.push_back(p);
        n /= p;
      }
      factorize(n, out);
      return;
    }
  }
  std::uint64_t d = pollard_brent(n);
  factorize(d, out);
  factorize(n / d, out);
}

}  // namespace

unsigned prime_omega(std::uint64_t n) {
  if (n == 0) return 0;
  std::vector<std::uint64_t> f;
  factorize(n, f);
  return static_cast<unsigned>(f.size());
}

std::uint64_t totient(std::uint64_t m) {
  if (m == 0) throw std::domain_error("totient: m must be >= 1");
  std::vector<std::uint64_t> f;
  factorize(m, f);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  std::uint64_t phi = m;
  for (std::uint64_t p : f) phi -= phi / p;
  return phi;
}

std::uint64_t residue_of_prime(std::uint64_t p, std::uint64_t m) {
  if (m < 2) throw std::domain_error("residue_of_prime: modulus must be >= 2");
  if (p <= m) throw std::domain_error("residue_of_prime: requires p > m");
  return p % m;
}

PrimeTable::PrimeTable(std::uint64_t bound) : bound_(bound) {
  if (bound < 2) throw std::domain_error("PrimeTable: bound must be >= 2");
  const std::uint64_t nOdds = bound / 2 + 1;  // odd values 1,3,...,<=bound
  const std::uint64_t nWords = (nOdds + 63) / 64;
  bits_.assign(nWords, ~0ULL);
  // clear bit 0 (the number 1) and any slack past the bound
  bits_[0] &= ~1ULL;
  for (std::uint64_t i = nOdds; i < nWords * 64; ++i)
    bits_[i / 64] &= ~(1ULL << (i % 64));

  // base primes up to sqrt(bound), by plain trial sieve over odds
  const std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(bound))) + 1;
  for (std::uint64_t p = 3; p * p <= bound; p += 2) {
    std::uint64_t ip = (p - 1) / 2;
    if (!((bits_[ip / 64] >> (ip % 64)) & 1u)) continue;
    if (p > root) break;
    for (std::uint64_t q = p * p; q <= bound; q += 2 * p) {
      std::uint64_t iq = (q - 1) / 2;
      bits_[iq / 64] &= ~(1ULL << (iq % 64));
    }
  }

  const std::uint64_t nBlocks = (nWords + kWordsPerBlock - 1) / kWordsPerBlock;
  blockCounts_.resize(nBlocks);
  std::uint64_t running = 0;
  for (std::uint64_t blk = 0; blk < nBlocks; ++blk) {
    blockCounts_[blk] = running;
    const std::uint64_t wEnd = std::min(nWords, (blk + 1) * kWordsPerBlock);
    for (std::uint64_t w = blk * kWordsPerBlock; w < wEnd; ++w)
      running += std::popcount(bits_[w]);
  }
  primeCount_ = running + 1;  // the prime 2
}

std::uint64_t PrimeTable::pi(std::uint64_t x) const {
  if (x > bound_) throw std::domain_error("PrimeTable::pi: x exceeds sieve bound");
  if (x < 2) return 0;
  if (x == 2) return 1;
  // count odd primes <= x: bit indices 0..iMax
  const std::uint64_t iMax = (x - 1) / 2;  // value 2*iMax+1 <= x for both parities
  const std::uint64_t w = iMax / 64;
  std::uint64_t count = blockCounts_[w / kWordsPerBlock];
  for (std::uint64_t ww = (w / kWordsPerBlock) * kWordsPerBlock; ww < w; ++ww)
    count += std::popcount(bits_[ww]);
  const unsigned rem = iMax % 64;
  const std::uint64_t mask = (rem == 63) ? ~0ULL : ((1ULL << (rem + 1)) - 1);
  count += std::popcount(bits_[w] & mask);
  return count + 1;
}

std::uint64_t PrimeTable::nth_prime(std::uint64_t n) const {
  if (n == 0) throw std::domain_error("nth_prime: index starts at 1");
  if (n > primeCount_) throw std::domain_error("nth_prime: beyond sieve bound");
  if (n == 1) return 2;
  const std::uint64_t target = n - 1;  // rank among odd primes
  // binary search over block boundaries
  std::uint64_t lo = 0, hi = blockCounts_.size();  // first block with count >= target is "past"
  while (lo + 1 < hi) {
    std::uint64_t mid = (lo + hi) / 2;
    if (blockCounts_[mid] < target)
      lo = mid;
    else
      hi = mid;
  }
  std::uint64_t count = blockCounts_[lo];
  const std::uint64_t wEnd = bits_.size();
  for (std::uint64_t w = lo * kWordsPerBlock; w < wEnd; ++w) {
    const unsigned pc = std::popcount(bits_[w]);
    if (count + pc < target) {
      count += pc;
      continue;
    }
    std::uint64_t word = bits_[w];
    while (word) {
      unsigned b = std::countr_zero(word);
      word &= word - 1;
      if (++count == target) return 2 * (64 * w + b) + 1;
    }
  }
  throw std::logic_error("nth_prime: inconsistent table");
}

std::uint64_t PrimeTable::count_primes_in_interval(std::uint64_t lo, std::uint64_t hi) const {
  if (lo > hi) throw std::domain_error("count_primes_in_interval: lo > hi");
  return pi(hi) - pi(lo);
}

DigitClass prime_digit_class(const PrimeTable& table) {
  return DigitClass{"primes", [&table](std::uint64_t v) { return table.is_prime(v); }};
}

DigitClass almost_prime_class(unsigned k) {
  return DigitClass{std::to_string(k) + "-almost-primes",
                    [k](std::uint64_t v) { return v > 1 && prime_omega(v) == k; }};
}

}  // namespace primecf::primes
