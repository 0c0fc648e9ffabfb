#include "primecf/cf_stream.hpp"

#include <cmath>
#include <numeric>

namespace primecf::cf {

namespace {

std::vector<Digit> euclid_digits(BigInt num, BigInt den, std::size_t maxDigits) {
  if (den == 0) throw std::domain_error("digits_of_rational: zero denominator");
  if (num <= 0 || num > den) throw std::domain_error("digits_of_rational: requires 0 < numerator <= denominator");
  BigInt g = boost::multiprecision::gcd(num, den);
  num /= g;
  den /= g;
  std::vector<Digit> out;
  // x = num/den in (0,1]; a(x) = floor(den/num), then x <- 1/x - a.
  while (num != 0 && out.size() < maxDigits) {
    BigInt k = den / num;
    out.push_back(static_cast<Digit>(k));
    BigInt r = den - k * num;
    den = num;
    num = r;
  }
  return out;
}

}  // namespace

std::vector<Digit> digits_of_rational(std::uint64_t numerator, std::uint64_t denominator,
                                      std::size_t maxDigits) {
  return euclid_digits(BigInt(numerator), BigInt(denominator), maxDigits);
}

std::vector<Digit> digits_of_rational(const BigInt& numerator, const BigInt& denominator,
                                      std::size_t maxDigits) {
  return euclid_digits(numerator, denominator, maxDigits);
}

ExactRationalSource::ExactRationalSource(std::uint64_t numerator, std::uint64_t denominator)
    : num_(numerator), den_(denominator) {
  if (denominator == 0) throw std::domain_error("ExactRationalSource: zero denominator");
  if (numerator == 0 || num_ > den_)
    throw std::domain_error("ExactRationalSource: requires 0 < numerator <= denominator");
  BigInt g = boost::multiprecision::gcd(num_, den_);
  num_ /= g;
  den_ /= g;
}

std::optional<Digit> ExactRationalSource::next() {
  if (num_ == 0) return std::nullopt;
  BigInt k = den_ / num_;
  BigInt r = den_ - k * num_;
  den_ = num_;
  num_ = r;
  return static_cast<Digit>(k);
}

LazyRealSource::LazyRealSource(std::uint64_t bitSeed, std::uint64_t precisionBudget)
    : bits_(bitSeed), budget_(precisionBudget) {}

namespace {

// floor(1/x) for the positive rational x = num/den.
Digit digit_at(const BigInt& num, const BigInt& den) {
  return static_cast<Digit>(BigInt(den / num));
}

}  // namespace

// Resolves the next digit if floor(1/x) is constant on the image of the
// half-open u-interval. a(x) = floor(1/x) is left-continuous with jumps
// at the points 1/q, so on [A, B) constancy is equivalent to
// a(A) == a(B), while on (C, D] it is a(D) == right-limit of a at C,
// the right-limit being 1/C - 1 when 1/C is an exact integer.
bool LazyRealSource::try_extract(Digit& out) const {
  const BigInt twoM = BigInt(1) << m_;
  BigInt nLo = lft_.a * p_ + lft_.b * twoM;
  BigInt dLo = lft_.c * p_ + lft_.d * twoM;
  BigInt nHi = lft_.a * (p_ + 1) + lft_.b * twoM;
  BigInt dHi = lft_.c * (p_ + 1) + lft_.d * twoM;
  if (dLo == 0 || dHi == 0) return false;
  if (dLo < 0) {
    nLo = -nLo;
    dLo = -dLo;
  }
  if (dHi < 0) {
    nHi = -nHi;
    dHi = -dHi;
  }
  // both endpoint values must lie in (0, +inf) before a digit can resolve
  if (nLo <= 0 || nHi <= 0) return false;

  // orientation: x(u_lo) vs x(u_hi)
  const BigInt lhs = nLo * dHi, rhs = nHi * dLo;
  const int cmp = lhs.compare(rhs);
  if (cmp == 0) return false;
  if (cmp < 0) {
    // increasing: image [x_lo, x_hi)
    const Digit kClosed = digit_at(nLo, dLo);
    const Digit kLimit = digit_at(nHi, dHi);
    if (kClosed != kLimit || kClosed < 1) return false;
    out = kClosed;
    return true;
  }
  // decreasing: image (x_hi, x_lo]
  const Digit kClosed = digit_at(nLo, dLo);
  Digit kLimit = digit_at(nHi, dHi);
  if (dHi % nHi == 0 && kLimit > 0) --kLimit;  // right-limit at an exact 1/q
  if (kClosed != kLimit || kClosed < 1) return false;
  out = kClosed;
  return true;
}

void LazyRealSource::consume_bit() {
  if (bits_.bits_consumed() >= budget_)
    throw RefinementLimitError("LazyRealSource: precision budget of " + std::to_string(budget_) +
                               " bits exhausted without digit resolution");
  const bool bit = bits_.next_bit();
  p_ <<= 1;
  if (bit) p_ += 1;
  ++m_;
}

Digit LazyRealSource::next_digit() {
  for (;;) {
    Digit k = 0;
    if (try_extract(k)) {
      // Gauss-map step x -> 1/x - k
      LftState next{lft_.c, lft_.d, lft_.a - BigInt(k) * lft_.c, lft_.b - BigInt(k) * lft_.d};
      lft_ = std::move(next);
      return k;
    }
    consume_bit();
  }
}

NaturalExtensionSource::NaturalExtensionSource(std::uint64_t seed, InitialLaw law)
    : r_(0.0), gen_(seed) {
  if (law == InitialLaw::Gauss) {
    // r0 = 2^W - 1 has the Gauss density 1/(log2 (1+r)) on (0,1)
    r_ = std::exp2(gen_.uniform_open01()) - 1.0;
  }
}

DigitSource::DigitSource(const Backend& backend)
    : impl_(std::visit(
          [](auto&& b) -> std::variant<ExactRationalSource, LazyRealSource, NaturalExtensionSource> {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ExactRationalBackend>)
              return ExactRationalSource(b.numerator, b.denominator);
            else if constexpr (std::is_same_v<T, LazyRealBackend>)
              return LazyRealSource(b.bitSeed, b.precisionBudget);
            else
              return NaturalExtensionSource(b.seed, b.initialLaw);
          },
          backend)) {}

std::optional<Digit> DigitSource::next() {
  std::optional<Digit> d;
  if (auto* rat = std::get_if<ExactRationalSource>(&impl_)) {
    d = rat->next();
  } else if (auto* lazy = std::get_if<LazyRealSource>(&impl_)) {
    d = lazy->next_digit();
  } else {
    d = std::get<NaturalExtensionSource>(impl_).next_digit();
  }
  if (d) ++position_;
  return d;
}

std::vector<Digit> sample_trajectory(std::uint64_t seed, std::size_t n, BackendKind backend,
                                     InitialLaw law, std::uint64_t precisionBudget) {
  if (n == 0) throw std::domain_error("sample_trajectory: n must be >= 1");
  std::vector<Digit> out;
  out.reserve(n);
  if (backend == BackendKind::NaturalExtension) {
    NaturalExtensionSource src(seed, law);
    for (std::size_t i = 0; i < n; ++i) out.push_back(src.next_digit());
  } else {
    if (law != InitialLaw::Lebesgue)
      throw std::invalid_argument("sample_trajectory: the lazy-real backend samples the uniform law");
    LazyRealSource src(seed, precisionBudget);
    for (std::size_t i = 0; i < n; ++i) out.push_back(src.next_digit());
  }
  return out;
}

bool cross_validate_sources(std::uint64_t bitSeed, unsigned bits) {
  if (bits == 0) throw std::domain_error("cross_validate_sources: bits must be >= 1");
  rng::BitStream stream(bitSeed);
  BigInt k = 0;
  for (unsigned i = 0; i < bits; ++i) {
    k <<= 1;
    if (stream.next_bit()) k += 1;
  }
  if (k == 0) return true;  // u = 0: no expansion, the lazy source never resolves
  const std::vector<Digit> exact = digits_of_rational(k, BigInt(1) << bits, 16 + 2ull * bits);

  LazyRealSource lazy(bitSeed, bits);
  std::vector<Digit> observed;
  try {
    for (;;) observed.push_back(lazy.next_digit());
  } catch (const RefinementLimitError&) {
  }
  if (observed.size() > exact.size()) return false;
  return std::equal(observed.begin(), observed.end(), exact.begin());
}

}  // namespace primecf::cf
