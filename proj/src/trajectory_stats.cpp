#include "primecf/trajectory_stats.hpp"

#include <cmath>
#include <stdexcept>

namespace primecf::stats {

void TrajectorySummary::update_with(Digit d, Digit primeValue) {
  ++n_;
  sumFull_ += d;
  if (d > maxFull_) maxFull_ = d;
  if (primeValue > 0) {
    ++primeCount_;
    sumPrime_ += primeValue;
    if (primeValue > maxPrime_) maxPrime_ = primeValue;
    for (std::size_t i = 0; i < powSums_.size(); ++i)
      powSums_[i] += std::pow(static_cast<long double>(primeValue),
                              static_cast<long double>(cfg_.powerExponents[i]));
    if (cfg_.topCapacity > 0) {
      if (top_.size() < cfg_.topCapacity) {
        top_.push_back(primeValue);
        std::push_heap(top_.begin(), top_.end(), std::greater<>{});
      } else if (primeValue > top_.front()) {
        std::pop_heap(top_.begin(), top_.end(), std::greater<>{});
        top_.back() = primeValue;
        std::push_heap(top_.begin(), top_.end(), std::greater<>{});
      }
    }
  }
}

long double TrajectorySummary::sum_prime_pow(double gamma) const {
  if (gamma == 1.0) return static_cast<long double>(sumPrime_);
  for (std::size_t i = 0; i < cfg_.powerExponents.size(); ++i)
    if (cfg_.powerExponents[i] == gamma) return powSums_[i];
  throw std::domain_error("sum_prime_pow: exponent not tracked by this summary");
}

std::vector<std::uint64_t> TrajectorySummary::top_values() const {
  std::vector<std::uint64_t> v(top_);
  std::sort(v.begin(), v.end(), std::greater<>{});
  return v;
}

long double TrajectorySummary::trimmed_sum(std::size_t b, double gamma) const {
  if (b >= n_) throw std::domain_error("trimmed_sum: b must be < n");
  if (b > cfg_.topCapacity) throw std::domain_error("trimmed_sum: b exceeds topK capacity");
  long double total = sum_prime_pow(gamma);
  const auto top = top_values();
  const std::size_t take = std::min(b, top.size());
  for (std::size_t i = 0; i < take; ++i)
    total -= std::pow(static_cast<long double>(top[i]), static_cast<long double>(gamma));
  return total;
}

std::uint64_t EventFamily::first_index() const {
  double m = 1;
  switch (kind) {
    case Kind::Threshold:
      m = b.min_index();
      break;
    case Kind::Equality:
      m = d.min_index();
      break;
    case Kind::Interval:
      m = std::max(d.min_index(), c.min_index());
      break;
  }
  return static_cast<std::uint64_t>(std::ceil(m));
}

void EventFamily::validate(std::uint64_t horizon) const {
  if (kind != Kind::Interval) return;
  for (std::uint64_t k = first_index(); k <= horizon; ++k) {
    double dk = d(static_cast<double>(k));
    if (ceilD) dk = std::ceil(dk);
    const double ck = c(static_cast<double>(k));
    if (!(dk >= 1)) throw std::domain_error("interval event family requires d_n >= 1");
    if (!(ck > 0)) throw std::domain_error("interval event family requires c_n > 0");
    if (ck > std::pow(dk, 0.475))
      throw std::domain_error("interval event family requires c_n <= d_n^0.475");
  }
}

bool EventFamily::occurs(std::uint64_t index, Digit primeValue) const {
  const double k = static_cast<double>(index);
  const double pv = static_cast<double>(primeValue);
  switch (kind) {
    case Kind::Threshold: {
      const double bn = b(k);
      return strict ? pv > bn : pv >= bn;
    }
    case Kind::Equality: {
      const auto dn = static_cast<std::uint64_t>(std::llround(d(k)));
      return primeValue == dn && dn >= 1;
    }
    case Kind::Interval: {
      double dn = d(k);
      if (ceilD) dn = std::ceil(dn);
      return pv >= dn && pv <= dn * (1.0 + 1.0 / c(k));
    }
  }
  return false;
}

double expected_event_sum(const EventFamily& family, std::uint64_t n,
                          const gauss::GaussTables& tables, double* errorOut) {
  double sum = 0, err = 0;
  const std::uint64_t first = family.first_index();
  for (std::uint64_t k = first; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    switch (family.kind) {
      case EventFamily::Kind::Threshold: {
        const auto mv = tables.prime_threshold_measure(family.b(kd), family.strict);
        sum += mv.value;
        err += mv.error;
        break;
      }
      case EventFamily::Kind::Equality: {
        const auto dn = static_cast<std::uint64_t>(std::llround(family.d(kd)));
        if (dn >= 2 && tables.table().is_prime(dn)) {
          const auto mv = gauss::cylinder_measure(dn);
          sum += mv.value;
          err += mv.error;
        }
        break;
      }
      case EventFamily::Kind::Interval: {
        double dn = family.d(kd);
        if (family.ceilD) dn = std::ceil(dn);
        const auto lo = static_cast<std::uint64_t>(std::ceil(dn));
        const auto hi = static_cast<std::uint64_t>(std::floor(dn * (1.0 + 1.0 / family.c(kd))));
        const auto mv = tables.prime_interval_measure(lo, hi);
        sum += mv.value;
        err += mv.error;
        break;
      }
    }
  }
  if (errorOut) *errorOut = err;
  return sum;
}

EventCountResult count_events(const EventCounter& counter, std::uint64_t n,
                              const gauss::GaussTables& tables) {
  double err = 0;
  const double expected = expected_event_sum(counter.family(), n, tables, &err);
  return {counter.count(), expected, err};
}

HittingRecord hitting_process(cf::DigitSource& source, const primes::PrimeTable& table,
                              std::uint64_t l, std::size_t hits, double theta, std::uint64_t m) {
  if (m < 2) throw std::domain_error("hitting_process: modulus must be >= 2");
  if (l <= m) throw std::domain_error("hitting_process: requires level l > m");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::domain_error("hitting_process: theta must lie in (0,1)");
  HittingRecord rec;
  rec.level = l;
  rec.sizeThreshold = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(l) / theta - 1e-9));
  rec.modulus = m;
  rec.positions.reserve(hits);
  rec.gaps.reserve(hits);
  rec.sizeMarks.reserve(hits);
  rec.residueMarks.reserve(hits);
  std::uint64_t lastPos = 0;
  while (rec.positions.size() < hits) {
    const auto d = source.next();
    if (!d) throw std::domain_error("hitting_process: source exhausted before enough hits");
    const Digit pv = table.is_prime(*d) ? *d : 0;
    if (pv >= l) {
      const std::uint64_t pos = source.position();
      rec.positions.push_back(pos);
      rec.gaps.push_back(pos - lastPos);
      lastPos = pos;
      rec.sizeMarks.push_back(pv >= rec.sizeThreshold ? 1 : 0);
      rec.residueMarks.push_back(static_cast<std::uint32_t>(pv % m));
    }
  }
  return rec;
}

void RatioTracker::update(Digit d, Digit primeValue) {
  if (sumPrime_ > 0) {
    const double priorPrime = static_cast<double>(sumPrime_);
    const double priorFull = static_cast<double>(sumFull_);
    if (primeValue > 0) {
      const double pv = static_cast<double>(primeValue);
      if (primeValue > sumPrime_) ++exceed_;
      maxPrimeOverPrime_ = std::max(maxPrimeOverPrime_, pv / priorPrime);
      maxPrimeOverFull_ = std::max(maxPrimeOverFull_, pv / priorFull);
      if (g_ && primeValue >= 3)
        maxGOverPrime_ = std::max(maxGOverPrime_, g_(pv) / priorPrime);
    }
  }
  ++n_;
  sumFull_ += d;
  sumPrime_ += primeValue;
}

}  // namespace primecf::stats
