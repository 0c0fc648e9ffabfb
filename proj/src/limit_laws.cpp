#include "primecf/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace primecf::laws {

double reference_cdf(const ReferenceLaw& law, double y) {
  switch (law.kind) {
    case ReferenceLaw::Kind::Theta:
      return y <= 0 ? 0.0 : std::exp(-1.0 / y);
    case ReferenceLaw::Kind::Exp1:
      return y <= 0 ? 0.0 : -std::expm1(-y);
    case ReferenceLaw::Kind::StdNormal:
      return 0.5 * std::erfc(-y / std::sqrt(2.0));
    case ReferenceLaw::Kind::Bernoulli: {
      if (law.bernoulliProbs.empty())
        throw std::domain_error("reference_cdf: empty Bernoulli probability vector");
      if (y < 0) return 0.0;
      double acc = 0;
      for (std::size_t v = 0; v < law.bernoulliProbs.size(); ++v) {
        if (static_cast<double>(v) > y) break;
        acc += law.bernoulliProbs[v];
      }
      return std::min(acc, 1.0);
    }
    case ReferenceLaw::Kind::Degenerate:
      return y >= law.degenerateAt ? 1.0 : 0.0;
  }
  throw std::logic_error("reference_cdf: unknown law");
}

double quantile(const ReferenceLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0,1)");
  switch (law.kind) {
    case ReferenceLaw::Kind::Theta:
      return -1.0 / std::log(p);
    case ReferenceLaw::Kind::Exp1:
      return -std::log1p(-p);
    case ReferenceLaw::Kind::Degenerate:
      return law.degenerateAt;
    case ReferenceLaw::Kind::StdNormal: {
      double lo = -40, hi = 40;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (reference_cdf(law, mid) < p)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    case ReferenceLaw::Kind::Bernoulli: {
      double acc = 0;
      for (std::size_t v = 0; v < law.bernoulliProbs.size(); ++v) {
        acc += law.bernoulliProbs[v];
        if (acc >= p) return static_cast<double>(v);
      }
      return static_cast<double>(law.bernoulliProbs.size() - 1);
    }
  }
  throw std::logic_error("quantile: unknown law");
}

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
}

double empirical_cdf(const EmpiricalSample& sample, double y) {
  if (sample.size() == 0) throw std::domain_error("empirical_cdf: empty sample");
  const auto& v = sample.values();
  const auto it = std::upper_bound(v.begin(), v.end(), y);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

double ks_statistic(const EmpiricalSample& sample, const ReferenceLaw& law) {
  const auto& v = sample.values();
  const std::size_t n = v.size();
  if (n == 0) throw std::domain_error("ks_statistic: empty sample");
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = reference_cdf(law, v[i]);
    const double lower = f - static_cast<double>(i) / static_cast<double>(n);
    const double upper = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    d = std::max(d, std::max(lower, upper));
  }
  return d;
}

double chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  if (counts.size() < 2) throw std::domain_error("chi_square_uniform: needs >= 2 classes");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::domain_error("chi_square_uniform: empty counts");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double dev = static_cast<double>(c) - expected;
    stat += dev * dev / expected;
  }
  return stat;
}

double chi_square_critical(unsigned df, double level) {
  if (df < 1 || df > 7) throw std::domain_error("chi_square_critical: df must be in [1,7]");
  static constexpr double k90[7] = {2.7055434541, 4.6051701860, 6.2513886312, 7.7794403397,
                                    9.2363568998, 10.6446406756, 12.0170365585};
  static constexpr double k95[7] = {3.8414588207, 5.9914645471, 7.8147279033, 9.4877290368,
                                    11.0704976935, 12.5915872437, 14.0671404493};
  static constexpr double k99[7] = {6.6348966010, 9.2103403719, 11.3448667301, 13.2767041359,
                                    15.0862724694, 16.8118938297, 18.4753069066};
  const double* row = nullptr;
  if (std::abs(level - 0.90) < 1e-9)
    row = k90;
  else if (std::abs(level - 0.95) < 1e-9)
    row = k95;
  else if (std::abs(level - 0.99) < 1e-9)
    row = k99;
  else
    throw std::domain_error("chi_square_critical: level must be 0.90, 0.95 or 0.99");
  return row[df - 1];
}

}  // namespace primecf::laws
