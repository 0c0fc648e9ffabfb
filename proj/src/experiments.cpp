#include "primecf/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "primecf/limit_laws.hpp"
#include "primecf/trajectory_stats.hpp"

namespace primecf::experiments {

namespace {

using cf::Digit;
using gauss::kLog2;

struct Resolved {
  ExperimentConfig cfg;
  cf::BackendKind backend = cf::BackendKind::NaturalExtension;
  cf::InitialLaw law = cf::InitialLaw::Gauss;
  unsigned threads = 1;
};

double median(std::vector<double> v) {
  if (v.empty()) throw std::domain_error("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// type-7 quantile on a sorted vector
double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

StatRow pass_fail(std::string name, double value, double ref, double lo, double hi) {
  const bool ok = value >= lo && value <= hi;
  return {std::move(name), value, ref, lo, hi, ok ? "pass" : "fail"};
}

StatRow report_row(std::string name, double value, double ref = 0, double lo = 0, double hi = 0) {
  return {std::move(name), value, ref, lo, hi, "report-only"};
}

// One digit trajectory under the resolved backend/initial-law choice.
class TrajectoryStream {
 public:
  TrajectoryStream(const Resolved& r, std::uint64_t index) {
    const std::uint64_t s = derive_seed(r.cfg.seed, index);
    if (r.backend == cf::BackendKind::NaturalExtension)
      ne_.emplace(s, r.law);
    else
      lazy_.emplace(s, std::max<std::uint64_t>(4096, 10 * r.cfg.n + 4096));
  }
  Digit next() { return ne_ ? ne_->next_digit() : lazy_->next_digit(); }

 private:
  std::optional<cf::NaturalExtensionSource> ne_;
  std::optional<cf::LazyRealSource> lazy_;
};

double loglog(double n) { return std::log(std::log(n)); }

// ---- freq --------------------------------------------------------------

std::vector<StatRow> run_freq(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  std::vector<std::uint64_t> counts(T, 0);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t c = 0;
    for (std::uint64_t k = 0; k < n; ++k)
      if (tbl.is_prime(s.next())) ++c;
    counts[i] = c;
  });
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double emp = static_cast<double>(total) / (static_cast<double>(n) * static_cast<double>(T));
  const auto fc = ctx.tables().freq_constant();
  const auto pf = ctx.tables().freq_constant_product_form();
  const double tol = 0.01;
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("prime_digit_frequency", emp, fc.value, fc.value - tol - fc.error,
                           fc.value + tol + fc.error));
  rows.push_back(report_row("freq_constant", fc.value, fc.value, fc.lower(), fc.upper()));
  rows.push_back(report_row("freq_constant_product_form", pf.value, fc.value, pf.lower(), pf.upper()));
  return rows;
}

// ---- tail --------------------------------------------------------------

std::vector<StatRow> run_tail(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  static constexpr std::uint64_t kThresholds[4] = {5, 20, 50, 100};
  std::vector<std::array<std::uint64_t, 4>> counts(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::array<std::uint64_t, 4> c{0, 0, 0, 0};
    for (std::uint64_t k = 0; k < n; ++k) {
      const Digit d = s.next();
      const Digit pv = tbl.is_prime(d) ? d : 0;
      if (pv >= 5) {
        ++c[0];
        if (pv >= 20) {
          ++c[1];
          if (pv >= 50) {
            ++c[2];
            if (pv >= 100) ++c[3];
          }
        }
      }
    }
    counts[i] = c;
  });
  const double N = static_cast<double>(n) * static_cast<double>(T);
  std::vector<StatRow> rows;
  for (int j = 0; j < 4; ++j) {
    std::uint64_t total = 0;
    for (const auto& c : counts) total += c[j];
    const double emp = static_cast<double>(total) / N;
    const auto exact = ctx.tables().prime_tail(kThresholds[j]);
    const double se = std::sqrt(exact.value * (1 - exact.value) / N);
    rows.push_back(pass_fail("tail_emp_K" + std::to_string(kThresholds[j]), emp, exact.value,
                             exact.value - 4 * se - exact.error, exact.value + 4 * se + exact.error));
  }
  double prev = 0;
  bool monotone = true;
  for (std::uint64_t K : {std::uint64_t{1000}, std::uint64_t{10000}, std::uint64_t{100000}}) {
    const auto exact = ctx.tables().prime_tail(K);
    const auto asym = ctx.tables().prime_tail(K, gauss::TailMode::Asymptotic);
    const double ratio = exact.value / asym.value;
    rows.push_back(report_row("tail_ratio_exact_over_asymptotic_K" + std::to_string(K), ratio, 1.0,
                              ratio - exact.error / asym.value, ratio + exact.error / asym.value));
    if (prev != 0 && !(ratio > prev && ratio <= 1.0)) monotone = false;
    prev = ratio;
  }
  rows.push_back(report_row("tail_ratio_monotone_toward_1", monotone ? 1.0 : 0.0, 1.0));
  return rows;
}

// ---- bcl-counts ----------------------------------------------------------

std::vector<StatRow> run_bcl_counts(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t cp = 100; cp < n; cp *= 10) checkpoints.push_back(cp);
  checkpoints.push_back(n);
  const std::size_t C = checkpoints.size();

  // thresholds, +inf where the event index is skipped (b_k <= 1 or k < 3)
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> bDiv(n + 1, inf), bConv(n + 1, inf);
  for (std::uint64_t k = 3; k <= n; ++k) {
    const double ll = loglog(static_cast<double>(k));
    const double d = static_cast<double>(k) * ll;
    const double c = static_cast<double>(k) * std::pow(ll, 1.5);
    if (d > 1) bDiv[k] = d;
    if (c > 1) bConv[k] = c;
  }

  std::vector<std::uint64_t> divCounts(T * C, 0), convCounts(T * C, 0);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t cd = 0, cc = 0;
    std::size_t cpi = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      const Digit pv = tbl.is_prime(d) ? d : 0;
      if (pv > 0) {
        const double pvd = static_cast<double>(pv);
        if (pvd > bDiv[k]) ++cd;
        if (pvd > bConv[k]) ++cc;
      }
      if (k == checkpoints[cpi]) {
        divCounts[i * C + cpi] = cd;
        convCounts[i * C + cpi] = cc;
        ++cpi;
      }
    }
  });

  // exact expected counts at the checkpoints
  std::vector<double> expDiv(C, 0), expConv(C, 0);
  {
    double ed = 0, ec = 0;
    std::size_t cpi = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      if (std::isfinite(bDiv[k])) ed += ctx.tables().prime_threshold_measure(bDiv[k], true).value;
      if (std::isfinite(bConv[k])) ec += ctx.tables().prime_threshold_measure(bConv[k], true).value;
      if (k == checkpoints[cpi]) {
        expDiv[cpi] = ed;
        expConv[cpi] = ec;
        ++cpi;
      }
    }
  }

  std::vector<StatRow> rows;
  std::vector<double> pooledDiv(C, 0);
  for (std::size_t c = 0; c < C; ++c) {
    double s = 0;
    for (std::uint64_t i = 0; i < T; ++i) s += static_cast<double>(divCounts[i * C + c]);
    pooledDiv[c] = s / static_cast<double>(T);
  }
  rows.push_back(pass_fail("bcl_divergent_mean_count", pooledDiv.back(), expDiv.back(),
                           expDiv.back() / 2, expDiv.back() * 2));
  bool grows = true;
  for (std::size_t c = 1; c < C; ++c)
    if (!(pooledDiv[c] > pooledDiv[c - 1])) grows = false;
  rows.push_back(pass_fail("bcl_divergent_count_grows", grows ? 1.0 : 0.0, 1.0, 1.0, 1.0));
  for (std::size_t c = 0; c < C; ++c)
    rows.push_back(report_row("bcl_divergent_mean_at_" + std::to_string(checkpoints[c]),
                              pooledDiv[c], expDiv[c], expDiv[c] / 2, expDiv[c] * 2));
  std::vector<double> convTotals(T);
  for (std::uint64_t i = 0; i < T; ++i)
    convTotals[i] = static_cast<double>(convCounts[i * C + (C - 1)]);
  rows.push_back(pass_fail("bcl_convergent_median_count", median(convTotals), expConv.back(), 0, 5));
  rows.push_back(report_row("bcl_convergent_expected_total", expConv.back(), expConv.back()));
  return rows;
}

// ---- trimmed-slln ---------------------------------------------------------

std::vector<StatRow> run_trimmed_slln(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  const std::uint64_t nSmall = std::min<std::uint64_t>(1000, n);
  std::vector<double> statBig(T), statSmall(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t sumP = 0, maxP = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      if (tbl.is_prime(d)) {
        sumP += d;
        if (d > maxP) maxP = d;
      }
      if (k == nSmall)
        statSmall[i] = kLog2 * static_cast<double>(sumP - maxP) /
                       (static_cast<double>(nSmall) * loglog(static_cast<double>(nSmall)));
    }
    statBig[i] = kLog2 * static_cast<double>(sumP - maxP) /
                 (static_cast<double>(n) * loglog(static_cast<double>(n)));
  });
  const double medBig = median(statBig), medSmall = median(statSmall);
  // finite-n prediction: L'(b'(n)) log2 / loglog n
  const double bp = norming({gauss::NormingKind::BPrime}, n, &ctx.tables());
  const double pred =
      ctx.tables()
          .truncated_expectation(static_cast<std::uint64_t>(bp), gauss::TruncationKind::PrimeDigits)
          .value *
      kLog2 / loglog(static_cast<double>(n));
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("trimmed_slln_median", medBig, 1.0, 0.75, 1.35));
  rows.push_back(report_row("trimmed_slln_median_small_n", medSmall, 1.0));
  rows.push_back(pass_fail("trimmed_slln_closer_to_1", std::abs(medBig - 1.0), std::abs(medSmall - 1.0),
                           0, std::nextafter(std::abs(medSmall - 1.0), 0.0)));
  rows.push_back(report_row("trimmed_slln_finite_n_prediction", pred, 1.0));
  return rows;
}

// ---- slln-dichotomy --------------------------------------------------------

std::vector<StatRow> run_dichotomy(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> bDiv(n + 1, inf), bConv(n + 1, inf);
  for (std::uint64_t k = 3; k <= n; ++k) {
    const double ll = loglog(static_cast<double>(k));
    bDiv[k] = static_cast<double>(k) * ll;
    bConv[k] = static_cast<double>(k) * std::pow(ll, 1.5);
  }
  std::vector<double> maxDiv(T), maxConv(T), finalConv(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t sumP = 0;
    double md = 0, mc = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      if (tbl.is_prime(d)) sumP += d;
      if (k >= 3) {
        const double sp = static_cast<double>(sumP);
        md = std::max(md, sp / bDiv[k]);
        mc = std::max(mc, sp / bConv[k]);
      }
    }
    maxDiv[i] = md;
    maxConv[i] = mc;
    finalConv[i] = static_cast<double>(sumP) / bConv[n];
  });
  std::uint64_t exceed = 0;
  for (auto v : maxDiv)
    if (v > 1) ++exceed;
  std::vector<StatRow> rows;
  rows.push_back(report_row("dichotomy_divergent_max_ratio_median", median(maxDiv)));
  rows.push_back(report_row("dichotomy_divergent_fraction_above_1",
                            static_cast<double>(exceed) / static_cast<double>(T)));
  rows.push_back(report_row("dichotomy_convergent_max_ratio_median", median(maxConv)));
  rows.push_back(report_row("dichotomy_convergent_final_ratio_median", median(finalConv), 0.0));
  return rows;
}

// ---- funny-norm -------------------------------------------------------------

std::vector<StatRow> run_funny_norm(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  if (static_cast<double>(n) <= gauss::n_bar(4))
    throw std::domain_error("funny-norm requires n > n_bar(4) (about 2180)");
  std::vector<std::uint64_t> cps;
  std::vector<double> norms;
  for (unsigned j = 4;; ++j) {
    const double nb = gauss::n_bar(j);
    if (nb > static_cast<double>(n)) break;
    const auto cp = static_cast<std::uint64_t>(std::floor(nb));
    cps.push_back(cp);
    norms.push_back(norming({gauss::NormingKind::DFunny}, cp, &ctx.tables()));
  }
  const std::size_t C = cps.size();
  std::vector<double> ratios(T * C);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t sumP = 0;
    std::size_t cpi = 0;
    for (std::uint64_t k = 1; k <= cps.back(); ++k) {
      const Digit d = s.next();
      if (tbl.is_prime(d)) sumP += d;
      if (k == cps[cpi]) {
        ratios[i * C + cpi] = static_cast<double>(sumP) / norms[cpi];
        ++cpi;
        if (cpi == C) break;
      }
    }
  });
  std::vector<StatRow> rows;
  std::vector<double> maxOverJ(T, 0);
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<double> col(T);
    for (std::uint64_t i = 0; i < T; ++i) {
      col[i] = ratios[i * C + c];
      maxOverJ[i] = std::max(maxOverJ[i], col[i]);
    }
    rows.push_back(report_row("funny_norm_ratio_median_at_nbar" + std::to_string(c + 4), median(col), 1.0));
  }
  rows.push_back(report_row("funny_norm_max_over_blocks_median", median(maxOverJ), 1.0));
  return rows;
}

// ---- ratios -----------------------------------------------------------------

std::vector<StatRow> run_ratios(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  struct Res {
    std::uint64_t exceed;
    double maxPP, maxGP, primeFull;
  };
  std::vector<Res> res(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    stats::RatioTracker tracker([](double t) { return t * std::log(t); });
    for (std::uint64_t k = 0; k < n; ++k) {
      const Digit d = s.next();
      tracker.update(d, tbl.is_prime(d) ? d : 0);
    }
    res[i] = {tracker.exceedance_count(), tracker.max_prime_over_prime_sum(),
              tracker.max_g_over_prime_sum(), tracker.prime_over_full_sums()};
  });
  // expected number of times a' exceeds the prior prime sum, approximating
  // the prior sum by its trimmed-law size b'(k)
  double expExceed = 0;
  for (std::uint64_t k = 3; k <= n; ++k) {
    const double bp = static_cast<double>(k) * loglog(static_cast<double>(k)) / kLog2;
    if (bp >= 2) expExceed += ctx.tables().prime_threshold_measure(bp, true).value;
  }
  std::uint64_t withExceed = 0;
  double meanExceed = 0;
  std::vector<double> pf(T), mpp(T), mgp(T);
  for (std::uint64_t i = 0; i < T; ++i) {
    if (res[i].exceed > 0) ++withExceed;
    meanExceed += static_cast<double>(res[i].exceed);
    pf[i] = res[i].primeFull;
    mpp[i] = res[i].maxPP;
    mgp[i] = res[i].maxGP;
  }
  meanExceed /= static_cast<double>(T);
  const double frac = static_cast<double>(withExceed) / static_cast<double>(T);
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("ratios_exceedance_fraction", frac, 1.0, 1e-9, 1.0));
  rows.push_back(report_row("ratios_exceedance_count_mean", meanExceed, expExceed, expExceed / 2,
                            expExceed * 2));
  rows.push_back(report_row("ratios_max_prime_over_prime_sum_median", median(mpp)));
  rows.push_back(report_row("ratios_max_g_over_prime_sum_median", median(mgp)));
  rows.push_back(report_row("ratios_prime_over_full_sums_median", median(pf), 0.0));
  return rows;
}

// ---- moments (gamma < 1: pooled mean; gamma > 1: intermediate trimming) ------

std::vector<StatRow> run_moments(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  const double g = r.cfg.gamma;
  std::vector<StatRow> rows;
  if (g < 1.0) {
    std::vector<long double> sums(T, 0.0L);
    parallel_for_index(T, r.threads, [&](std::uint64_t i) {
      TrajectoryStream s(r, i);
      long double acc = 0.0L;
      for (std::uint64_t k = 0; k < n; ++k) {
        const Digit d = s.next();
        if (tbl.is_prime(d))
          acc += std::pow(static_cast<long double>(d), static_cast<long double>(g));
      }
      sums[i] = acc;
    });
    long double total = 0.0L;
    for (auto v : sums) total += v;
    const double emp = static_cast<double>(total / (static_cast<long double>(n) * T));
    const auto K = ctx.tables().moment_constant(g);
    rows.push_back(pass_fail("moment_mean", emp, K.value, K.value * 0.95 - K.error,
                             K.value * 1.05 + K.error));
    rows.push_back(report_row("moment_constant", K.value, K.value, K.lower(), K.upper()));
    return rows;
  }

  // gamma > 1: trimmed power sums with b_n = ceil((loglog n)^2)
  const std::uint64_t nSmall = std::min<std::uint64_t>(10000, n);
  const auto bOf = [](std::uint64_t m) {
    return static_cast<std::size_t>(std::ceil(std::pow(loglog(static_cast<double>(m)), 2.0)));
  };
  const std::size_t bSmall = bOf(nSmall), bBig = bOf(n);
  const std::size_t cap = std::max(bSmall, bBig) + 1;
  const auto dNorm = [&](std::uint64_t m, std::size_t b) {
    gauss::NormingSequence seq{gauss::NormingKind::DGamma, g,
                               gauss::ParametricSequence{static_cast<double>(b), 0, 0, 0}};
    return norming(seq, m);
  };
  const double normSmall = dNorm(nSmall, bSmall), normBig = dNorm(n, bBig);
  std::vector<double> ratioSmall(T), ratioBig(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    stats::TrajectorySummary summary(stats::SummaryConfig{cap, {g}});
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      summary.update_with(d, tbl.is_prime(d) ? d : 0);
      if (k == nSmall)
        ratioSmall[i] = static_cast<double>(summary.trimmed_sum(bSmall, g)) / normSmall;
    }
    ratioBig[i] = static_cast<double>(summary.trimmed_sum(bBig, g)) / normBig;
  });
  auto relIqr = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return (quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25)) / median(v);
  };
  const double medBig = median(ratioBig);
  const double iqrSmall = relIqr(ratioSmall), iqrBig = relIqr(ratioBig);
  rows.push_back(report_row("trimmed_moment_median_ratio", medBig, 1.0, 0.5, 2.0));
  rows.push_back(report_row("trimmed_moment_median_ratio_small_n", median(ratioSmall), 1.0));
  rows.push_back(pass_fail("trimmed_moment_dispersion_shrinks", iqrBig, iqrSmall, 0,
                           std::nextafter(iqrSmall, 0.0)));
  rows.push_back(report_row("trimmed_moment_rel_iqr", iqrBig));
  rows.push_back(report_row("trimmed_moment_rel_iqr_small_n", iqrSmall));
  return rows;
}

// ---- weak-law ----------------------------------------------------------------

std::vector<StatRow> run_weak_law(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  std::vector<double> stat(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t sumP = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const Digit d = s.next();
      if (tbl.is_prime(d)) sumP += d;
    }
    stat[i] = static_cast<double>(sumP) / (static_cast<double>(n) * loglog(static_cast<double>(n)));
  });
  const double med = median(stat);
  const double candidateInv = 1.0 / kLog2;  // 1.4427...
  const double candidateLog = kLog2;        // 0.6931...
  const double dInv = std::abs(med - candidateInv), dLog = std::abs(med - candidateLog);
  std::vector<StatRow> rows;
  rows.push_back(report_row("weak_law_median", med, candidateInv));
  rows.push_back(report_row("weak_law_dist_to_inv_log2", dInv, 0.0));
  rows.push_back(report_row("weak_law_dist_to_log2", dLog, 0.0));
  rows.push_back(report_row("weak_law_closer_candidate", dInv <= dLog ? candidateInv : candidateLog));
  return rows;
}

// ---- max-law -----------------------------------------------------------------

// independent-digit model of P(M'_n <= t); used for report rows only
double model_max_ks(const gauss::GaussTables& tables, std::uint64_t n) {
  const double scale = static_cast<double>(n) / (kLog2 * std::log(static_cast<double>(n)));
  double ks = 0;
  for (double p = 0.005; p < 0.9995; p += 0.005) {
    const double y = -1.0 / std::log(p);  // Theta quantile
    const double t = y * scale;
    const auto K = static_cast<std::uint64_t>(std::floor(t)) + 1;
    const double mu = tables.prime_tail(std::max<std::uint64_t>(2, K)).value;
    const double model = std::exp(static_cast<double>(n) * std::log1p(-mu));
    ks = std::max(ks, std::abs(model - p));
  }
  return ks;
}

std::vector<StatRow> run_max_law(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  const std::uint64_t nSmall = std::min<std::uint64_t>(1000, n);
  std::vector<double> statBig(T), statSmall(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t maxP = 0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      if (d > maxP && tbl.is_prime(d)) maxP = d;
      if (k == nSmall)
        statSmall[i] = kLog2 * std::log(static_cast<double>(nSmall)) *
                       static_cast<double>(maxP) / static_cast<double>(nSmall);
    }
    statBig[i] = kLog2 * std::log(static_cast<double>(n)) * static_cast<double>(maxP) /
                 static_cast<double>(n);
  });
  const auto theta = laws::ReferenceLaw::theta();
  const double ksBig = laws::ks_statistic(laws::EmpiricalSample(statBig), theta);
  const double ksSmall = laws::ks_statistic(laws::EmpiricalSample(statSmall), theta);
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("max_law_ks", ksBig, 0.0, 0.0, 0.10));
  rows.push_back(report_row("max_law_ks_small_n", ksSmall, 0.0));
  rows.push_back(pass_fail("max_law_ks_improves", ksBig, ksSmall, 0,
                           std::nextafter(ksSmall, 0.0)));
  rows.push_back(report_row("max_law_model_ks", model_max_ks(ctx.tables(), n)));
  rows.push_back(report_row("max_law_model_ks_small_n", model_max_ks(ctx.tables(), nSmall)));
  return rows;
}

// ---- poisson -----------------------------------------------------------------

std::vector<StatRow> run_poisson(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t totalHits = r.cfg.n, T = r.cfg.trajectories;
  const std::uint64_t l = r.cfg.level, m = r.cfg.modulus;
  const double theta = r.cfg.theta;
  std::vector<stats::HittingRecord> recs(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    const std::uint64_t quota = totalHits / T + (i < totalHits % T ? 1 : 0);
    cf::DigitSource src(cf::NaturalExtensionBackend{derive_seed(r.cfg.seed, i), r.law});
    recs[i] = stats::hitting_process(src, tbl, l, quota, theta, m);
  });
  std::vector<double> gapsAsym, gapsExact;
  std::uint64_t marks = 0, totalMarks = 0;
  std::vector<std::uint64_t> coprime;
  for (std::uint64_t j = 1; j < m; ++j)
    if (std::gcd(j, m) == 1) coprime.push_back(j);
  std::vector<std::uint64_t> classCounts(coprime.size(), 0);
  const double asymRate = 1.0 / (kLog2 * static_cast<double>(l) * std::log(static_cast<double>(l)));
  const std::uint64_t sizeThreshold = recs.empty() ? 0 : recs[0].sizeThreshold;
  const auto tailL = ctx.tables().prime_tail(l);
  const auto tailSize = ctx.tables().prime_tail(sizeThreshold);
  for (const auto& rec : recs) {
    for (std::size_t idx = 0; idx < rec.gaps.size(); ++idx) {
      const double gap = static_cast<double>(rec.gaps[idx]);
      gapsAsym.push_back(gap * asymRate);
      gapsExact.push_back(gap * tailL.value);
      totalMarks += 1;
      marks += rec.sizeMarks[idx];
      for (std::size_t c = 0; c < coprime.size(); ++c)
        if (rec.residueMarks[idx] == coprime[c]) ++classCounts[c];
    }
  }
  const auto exp1 = laws::ReferenceLaw::exp1();
  const double ksAsym = laws::ks_statistic(laws::EmpiricalSample(gapsAsym), exp1);
  const double ksExact = laws::ks_statistic(laws::EmpiricalSample(gapsExact), exp1);
  const double markFreq = static_cast<double>(marks) / static_cast<double>(totalMarks);
  const double markRef = tailSize.value / tailL.value;
  const double markSe = std::sqrt(markRef * (1 - markRef) / static_cast<double>(totalMarks));
  const double chi2 = laws::chi_square_uniform(classCounts);
  const double critical =
      laws::chi_square_critical(static_cast<unsigned>(coprime.size() - 1), 0.99);
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("poisson_gap_ks", ksAsym, 0.0, 0.0, 0.05));
  rows.push_back(report_row("poisson_gap_ks_exact_rate", ksExact, 0.0, 0.0, 0.05));
  rows.push_back(pass_fail("poisson_size_mark_freq", markFreq, markRef, markRef - 4 * markSe,
                           markRef + 4 * markSe));
  rows.push_back(report_row("poisson_size_mark_asymptotic_theta", markFreq, theta));
  rows.push_back(pass_fail("poisson_residue_chi_square", chi2, critical, 0.0, critical));
  return rows;
}

// ---- clt ---------------------------------------------------------------------

std::vector<StatRow> run_clt(const Resolved& r, const LabContext& ctx) {
  const auto& tbl = ctx.table();
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  stats::EventFamily family;
  if (r.cfg.family == "threshold" || r.cfg.family.empty()) {
    family.kind = stats::EventFamily::Kind::Threshold;
    family.b = gauss::ParametricSequence{static_cast<double>(r.cfg.level ? r.cfg.level : 2), 0, 0, 0};
  } else if (r.cfg.family == "equality") {
    family.kind = stats::EventFamily::Kind::Equality;
    family.d = gauss::ParametricSequence{static_cast<double>(r.cfg.level ? r.cfg.level : 3), 0, 0, 0};
  } else if (r.cfg.family == "interval") {
    family.kind = stats::EventFamily::Kind::Interval;
    family.ceilD = true;
    family.d = gauss::ParametricSequence{1, 1.0 / 3, 0, 0};
    family.c = gauss::ParametricSequence{1, 0, 0, 0};
  } else {
    throw std::invalid_argument("clt: family must be threshold, equality or interval");
  }
  family.validate(n);
  std::vector<double> counts(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    stats::EventCounter counter(family);
    for (std::uint64_t k = 1; k <= n; ++k) {
      const Digit d = s.next();
      counter.update(k, tbl.is_prime(d) ? d : 0);
    }
    counts[i] = static_cast<double>(counter.count());
  });
  double centeringErr = 0;
  const double expected = stats::expected_event_sum(family, n, ctx.tables(), &centeringErr);
  double meanObs = 0;
  for (auto c : counts) meanObs += c;
  meanObs /= static_cast<double>(T);
  double var = 0;
  for (auto c : counts) var += (c - meanObs) * (c - meanObs);
  var /= static_cast<double>(T - 1);
  const double sd = std::sqrt(var);
  std::vector<StatRow> rows;
  if (sd == 0) {
    rows.push_back(pass_fail("clt_ks", 1.0, 0.0, 0.0, 0.05));
    return rows;
  }
  std::vector<double> standardized(T);
  for (std::uint64_t i = 0; i < T; ++i) standardized[i] = (counts[i] - expected) / sd;
  const double ks =
      laws::ks_statistic(laws::EmpiricalSample(standardized), laws::ReferenceLaw::std_normal());
  rows.push_back(pass_fail("clt_ks", ks, 0.0, 0.0, 0.05));
  rows.push_back(report_row("clt_observed_mean", meanObs, expected, expected - centeringErr,
                            expected + centeringErr));
  rows.push_back(report_row("clt_monte_carlo_sd", sd));
  return rows;
}

// ---- diamond-vaaler ------------------------------------------------------------

std::vector<StatRow> run_diamond_vaaler(const Resolved& r, const LabContext& ctx) {
  const std::uint64_t n = r.cfg.n, T = r.cfg.trajectories;
  std::vector<double> stat(T);
  parallel_for_index(T, r.threads, [&](std::uint64_t i) {
    TrajectoryStream s(r, i);
    std::uint64_t sumF = 0, maxF = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
      const Digit d = s.next();
      sumF += d;
      if (d > maxF) maxF = d;
    }
    stat[i] = kLog2 * static_cast<double>(sumF - maxF) /
              (static_cast<double>(n) * std::log(static_cast<double>(n)));
  });
  std::vector<StatRow> rows;
  rows.push_back(pass_fail("diamond_vaaler_median", median(stat), 1.0, 0.5, 1.5));
  return rows;
}

// ---- registry / resolution ------------------------------------------------------

struct Registration {
  const char* name;
  const char* description;
  std::vector<StatRow> (*run)(const Resolved&, const LabContext&);
  std::uint64_t defaultN;
  std::uint64_t defaultTrajectories;
};

const Registration kRegistry[] = {
    {"freq", "pooled frequency of prime digits vs the exact Gauss-measure constant", run_freq,
     100000, 200},
    {"tail", "empirical tail of prime digit values vs exact tail measures, plus the "
             "exact/asymptotic ratio trend", run_tail, 500000, 20},
    {"bcl-counts", "finite-horizon exceedance counts for a divergent vs a convergent "
                   "threshold family, against exact expected counts", run_bcl_counts, 1000000, 64},
    {"trimmed-slln", "lightly trimmed prime-digit sums against the n loglog n norming",
     run_trimmed_slln, 1000000, 200},
    {"slln-dichotomy", "growth dichotomy of prime-digit sums under b_n/n increasing schedules",
     run_dichotomy, 1000000, 100},
    {"funny-norm", "partial sums along the block norming built from n_bar(j) = e^(j log^2 j)",
     run_funny_norm, 430000, 200},
    {"ratios", "single prime digits against prior partial sums; exceedance statistics",
     run_ratios, 1000000, 200},
    {"moments", "gamma < 1: pooled mean of (a')^gamma vs the exact moment constant; "
                "gamma > 1: intermediate-trimmed power sums vs their norming", run_moments,
     10000000, 100},
    {"weak-law", "normalized prime-digit sums reported against both candidate constants "
                 "1/log2 and log2", run_weak_law, 1000000, 500},
    {"max-law", "normalized maxima of prime digits against the law exp(-1/y)", run_max_law,
     100000, 2000},
    {"poisson", "waiting times between prime digits >= l with size and residue marks "
                "(n = total pooled hits)", run_poisson, 5000, 50},
    {"clt", "standardized event counts with exact centering vs the standard normal law",
     run_clt, 10000, 2000},
    {"diamond-vaaler", "trimmed full-digit sums against the n log n norming", run_diamond_vaaler,
     1000000, 200},
};

const Registration* find_registration(const std::string& name) {
  for (const auto& reg : kRegistry)
    if (name == reg.name) return &reg;
  return nullptr;
}

Resolved resolve(const ExperimentConfig& in) {
  const Registration* reg = find_registration(in.experiment);
  if (!reg) {
    std::string msg = "unknown experiment '" + in.experiment + "'; available:";
    for (const auto& r : kRegistry) msg += std::string(" ") + r.name;
    throw std::invalid_argument(msg);
  }
  Resolved r;
  r.cfg = in;
  if (r.cfg.n == 0) r.cfg.n = reg->defaultN;
  if (r.cfg.trajectories == 0) r.cfg.trajectories = reg->defaultTrajectories;
  if (r.cfg.initialLaw.empty()) r.cfg.initialLaw = "gauss";
  if (r.cfg.experiment == "poisson") {
    if (r.cfg.level == 0) r.cfg.level = 50;
    if (r.cfg.theta == 0) r.cfg.theta = 0.5;
    if (r.cfg.modulus == 0) r.cfg.modulus = 4;
    // validation parity with the hitting-process preconditions
    if (r.cfg.modulus < 2) throw std::domain_error("hitting_process: modulus must be >= 2");
    if (r.cfg.level <= r.cfg.modulus)
      throw std::domain_error("hitting_process: requires level l > m");
    if (!(r.cfg.theta > 0.0 && r.cfg.theta < 1.0))
      throw std::domain_error("hitting_process: theta must lie in (0,1)");
  }
  if (r.cfg.experiment == "moments" && r.cfg.gamma == 0) r.cfg.gamma = 0.5;
  if (r.cfg.experiment == "clt" && r.cfg.family.empty()) r.cfg.family = "threshold";

  if (in.backend == "natural-extension")
    r.backend = cf::BackendKind::NaturalExtension;
  else if (in.backend == "lazy-real")
    r.backend = cf::BackendKind::LazyReal;
  else
    throw std::invalid_argument("backend must be natural-extension or lazy-real");
  if (r.cfg.initialLaw == "gauss")
    r.law = cf::InitialLaw::Gauss;
  else if (r.cfg.initialLaw == "lebesgue")
    r.law = cf::InitialLaw::Lebesgue;
  else
    throw std::invalid_argument("initial-law must be gauss or lebesgue");
  if (r.backend == cf::BackendKind::LazyReal && r.law != cf::InitialLaw::Lebesgue)
    throw std::invalid_argument("sample_trajectory: the lazy-real backend samples the uniform law");
  if (r.cfg.format != "csv" && r.cfg.format != "json")
    throw std::invalid_argument("format must be csv or json");
  r.threads = in.threads ? in.threads : std::thread::hardware_concurrency();
  if (r.threads == 0) r.threads = 1;
  return r;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LabContext::LabContext(std::uint64_t sieveBound)
    : table_(std::make_unique<primes::PrimeTable>(sieveBound)),
      gauss_(std::make_unique<gauss::GaussTables>(*table_)) {}

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& reg : kRegistry) v.push_back({reg.name, reg.description});
    return v;
  }();
  return infos;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const LabContext* shared) {
  const Resolved r = resolve(config);
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<LabContext> owned;
  const LabContext* ctx = shared;
  if (!ctx || ctx->sieve_bound() != r.cfg.sieveBound) {
    owned = std::make_unique<LabContext>(r.cfg.sieveBound);
    ctx = owned.get();
  }
  ExperimentReport report;
  report.config = r.cfg;
  report.config.threads = config.threads;  // echo the requested value, not the resolved one
  report.rows = find_registration(r.cfg.experiment)->run(r, *ctx);
  report.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_csv(const ExperimentReport& report) {
  std::string out = "experiment,statistic,n,trajectories,seed,value,reference,err_low,err_high,verdict\n";
  for (const auto& row : report.rows) {
    out += report.config.experiment;
    out += ',';
    out += row.statistic;
    out += ',';
    out += std::to_string(report.config.n);
    out += ',';
    out += std::to_string(report.config.trajectories);
    out += ',';
    out += std::to_string(report.config.seed);
    out += ',';
    out += fmt17(row.value);
    out += ',';
    out += fmt17(row.reference);
    out += ',';
    out += fmt17(row.errLow);
    out += ',';
    out += fmt17(row.errHigh);
    out += ',';
    out += row.verdict;
    out += '\n';
  }
  return out;
}

std::string to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.config.experiment;
  j["version"] = report.version;
  j["config"] = {{"n", report.config.n},
                 {"trajectories", report.config.trajectories},
                 {"seed", report.config.seed},
                 {"backend", report.config.backend},
                 {"initial-law", report.config.initialLaw},
                 {"gamma", report.config.gamma},
                 {"level", report.config.level},
                 {"theta", report.config.theta},
                 {"modulus", report.config.modulus},
                 {"family", report.config.family},
                 {"sieve-bound", report.config.sieveBound}};
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"experiment", report.config.experiment},
                         {"statistic", row.statistic},
                         {"n", report.config.n},
                         {"trajectories", report.config.trajectories},
                         {"seed", report.config.seed},
                         {"value", row.value},
                         {"reference", row.reference},
                         {"err_low", row.errLow},
                         {"err_high", row.errHigh},
                         {"verdict", row.verdict}});
  }
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const std::string& path,
                  const std::string& format) {
  const std::string payload = format == "json" ? to_json(report) : to_csv(report);
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << payload;
  if (!f) throw std::runtime_error("write failed: " + path);
}

void apply_key_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "experiment")
    config.experiment = value;
  else if (key == "n")
    config.n = std::stoull(value);
  else if (key == "trajectories")
    config.trajectories = std::stoull(value);
  else if (key == "seed")
    config.seed = std::stoull(value);
  else if (key == "backend")
    config.backend = value;
  else if (key == "initial-law")
    config.initialLaw = value;
  else if (key == "gamma")
    config.gamma = std::stod(value);
  else if (key == "level")
    config.level = std::stoull(value);
  else if (key == "theta")
    config.theta = std::stod(value);
  else if (key == "modulus")
    config.modulus = std::stoull(value);
  else if (key == "family")
    config.family = value;
  else if (key == "out")
    config.out = value;
  else if (key == "format")
    config.format = value;
  else if (key == "threads")
    config.threads = static_cast<unsigned>(std::stoul(value));
  else if (key == "sieve-bound")
    config.sieveBound = std::stoull(value);
  else
    throw std::invalid_argument("unknown config key: " + key);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  ExperimentConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notSpace = [](unsigned char ch) { return !std::isspace(ch); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notSpace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notSpace).base(), line.end());
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notSpace).base(), key.end());
    value.erase(value.begin(), std::find_if(value.begin(), value.end(), notSpace));
    apply_key_value(config, key, value);
  }
  return config;
}

}  // namespace primecf::experiments
