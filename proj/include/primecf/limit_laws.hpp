#ifndef PRIMECF_LIMIT_LAWS_HPP_
#define PRIMECF_LIMIT_LAWS_HPP_

#include <cstdint>
#include <vector>

namespace primecf::laws {

// Reference limit distributions for the verification suites. Theta is
// the Frechet-type law with CDF e^{-1/y} (the limit of normalized
// maxima); Exp1 is the unit exponential; Bernoulli is a discrete law on
// {0,...,d-1}.
struct ReferenceLaw {
  enum class Kind { Theta, Exp1, StdNormal, Bernoulli, Degenerate };
  Kind kind = Kind::Exp1;
  std::vector<double> bernoulliProbs;
  double degenerateAt = 0;

  static ReferenceLaw theta() { return {Kind::Theta, {}, 0}; }
  static ReferenceLaw exp1() { return {Kind::Exp1, {}, 0}; }
  static ReferenceLaw std_normal() { return {Kind::StdNormal, {}, 0}; }
  static ReferenceLaw bernoulli(std::vector<double> probs) {
    return {Kind::Bernoulli, std::move(probs), 0};
  }
  static ReferenceLaw degenerate(double c) { return {Kind::Degenerate, {}, c}; }
};

// Exact CDF; out-of-support arguments clamp to 0/1.
double reference_cdf(const ReferenceLaw& law, double y);

// Inverse CDF. Closed form for Theta/Exp1/Degenerate, numeric inversion
// for StdNormal. p in (0,1).
double quantile(const ReferenceLaw& law, double p);

// Sorted sample of real values.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> values);
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

// fraction of sample values <= y
double empirical_cdf(const EmpiricalSample& sample, double y);

// two-sided sup distance between the empirical CDF and the reference
// CDF, evaluated at the jump points from both sides
double ks_statistic(const EmpiricalSample& sample, const ReferenceLaw& law);

// Pearson statistic against the uniform expectation over the classes.
double chi_square_uniform(const std::vector<std::uint64_t>& counts);

// Embedded chi-square critical values, df in [1,7], level one of
// 0.90 / 0.95 / 0.99.
double chi_square_critical(unsigned df, double level);

}  // namespace primecf::laws

#endif  // PRIMECF_LIMIT_LAWS_HPP_
