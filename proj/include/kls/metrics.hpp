#pragma once

#include <string>
#include <vector>

namespace kls {

// Sorted scalar sample; backs every 1-D metric.
class Empirical1D {
 public:
  Empirical1D() = default;
  explicit Empirical1D(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  long count() const { return static_cast<long>(values_.size()); }
  bool empty() const { return values_.empty(); }

  // Linear interpolation between order statistics placed at plotting
  // positions (i - 0.5)/N, clamped to the extremes.
  double quantile(double p) const;

 private:
  std::vector<double> values_;
};

struct MetricReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  double slack = 0.0;

  static MetricReport make(const std::string& name, double lhs, double rhs,
                           double tolerance = 1e-9);
};

// Empirical W_p via the monotone (quantile) coupling, which is optimal in
// 1-D for every convex cost. Unequal sizes interpolate both samples onto
// max(N_a, N_b) plotting positions.
double w_p_empirical(const Empirical1D& a, const Empirical1D& b, double p);

// W_p of `a` against N(0, variance), coupled by quantiles at (i-0.5)/N.
double w_p_vs_normal(const Empirical1D& a, double variance, double p);

// Half L1 distance between shared-grid histograms; Freedman-Diaconis bin
// width on the pooled sample.
double tv_estimate(const Empirical1D& a, const Empirical1D& b);

// d_TV <= C * sqrt(W_1) for isotropic log-concave scalar laws.
MetricReport check_tv_w1(const Empirical1D& a, const Empirical1D& b,
                         double C = 2.5);

// W_t^t under the s-optimal coupling against
// c*W_s^s*log^{t-s}(c^t t^{2t}/W_s^s) + c^t t^{2t} exp(-c*sqrt(n)).
MetricReport check_ws_wt(const Empirical1D& a, const Empirical1D& b, double s,
                         double t, int n, double c = 10.0);

}  // namespace kls
