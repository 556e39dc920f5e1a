#include "kls/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kls/stats.hpp"

namespace kls {

Empirical1D::Empirical1D(std::vector<double> values)
    : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
}

double Empirical1D::quantile(double p) const {
  const long n = count();
  if (n == 0) throw std::invalid_argument("quantile of empty sample");
  const double pos = p * n - 0.5;
  if (pos <= 0.0) return values_.front();
  if (pos >= n - 1.0) return values_.back();
  const long lo = static_cast<long>(pos);
  const double frac = pos - lo;
  return values_[lo] * (1.0 - frac) + values_[lo + 1] * frac;
}

MetricReport MetricReport::make(const std::string& name, double lhs,
                                double rhs, double tolerance) {
  MetricReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.satisfied = lhs <= rhs + tolerance;
  return r;
}

double w_p_empirical(const Empirical1D& a, const Empirical1D& b, double p) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("w_p_empirical: empty sample");
  if (p < 1.0) throw std::invalid_argument("w_p_empirical: p < 1");

  double sum = 0.0;
  long n = 0;
  if (a.count() == b.count()) {
    n = a.count();
    for (long i = 0; i < n; ++i)
      sum += std::pow(std::abs(a.values()[i] - b.values()[i]), p);
  } else {
    n = std::max(a.count(), b.count());
    for (long i = 0; i < n; ++i) {
      const double pos = (i + 0.5) / n;
      sum += std::pow(std::abs(a.quantile(pos) - b.quantile(pos)), p);
    }
  }
  return std::pow(sum / n, 1.0 / p);
}

double w_p_vs_normal(const Empirical1D& a, double variance, double p) {
  if (a.empty()) throw std::invalid_argument("w_p_vs_normal: empty sample");
  if (variance <= 0.0)
    throw std::invalid_argument("w_p_vs_normal: variance <= 0");
  if (p < 1.0) throw std::invalid_argument("w_p_vs_normal: p < 1");

  const double sd = std::sqrt(variance);
  const long n = a.count();
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const double q = sd * normal_quantile((i + 0.5) / n);
    sum += std::pow(std::abs(a.values()[i] - q), p);
  }
  return std::pow(sum / n, 1.0 / p);
}

double tv_estimate(const Empirical1D& a, const Empirical1D& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("tv_estimate: empty sample");

  // Pooled Freedman-Diaconis bin width.
  std::vector<double> pooled;
  pooled.reserve(a.count() + b.count());
  pooled.insert(pooled.end(), a.values().begin(), a.values().end());
  pooled.insert(pooled.end(), b.values().begin(), b.values().end());
  std::sort(pooled.begin(), pooled.end());
  const long m = static_cast<long>(pooled.size());
  const double iqr =
      pooled[static_cast<long>(0.75 * (m - 1))] -
      pooled[static_cast<long>(0.25 * (m - 1))];
  const double lo = pooled.front();
  const double hi = pooled.back();
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(m));
  if (width <= 0.0) width = (hi - lo) > 0 ? (hi - lo) / std::sqrt(m) : 1.0;
  if (hi == lo) return 0.0;

  const long bins =
      std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / width)));
  std::vector<double> ha(bins, 0.0), hb(bins, 0.0);
  auto bin_of = [&](double x) {
    long k = static_cast<long>((x - lo) / width);
    return std::min(bins - 1, std::max<long>(0, k));
  };
  for (double x : a.values()) ha[bin_of(x)] += 1.0 / a.count();
  for (double x : b.values()) hb[bin_of(x)] += 1.0 / b.count();

  double l1 = 0.0;
  for (long k = 0; k < bins; ++k) l1 += std::abs(ha[k] - hb[k]);
  return 0.5 * l1;
}

MetricReport check_tv_w1(const Empirical1D& a, const Empirical1D& b,
                         double C) {
  const double tv = tv_estimate(a, b);
  const double w1 = w_p_empirical(a, b, 1.0);
  return MetricReport::make("tv_w1", tv, C * std::sqrt(w1));
}

MetricReport check_ws_wt(const Empirical1D& a, const Empirical1D& b, double s,
                         double t, int n, double c) {
  if (s >= t) throw std::invalid_argument("check_ws_wt: requires s < t");
  if (s < 1.0) throw std::invalid_argument("check_ws_wt: requires s >= 1");

  // In 1-D the monotone coupling is simultaneously optimal for every p, so
  // the s-optimal coupling evaluates W_t directly.
  const double wt = w_p_empirical(a, b, t);
  const double ws = w_p_empirical(a, b, s);
  const double lhs = std::pow(wt, t);
  const double ws_s = std::pow(ws, s);
  const double ct = std::pow(c, t) * std::pow(t, 2.0 * t);
  double rhs = ct * std::exp(-c * std::sqrt(static_cast<double>(n)));
  if (ws_s > 0.0) {
    const double log_arg = std::max(ct / ws_s, std::exp(1.0));
    rhs += c * ws_s * std::pow(std::log(log_arg), t - s);
  }
  return MetricReport::make("ws_wt", lhs, rhs);
}

}  // namespace kls
