#include "kls/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kls {

BatchMeans::BatchMeans(int batches) {
  if (batches < 1) throw std::invalid_argument("batches must be >= 1");
  sums_.assign(batches, 0.0);
  counts_.assign(batches, 0);
}

void BatchMeans::add(double value) {
  add_to_batch(next_, value);
  next_ = (next_ + 1) % static_cast<int>(sums_.size());
}

void BatchMeans::add_to_batch(int batch, double value) {
  sums_[batch] += value;
  counts_[batch] += 1;
  total_ += 1;
}

Estimate BatchMeans::estimate(std::uint64_t seed) const {
  Estimate est;
  est.seed = seed;
  est.n_samples = total_;
  if (total_ == 0) return est;

  int used = 0;
  double mean_of_means = 0.0;
  for (std::size_t b = 0; b < sums_.size(); ++b) {
    if (counts_[b] == 0) continue;
    mean_of_means += sums_[b] / counts_[b];
    ++used;
  }
  mean_of_means /= used;

  double grand_sum = 0.0;
  for (double s : sums_) grand_sum += s;
  est.value = grand_sum / total_;

  if (used > 1) {
    double ss = 0.0;
    for (std::size_t b = 0; b < sums_.size(); ++b) {
      if (counts_[b] == 0) continue;
      const double d = sums_[b] / counts_[b] - mean_of_means;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / (used - 1) / used);
  }
  return est;
}

std::vector<double> BatchMeans::batch_means() const {
  std::vector<double> out;
  for (std::size_t b = 0; b < sums_.size(); ++b)
    if (counts_[b] > 0) out.push_back(sums_[b] / counts_[b]);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation for the probit function.
double probit_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("normal_quantile: p outside [0,1]");
  }
  double x = probit_approx(p);
  // One Halley step against erfc.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

}  // namespace kls
