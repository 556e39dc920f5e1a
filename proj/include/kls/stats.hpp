#pragma once

#include <cstdint>
#include <vector>

namespace kls {

// Point value of a Monte-Carlo quantity with a batch-means standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// Batch-means accumulator. Samples are assigned to batches round-robin by
// arrival order; the standard error is sd(batch means)/sqrt(B).
class BatchMeans {
 public:
  explicit BatchMeans(int batches = 32);

  void add(double value);
  // Adds a value to a specific batch (for pre-partitioned parallel work).
  void add_to_batch(int batch, double value);

  Estimate estimate(std::uint64_t seed = 0) const;
  int batches() const { return static_cast<int>(sums_.size()); }
  // Means of the non-empty batches, in batch order.
  std::vector<double> batch_means() const;

 private:
  std::vector<double> sums_;
  std::vector<long> counts_;
  long total_ = 0;
  int next_ = 0;
};

double normal_cdf(double x);
// Inverse standard normal CDF, |error| < 1e-13 after Newton polish.
double normal_quantile(double p);

}  // namespace kls
