#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kls/distributions.hpp"
#include "kls/metrics.hpp"
#include "kls/rng.hpp"
#include "kls/stats.hpp"

using namespace kls;

namespace {

double brute_force_wp(std::vector<double> a, std::vector<double> b, double p) {
  std::vector<int> idx(b.size());
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::sort(idx.begin(), idx.end());
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      cost += std::pow(std::abs(a[i] - b[idx[i]]), p);
    best = std::min(best, cost);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return std::pow(best / a.size(), 1.0 / p);
}

std::vector<double> normal_draws(long n, std::uint64_t seed, double mean = 0.0,
                                 double sd = 1.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = mean + sd * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("w_p basics: identity, unit shift, translation") {
  Empirical1D a({0.0, 1.0});
  Empirical1D b({1.0, 2.0});
  CHECK(w_p_empirical(a, a, 1.0) == doctest::Approx(0.0));
  CHECK(w_p_empirical(a, b, 1.0) == doctest::Approx(1.0));

  Rng rng(9);
  std::vector<double> base(100), shifted(100);
  for (int i = 0; i < 100; ++i) {
    base[i] = rng.normal();
    shifted[i] = base[i] + 0.7;
  }
  CHECK(w_p_empirical(Empirical1D(base), Empirical1D(shifted), 2.0) ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("w_p rejects p < 1 and empty samples") {
  Empirical1D a({0.0, 1.0});
  CHECK_THROWS(w_p_empirical(a, a, 0.5));
  CHECK_THROWS(w_p_empirical(Empirical1D{}, a, 1.0));
}

TEST_CASE("monotone coupling matches brute force over all N! pairings") {
  Rng rng(314);
  for (int instance = 0; instance < 100; ++instance) {
    const int N = 2 + static_cast<int>(rng.uniform() * 5);  // 2..6
    std::vector<double> a(N), b(N);
    for (int i = 0; i < N; ++i) {
      a[i] = rng.uniform(-2.0, 2.0);
      b[i] = rng.uniform(-2.0, 2.0);
    }
    for (double p : {1.0, 2.0, 3.0}) {
      const double fast = w_p_empirical(Empirical1D(a), Empirical1D(b), p);
      const double slow = brute_force_wp(a, b, p);
      CHECK(std::abs(fast - slow) < 1e-12);
    }
  }
}

TEST_CASE("triangle inequality on random triples") {
  Rng rng(271);
  for (int instance = 0; instance < 50; ++instance) {
    std::vector<double> a(40), b(40), c(40);
    for (int i = 0; i < 40; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal() + 1.0;
      c[i] = 2.0 * rng.normal();
    }
    Empirical1D ea(a), eb(b), ec(c);
    for (double p : {1.0, 2.0}) {
      CHECK(w_p_empirical(ea, ec, p) <=
            w_p_empirical(ea, eb, p) + w_p_empirical(eb, ec, p) + 1e-9);
    }
  }
}

TEST_CASE("scale equivariance") {
  Rng rng(5150);
  std::vector<double> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = rng.normal();
    b[i] = rng.uniform(-1.0, 1.0);
  }
  for (double lambda : {2.0, -3.0, 0.25}) {
    std::vector<double> la(30), lb(30);
    for (int i = 0; i < 30; ++i) {
      la[i] = lambda * a[i];
      lb[i] = lambda * b[i];
    }
    const double base = w_p_empirical(Empirical1D(a), Empirical1D(b), 2.0);
    const double scaled =
        w_p_empirical(Empirical1D(la), Empirical1D(lb), 2.0);
    CHECK(std::abs(scaled - std::abs(lambda) * base) < 1e-12);
  }
}

TEST_CASE("unequal sizes agree with equal-size result in the large limit") {
  Rng rng(808);
  std::vector<double> a(2000), b(3000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal() + 1.0;
  const double w = w_p_empirical(Empirical1D(a), Empirical1D(b), 2.0);
  CHECK(w == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("w_p_vs_normal oracles") {
  CHECK(w_p_vs_normal(Empirical1D(std::vector<double>(1000, 0.0)), 1.0, 2.0) ==
        doctest::Approx(1.0).epsilon(0.01));

  const auto draws = normal_draws(1000000, 17);
  CHECK(w_p_vs_normal(Empirical1D(draws), 1.0, 2.0) < 0.01);

  const auto shifted = normal_draws(200000, 18, 0.8);
  CHECK(w_p_vs_normal(Empirical1D(shifted), 1.0, 2.0) ==
        doctest::Approx(0.8).epsilon(0.02));

  CHECK_THROWS(w_p_vs_normal(Empirical1D(draws), -1.0, 2.0));
}

TEST_CASE("tv_estimate oracles") {
  const auto a = normal_draws(1000000, 21);
  const auto b = normal_draws(1000000, 22);
  CHECK(tv_estimate(Empirical1D(a), Empirical1D(b)) < 0.02);
  CHECK(tv_estimate(Empirical1D(a), Empirical1D(a)) == doctest::Approx(0.0));

  std::vector<double> left(10000), right(10000);
  Rng rng(23);
  for (int i = 0; i < 10000; ++i) {
    left[i] = rng.uniform(-2.0, -1.0);
    right[i] = rng.uniform(1.0, 2.0);
  }
  CHECK(tv_estimate(Empirical1D(left), Empirical1D(right)) ==
        doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("check_tv_w1 on shifted gaussians matches the normal-CDF oracle") {
  const long N = 400000;
  for (double m : {0.5, 1.0}) {
    const auto a = normal_draws(N, 31);
    const auto b = normal_draws(N, 32, m);
    const auto report = check_tv_w1(Empirical1D(a), Empirical1D(b), 2.5);
    CHECK(report.satisfied);
    const double tv_true = 2.0 * normal_cdf(m / 2.0) - 1.0;
    CHECK(report.lhs == doctest::Approx(tv_true).epsilon(0.05));
    CHECK(report.rhs == doctest::Approx(2.5 * std::sqrt(m)).epsilon(0.05));
  }
  const auto a = normal_draws(1000, 33);
  const auto same = check_tv_w1(Empirical1D(a), Empirical1D(a));
  CHECK(same.lhs == doctest::Approx(0.0));
  CHECK(same.satisfied);
}

TEST_CASE("W_s <= W_t for s <= t under any shared pair") {
  const auto a = normal_draws(50000, 41);
  const auto b = normal_draws(50000, 42, 0.3, 1.2);
  Empirical1D ea(a), eb(b);
  CHECK(w_p_empirical(ea, eb, 1.0) <= w_p_empirical(ea, eb, 2.0) + 1e-12);
  CHECK(w_p_empirical(ea, eb, 2.0) <= w_p_empirical(ea, eb, 3.0) + 1e-12);
}

TEST_CASE("check_ws_wt holds on cube inner products at n = 32") {
  const int n = 32;
  const long N = 100000;
  const auto spec = make_distribution(Family::kCube, n);
  const auto X = sample(spec, static_cast<int>(N), 51);
  const auto Y = sample(spec, static_cast<int>(N), 52);
  std::vector<double> dots(N), ref(N);
  Rng rng(53);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (long i = 0; i < N; ++i) {
    dots[i] = X.data.row(i).dot(Y.data.row(i)) / root_n;
    ref[i] = rng.normal();
  }
  const auto report =
      check_ws_wt(Empirical1D(dots), Empirical1D(ref), 2.0, 3.0, n, 10.0);
  CHECK(report.satisfied);

  const auto trivial =
      check_ws_wt(Empirical1D(dots), Empirical1D(dots), 2.0, 3.0, n, 10.0);
  CHECK(trivial.lhs == doctest::Approx(0.0));
  CHECK(trivial.satisfied);

  CHECK_THROWS(check_ws_wt(Empirical1D(dots), Empirical1D(ref), 3.0, 2.0, n));
}
