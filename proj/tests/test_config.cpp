#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <fstream>

#include "kls/config.hpp"

using namespace kls;

TEST_CASE("canonical serialization is stable and hash tracks content") {
  ExperimentConfig a, b;
  CHECK(a.canonical() == b.canonical());
  CHECK(a.config_hash() == b.config_hash());
  b.set("pairs", "123");
  CHECK(a.config_hash() != b.config_hash());
  CHECK(b.pairs == 123);
}

TEST_CASE("every documented key parses and unknown keys throw") {
  ExperimentConfig c;
  c.set("families", "gaussian,cube");
  CHECK(c.families == std::vector<std::string>{"gaussian", "cube"});
  c.set("dims", "4,16");
  CHECK(c.dims == std::vector<int>{4, 16});
  c.set("seed", "42");
  CHECK(c.seed == 42);
  c.set("dt", "0.5");
  CHECK(c.dt == doctest::Approx(0.5));
  CHECK_THROWS_AS(c.set("bogus", "1"), std::invalid_argument);
}

TEST_CASE("config files round-trip through canonical form") {
  ExperimentConfig c;
  c.set("pairs", "777");
  c.set("families", "ball");
  const std::string path = "test_config_roundtrip.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n\n" << c.canonical();
  }
  ExperimentConfig d;
  d.load_file(path);
  CHECK(d.canonical() == c.canonical());
  CHECK(d.config_hash() == c.config_hash());
  std::remove(path.c_str());
}

TEST_CASE("load_file rejects malformed lines and missing files") {
  ExperimentConfig c;
  CHECK_THROWS_AS(c.load_file("no_such_file.cfg"), std::invalid_argument);
  const std::string path = "test_config_bad.txt";
  {
    std::ofstream out(path);
    out << "pairs 100\n";
  }
  CHECK_THROWS_AS(c.load_file(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("fmt_double is fixed-format") {
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt_double(1e-300) == "1e-300");
}

TEST_CASE("run_tasks executes every task once, any thread count") {
  for (int threads : {1, 4}) {
    std::atomic<int> hits{0};
    std::vector<std::function<void()>> tasks;
    std::vector<int> order(20, -1);
    for (int i = 0; i < 20; ++i)
      tasks.push_back([&, i] {
        order[i] = i;
        ++hits;
      });
    run_tasks(threads, tasks);
    CHECK(hits == 20);
    for (int i = 0; i < 20; ++i) CHECK(order[i] == i);
  }
}

TEST_CASE("fnv1a distinguishes nearby strings") {
  CHECK(fnv1a("a") != fnv1a("b"));
  CHECK(fnv1a("") == 14695981039346656037ULL);
}
