#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kls {

// Runner configuration. Plain-text key=value files, CLI flags win. Every
// field has a default sized so each command finishes in minutes.
struct ExperimentConfig {
  std::vector<std::string> families{"gaussian", "cube", "ball", "laplace_prod",
                                    "shifted_exp_prod"};
  std::vector<int> dims{8, 32};
  long pairs = 1000000;
  long samples = 200000;
  int particles = 100000;
  int runs = 100;
  int directions = 16;
  int trials = 200;
  int det_trials = 1000;
  std::uint64_t seed = 20240817;
  double dt = 1e-3;
  double T = 1.0;
  int q = 2;
  double c_tv = 2.5;
  double c_ws = 10.0;
  double tinq_alpha = 1.0;
  double tinq_beta = 0.0;
  std::string out_dir = "out";
  int threads = 1;

  // Canonical key=value serialization (sorted keys, fixed formatting).
  std::string canonical() const;
  std::string config_hash() const;  // FNV-1a over canonical(), hex

  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);
};

std::uint64_t fnv1a(const std::string& text);

// Fixed-format float for CSV output: bit-stable across runs.
std::string fmt_double(double v);

// Runs tasks with at most `threads` in flight; results land in task order,
// so output is independent of scheduling.
void run_tasks(int threads, const std::vector<std::function<void()>>& tasks);

}  // namespace kls
