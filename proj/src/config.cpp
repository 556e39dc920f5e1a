#include "kls/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace kls {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string ExperimentConfig::canonical() const {
  std::vector<std::string> dim_strs;
  for (int d : dims) dim_strs.push_back(std::to_string(d));
  std::ostringstream out;
  out << "T=" << fmt_double(T) << "\n"
      << "c_tv=" << fmt_double(c_tv) << "\n"
      << "c_ws=" << fmt_double(c_ws) << "\n"
      << "det_trials=" << det_trials << "\n"
      << "dims=" << join(dim_strs) << "\n"
      << "directions=" << directions << "\n"
      << "dt=" << fmt_double(dt) << "\n"
      << "families=" << join(families) << "\n"
      << "pairs=" << pairs << "\n"
      << "particles=" << particles << "\n"
      << "q=" << q << "\n"
      << "runs=" << runs << "\n"
      << "samples=" << samples << "\n"
      << "seed=" << seed << "\n"
      << "tinq_alpha=" << fmt_double(tinq_alpha) << "\n"
      << "tinq_beta=" << fmt_double(tinq_beta) << "\n"
      << "trials=" << trials << "\n";
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string ExperimentConfig::config_hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "families") {
    families = split(value, ',');
  } else if (key == "dims") {
    dims.clear();
    for (const auto& d : split(value, ',')) dims.push_back(std::stoi(d));
  } else if (key == "pairs") {
    pairs = std::stol(value);
  } else if (key == "samples") {
    samples = std::stol(value);
  } else if (key == "particles") {
    particles = std::stoi(value);
  } else if (key == "runs") {
    runs = std::stoi(value);
  } else if (key == "directions") {
    directions = std::stoi(value);
  } else if (key == "trials") {
    trials = std::stoi(value);
  } else if (key == "det_trials") {
    det_trials = std::stoi(value);
  } else if (key == "seed") {
    seed = std::stoull(value);
  } else if (key == "dt") {
    dt = std::stod(value);
  } else if (key == "T") {
    T = std::stod(value);
  } else if (key == "q") {
    q = std::stoi(value);
  } else if (key == "c_tv") {
    c_tv = std::stod(value);
  } else if (key == "c_ws") {
    c_ws = std::stod(value);
  } else if (key == "tinq_alpha") {
    tinq_alpha = std::stod(value);
  } else if (key == "tinq_beta") {
    tinq_beta = std::stod(value);
  } else if (key == "out_dir" || key == "out") {
    out_dir = value;
  } else if (key == "threads") {
    threads = std::stoi(value);
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line: " + line);
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void run_tasks(int threads, const std::vector<std::function<void()>>& tasks) {
  if (threads <= 1) {
    for (const auto& task : tasks) task();
    return;
  }
  std::vector<std::future<void>> inflight;
  for (const auto& task : tasks) {
    if (static_cast<int>(inflight.size()) >= threads) {
      inflight.front().get();
      inflight.erase(inflight.begin());
    }
    inflight.push_back(std::async(std::launch::async, task));
  }
  for (auto& f : inflight) f.get();
}

}  // namespace kls
