#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "epsrob/cli.hpp"
#include "epsrob/network.hpp"
#include "epsrob/philox.hpp"

namespace testing {

// Kolmogorov-Smirnov statistic of `values` against Uniform(0, 1).
inline double ks_statistic_uniform(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

// Asymptotic p-value with Stephens' small-sample correction.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("epsrob_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
    return file(name);
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = epsrob::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Uniform(-scale, scale) weights from a fixed Philox stream.
inline std::vector<double> random_weights(std::size_t count, std::uint64_t seed, double scale) {
  epsrob::DrawSequence draws(seed, 0);
  std::vector<double> w(count);
  for (auto& v : w) v = scale * (2.0 * draws.uniform() - 1.0);
  return w;
}

// (1, 6, 6) -> conv 3x3 (2 ch) -> relu -> maxpool 2 -> flatten -> dense 3.
inline epsrob::NetworkModel toy_conv_model(std::uint64_t seed = 7) {
  using namespace epsrob;
  Conv2dLayer conv{1, 2, 3, 3, random_weights(18, seed, 0.8), random_weights(2, seed + 1, 0.1), 1, 0};
  DenseLayer dense{8, 3, random_weights(24, seed + 2, 0.8), random_weights(3, seed + 3, 0.1)};
  return NetworkModel({1, 6, 6}, 3, {conv, ReluLayer{}, MaxPool2dLayer{2, 2}, FlattenLayer{}, dense});
}

}  // namespace testing
