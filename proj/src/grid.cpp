// Copyright 2026 The qsprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsprep/grid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <utility>

#include "qsprep/error.hpp"

namespace qsprep {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveSample: return "NonPositiveSample";
    case Errc::ZeroNorm: return "ZeroNorm";
    case Errc::InvalidRatio: return "InvalidRatio";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::TooLarge: return "TooLarge";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::UnsupportedOrder: return "UnsupportedOrder";
    case Errc::ZeroBranch: return "ZeroBranch";
    case Errc::OverlapTooSmall: return "OverlapTooSmall";
    case Errc::AbortedOnOutcomeOne: return "AbortedOnOutcomeOne";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

GridSpec::GridSpec(int qubits) : qubits_(qubits), size_(0) {
  // 2^30 doubles is already far beyond anything this library can diagonalize.
  if (qubits < 2 || qubits > 30) {
    throw Error(Errc::InvalidArgument, "qubit count must be in [2, 30], got " + std::to_string(qubits));
  }
  size_ = Eigen::Index{1} << qubits;
}

RealVector GridSpec::nodes() const {
  RealVector x(size_);
  for (Eigen::Index i = 0; i < size_; ++i) x[i] = node(i + 1);
  return x;
}

namespace {

TargetFunction normalized(const GridSpec& grid, RealVector samples, std::string name) {
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    if (!(samples[i] > 0.0)) {
      if (samples.isZero(0.0)) throw Error(Errc::ZeroNorm, "all samples vanish");
      std::ostringstream msg;
      msg << "sample " << i + 1 << " at x=" << grid.node(i + 1) << " is " << samples[i];
      throw Error(Errc::NonPositiveSample, msg.str());
    }
  }
  const double norm = samples.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(Errc::ZeroNorm, "sample norm is not positive and finite");
  samples /= norm;
  return TargetFunction{grid, std::move(samples), std::move(name)};
}

}  // namespace

TargetFunction sample_function(const RealFunction& f, const GridSpec& grid, std::string name) {
  RealVector samples(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) samples[i] = f(grid.node(i + 1));
  return normalized(grid, std::move(samples), std::move(name));
}

TargetFunction sample_table(std::span<const double> table, const GridSpec& grid, std::string name) {
  if (table.empty()) throw Error(Errc::ZeroNorm, "empty table");
  const auto m = static_cast<double>(table.size());
  // Knots at 0, 1/(M+1), ..., M/(M+1), 1 with zero values at both ends.
  auto value_at = [&](std::size_t knot) {
    return (knot == 0 || knot == table.size() + 1) ? 0.0 : table[knot - 1];
  };
  RealVector samples(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double pos = grid.node(i + 1) * (m + 1.0);
    auto left = static_cast<std::size_t>(std::floor(pos));
    if (left > table.size()) left = table.size();
    const double frac = pos - static_cast<double>(left);
    samples[i] = (1.0 - frac) * value_at(left) + frac * value_at(left + 1);
  }
  return normalized(grid, std::move(samples), std::move(name));
}

std::vector<double> read_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open table file " + path.string());
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": not a real number");
    }
    values.push_back(v);
  }
  return values;
}

RealFunction gaussian(double center, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::InvalidArgument, "gaussian sigma must be positive");
  return [center, sigma](double x) {
    const double z = (x - center) / sigma;
    return std::exp(-0.5 * z * z);
  };
}

RealFunction sine_mode() {
  return [](double x) { return std::sin(std::numbers::pi * x); };
}

RealVector tail_extension_raw(const TargetFunction& target, double decay_ratio) {
  if (!(decay_ratio > 0.0 && decay_ratio < 1.0)) {
    throw Error(Errc::InvalidRatio, "decay ratio must lie in (0,1), got " + std::to_string(decay_ratio));
  }
  const Eigen::Index n = target.samples.size();
  const double left_edge = target.samples[0];
  const double right_edge = target.samples[n - 1];
  RealVector out(4 * n);
  // Left tail: out[n-1] is adjacent to the body, decaying towards index 0.
  double w = left_edge;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    w *= decay_ratio;
    out[i] = w;
  }
  out.segment(n, n) = target.samples;
  w = right_edge;
  for (Eigen::Index i = 2 * n; i < 4 * n; ++i) {
    w *= decay_ratio;
    out[i] = w;
  }
  return out;
}

TargetFunction extend_with_tails(const TargetFunction& target, double decay_ratio) {
  RealVector raw = tail_extension_raw(target, decay_ratio);
  // Deep tail entries may underflow to zero for small ratios.
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!(raw[i] > 0.0)) {
      throw Error(Errc::NonPositiveSample, "tail underflows to zero; use a larger decay ratio");
    }
  }
  return normalized(GridSpec(target.grid.qubits() + 2), std::move(raw), target.name + "+tails");
}

}  // namespace qsprep
