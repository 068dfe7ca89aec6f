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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qsprep/types.hpp"

namespace qsprep {

/// Interior-only Dirichlet grid on the unit interval: N = 2^n nodes at
/// x_i = i*h, i = 1..N, with h = 1/(N+1).
class GridSpec {
 public:
  explicit GridSpec(int qubits);

  [[nodiscard]] int qubits() const noexcept { return qubits_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return size_; }
  [[nodiscard]] double spacing() const noexcept { return 1.0 / static_cast<double>(size_ + 1); }
  /// Position of the 1-based interior node i.
  [[nodiscard]] double node(Eigen::Index i) const noexcept {
    return static_cast<double>(i) * spacing();
  }
  [[nodiscard]] RealVector nodes() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int qubits_;
  Eigen::Index size_;
};

/// Unit-norm, strictly positive samples of the function to be prepared.
struct TargetFunction {
  GridSpec grid;
  RealVector samples;
  std::string name;
};

using RealFunction = std::function<double(double)>;

TargetFunction sample_function(const RealFunction& f, const GridSpec& grid, std::string name = "f");

/// Samples a table of equally spaced values. Table entry j (0-based) sits at
/// x = (j+1)/(M+1); the endpoints 0 and 1 are implicit zeros and values in
/// between are linearly interpolated.
TargetFunction sample_table(std::span<const double> table, const GridSpec& grid,
                            std::string name = "table");

/// Reads one decimal real per line; blank lines and lines starting with '#'
/// are skipped.
std::vector<double> read_table_file(const std::filesystem::path& path);

RealFunction gaussian(double center, double sigma);
RealFunction sine_mode();

/// Block index of the tail register layout (two extra leading qubits).
enum class TailBlock : int { LeftTail = 0, Body = 1, RightNear = 2, RightFar = 3 };

/// Embeds the target in an (n+2)-qubit register: block 00 is a left tail
/// decaying geometrically away from the body, block 01 the original
/// samples, blocks 10 and 11 a right tail. The entry next to a junction is
/// edge*ratio, the next edge*ratio^2, and so on. Renormalized.
TargetFunction extend_with_tails(const TargetFunction& target, double decay_ratio);

/// Same layout without the final renormalization.
RealVector tail_extension_raw(const TargetFunction& target, double decay_ratio);

}  // namespace qsprep
