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

#include "qsprep/sine_transform.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>

namespace qsprep {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  // Plans transform the real and imaginary parts of an interleaved complex
  // array in place (stride 2, two transforms). FFTW_ESTIMATE keeps the
  // algorithm choice, and so the rounding, identical across processes.
  fftw_plan get(int n) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(n); it != plans_.end()) return it->second;
    auto* scratch = static_cast<double*>(fftw_malloc(sizeof(double) * 2 * static_cast<std::size_t>(n)));
    const fftw_r2r_kind kind = FFTW_RODFT00;
    fftw_plan plan = fftw_plan_many_r2r(1, &n, 2, scratch, nullptr, 2, 1, scratch, nullptr, 2, 1, &kind,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void sine_transform_inplace(ComplexVector& x) {
  const auto n = static_cast<int>(x.size());
  if (n == 0) return;
  auto* data = reinterpret_cast<double*>(x.data());
  fftw_execute_r2r(plan_cache().get(n), data, data);
  // FFTW's RODFT00 carries a factor 2 and no normalization.
  x *= 1.0 / std::sqrt(2.0 * (n + 1));
}

}  // namespace qsprep
