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

#include "qsprep/types.hpp"

namespace qsprep {

/// Orthonormal type-I discrete sine transform,
///   (S x)_k = sqrt(2/(N+1)) sum_j sin(pi j k/(N+1)) x_j,
/// applied in place to the real and imaginary parts. S is symmetric and
/// its own inverse. Backed by FFTW; plans are cached per length and the
/// call is safe from multiple threads.
void sine_transform_inplace(ComplexVector& x);

}  // namespace qsprep
