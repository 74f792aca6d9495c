// Copyright 2026 The seedless-di Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random instance generators shared by tests, the CLI and the acceptance
// suite. All of them draw from the pinned Rng so instances are reproducible.

#pragma once

#include <cstddef>

#include "seedless/linalg.hpp"
#include "seedless/rng.hpp"

namespace seedless::random {

/// d x d matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each N(0, 1/2)).
linalg::ComplexMatrix ginibre(Rng& rng, std::size_t rows, std::size_t cols);

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
linalg::ComplexMatrix haar_unitary(Rng& rng, std::size_t dim);

/// Normalised G G^dagger for a dim x rank Ginibre G; full rank when rank >= dim.
linalg::ComplexMatrix ginibre_density_matrix(Rng& rng, std::size_t dim, std::size_t rank);

/// Haar-random unit vector.
linalg::ComplexVector random_pure_state(Rng& rng, std::size_t dim);

/// U diag(lambda) U^dagger with lambda uniform in [lo, hi].
linalg::ComplexMatrix random_hermitian(Rng& rng, std::size_t dim, double lo, double hi);

}  // namespace seedless::random
