// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace bagchain::kernels {

/// Selects between the serial reference kernels and the OpenMP ones. Both
/// produce bit-identical results; the serial path is what tests compare to.
enum class Exec { serial, parallel };

/// Number of OpenMP threads available to parallel kernels (1 without OpenMP).
int max_threads();
/// Overrides the OpenMP thread count; n <= 0 restores the runtime default.
void set_threads(int n);

}  // namespace bagchain::kernels
