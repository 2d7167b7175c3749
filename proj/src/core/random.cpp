//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/core/random.h"

#include <cmath>
#include <numbers>

namespace cardiogen {

double CounterRng::normal() noexcept {
  // Box-Muller; one of the pair is discarded to keep the stream stateless.
  double u1 = uniform();
  while (u1 <= 0.0)
    u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1))
         * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cardiogen
