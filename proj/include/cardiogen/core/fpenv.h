//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CORE_FPENV_H_
#define CARDIOGEN_CORE_FPENV_H_

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

namespace cardiogen {

/// Flushes denormal results and inputs to zero while alive. Optimizer
/// moments of parameters that stop receiving gradient decay into the
/// denormal range, where float arithmetic is very slow.
class ScopedFlushToZero {
public:
  ScopedFlushToZero() noexcept {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
    _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
  }

  ~ScopedFlushToZero() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
  }

  ScopedFlushToZero(const ScopedFlushToZero &) = delete;
  ScopedFlushToZero &operator=(const ScopedFlushToZero &) = delete;

private:
  unsigned int saved_ = 0;
};

}  // namespace cardiogen

#endif  // CARDIOGEN_CORE_FPENV_H_
