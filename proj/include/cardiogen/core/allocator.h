//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CORE_ALLOCATOR_H_
#define CARDIOGEN_CORE_ALLOCATOR_H_

#include <cstddef>  // defines __GLIBC__ where applicable

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace cardiogen {

/// Keeps freed activation buffers in the heap instead of returning them to
/// the kernel after every step. A no-op outside glibc.
inline void retain_heap_memory() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

}  // namespace cardiogen

#endif  // CARDIOGEN_CORE_ALLOCATOR_H_
