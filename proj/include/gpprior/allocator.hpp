#pragma once

#include <cstdlib>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace gpprior {

// Keeps large Gram-matrix buffers on the heap instead of fresh mmap regions,
// which otherwise costs a page-fault storm on every likelihood evaluation.
// Process-wide, so executables opt in from main().
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace gpprior
