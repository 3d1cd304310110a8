#include "multirank/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "multirank/errors.hpp"

namespace multirank::kernels {
namespace {

// MULTIRANK_KERNEL=scalar|avx2 overrides auto-detection.
const Ops* pick_default() {
  if (const char* env = std::getenv("MULTIRANK_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return &avx2_ops();
  }
  if (avx2_supported()) return &avx2_ops();
  return &scalar_ops();
}

std::atomic<const Ops*>& active_slot() {
  static std::atomic<const Ops*> slot{pick_default()};
  return slot;
}

}  // namespace

bool avx2_supported() {
#if defined(MULTIRANK_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Ops& active() { return *active_slot().load(std::memory_order_relaxed); }

void force(const std::string& which) {
  if (which == "auto") {
    active_slot().store(pick_default(), std::memory_order_relaxed);
  } else if (which == "scalar") {
    active_slot().store(&scalar_ops(), std::memory_order_relaxed);
  } else if (which == "avx2") {
    if (!avx2_supported()) throw UsageError("avx2 kernels are not available on this machine");
    active_slot().store(&avx2_ops(), std::memory_order_relaxed);
  } else {
    throw UsageError("unknown kernel '" + which + "' (expected auto, scalar or avx2)");
  }
}

#if !(defined(MULTIRANK_HAVE_AVX2_TU))
const Ops& avx2_ops() { return scalar_ops(); }
#endif

}  // namespace multirank::kernels
