#include <atomic>
#include <cstdlib>
#include <string>

#include "mflab/error.hpp"
#include "mflab/kernels.hpp"

namespace mflab::kernels {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MFLAB_SIMD"); env != nullptr && *env != '\0') {
    const Backend b = parse_backend(env);
    if (const KernelTable* t = table_for(b)) return t;
    throw ContractError(std::string("MFLAB_SIMD backend not available: ") + env);
  }
  return table_for(detect_best());
}

}  // namespace

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &detail::kScalarTable;
    case Backend::avx2:
      return detail::avx2_table();
    case Backend::neon:
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable& scalar_table() { return detail::kScalarTable; }

bool available(Backend b) { return table_for(b) != nullptr; }

Backend detect_best() {
  if (available(Backend::avx2)) return Backend::avx2;
  if (available(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* fresh = initial_table();
    if (g_active.compare_exchange_strong(t, fresh, std::memory_order_acq_rel)) t = fresh;
  }
  return *t;
}

void set_backend(Backend b) {
  const KernelTable* t = table_for(b);
  if (t == nullptr) throw ContractError("SIMD backend not available: " + std::string(name(b)));
  g_active.store(t, std::memory_order_release);
}

std::string_view name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

Backend parse_backend(std::string_view s) {
  if (s == "scalar") return Backend::scalar;
  if (s == "avx2") return Backend::avx2;
  if (s == "neon") return Backend::neon;
  throw ContractError("unknown SIMD backend: " + std::string(s));
}

}  // namespace mflab::kernels
