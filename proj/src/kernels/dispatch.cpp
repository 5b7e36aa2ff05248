#include <atomic>
#include <cstdlib>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/kernels.hpp"

namespace lowdisc::kernels {
namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("LOWDISC_KERNELS")) {
    const std::string v = env;
    if (v == "scalar") return &scalar_table();
    if (v == "avx2" && avx2_table()) return avx2_table();
    if (v == "neon" && neon_table()) return neon_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return avx2_table() != nullptr;
    case Backend::neon: return neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Backend b) {
  const KernelTable* t = nullptr;
  switch (b) {
    case Backend::scalar: t = &scalar_table(); break;
    case Backend::avx2: t = avx2_table(); break;
    case Backend::neon: t = neon_table(); break;
  }
  if (!t) throw UnsupportedError("kernel backend not available: " + std::string(backend_name(b)));
  return *t;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force_backend(Backend b) { g_active.store(&table(b), std::memory_order_release); }

void reset_backend() { g_active.store(detect(), std::memory_order_release); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

}  // namespace lowdisc::kernels
