#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hot loops of the toolkit: popcounts over packed bit vectors, and the
// sparse/dense double reductions of the coloring walk. Each kernel has a
// scalar reference and optional SIMD variants; one is chosen at startup
// from the CPU feature set.
//
// The double reductions accumulate in four interleaved lanes combined as
// (l0 + l1) + (l2 + l3), followed by a sequential tail, in every backend.
// Results are therefore bitwise identical across backends.
namespace lowdisc::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  std::uint64_t (*popcount)(const std::uint64_t* a, std::size_t words);
  std::uint64_t (*xor_popcount)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  // min(popcount(a ^ b), limit + 1); may stop reading early.
  std::uint64_t (*xor_popcount_bounded)(const std::uint64_t* a, const std::uint64_t* b,
                                        std::size_t words, std::uint64_t limit);
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  // sum of x[idx[t]] for t < count
  double (*gather_sum)(const double* x, const std::uint32_t* idx, std::size_t count);
  double (*dot)(const double* a, const double* b, std::size_t count);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t count);
  // Packs the bits of src selected by mask, in order, into dst starting at
  // bit 0. Returns the number of bits written. dst must be zeroed and hold
  // popcount(mask) bits.
  std::size_t (*extract_bits)(const std::uint64_t* src, const std::uint64_t* mask,
                              std::size_t words, std::uint64_t* dst);
};

const KernelTable& scalar_table();
// Null when the backend was not compiled in.
const KernelTable* avx2_table();
const KernelTable* neon_table();

bool backend_available(Backend b);
const KernelTable& table(Backend b);

// The table in use by the library. Chosen on first call.
const KernelTable& active();

// Overrides the runtime choice; throws UnsupportedError if unavailable.
void force_backend(Backend b);
void reset_backend();

std::string_view backend_name(Backend b);

}  // namespace lowdisc::kernels
