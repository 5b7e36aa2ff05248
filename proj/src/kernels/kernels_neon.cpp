#include "lowdisc/kernels.hpp"

#if defined(__ARM_NEON) || defined(__aarch64__)

#include <arm_neon.h>

#include <bit>

namespace lowdisc::kernels {
namespace {

inline std::uint64_t reduce_counts(uint8x16_t v) { return vaddlvq_u8(v); }

std::uint64_t popcount_neon(const std::uint64_t* a, std::size_t words) {
  std::uint64_t c = 0;
  std::size_t w = 0;
  for (; w + 2 <= words; w += 2) c += reduce_counts(vcntq_u8(vreinterpretq_u8_u64(vld1q_u64(a + w))));
  for (; w < words; ++w) c += std::popcount(a[w]);
  return c;
}

std::uint64_t xor_popcount_neon(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t c = 0;
  std::size_t w = 0;
  for (; w + 2 <= words; w += 2)
    c += reduce_counts(vcntq_u8(vreinterpretq_u8_u64(veorq_u64(vld1q_u64(a + w), vld1q_u64(b + w)))));
  for (; w < words; ++w) c += std::popcount(a[w] ^ b[w]);
  return c;
}

std::uint64_t xor_popcount_bounded_neon(const std::uint64_t* a, const std::uint64_t* b,
                                        std::size_t words, std::uint64_t limit) {
  std::uint64_t c = 0;
  std::size_t w = 0;
  while (w < words) {
    const std::size_t end = w + 16 < words ? w + 16 : words;
    c += xor_popcount_neon(a + w, b + w, end - w);
    w = end;
    if (c > limit) return limit + 1;
  }
  return c;
}

std::uint64_t and_popcount_neon(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t c = 0;
  std::size_t w = 0;
  for (; w + 2 <= words; w += 2)
    c += reduce_counts(vcntq_u8(vreinterpretq_u8_u64(vandq_u64(vld1q_u64(a + w), vld1q_u64(b + w)))));
  for (; w < words; ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

KernelTable make_neon() {
  KernelTable t = scalar_table();
  t.backend = Backend::neon;
  t.popcount = popcount_neon;
  t.xor_popcount = xor_popcount_neon;
  t.xor_popcount_bounded = xor_popcount_bounded_neon;
  t.and_popcount = and_popcount_neon;
  return t;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable t = make_neon();
  return &t;
}

}  // namespace lowdisc::kernels

#else

namespace lowdisc::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace lowdisc::kernels

#endif
