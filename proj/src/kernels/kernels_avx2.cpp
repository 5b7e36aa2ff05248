#include "lowdisc/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <bit>

#define LOWDISC_AVX2 __attribute__((target("avx2,popcnt,bmi2")))

namespace lowdisc::kernels {
namespace {

// Nibble-lookup popcount: per-byte counts via vpshufb, widened with vpsadbw.
LOWDISC_AVX2 inline __m256i byte_counts(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

LOWDISC_AVX2 inline std::uint64_t hsum_u64(__m256i acc) {
  return static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 0)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 1)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 2)) +
         static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 3));
}

enum class Op { copy, xor_, and_ };

template <Op op>
LOWDISC_AVX2 inline __m256i combine(__m256i x, __m256i y) {
  if constexpr (op == Op::xor_) return _mm256_xor_si256(x, y);
  else if constexpr (op == Op::and_) return _mm256_and_si256(x, y);
  else return x;
}

template <Op op>
LOWDISC_AVX2 inline std::uint64_t popcount_blocks(const std::uint64_t* a, const std::uint64_t* b,
                                                  std::size_t words, std::size_t& w) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  for (; w + 4 <= words; w += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
    const __m256i vb = b ? _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w)) : zero;
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(byte_counts(combine<op>(va, vb)), zero));
  }
  return hsum_u64(acc);
}

LOWDISC_AVX2 std::uint64_t popcount_avx2(const std::uint64_t* a, std::size_t words) {
  std::size_t w = 0;
  std::uint64_t c = popcount_blocks<Op::copy>(a, nullptr, words, w);
  for (; w < words; ++w) c += _mm_popcnt_u64(a[w]);
  return c;
}

LOWDISC_AVX2 std::uint64_t xor_popcount_avx2(const std::uint64_t* a, const std::uint64_t* b,
                                             std::size_t words) {
  std::size_t w = 0;
  std::uint64_t c = popcount_blocks<Op::xor_>(a, b, words, w);
  for (; w < words; ++w) c += _mm_popcnt_u64(a[w] ^ b[w]);
  return c;
}

LOWDISC_AVX2 std::uint64_t and_popcount_avx2(const std::uint64_t* a, const std::uint64_t* b,
                                             std::size_t words) {
  std::size_t w = 0;
  std::uint64_t c = popcount_blocks<Op::and_>(a, b, words, w);
  for (; w < words; ++w) c += _mm_popcnt_u64(a[w] & b[w]);
  return c;
}

LOWDISC_AVX2 std::uint64_t xor_popcount_bounded_avx2(const std::uint64_t* a, const std::uint64_t* b,
                                                     std::size_t words, std::uint64_t limit) {
  const __m256i zero = _mm256_setzero_si256();
  std::uint64_t c = 0;
  std::size_t w = 0;
  // 16-word blocks between early-exit checks.
  for (; w + 16 <= words; w += 16) {
    __m256i acc = zero;
    for (std::size_t u = 0; u < 16; u += 4) {
      const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w + u));
      const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w + u));
      acc = _mm256_add_epi64(acc, _mm256_sad_epu8(byte_counts(_mm256_xor_si256(va, vb)), zero));
    }
    c += hsum_u64(acc);
    if (c > limit) return limit + 1;
  }
  for (; w < words; ++w) c += _mm_popcnt_u64(a[w] ^ b[w]);
  return c > limit ? limit + 1 : c;
}

LOWDISC_AVX2 double gather_sum_avx2(const double* x, const std::uint32_t* idx, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + t));
    acc = _mm256_add_pd(acc, _mm256_i32gather_pd(x, vi, 8));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; t < count; ++t) s += x[idx[t]];
  return s;
}

LOWDISC_AVX2 double dot_avx2(const double* a, const double* b, std::size_t count) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + t), _mm256_loadu_pd(b + t)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; t < count; ++t) s += a[t] * b[t];
  return s;
}

LOWDISC_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t count) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + t));
    _mm256_storeu_pd(y + t, _mm256_add_pd(_mm256_loadu_pd(y + t), prod));
  }
  for (; t < count; ++t) y[t] += alpha * x[t];
}

LOWDISC_AVX2 std::size_t extract_bits_avx2(const std::uint64_t* src, const std::uint64_t* mask,
                                           std::size_t words, std::uint64_t* dst) {
  std::size_t out = 0;
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint64_t m = mask[w];
    if (!m) continue;
    const std::uint64_t bits = _pext_u64(src[w], m);
    const unsigned len = static_cast<unsigned>(_mm_popcnt_u64(m));
    const std::size_t word = out >> 6;
    const unsigned off = out & 63;
    dst[word] |= bits << off;
    if (off && off + len > 64) dst[word + 1] |= bits >> (64 - off);
    out += len;
  }
  return out;
}

constexpr KernelTable kAvx2{
    Backend::avx2,     popcount_avx2,   xor_popcount_avx2, xor_popcount_bounded_avx2,
    and_popcount_avx2, gather_sum_avx2, dot_avx2,          axpy_avx2,
    extract_bits_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt") && __builtin_cpu_supports("bmi2"))
    return &kAvx2;
  return nullptr;
}

}  // namespace lowdisc::kernels

#else

namespace lowdisc::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace lowdisc::kernels

#endif
