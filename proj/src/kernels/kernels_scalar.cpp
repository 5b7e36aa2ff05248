#include <bit>

#include "lowdisc/kernels.hpp"

namespace lowdisc::kernels {
namespace {

std::uint64_t popcount_scalar(const std::uint64_t* a, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t w = 0; w < words; ++w) c += std::popcount(a[w]);
  return c;
}

std::uint64_t xor_popcount_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t w = 0; w < words; ++w) c += std::popcount(a[w] ^ b[w]);
  return c;
}

std::uint64_t xor_popcount_bounded_scalar(const std::uint64_t* a, const std::uint64_t* b,
                                          std::size_t words, std::uint64_t limit) {
  std::uint64_t c = 0;
  std::size_t w = 0;
  while (w < words) {
    const std::size_t end = w + 8 < words ? w + 8 : words;
    for (; w < end; ++w) c += std::popcount(a[w] ^ b[w]);
    if (c > limit) return limit + 1;
  }
  return c;
}

std::uint64_t and_popcount_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t c = 0;
  for (std::size_t w = 0; w < words; ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

double gather_sum_scalar(const double* x, const std::uint32_t* idx, std::size_t count) {
  double l0 = 0, l1 = 0, l2 = 0, l3 = 0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    l0 += x[idx[t]];
    l1 += x[idx[t + 1]];
    l2 += x[idx[t + 2]];
    l3 += x[idx[t + 3]];
  }
  double s = (l0 + l1) + (l2 + l3);
  for (; t < count; ++t) s += x[idx[t]];
  return s;
}

double dot_scalar(const double* a, const double* b, std::size_t count) {
  double l0 = 0, l1 = 0, l2 = 0, l3 = 0;
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    l0 += a[t] * b[t];
    l1 += a[t + 1] * b[t + 1];
    l2 += a[t + 2] * b[t + 2];
    l3 += a[t + 3] * b[t + 3];
  }
  double s = (l0 + l1) + (l2 + l3);
  for (; t < count; ++t) s += a[t] * b[t];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t count) {
  for (std::size_t t = 0; t < count; ++t) y[t] += alpha * x[t];
}

std::size_t extract_bits_scalar(const std::uint64_t* src, const std::uint64_t* mask,
                                std::size_t words, std::uint64_t* dst) {
  std::size_t out = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t m = mask[w];
    while (m) {
      const int b = std::countr_zero(m);
      if ((src[w] >> b) & 1u) dst[out >> 6] |= std::uint64_t{1} << (out & 63);
      ++out;
      m &= m - 1;
    }
  }
  return out;
}

constexpr KernelTable kScalar{
    Backend::scalar,          popcount_scalar,  xor_popcount_scalar, xor_popcount_bounded_scalar,
    and_popcount_scalar,      gather_sum_scalar, dot_scalar,          axpy_scalar,
    extract_bits_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace lowdisc::kernels
