#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "lowdisc/errors.hpp"
#include "lowdisc/kernels.hpp"
#include "lowdisc/rng.hpp"
#include "oracles.hpp"

using namespace lowdisc;
namespace k = lowdisc::kernels;

namespace {

std::vector<const k::KernelTable*> tables() {
  std::vector<const k::KernelTable*> out{&k::scalar_table()};
  if (auto* t = k::avx2_table()) out.push_back(t);
  if (auto* t = k::neon_table()) out.push_back(t);
  return out;
}

std::vector<std::uint64_t> random_words(std::size_t w, Rng& rng, int density = 1) {
  std::vector<std::uint64_t> v(w);
  for (auto& x : v) {
    x = rng();
    for (int i = 1; i < density; ++i) x &= rng();
  }
  return v;
}

std::vector<double> random_doubles(std::size_t n, Rng& rng) {
  GaussianSource g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng) * std::ldexp(1.0, static_cast<int>(uniform_index(rng, 20)) - 10);
  return v;
}

}  // namespace

TEST_CASE("popcount kernels agree with a bit-by-bit count") {
  Rng rng(11);
  for (auto* t : tables()) {
    CAPTURE(k::backend_name(t->backend));
    for (std::size_t w : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 131u}) {
      auto a = random_words(w, rng);
      auto b = random_words(w, rng, 2);
      std::vector<std::uint64_t> x(w), n(w);
      for (std::size_t i = 0; i < w; ++i) x[i] = a[i] ^ b[i], n[i] = a[i] & b[i];
      const auto pa = oracle::popcount_bits(a.data(), w);
      const auto px = oracle::popcount_bits(x.data(), w);
      CHECK(t->popcount(a.data(), w) == pa);
      CHECK(t->xor_popcount(a.data(), b.data(), w) == px);
      CHECK(t->and_popcount(a.data(), b.data(), w) == oracle::popcount_bits(n.data(), w));
      for (std::uint64_t lim : {std::uint64_t{0}, std::uint64_t{7}, px / 2, px, px + 3})
        CHECK(t->xor_popcount_bounded(a.data(), b.data(), w, lim) == std::min(px, lim + 1));
    }
  }
}

TEST_CASE("extract_bits packs selected bits in order") {
  Rng rng(12);
  for (auto* t : tables()) {
    for (std::size_t w : {1u, 2u, 5u, 33u}) {
      auto src = random_words(w, rng);
      auto mask = random_words(w, rng, 2);
      std::vector<int> expect;
      for (std::size_t i = 0; i < 64 * w; ++i)
        if ((mask[i / 64] >> (i % 64)) & 1u) expect.push_back((src[i / 64] >> (i % 64)) & 1u);
      std::vector<std::uint64_t> dst(w, 0);
      const std::size_t got = t->extract_bits(src.data(), mask.data(), w, dst.data());
      REQUIRE(got == expect.size());
      bool same = true;
      for (std::size_t i = 0; i < got; ++i) same &= static_cast<int>((dst[i / 64] >> (i % 64)) & 1u) == expect[i];
      CHECK(same);
    }
  }
}

TEST_CASE("double reductions are bitwise identical across backends") {
  Rng rng(13);
  const auto& ref = k::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 101u, 1000u}) {
    auto a = random_doubles(n, rng);
    auto b = random_doubles(n, rng);
    std::vector<std::uint32_t> idx(n / 2 + 1);
    for (auto& i : idx) i = static_cast<std::uint32_t>(uniform_index(rng, std::max<std::size_t>(n, 1)));
    if (n == 0) idx.clear();

    double naive_dot = 0;
    for (std::size_t i = 0; i < n; ++i) naive_dot += a[i] * b[i];
    const double r_dot = ref.dot(a.data(), b.data(), n);
    CHECK(r_dot == doctest::Approx(naive_dot).epsilon(1e-9));
    const double r_gs = ref.gather_sum(a.data(), idx.data(), idx.size());

    for (auto* t : tables()) {
      CAPTURE(k::backend_name(t->backend));
      const double d = t->dot(a.data(), b.data(), n);
      const double g = t->gather_sum(a.data(), idx.data(), idx.size());
      CHECK(std::memcmp(&d, &r_dot, sizeof d) == 0);
      CHECK(std::memcmp(&g, &r_gs, sizeof g) == 0);
      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      t->axpy(0.37, a.data(), y2.data(), n);
      CHECK(y1 == y2);
    }
  }
}

TEST_CASE("gather_sum reduces in four interleaved lanes") {
  std::vector<double> x{1e16, 1.0, -1e16, 1.0, 3.0};
  std::vector<std::uint32_t> idx{0, 1, 2, 3, 4};
  // lanes: (1e16 + 1) + (-1e16 + 1), then the tail
  const double lanes = (x[0] + x[1]) + (x[2] + x[3]);
  CHECK(k::scalar_table().gather_sum(x.data(), idx.data(), idx.size()) == lanes + x[4]);
}

TEST_CASE("backend selection") {
  CHECK(k::backend_available(k::Backend::scalar));
  k::force_backend(k::Backend::scalar);
  CHECK(k::active().backend == k::Backend::scalar);
  if (!k::backend_available(k::Backend::neon)) CHECK_THROWS_AS(k::force_backend(k::Backend::neon), UnsupportedError);
  k::reset_backend();
  CHECK(k::backend_name(k::active().backend).size() > 0);
}
