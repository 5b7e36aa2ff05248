#include "lowdisc/bitvec.hpp"

#include <bit>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/kernels.hpp"

namespace lowdisc {
namespace {

void check_width(std::size_t a, std::size_t b) {
  if (a != b) throw StructuralError("bit vector width mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

std::size_t BitView::count() const { return kernels::active().popcount(data_, words()); }

bool BitView::none() const {
  for (std::size_t w = 0; w < words(); ++w)
    if (data_[w]) return false;
  return true;
}

std::vector<std::uint32_t> BitView::indices() const {
  std::vector<std::uint32_t> out;
  out.reserve(count());
  for (std::size_t w = 0; w < words(); ++w) {
    std::uint64_t x = data_[w];
    while (x) {
      out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(x)));
      x &= x - 1;
    }
  }
  return out;
}

BitVec BitView::to_vec() const { return BitVec(*this); }

BitVec::BitVec(BitView v) : n_(v.size()), w_(v.data(), v.data() + v.words()) {}

BitVec BitVec::from_indices(std::size_t n, std::span<const std::uint32_t> idx) {
  BitVec b(n);
  for (auto i : idx) {
    if (i >= n) throw StructuralError("element id " + std::to_string(i) + " out of range for n=" + std::to_string(n));
    b.set(i);
  }
  return b;
}

BitVec BitVec::full(std::size_t n) {
  BitVec b(n);
  for (auto& w : b.w_) w = ~std::uint64_t{0};
  if (n % 64) b.w_.back() = (std::uint64_t{1} << (n % 64)) - 1;
  return b;
}

BitVec& BitVec::operator|=(BitView o) {
  check_width(n_, o.size());
  for (std::size_t w = 0; w < w_.size(); ++w) w_[w] |= o.data()[w];
  return *this;
}

BitVec& BitVec::operator&=(BitView o) {
  check_width(n_, o.size());
  for (std::size_t w = 0; w < w_.size(); ++w) w_[w] &= o.data()[w];
  return *this;
}

BitVec& BitVec::operator^=(BitView o) {
  check_width(n_, o.size());
  for (std::size_t w = 0; w < w_.size(); ++w) w_[w] ^= o.data()[w];
  return *this;
}

BitVec& BitVec::subtract(BitView o) {
  check_width(n_, o.size());
  for (std::size_t w = 0; w < w_.size(); ++w) w_[w] &= ~o.data()[w];
  return *this;
}

bool equal(BitView a, BitView b) {
  if (a.size() != b.size()) return false;
  for (std::size_t w = 0; w < a.words(); ++w)
    if (a.data()[w] != b.data()[w]) return false;
  return true;
}

bool key_less(BitView a, BitView b) {
  check_width(a.size(), b.size());
  for (std::size_t w = a.words(); w-- > 0;)
    if (a.data()[w] != b.data()[w]) return a.data()[w] < b.data()[w];
  return false;
}

bool is_subset(BitView a, BitView b) {
  check_width(a.size(), b.size());
  for (std::size_t w = 0; w < a.words(); ++w)
    if (a.data()[w] & ~b.data()[w]) return false;
  return true;
}

bool intersects(BitView a, BitView b) {
  check_width(a.size(), b.size());
  for (std::size_t w = 0; w < a.words(); ++w)
    if (a.data()[w] & b.data()[w]) return true;
  return false;
}

std::uint64_t hash_bits(BitView v) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ v.size();
  for (std::size_t w = 0; w < v.words(); ++w) {
    h ^= v.data()[w];
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

std::size_t sym_diff_size(BitView a, BitView b) {
  check_width(a.size(), b.size());
  return kernels::active().xor_popcount(a.data(), b.data(), a.words());
}

std::size_t sym_diff_bounded(BitView a, BitView b, std::size_t limit) {
  check_width(a.size(), b.size());
  return kernels::active().xor_popcount_bounded(a.data(), b.data(), a.words(), limit);
}

std::size_t intersection_size(BitView a, BitView b) {
  check_width(a.size(), b.size());
  return kernels::active().and_popcount(a.data(), b.data(), a.words());
}

BitVec bit_and(BitView a, BitView b) { return BitVec(a) &= b; }
BitVec bit_or(BitView a, BitView b) { return BitVec(a) |= b; }
BitVec bit_xor(BitView a, BitView b) { return BitVec(a) ^= b; }
BitVec bit_minus(BitView a, BitView b) { return BitVec(a).subtract(b); }

}  // namespace lowdisc
