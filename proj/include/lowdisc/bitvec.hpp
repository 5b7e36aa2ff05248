#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lowdisc {

inline constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

class BitVec;

// Non-owning view of a packed bit vector. Bits past size() are zero.
class BitView {
 public:
  BitView() = default;
  BitView(const std::uint64_t* data, std::size_t n) : data_(data), n_(n) {}

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_for(n_); }
  const std::uint64_t* data() const { return data_; }
  std::span<const std::uint64_t> span() const { return {data_, words()}; }

  bool test(std::size_t i) const { return (data_[i >> 6] >> (i & 63)) & 1u; }
  std::size_t count() const;
  bool none() const;
  std::vector<std::uint32_t> indices() const;
  BitVec to_vec() const;

 private:
  const std::uint64_t* data_ = nullptr;
  std::size_t n_ = 0;
};

class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t n) : n_(n), w_(words_for(n), 0) {}
  BitVec(BitView v);

  static BitVec from_indices(std::size_t n, std::span<const std::uint32_t> idx);
  static BitVec full(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t words() const { return w_.size(); }
  const std::uint64_t* data() const { return w_.data(); }
  std::uint64_t* data() { return w_.data(); }
  BitView view() const { return {w_.data(), n_}; }
  operator BitView() const { return view(); }

  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }
  std::size_t count() const { return view().count(); }
  bool none() const { return view().none(); }
  std::vector<std::uint32_t> indices() const { return view().indices(); }

  // In-place Boolean operations; widths must agree.
  BitVec& operator|=(BitView o);
  BitVec& operator&=(BitView o);
  BitVec& operator^=(BitView o);
  BitVec& subtract(BitView o);

  friend bool operator==(const BitVec& a, const BitVec& b) { return a.n_ == b.n_ && a.w_ == b.w_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

bool equal(BitView a, BitView b);
// Total order on equal-width vectors: compares words from the last one down.
bool key_less(BitView a, BitView b);
bool is_subset(BitView a, BitView b);
bool intersects(BitView a, BitView b);
std::uint64_t hash_bits(BitView v);

// |a △ b|. Throws StructuralError on width mismatch.
std::size_t sym_diff_size(BitView a, BitView b);
// min(|a △ b|, limit + 1)
std::size_t sym_diff_bounded(BitView a, BitView b, std::size_t limit);
std::size_t intersection_size(BitView a, BitView b);

BitVec bit_and(BitView a, BitView b);
BitVec bit_or(BitView a, BitView b);
BitVec bit_xor(BitView a, BitView b);
BitVec bit_minus(BitView a, BitView b);

}  // namespace lowdisc
