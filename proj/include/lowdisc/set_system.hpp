#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lowdisc/bitvec.hpp"

namespace lowdisc {

// m member sets over the ground set {0, ..., n-1}, stored row-major in one
// contiguous word array. Duplicates are kept until dedup() is called.
class SetSystem {
 public:
  SetSystem() = default;
  explicit SetSystem(std::size_t n) : n_(n), words_(words_for(n)) {}

  std::size_t n() const { return n_; }
  std::size_t size() const { return sizes_.size(); }
  bool empty() const { return sizes_.empty(); }
  std::size_t words() const { return words_; }

  BitView set(std::size_t i) const { return {data_.data() + i * words_, n_}; }
  BitView operator[](std::size_t i) const { return set(i); }
  std::size_t set_size(std::size_t i) const { return sizes_[i]; }

  std::size_t add(BitView s, std::string label = {});
  std::size_t add_indices(const std::vector<std::uint32_t>& idx, std::string label = {});
  void reserve(std::size_t m);

  bool has_labels() const { return has_labels_; }
  // Empty string for sets added without a label.
  const std::string& label(std::size_t i) const { return labels_[i]; }

  // First occurrence of every distinct set, in input order.
  SetSystem dedup() const;
  // Ids of the first occurrences kept by dedup().
  std::vector<std::uint32_t> distinct_ids() const;
  std::optional<std::size_t> find(BitView s) const;

  friend bool operator==(const SetSystem& a, const SetSystem& b);

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
  std::vector<std::uint32_t> sizes_;
  std::vector<std::string> labels_;
  bool has_labels_ = false;
};

// FNV-style digest of n and every row; labels are ignored.
std::uint64_t content_hash(const SetSystem& sys);

// Accumulates distinct sets into a SetSystem, preserving first-seen order.
class DistinctCollector {
 public:
  explicit DistinctCollector(std::size_t n) : sys_(n) {}
  // Returns the id of the stored copy and whether it was newly added.
  std::pair<std::size_t, bool> add(BitView s, std::string label = {});
  const SetSystem& system() const { return sys_; }
  SetSystem take() { return std::move(sys_); }

 private:
  SetSystem sys_;
  std::unordered_multimap<std::uint64_t, std::uint32_t> index_;
};

// p / q with q > 0, kept unreduced; comparisons are exact.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
  }
  friend auto operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den <=> static_cast<__int128>(b.num) * a.den;
  }
};

Rational reduced(Rational r);

enum class ColoringKind { partial, full };

// Values in {-1, 0, +1}. Keeps +1 and -1 masks for popcount evaluation.
class Coloring {
 public:
  Coloring() = default;
  explicit Coloring(std::size_t n);
  explicit Coloring(std::vector<std::int8_t> values);

  std::size_t size() const { return values_.size(); }
  std::int8_t operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, std::int8_t v);
  const std::vector<std::int8_t>& values() const { return values_; }

  std::size_t colored_count() const { return plus_.count() + minus_.count(); }
  ColoringKind kind() const { return colored_count() == size() ? ColoringKind::full : ColoringKind::partial; }
  BitView plus() const { return plus_; }
  BitView minus() const { return minus_; }
  Coloring flipped() const;

  friend bool operator==(const Coloring& a, const Coloring& b) { return a.values_ == b.values_; }

 private:
  std::vector<std::int8_t> values_;
  BitVec plus_, minus_;
};

// |S ∩ R| / |R|. Throws DomainError when R is empty.
Rational measure(BitView s, BitView restriction);

// Restriction of every set to y, re-indexed to 0..|y|-1, distinct sets only.
// Each output set's label names one witness input set.
SetSystem project(const SetSystem& sys, BitView y);

// Largest number of distinct restrictions over `trials` random m-subsets.
// A lower bound on the primal shatter function at m.
std::size_t shatter_profile(const SetSystem& sys, std::size_t m, std::size_t trials, std::uint64_t seed);

// Distinct restrictions to y having at most k elements.
std::size_t size_sensitive_count(const SetSystem& sys, BitView y, std::size_t k);

std::int64_t signed_sum(const Coloring& chi, BitView s);
std::uint64_t chi_of_set(const Coloring& chi, BitView s);

struct DiscrepancyResult {
  std::uint64_t max = 0;
  std::size_t argmax = 0;
  std::vector<std::uint64_t> per_set;
};

// Ties broken toward the smallest set id; an empty system has value 0.
DiscrepancyResult discrepancy(const SetSystem& sys, const Coloring& chi);

}  // namespace lowdisc
