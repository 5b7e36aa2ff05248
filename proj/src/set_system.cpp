#include "lowdisc/set_system.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "lowdisc/errors.hpp"
#include "lowdisc/kernels.hpp"
#include "lowdisc/rng.hpp"

namespace lowdisc {
namespace {

// Hash set of rows stored in a flat word array, keyed by row index.
class RowSet {
 public:
  RowSet(const std::vector<std::uint64_t>& data, std::size_t words)
      : data_(data), words_(words), set_(16, Hash{this}, Eq{this}) {}

  // Inserts row r; returns false if an equal row is already present.
  bool insert(std::size_t r) { return set_.insert(r).second; }
  void erase_last(std::size_t r) { set_.erase(r); }

  std::optional<std::size_t> lookup_existing(std::size_t probe_row) const {
    auto it = set_.find(probe_row);
    if (it == set_.end()) return std::nullopt;
    return *it;
  }

 private:
  struct Hash {
    const RowSet* self;
    std::size_t operator()(std::size_t r) const {
      return hash_bits({self->data_.data() + r * self->words_, self->words_ * 64});
    }
  };
  struct Eq {
    const RowSet* self;
    bool operator()(std::size_t a, std::size_t b) const {
      const auto* p = self->data_.data();
      return std::equal(p + a * self->words_, p + (a + 1) * self->words_, p + b * self->words_);
    }
  };

  const std::vector<std::uint64_t>& data_;
  std::size_t words_;
  std::unordered_set<std::size_t, Hash, Eq> set_;
};

// Restrictions of every set to y, deduplicated. Returns the distinct rows
// (width |y|) and, per kept row, the id of its first witness.
struct Projection {
  std::size_t width = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> data;
  std::vector<std::uint32_t> witness;
};

Projection project_rows(const SetSystem& sys, BitView y, std::size_t max_size) {
  if (y.size() != sys.n()) throw StructuralError("projection mask width differs from ground set");
  Projection p;
  p.width = y.count();
  p.words = std::max<std::size_t>(1, words_for(p.width));
  const auto& k = kernels::active();
  // One scratch row at the end of data is reused until it turns out new.
  p.data.assign(p.words, 0);
  RowSet seen(p.data, p.words);
  for (std::size_t s = 0; s < sys.size(); ++s) {
    const std::size_t row = p.witness.size();
    std::uint64_t* dst = p.data.data() + row * p.words;
    std::fill(dst, dst + p.words, 0);
    k.extract_bits(sys.set(s).data(), y.data(), y.words(), dst);
    if (max_size < p.width && k.popcount(dst, p.words) > max_size) continue;
    if (seen.insert(row)) {
      p.witness.push_back(static_cast<std::uint32_t>(s));
      // Growing data may move it; RowSet holds a reference to the vector,
      // so stored indices stay valid.
      p.data.resize(p.data.size() + p.words, 0);
    }
  }
  p.data.resize(p.witness.size() * p.words);
  return p;
}

}  // namespace

std::size_t SetSystem::add(BitView s, std::string label) {
  if (s.size() != n_)
    throw StructuralError("set width " + std::to_string(s.size()) + " differs from ground size " + std::to_string(n_));
  data_.insert(data_.end(), s.data(), s.data() + words_);
  sizes_.push_back(static_cast<std::uint32_t>(s.count()));
  if (!label.empty()) has_labels_ = true;
  labels_.push_back(std::move(label));
  return sizes_.size() - 1;
}

std::size_t SetSystem::add_indices(const std::vector<std::uint32_t>& idx, std::string label) {
  return add(BitVec::from_indices(n_, idx), std::move(label));
}

void SetSystem::reserve(std::size_t m) {
  data_.reserve(m * words_);
  sizes_.reserve(m);
  labels_.reserve(m);
}

std::vector<std::uint32_t> SetSystem::distinct_ids() const {
  std::vector<std::uint32_t> keep;
  if (words_ == 0) {
    if (!empty()) keep.push_back(0);
    return keep;
  }
  RowSet seen(data_, words_);
  for (std::size_t i = 0; i < size(); ++i)
    if (seen.insert(i)) keep.push_back(static_cast<std::uint32_t>(i));
  return keep;
}

SetSystem SetSystem::dedup() const {
  SetSystem out(n_);
  const auto keep = distinct_ids();
  out.reserve(keep.size());
  for (auto i : keep) out.add(set(i), labels_[i]);
  return out;
}

std::optional<std::size_t> SetSystem::find(BitView s) const {
  if (s.size() != n_) throw StructuralError("set width differs from ground size");
  for (std::size_t i = 0; i < size(); ++i)
    if (equal(set(i), s)) return i;
  return std::nullopt;
}

bool operator==(const SetSystem& a, const SetSystem& b) {
  return a.n_ == b.n_ && a.data_ == b.data_ && a.labels_ == b.labels_;
}

std::uint64_t content_hash(const SetSystem& sys) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ sys.n();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    h ^= hash_bits(sys.set(i));
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::pair<std::size_t, bool> DistinctCollector::add(BitView s, std::string label) {
  const std::uint64_t h = hash_bits(s);
  auto [lo, hi] = index_.equal_range(h);
  for (auto it = lo; it != hi; ++it)
    if (equal(sys_.set(it->second), s)) return {it->second, false};
  const std::size_t id = sys_.add(s, std::move(label));
  index_.emplace(h, static_cast<std::uint32_t>(id));
  return {id, true};
}

Rational reduced(Rational r) {
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

Coloring::Coloring(std::size_t n) : values_(n, 0), plus_(n), minus_(n) {}

Coloring::Coloring(std::vector<std::int8_t> values) : Coloring(values.size()) {
  for (std::size_t i = 0; i < values.size(); ++i) set(i, values[i]);
}

void Coloring::set(std::size_t i, std::int8_t v) {
  if (v < -1 || v > 1) throw DomainError("coloring value must be -1, 0 or +1");
  values_[i] = v;
  plus_.assign(i, v > 0);
  minus_.assign(i, v < 0);
}

Coloring Coloring::flipped() const {
  Coloring c(size());
  for (std::size_t i = 0; i < size(); ++i) c.set(i, static_cast<std::int8_t>(-values_[i]));
  return c;
}

Rational measure(BitView s, BitView restriction) {
  const std::size_t den = restriction.count();
  if (den == 0) throw DomainError("measure over an empty restriction");
  return {static_cast<std::int64_t>(intersection_size(s, restriction)), static_cast<std::int64_t>(den)};
}

SetSystem project(const SetSystem& sys, BitView y) {
  const Projection p = project_rows(sys, y, SIZE_MAX);
  SetSystem out(p.width);
  out.reserve(p.witness.size());
  for (std::size_t r = 0; r < p.witness.size(); ++r) {
    const std::size_t w = p.witness[r];
    std::string label = sys.label(w).empty() ? "#" + std::to_string(w) : sys.label(w);
    out.add(BitView(p.data.data() + r * p.words, p.width), std::move(label));
  }
  return out;
}

std::size_t shatter_profile(const SetSystem& sys, std::size_t m, std::size_t trials, std::uint64_t seed) {
  if (m < 1 || m > sys.n()) throw DomainError("shatter_profile: m must lie in [1, n]");
  if (trials < 1) throw DomainError("shatter_profile: trials must be positive");
  Rng rng(seed);
  std::vector<std::uint32_t> ids(sys.n());
  std::iota(ids.begin(), ids.end(), 0u);
  std::size_t best = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    // Partial Fisher-Yates: the first m entries become the sample.
    for (std::size_t i = 0; i < m; ++i) std::swap(ids[i], ids[i + uniform_index(rng, sys.n() - i)]);
    const BitVec y = BitVec::from_indices(sys.n(), std::span(ids.data(), m));
    best = std::max(best, project_rows(sys, y, SIZE_MAX).witness.size());
  }
  return best;
}

std::size_t size_sensitive_count(const SetSystem& sys, BitView y, std::size_t k) {
  return project_rows(sys, y, k).witness.size();
}

std::int64_t signed_sum(const Coloring& chi, BitView s) {
  if (chi.size() != s.size()) throw StructuralError("coloring width differs from set width");
  return static_cast<std::int64_t>(intersection_size(chi.plus(), s)) -
         static_cast<std::int64_t>(intersection_size(chi.minus(), s));
}

std::uint64_t chi_of_set(const Coloring& chi, BitView s) {
  const std::int64_t v = signed_sum(chi, s);
  return static_cast<std::uint64_t>(v < 0 ? -v : v);
}

DiscrepancyResult discrepancy(const SetSystem& sys, const Coloring& chi) {
  DiscrepancyResult r;
  r.per_set.resize(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    r.per_set[i] = chi_of_set(chi, sys.set(i));
    if (r.per_set[i] > r.max) {
      r.max = r.per_set[i];
      r.argmax = i;
    }
  }
  return r;
}

}  // namespace lowdisc
