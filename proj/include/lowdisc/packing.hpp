#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lowdisc/fit.hpp"
#include "lowdisc/set_system.hpp"

namespace lowdisc {

enum class PackOrder { input, by_size, seeded_shuffle };

std::optional<PackOrder> parse_pack_order(std::string_view s);
std::string_view pack_order_name(PackOrder o);

// Members are ids into the parent system, in admission order. Pairwise
// distances strictly exceed delta.
struct Packing {
  std::uint64_t delta = 0;
  std::optional<std::uint64_t> size_cap;
  std::vector<std::uint32_t> members;
  PackOrder order = PackOrder::input;
  std::uint64_t seed = 0;
  std::uint64_t parent_hash = 0;
  bool maximal = false;
};

// Pivot-based filter for "is some stored set within distance r of q".
// Distances to a few fixed pivot sets bound the true distance from below
// (triangle inequality), and the first two pivot coordinates bucket the
// stored sets into a grid of cell width r + 1, so a query only inspects the
// 3 x 3 block of cells around it.
class MetricIndex {
 public:
  MetricIndex(const SetSystem& sys, std::uint64_t radius);

  void insert(std::uint32_t id);
  void clear();
  // Drops every stored set and switches to a new radius; pivots are kept.
  void reset(std::uint64_t radius);
  std::size_t size() const { return stored_; }

  // True if a stored set other than `skip` lies within the radius of sys[q].
  bool any_within(std::uint32_t q, std::optional<std::uint32_t> skip = std::nullopt) const;
  // Closest stored set within the radius (ties toward the smaller id).
  std::optional<std::pair<std::uint32_t, std::uint64_t>> nearest_within(std::uint32_t q) const;

 private:
  template <typename F>
  void for_candidates(std::uint32_t q, F f) const;
  std::uint64_t cell_key(std::int64_t a, std::int64_t b) const;

  const SetSystem* sys_;
  std::uint64_t radius_;
  std::size_t pivots_ = 0;
  std::vector<std::uint32_t> coords_;  // m x pivots_
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
  std::size_t stored_ = 0;
};

// Scan order for greedy packing over sys.
std::vector<std::uint32_t> scan_order(const SetSystem& sys, PackOrder order, std::uint64_t seed);

Packing greedy_packing(const SetSystem& sys, std::uint64_t delta, PackOrder order = PackOrder::input,
                       std::uint64_t seed = 0);
// Only sets with at most size_cap elements are eligible.
Packing greedy_packing_capped(const SetSystem& sys, std::uint64_t delta, std::uint64_t size_cap,
                              PackOrder order = PackOrder::input, std::uint64_t seed = 0);
// Greedy over an explicit scan sequence of eligible ids.
Packing greedy_packing_scan(const SetSystem& sys, std::uint64_t delta, const std::vector<std::uint32_t>& scan);

bool verify_separated(const Packing& p, const SetSystem& sys);
bool verify_maximal(const Packing& p, const SetSystem& sys);

struct PackingBoundRow {
  std::uint64_t delta;
  std::size_t size;
  double ratio;  // |P| / (n / delta)^d
};

struct PackingBoundReport {
  std::vector<PackingBoundRow> rows;
  LinearFit fit;  // log2 |P| against log2 (n / delta)
};

PackingBoundReport packing_bound_report(const SetSystem& sys, const std::vector<std::uint64_t>& deltas, int d,
                                        PackOrder order = PackOrder::input, std::uint64_t seed = 0);

// {n/2, n/4, ..., min_delta}
std::vector<std::uint64_t> halving_deltas(std::uint64_t n, std::uint64_t min_delta);

}  // namespace lowdisc
