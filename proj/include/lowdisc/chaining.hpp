#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lowdisc/packing.hpp"
#include "lowdisc/set_system.hpp"

namespace lowdisc {

// Deduplicated system with the empty set guaranteed present.
struct WorkingSystem {
  SetSystem sys;
  // Id in the caller's system of each working set; kInjected for the empty
  // set when it had to be added.
  std::vector<std::uint32_t> source;
  std::uint32_t empty_id = 0;
  bool empty_injected = false;
  // Working id of every caller set (duplicates map to the same id).
  std::vector<std::uint32_t> working_of;

  static constexpr std::uint32_t kInjected = UINT32_MAX;
};

WorkingSystem prepare_working(const SetSystem& sys);

// Smallest power of two >= max(2, n).
std::size_t padded_size(std::size_t n);

struct HierarchyLevel {
  std::uint64_t delta = 0;
  std::vector<std::uint32_t> members;
  // For levels j >= 1, per member: nearest member of level j-1 and distance.
  std::vector<std::uint32_t> link;
  std::vector<std::uint32_t> link_dist;
  // Position of each set id in `members`, or -1.
  std::vector<std::int32_t> pos;

  bool contains(std::uint32_t id) const { return pos[id] >= 0; }
};

// Levels F_0 .. F_k over a working system. Level j < k is a maximal
// (n_pad / 2^j)-packing; level k holds every eligible set; F_0 = {empty}.
struct PackingHierarchy {
  std::size_t n_pad = 0;
  int k = 0;
  std::optional<std::uint64_t> size_cap;
  std::vector<HierarchyLevel> levels;

  // Nearest neighbour in level j-1 of the level-j member `id`.
  std::uint32_t parent(int j, std::uint32_t id) const;
};

struct HierarchyOptions {
  PackOrder order = PackOrder::input;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> size_cap;
};

PackingHierarchy build_hierarchy(const WorkingSystem& work, std::size_t n_pad, const HierarchyOptions& opt = {});

// i with n/2^i <= |S| < n/2^(i-1); |S| = 0 goes to class k.
int size_class(std::size_t set_size, std::size_t n_pad);

struct SizeClasses {
  int k = 0;
  std::vector<int> class_of;                         // per working set id
  std::vector<std::vector<std::uint32_t>> classes;   // 0..k
};

SizeClasses classify(const SetSystem& sys, std::size_t n_pad);

// The class whose layers a set of class i is decomposed in: class 0 (the
// full ground set) uses class 1 with the empty anchor.
inline int layer_class(int i) { return i < 1 ? 1 : i; }

struct CanonicalDecomposition {
  std::uint32_t set_id = 0;
  int i = 0;  // layer class
  // chain[0] = S = F_k, ..., chain.back() = F_{i-1} (anchor).
  std::vector<std::uint32_t> chain;
  BitVec anchor;
  // Index t corresponds to level j = i + t.
  std::vector<BitVec> added;    // A_j = F_j \ F_{j-1}
  std::vector<BitVec> removed;  // B_j = F_{j-1} \ F_j
};

enum class HierarchyMode { shared, capped };

struct ChainingOptions {
  HierarchyMode mode = HierarchyMode::shared;
  PackOrder order = PackOrder::input;
  std::uint64_t seed = 0;
  double K = 4.0;
};

// The full chaining structure of a system: hierarchy (shared or one per
// class), size classes and layer families F_j^i.
struct Chaining {
  WorkingSystem work;
  std::size_t n_pad = 0;
  int k = 0;
  ChainingOptions options;
  SizeClasses classes;
  // shared: one entry; capped: index = layer class (entries without sets
  // stay empty).
  std::vector<PackingHierarchy> hierarchies;
  // layers[i][j]: sorted distinct ids of F_j^i for j = i-1..k.
  std::vector<std::vector<std::vector<std::uint32_t>>> layers;

  const PackingHierarchy& hierarchy_for(int i) const {
    return options.mode == HierarchyMode::shared ? hierarchies.front() : hierarchies[i];
  }
  std::uint64_t cap_for(int i) const;
};

Chaining build_chaining(const SetSystem& sys, const ChainingOptions& opt = {}, std::size_t n_pad = 0);

CanonicalDecomposition decompose(const Chaining& ch, std::uint32_t set_id);
BitVec reconstruct(const CanonicalDecomposition& dec);

struct ChainingCheck {
  std::size_t sets_checked = 0;
  std::size_t reconstruction_failures = 0;
  std::size_t claim_violations = 0;       // |S △ F_j^i| >= n/2^(j-1)
  std::size_t summed_bound_violations = 0;
  std::size_t corollary_violations = 0;   // |F_j^i| > K n / 2^(i-1)
  std::size_t link_violations = 0;        // link distance > n/2^(j-1)
  std::size_t canonical_size_violations = 0;
  double max_size_ratio = 0;              // max |F_j^i| / (n / 2^(i-1))
};

// Exhaustive invariant sweep over every set and level.
ChainingCheck check_chaining(const Chaining& ch);

// Sum over classes and levels of |F_j^i| divided by the number of distinct
// (level, member) pairs used.
double duplication_factor(const Chaining& ch);

std::string chaining_summary_json(const Chaining& ch);

}  // namespace lowdisc
