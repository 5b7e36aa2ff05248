#include "lowdisc/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lowdisc/errors.hpp"
#include "lowdisc/kernels.hpp"

namespace lowdisc {
namespace {

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

}  // namespace

void ConstraintSystem::add_row(std::span<const std::uint32_t> idx, double delta) {
  for (auto i : idx)
    if (i >= N) throw StructuralError("constraint row index " + std::to_string(i) + " out of range");
  cols.insert(cols.end(), idx.begin(), idx.end());
  row_ptr.push_back(static_cast<std::uint32_t>(cols.size()));
  target.push_back(delta);
}

void ConstraintSystem::add_row(BitView set, double delta) {
  if (set.size() != N) throw StructuralError("constraint row width differs from N");
  const auto idx = set.indices();
  add_row(std::span<const std::uint32_t>(idx), delta);
}

void ConstraintSystem::validate() const {
  if (row_ptr.size() != target.size() + 1 || row_ptr.back() != cols.size())
    throw StructuralError("constraint system: inconsistent row storage");
  for (double t : target)
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("constraint system: targets must be positive and finite");
}

WalkParams WalkParams::resolved(std::size_t N) const {
  WalkParams p = *this;
  const double n = static_cast<double>(std::max<std::size_t>(N, 1));
  if (p.gamma <= 0) p.gamma = 0.1;
  if (p.freeze_tol <= 0) p.freeze_tol = 0.5 / std::pow(n, p.c + 1);
  if (p.max_steps == 0) p.max_steps = static_cast<std::uint64_t>(std::ceil(64.0 * n / (p.gamma * p.gamma)));
  if (p.gamma > 1) throw DomainError("walk: gamma must not exceed 1");
  if (p.freeze_tol > 0.5) throw DomainError("walk: freeze_tol must not exceed 1/2");
  if (!(p.stop_fraction <= 1)) throw DomainError("walk: stop_fraction must not exceed 1");
  return p;
}

std::size_t Walker::target_frozen() const {
  const auto t = static_cast<std::size_t>(std::ceil(p_.stop_fraction * static_cast<double>(cs_.N)));
  return std::min(cs_.N, std::max(required_frozen(), t));
}

Walker::Walker(const ConstraintSystem& cs, const WalkParams& params, std::uint64_t seed, std::span<const double> x0)
    : cs_(cs), p_(params.resolved(cs.N)), rng_(seed) {
  cs.validate();
  const std::size_t N = cs.N;
  x0_.assign(N, 0.0);
  if (!x0.empty()) {
    if (x0.size() != N) throw StructuralError("walk: start point has the wrong dimension");
    for (std::size_t i = 0; i < N; ++i) {
      if (!(std::fabs(x0[i]) <= 1.0)) throw DomainError("walk: start point outside [-1, 1]");
      x0_[i] = x0[i];
    }
  }
  x_ = x0_;
  disp_.assign(N, 0.0);
  u_.assign(N, 0.0);
  g_.assign(N, 0.0);
  frozen_.assign(N, 0);
  tight_cover_.assign(N, 0);
  support_pos_.assign(N, 0);
  for (std::size_t i = 0; i < N; ++i)
    if (std::fabs(x_[i]) >= 1.0 - p_.freeze_tol) {
      x_[i] = sgn(x_[i]);
      disp_[i] = x_[i] - x0_[i];
      frozen_[i] = 1;
      ++frozen_count_;
    }

  col_ptr_.assign(N + 1, 0);
  for (auto c : cs.cols) ++col_ptr_[c + 1];
  for (std::size_t i = 0; i < N; ++i) col_ptr_[i + 1] += col_ptr_[i];
  col_rows_.resize(cs.cols.size());
  {
    std::vector<std::uint32_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (std::size_t r = 0; r < cs.rows(); ++r)
      for (auto c : cs.row(r)) col_rows_[fill[c]++] = static_cast<std::uint32_t>(r);
  }

  tight_.assign(cs.rows(), 0);
  for (std::size_t r = 0; r < cs.rows(); ++r) {
    // A row that cannot move by more than its target never binds.
    double reach = 0;
    for (auto c : cs.row(r)) reach += 1.0 + std::fabs(x0_[c]);
    if (cs.target[r] >= reach) continue;
    active_rows_.push_back(static_cast<std::uint32_t>(r));
  }
  compact_rows();
}

double Walker::row_tol(std::size_t r) const { return cs_.target[r] * p_.row_tol_rel + p_.row_tol_abs; }

double Walker::displacement(std::size_t r) const {
  double s = 0;
  for (auto c : cs_.row(r)) s += x_[c] - x0_[c];
  return s;
}

void Walker::compact_rows() {
  live_ptr_.assign(1, 0);
  live_cols_.clear();
  base_.clear();
  std::vector<std::uint32_t> kept;
  for (auto r : active_rows_) {
    if (tight_[r]) continue;
    double base = 0;
    const std::size_t start = live_cols_.size();
    for (auto c : cs_.row(r)) {
      if (frozen_[c]) base += disp_[c];
      else live_cols_.push_back(c);
    }
    if (live_cols_.size() == start) continue;  // fully frozen: its value is final
    kept.push_back(r);
    base_.push_back(base);
    live_ptr_.push_back(static_cast<std::uint32_t>(live_cols_.size()));
  }
  active_rows_ = std::move(kept);
  frozen_at_compaction_ = frozen_count_;
}

std::vector<double> Walker::restricted_row(std::size_t r) const {
  std::vector<double> v(support_.size(), 0.0);
  for (auto c : cs_.row(r))
    if (!frozen_[c]) v[support_pos_[c]] = 1.0;
  return v;
}

void Walker::project(std::vector<double>& v) const {
  const auto& k = kernels::active();
  const std::size_t S = support_.size();
  if (basis_.empty() || S == 0) return;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis_) {
      const double c = k.dot(q.data(), v.data(), S);
      if (c != 0) k.axpy(-c, q.data(), v.data(), S);
    }
}

void Walker::add_tight(std::size_t r) {
  tight_[r] = 1;
  tight_rows_.push_back(static_cast<std::uint32_t>(r));
  std::size_t free_in_row = 0;
  for (auto c : cs_.row(r)) {
    if (frozen_[c]) continue;
    ++free_in_row;
    if (tight_cover_[c]++ == 0) {
      support_pos_[c] = static_cast<std::uint32_t>(support_.size());
      support_.push_back(c);
      for (auto& q : basis_) q.push_back(0.0);
    }
  }
  if (free_in_row == 0) return;
  std::vector<double> v = restricted_row(r);
  project(v);
  const auto& k = kernels::active();
  const double norm = std::sqrt(k.dot(v.data(), v.data(), v.size()));
  if (norm <= 1e-9 * std::sqrt(static_cast<double>(free_in_row))) return;  // already spanned
  for (auto& e : v) e /= norm;
  basis_.push_back(std::move(v));
}

void Walker::freeze(std::uint32_t i, double sign) {
  x_[i] = sign;
  disp_[i] = sign - x0_[i];
  frozen_[i] = 1;
  ++frozen_count_;
  if (tight_cover_[i] == 0) return;
  // Drop coordinate i from the basis. With w = (q[i])_q, the vectors
  // Q' = Q - e_i w^T have Gram matrix I - w w^T; multiplying by
  // (I - w w^T)^(-1/2) = I + beta w w^T restores orthonormality.
  const std::size_t pos = support_pos_[i];
  const auto& k = kernels::active();
  const std::size_t S = support_.size();
  std::vector<double> w(basis_.size());
  double w2 = 0;
  for (std::size_t q = 0; q < basis_.size(); ++q) {
    w[q] = basis_[q][pos];
    w2 += w[q] * w[q];
    basis_[q][pos] = 0.0;
  }
  bool rebuild = false;
  if (w2 > 1.0 - 1e-8) {
    rebuild = true;
  } else if (w2 > 0) {
    const double beta = (1.0 / std::sqrt(1.0 - w2) - 1.0) / w2;
    std::vector<double> y(S, 0.0);
    for (std::size_t q = 0; q < basis_.size(); ++q)
      if (w[q] != 0) k.axpy(w[q], basis_[q].data(), y.data(), S);
    for (std::size_t q = 0; q < basis_.size(); ++q)
      if (w[q] != 0) k.axpy(beta * w[q], y.data(), basis_[q].data(), S);
    if (++updates_since_reorth_ >= p_.reorth_every) reorthonormalize();
  }
  // Swap-remove the support slot.
  const std::uint32_t last = support_.back();
  support_[pos] = last;
  support_pos_[last] = static_cast<std::uint32_t>(pos);
  support_.pop_back();
  for (auto& q : basis_) {
    q[pos] = q.back();
    q.pop_back();
  }
  if (rebuild) rebuild_basis();
}

void Walker::reorthonormalize() {
  const auto& k = kernels::active();
  std::vector<std::vector<double>> out;
  for (auto& v : basis_) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) {
        const double c = k.dot(q.data(), v.data(), v.size());
        k.axpy(-c, q.data(), v.data(), v.size());
      }
    const double norm = std::sqrt(k.dot(v.data(), v.data(), v.size()));
    if (norm <= 1e-6) continue;
    for (auto& e : v) e /= norm;
    out.push_back(std::move(v));
  }
  basis_ = std::move(out);
  updates_since_reorth_ = 0;
}

void Walker::rebuild_basis() {
  basis_.clear();
  const auto rows = tight_rows_;
  tight_rows_.clear();
  for (auto c : support_) tight_cover_[c] = 0;
  support_.clear();
  for (auto r : rows) {
    tight_[r] = 0;
    add_tight(r);
  }
  updates_since_reorth_ = 0;
}

Walker::Status Walker::step() {
  if (frozen_count_ >= target_frozen()) return Status::done;
  const auto& k = kernels::active();
  const std::size_t N = cs_.N;

  // Gaussian direction on the free coordinates, projected off the tight rows.
  double gnorm2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double g = gauss_(rng_);
    u_[i] = frozen_[i] ? 0.0 : g;
    gnorm2 += u_[i] * u_[i];
  }
  if (!basis_.empty()) {
    std::vector<double> us(support_.size());
    for (std::size_t s = 0; s < support_.size(); ++s) us[s] = u_[support_[s]];
    project(us);
    for (std::size_t s = 0; s < support_.size(); ++s) u_[support_[s]] = us[s];
  }
  const double unorm2 = k.dot(u_.data(), u_.data(), N);
  if (unorm2 <= 1e-20 * std::max(gnorm2, 1.0)) return Status::stuck;

  double tstar = p_.gamma;
  // Row hitting times.
  const std::size_t R = active_rows_.size();
  std::vector<double> a(R), b(R);
  for (std::size_t t = 0; t < R; ++t) {
    const std::uint32_t r = active_rows_[t];
    const std::uint32_t* idx = live_cols_.data() + live_ptr_[t];
    const std::size_t len = live_ptr_[t + 1] - live_ptr_[t];
    a[t] = base_[t] + k.gather_sum(disp_.data(), idx, len);
    b[t] = k.gather_sum(u_.data(), idx, len);
    if (b[t] != 0) {
      const double delta = cs_.target[r];
      const double lim = ((b[t] > 0 ? delta : -delta) - a[t]) / b[t];
      tstar = std::min(tstar, std::max(lim, 0.0));
    }
  }
  // Coordinates inside tight rows stop the step when they reach a face.
  for (auto c : support_) {
    if (u_[c] == 0) continue;
    tstar = std::min(tstar, std::max((sgn(u_[c]) - x_[c]) / u_[c], 0.0));
  }

  // Other coordinates are clamped at their face. The clamp moves them less
  // than the straight step, which can only matter for rows through them;
  // if such a row would overshoot, shorten the step to the first clamp.
  std::vector<std::uint32_t> clamped;
  std::vector<double> correction;
  std::vector<std::uint32_t> touched;
  auto plan = [&](double t) {
    clamped.clear();
    for (std::size_t i = 0; i < N; ++i) {
      if (frozen_[i] || tight_cover_[i] || u_[i] == 0) continue;
      if (std::fabs(x_[i] + t * u_[i]) >= 1.0 - p_.freeze_tol) clamped.push_back(static_cast<std::uint32_t>(i));
    }
  };
  plan(tstar);
  if (!clamped.empty()) {
    // Position of every active row in active_rows_.
    std::vector<std::int32_t> slot(cs_.rows(), -1);
    for (std::size_t t = 0; t < R; ++t) slot[active_rows_[t]] = static_cast<std::int32_t>(t);
    correction.assign(R, 0.0);
    for (auto i : clamped) {
      const double moved = x_[i] + tstar * u_[i];
      for (std::uint32_t e = col_ptr_[i]; e < col_ptr_[i + 1]; ++e) {
        const std::int32_t t = slot[col_rows_[e]];
        if (t >= 0) correction[static_cast<std::size_t>(t)] += sgn(u_[i]) - moved;
      }
    }
    bool overshoot = false;
    for (std::size_t t = 0; t < R && !overshoot; ++t) {
      const std::uint32_t r = active_rows_[t];
      overshoot = std::fabs(a[t] + tstar * b[t] + correction[t]) > cs_.target[r] + row_tol(r);
    }
    if (overshoot) {
      for (std::size_t i = 0; i < N; ++i) {
        if (frozen_[i] || tight_cover_[i] || u_[i] == 0) continue;
        tstar = std::min(tstar, std::max((sgn(u_[i]) - x_[i]) / u_[i], 0.0));
      }
      plan(tstar);
      std::fill(correction.begin(), correction.end(), 0.0);
      for (auto i : clamped) {
        const double moved = x_[i] + tstar * u_[i];
        for (std::uint32_t e = col_ptr_[i]; e < col_ptr_[i + 1]; ++e) {
          const std::int32_t t = slot[col_rows_[e]];
          if (t >= 0) correction[static_cast<std::size_t>(t)] += sgn(u_[i]) - moved;
        }
      }
    }
  }

  // Move.
  k.axpy(tstar, u_.data(), x_.data(), N);
  for (std::size_t i = 0; i < N; ++i)
    if (!frozen_[i]) {
      x_[i] = std::clamp(x_[i], -1.0, 1.0);
      disp_[i] = x_[i] - x0_[i];
    }

  // Rows that reached their target become tight.
  std::vector<std::uint32_t> new_tight;
  for (std::size_t t = 0; t < R; ++t) {
    const std::uint32_t r = active_rows_[t];
    const double now = a[t] + tstar * b[t] + (correction.empty() ? 0.0 : correction[t]);
    if (std::fabs(now) >= cs_.target[r] - row_tol(r)) new_tight.push_back(r);
  }
  // Freeze clamped coordinates and tight-row coordinates at a face.
  for (auto i : clamped)
    if (!frozen_[i]) freeze(i, sgn(u_[i]));
  for (std::size_t s = 0; s < support_.size();) {
    const std::uint32_t c = support_[s];
    if (std::fabs(x_[c]) >= 1.0 - p_.freeze_tol) {
      freeze(c, sgn(x_[c]));  // swap-removes slot s
    } else {
      ++s;
    }
  }
  for (std::size_t i = 0; i < N; ++i)
    if (!frozen_[i] && std::fabs(x_[i]) >= 1.0 - p_.freeze_tol) freeze(static_cast<std::uint32_t>(i), sgn(x_[i]));
  for (auto r : new_tight) add_tight(r);

  ++steps_;
  if (!new_tight.empty() || frozen_count_ - frozen_at_compaction_ >= std::max<std::size_t>(64, N / 8)) {
    compact_rows();
  }
  return frozen_count_ >= target_frozen() ? Status::done : Status::moved;
}

Walker::Status Walker::run() {
  Status s = Status::moved;
  while (steps_ < p_.max_steps) {
    s = step();
    if (s != Status::moved) return s;
  }
  return s;
}

WalkResult lm_partial_coloring(const ConstraintSystem& cs, const WalkParams& params, std::uint64_t seed,
                               std::span<const double> x0) {
  cs.validate();
  const std::size_t N = cs.N;
  const WalkParams p = params.resolved(N);
  // Entropy condition over rows that can bind at all.
  double entropy = 0;
  for (std::size_t r = 0; r < cs.rows(); ++r) {
    double reach = 0;
    for (auto c : cs.row(r)) reach += 1.0 + (x0.empty() ? 0.0 : std::fabs(x0[c]));
    if (cs.target[r] >= reach || cs.row_size(r) == 0) continue;
    entropy += std::exp(-cs.target[r] * cs.target[r] / (16.0 * static_cast<double>(cs.row_size(r))));
  }
  if (entropy > static_cast<double>(N) / 16.0)
    throw PreconditionError("partial coloring: entropy condition fails (" + std::to_string(entropy) + " > " +
                            std::to_string(static_cast<double>(N) / 16.0) + ")");

  const double slack = 1.0 / std::pow(static_cast<double>(std::max<std::size_t>(N, 1)), p.c);
  std::string last_reason;
  for (int attempt = 0; attempt <= p.retry_limit; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, 0x77a1, static_cast<std::uint64_t>(attempt));
    Walker w(cs, p, s, x0);
    w.run();
    WalkResult res;
    res.x = w.x();
    res.frozen = w.frozen_count();
    res.steps = w.steps();
    res.retries = attempt;
    res.seed_used = s;
    res.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < cs.rows(); ++r)
      res.max_violation = std::max(res.max_violation, std::fabs(w.displacement(r)) - cs.target[r]);
    if (cs.rows() == 0) res.max_violation = 0;
    if (res.frozen < w.required_frozen()) {
      last_reason = "stopped with " + std::to_string(res.frozen) + " of " + std::to_string(N) +
                    " coordinates frozen after " + std::to_string(res.steps) + " steps";
      continue;
    }
    if (res.max_violation > slack) {
      last_reason = "row bound exceeded by " + std::to_string(res.max_violation);
      continue;
    }
    res.partial.assign(N, 0);
    for (std::size_t i = 0; i < N; ++i)
      if (w.frozen()[i]) res.partial[i] = static_cast<std::int8_t>(res.x[i] > 0 ? 1 : -1);
    return res;
  }
  throw WalkFailure("partial coloring failed after " + std::to_string(p.retry_limit + 1) + " attempts: " + last_reason);
}

}  // namespace lowdisc
