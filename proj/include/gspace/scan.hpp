#pragma once

// Index-space scan kernels shared by every sampled check. Each kernel has a
// serial reference and an OpenMP version; both report results in scan order
// (smallest index first), so the choice of kernel never changes a report.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gspace {

enum class Exec { Serial, Parallel };

struct ScanPolicy {
  Exec exec = Exec::Parallel;
  std::uint64_t max_tuples = 1'000'000;  // 0 = exhaustive
  std::uint64_t seed = 0;
};

// The visited subsequence of [0, total): everything when total fits the cap,
// otherwise one seeded pick from each of max_tuples equal strata.
class IndexPlan {
 public:
  IndexPlan(std::uint64_t total, const ScanPolicy& policy) : total_(total), seed_(policy.seed) {
    if (policy.max_tuples != 0 && total > policy.max_tuples) {
      stride_ = (total + policy.max_tuples - 1) / policy.max_tuples;
      count_ = (total + stride_ - 1) / stride_;
    } else {
      count_ = total;
    }
  }

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t count() const noexcept { return count_; }
  bool sampled() const noexcept { return stride_ > 1; }

  std::uint64_t at(std::uint64_t k) const noexcept {
    if (stride_ == 1) return k;
    const std::uint64_t base = k * stride_;
    const std::uint64_t width = std::min(stride_, total_ - base);
    return base + mix(seed_ ^ (k * 0x9E3779B97F4A7C15ULL)) % width;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t total_;
  std::uint64_t seed_;
  std::uint64_t stride_ = 1;
  std::uint64_t count_ = 0;
};

namespace detail {

// Keeps the exception raised at the smallest plan position.
class FirstError {
 public:
  void record(std::uint64_t k, std::exception_ptr e) {
#ifdef _OPENMP
#pragma omp critical(gspace_first_error)
#endif
    {
      if (k < k_.load(std::memory_order_relaxed)) {
        k_.store(k, std::memory_order_relaxed);
        error_ = std::move(e);
      }
    }
  }
  std::uint64_t position() const noexcept { return k_.load(std::memory_order_relaxed); }
  void rethrow_if_before(std::uint64_t k) const {
    if (error_ && position() < k) std::rethrow_exception(error_);
  }

 private:
  std::atomic<std::uint64_t> k_{std::numeric_limits<std::uint64_t>::max()};
  std::exception_ptr error_;
};

inline void atomic_min(std::atomic<std::uint64_t>& target, std::uint64_t v) noexcept {
  std::uint64_t cur = target.load(std::memory_order_relaxed);
  while (v < cur && !target.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

}  // namespace detail

struct FirstHit {
  std::optional<std::uint64_t> index;  // position in the full index space
  std::uint64_t examined = 0;          // plan positions up to and including the hit
};

template <class Pred>
FirstHit find_first_serial(const IndexPlan& plan, Pred&& pred) {
  for (std::uint64_t k = 0; k < plan.count(); ++k) {
    const std::uint64_t i = plan.at(k);
    if (pred(i)) return {i, k + 1};
  }
  return {std::nullopt, plan.count()};
}

template <class Pred>
FirstHit find_first_parallel(const IndexPlan& plan, Pred&& pred) {
#ifdef _OPENMP
  const std::uint64_t n = plan.count();
  std::atomic<std::uint64_t> best{n};
  detail::FirstError err;
  const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t sk = 0; sk < sn; ++sk) {
    const auto k = static_cast<std::uint64_t>(sk);
    if (k >= best.load(std::memory_order_relaxed) || k >= err.position()) continue;
    try {
      if (pred(plan.at(k))) detail::atomic_min(best, k);
    } catch (...) {
      err.record(k, std::current_exception());
    }
  }
  const std::uint64_t k = best.load();
  err.rethrow_if_before(k);
  if (k == n) return {std::nullopt, n};
  return {plan.at(k), k + 1};
#else
  return find_first_serial(plan, pred);
#endif
}

template <class Pred>
FirstHit find_first(const IndexPlan& plan, Exec exec, Pred&& pred) {
  return exec == Exec::Parallel ? find_first_parallel(plan, pred) : find_first_serial(plan, pred);
}

struct Extremum {
  bool found = false;
  double value = 0.0;
  std::uint64_t index = 0;
};

// Largest key(i) over keys that are not NaN; earliest index on ties.
template <class Key>
Extremum arg_max_serial(const IndexPlan& plan, Key&& key) {
  Extremum best;
  for (std::uint64_t k = 0; k < plan.count(); ++k) {
    const std::uint64_t i = plan.at(k);
    const double v = key(i);
    if (v != v) continue;
    if (!best.found || v > best.value) best = {true, v, i};
  }
  return best;
}

template <class Key>
Extremum arg_max_parallel(const IndexPlan& plan, Key&& key) {
#ifdef _OPENMP
  Extremum best;
  detail::FirstError err;
  const auto sn = static_cast<std::int64_t>(plan.count());
#pragma omp parallel
  {
    Extremum local;
#pragma omp for schedule(static) nowait
    for (std::int64_t sk = 0; sk < sn; ++sk) {
      const std::uint64_t i = plan.at(static_cast<std::uint64_t>(sk));
      try {
        const double v = key(i);
        if (v != v) continue;
        if (!local.found || v > local.value) local = {true, v, i};
      } catch (...) {
        err.record(static_cast<std::uint64_t>(sk), std::current_exception());
      }
    }
#pragma omp critical(gspace_arg_max)
    {
      if (local.found &&
          (!best.found || local.value > best.value || (local.value == best.value && local.index < best.index)))
        best = local;
    }
  }
  err.rethrow_if_before(std::numeric_limits<std::uint64_t>::max());
  return best;
#else
  return arg_max_serial(plan, key);
#endif
}

template <class Key>
Extremum arg_max(const IndexPlan& plan, Exec exec, Key&& key) {
  return exec == Exec::Parallel ? arg_max_parallel(plan, key) : arg_max_serial(plan, key);
}

template <class Key>
Extremum arg_min(const IndexPlan& plan, Exec exec, Key&& key) {
  Extremum e = arg_max(plan, exec, [&](std::uint64_t i) { return -key(i); });
  e.value = -e.value;
  return e;
}

// Every index satisfying pred, ascending.
template <class Pred>
std::vector<std::uint64_t> collect_serial(const IndexPlan& plan, Pred&& pred) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t k = 0; k < plan.count(); ++k) {
    const std::uint64_t i = plan.at(k);
    if (pred(i)) out.push_back(i);
  }
  return out;
}

template <class Pred>
std::vector<std::uint64_t> collect_parallel(const IndexPlan& plan, Pred&& pred) {
#ifdef _OPENMP
  std::vector<std::uint64_t> out;
  detail::FirstError err;
  const auto sn = static_cast<std::int64_t>(plan.count());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t sk = 0; sk < sn; ++sk) {
      const std::uint64_t i = plan.at(static_cast<std::uint64_t>(sk));
      try {
        if (pred(i)) local.push_back(i);
      } catch (...) {
        err.record(static_cast<std::uint64_t>(sk), std::current_exception());
      }
    }
#pragma omp critical(gspace_collect)
    out.insert(out.end(), local.begin(), local.end());
  }
  err.rethrow_if_before(std::numeric_limits<std::uint64_t>::max());
  std::sort(out.begin(), out.end());
  return out;
#else
  return collect_serial(plan, pred);
#endif
}

template <class Pred>
std::vector<std::uint64_t> collect(const IndexPlan& plan, Exec exec, Pred&& pred) {
  return exec == Exec::Parallel ? collect_parallel(plan, pred) : collect_serial(plan, pred);
}

}  // namespace gspace
