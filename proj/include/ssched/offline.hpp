#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ssched/core.hpp"

namespace ssched {

struct OptResult {
  double opt_flow = 0;
  Schedule witness;
};

/// Builds the earliest-start schedule for a fixed processing order: each
/// job's setup (when its type differs from the predecessor's) begins at
/// max(release, machine-free-time) and the job follows directly. Setups never
/// start before the release of the job they precede, which keeps F >= s for
/// the first job of every batch; delaying any start can never reduce a flow
/// time, so this is optimal for the fixed order.
inline Schedule schedule_in_order(const Instance& inst, const std::vector<int>& order) {
  Schedule sched;
  double free_at = 0;
  int last_type = -1;
  bool first = true;
  for (int id : order) {
    const Job& j = inst.job(id);
    const bool needs_setup = last_type != j.type_id;
    double at = std::max(j.release, free_at);  // the schedule begins at the first job's release
    if (!first && at > free_at + kTimeTol)
      sched.entries.push_back(ScheduleEntry{EntryKind::Idle, free_at, at, -1});
    if (needs_setup) {
      sched.entries.push_back(ScheduleEntry{EntryKind::Setup, at, at + inst.setup, -1});
      at += inst.setup;
      last_type = j.type_id;
    }
    sched.entries.push_back(ScheduleEntry{EntryKind::Job, at, at + j.size, j.id});
    free_at = at + j.size;
    first = false;
  }
  return sched;
}

namespace detail {

inline double max_flow_of_order(const Instance& inst, const std::vector<int>& order, double prune_at) {
  double free_at = 0;
  int last_type = -1;
  double worst = 0;
  for (int id : order) {
    const Job& j = inst.job(id);
    double at = std::max(j.release, free_at);
    if (last_type != j.type_id) {
      at += inst.setup;
      last_type = j.type_id;
    }
    free_at = at + j.size;
    const double flow = free_at - j.release;
    if (flow > worst) {
      worst = flow;
      if (worst >= prune_at) return worst;
    }
  }
  return worst;
}

}  // namespace detail

/// Exact optimum by enumerating all processing orders. Guarded to small n;
/// returns the first order (in lexicographic id order) achieving the minimum.
inline OptResult brute_force_opt(const Instance& inst, int max_n = 10) {
  const int n = static_cast<int>(inst.size());
  if (n > max_n)
    throw std::runtime_error("brute_force_opt: n=" + std::to_string(n) + " exceeds the factorial-search guard of " +
                             std::to_string(max_n));
  if (n == 0) return OptResult{0.0, Schedule{}};
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best_order = order;
  double best = std::numeric_limits<double>::infinity();
  do {
    const double f = detail::max_flow_of_order(inst, order, best);
    if (f < best) {
      best = f;
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return OptResult{best, schedule_in_order(inst, best_order)};
}

// ---------------------------------------------------------------------------
// Dynamic program over per-type progress counts (jobs of equal type may be
// assumed in release order: swapping two same-type jobs out of release order
// never increases the maximum flow time). Each state (counts, last type)
// keeps a frontier of mutually non-dominated (completion, max flow) labels.

namespace detail {

struct DpLabel {
  double completion;
  double max_flow;
  int prev_last;   // last type of the predecessor state (-1 for the root)
  int prev_label;  // label index within the predecessor cell
  int job_id;
};

// Insert into the non-dominated set; returns false if the label is dominated
// (ties count as dominated, so duplicates collapse).
inline bool frontier_insert(std::vector<DpLabel>& front, const DpLabel& lab) {
  for (const DpLabel& f : front)
    if (f.completion <= lab.completion && f.max_flow <= lab.max_flow) return false;
  front.erase(std::remove_if(front.begin(), front.end(),
                             [&](const DpLabel& f) {
                               return lab.completion <= f.completion && lab.max_flow <= f.max_flow;
                             }),
              front.end());
  front.push_back(lab);
  return true;
}

}  // namespace detail

/// Exact optimum via the count-vector dynamic program. Must agree with
/// brute_force_opt wherever both run. Refuses when the state space
/// (product over types of (count+1), times k) exceeds the budget.
inline OptResult dp_opt(const Instance& inst, std::uint64_t state_budget = 10'000'000) {
  const int n = static_cast<int>(inst.size());
  const int k = inst.num_types;
  if (n == 0) return OptResult{0.0, Schedule{}};

  // jobs per type, already in (release, id) order because inst.jobs is
  std::vector<std::vector<int>> type_jobs(static_cast<std::size_t>(k));
  for (const Job& j : inst.jobs) type_jobs[static_cast<std::size_t>(j.type_id)].push_back(j.id);

  std::vector<std::uint64_t> stride(static_cast<std::size_t>(k), 1);
  std::uint64_t num_count_states = 1;
  for (int t = 0; t < k; ++t) {
    stride[static_cast<std::size_t>(t)] = num_count_states;
    const std::uint64_t dim = type_jobs[static_cast<std::size_t>(t)].size() + 1;
    if (num_count_states > state_budget / dim + 1)
      throw std::runtime_error("dp_opt: state space exceeds budget of " + std::to_string(state_budget));
    num_count_states *= dim;
  }
  if (num_count_states * static_cast<std::uint64_t>(k) > state_budget)
    throw std::runtime_error("dp_opt: state space exceeds budget of " + std::to_string(state_budget));

  // cells[level][encoded counts][last type] -> label frontier
  using Cell = std::unordered_map<std::uint64_t, std::vector<std::vector<detail::DpLabel>>>;
  std::vector<Cell> levels(static_cast<std::size_t>(n) + 1);
  levels[0][0] = {{detail::DpLabel{0.0, 0.0, -1, -1, -1}}};  // root: single pseudo-cell

  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int level = 0; level < n; ++level) {
    for (auto& [code, by_last] : levels[static_cast<std::size_t>(level)]) {
      std::uint64_t rest = code;
      for (int t = k - 1; t >= 0; --t) {
        counts[static_cast<std::size_t>(t)] = static_cast<int>(rest / stride[static_cast<std::size_t>(t)]);
        rest %= stride[static_cast<std::size_t>(t)];
      }
      for (int t = 0; t < k; ++t) {
        const auto& tj = type_jobs[static_cast<std::size_t>(t)];
        const int c = counts[static_cast<std::size_t>(t)];
        if (c >= static_cast<int>(tj.size())) continue;
        const Job& j = inst.job(tj[static_cast<std::size_t>(c)]);
        const std::uint64_t next_code = code + stride[static_cast<std::size_t>(t)];
        auto& next_cell = levels[static_cast<std::size_t>(level) + 1][next_code];
        if (next_cell.empty()) next_cell.resize(static_cast<std::size_t>(k));
        for (std::size_t last = 0; last < by_last.size(); ++last) {
          const int last_type = (level == 0) ? -1 : static_cast<int>(last);
          for (std::size_t li = 0; li < by_last[last].size(); ++li) {
            const detail::DpLabel& lab = by_last[last][li];
            const bool needs_setup = last_type != t;
            const double start = std::max(j.release, lab.completion) + (needs_setup ? inst.setup : 0.0);
            const double comp = start + j.size;
            const double mf = std::max(lab.max_flow, comp - j.release);
            detail::frontier_insert(next_cell[static_cast<std::size_t>(t)],
                                    detail::DpLabel{comp, mf, last_type, static_cast<int>(li), j.id});
          }
        }
      }
    }
  }

  // pick the best full-state label
  std::uint64_t full_code = 0;
  for (int t = 0; t < k; ++t)
    full_code += stride[static_cast<std::size_t>(t)] * type_jobs[static_cast<std::size_t>(t)].size();
  const auto& final_cell = levels[static_cast<std::size_t>(n)].at(full_code);
  double best = std::numeric_limits<double>::infinity();
  int best_last = -1, best_label = -1;
  for (std::size_t last = 0; last < final_cell.size(); ++last)
    for (std::size_t li = 0; li < final_cell[last].size(); ++li)
      if (final_cell[last][li].max_flow < best) {
        best = final_cell[last][li].max_flow;
        best_last = static_cast<int>(last);
        best_label = static_cast<int>(li);
      }

  // backtrack the processing order
  std::vector<int> order;
  std::uint64_t code = full_code;
  int last = best_last, label = best_label;
  for (int level = n; level > 0; --level) {
    const detail::DpLabel& lab = levels[static_cast<std::size_t>(level)].at(code).at(static_cast<std::size_t>(last))[static_cast<std::size_t>(label)];
    order.push_back(lab.job_id);
    code -= stride[static_cast<std::size_t>(inst.job(lab.job_id).type_id)];
    const int prev_last = lab.prev_last;
    label = lab.prev_label;
    last = (level - 1 == 0) ? 0 : prev_last;
  }
  std::reverse(order.begin(), order.end());
  return OptResult{best, schedule_in_order(inst, order)};
}

// ---------------------------------------------------------------------------

struct LowerBoundParts {
  double setup_term = 0;
  double pmax_term = 0;
  double interval_term = 0;
  double value = 0;
};

/// Certified lower bounds on the optimal flow time: max{s, p_max} plus the
/// interval bound max_I { w(I) + (d(I)-1)s - |I| }, where d(I) counts the
/// distinct types released in I. Jobs of d types all released within I force
/// at least d-1 setups between the first and last of them, so (d-1)s
/// under-estimates the optimal overhead in I. The scan over release-time
/// endpoint pairs is exhaustive: the objective is piecewise linear in the
/// endpoints with breakpoints only at releases.
inline LowerBoundParts lower_bound_parts(const Instance& inst) {
  LowerBoundParts parts;
  if (inst.jobs.empty()) return parts;
  parts.setup_term = inst.setup;
  for (const Job& j : inst.jobs) parts.pmax_term = std::max(parts.pmax_term, j.size);

  // group jobs by distinct release value (jobs are sorted by release)
  std::vector<std::pair<double, std::vector<const Job*>>> groups;
  for (const Job& j : inst.jobs) {
    if (groups.empty() || j.release != groups.back().first) groups.push_back({j.release, {}});
    groups.back().second.push_back(&j);
  }

  parts.interval_term = -std::numeric_limits<double>::infinity();
  std::vector<int> type_seen(static_cast<std::size_t>(inst.num_types), 0);
  for (std::size_t a = 0; a < groups.size(); ++a) {
    std::fill(type_seen.begin(), type_seen.end(), 0);
    double w = 0;
    int distinct = 0;
    for (std::size_t b = a; b < groups.size(); ++b) {
      for (const Job* j : groups[b].second) {
        w += j->size;
        if (type_seen[static_cast<std::size_t>(j->type_id)]++ == 0) ++distinct;
      }
      const double val = w + (distinct - 1) * inst.setup - (groups[b].first - groups[a].first);
      parts.interval_term = std::max(parts.interval_term, val);
    }
  }
  parts.value = std::max({parts.setup_term, parts.pmax_term, parts.interval_term});
  return parts;
}

inline double lower_bound(const Instance& inst) { return lower_bound_parts(inst).value; }

}  // namespace ssched
