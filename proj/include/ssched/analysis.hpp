#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ssched/core.hpp"

namespace ssched {

// ---------------------------------------------------------------------------
// Setup estimate: a size-oblivious replay that counts how many type changes a
// balance-style order would perform on the jobs released in a window. Only
// releases and types enter the construction, so the count is invariant under
// size perturbations.

namespace detail {

struct SeqJob {
  double release;
  int type_id;
  int id;
};

inline int setup_estimate_sequence(std::vector<SeqJob> jobs, double gamma, bool count_initial) {
  int changes = 0;
  int prev_type = -1;  // none before the first pick
  while (!jobs.empty()) {
    double min_rbar = std::numeric_limits<double>::infinity();
    for (const SeqJob& j : jobs) {
      const double rbar = j.type_id == prev_type ? j.release : j.release + gamma;
      if (rbar < min_rbar) min_rbar = rbar;
    }
    std::size_t best = jobs.size();
    bool best_same = false;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const double rbar = jobs[i].type_id == prev_type ? jobs[i].release : jobs[i].release + gamma;
      if (!(rbar <= min_rbar + kTimeTol)) continue;
      const bool same = jobs[i].type_id == prev_type;
      bool better;
      if (best == jobs.size()) {
        better = true;
      } else if (same != best_same) {
        better = same;
      } else if (jobs[i].release != jobs[best].release) {
        better = jobs[i].release < jobs[best].release;
      } else {
        better = jobs[i].id < jobs[best].id;
      }
      if (better) {
        best = i;
        best_same = same;
      }
    }
    const bool change = jobs[best].type_id != prev_type;
    if (change && (prev_type >= 0 || count_initial)) ++changes;
    prev_type = jobs[best].type_id;
    jobs.erase(jobs.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return changes;
}

}  // namespace detail

/// N_s(I): number of type changes in the replay over jobs released in the
/// closed interval. The first job counts as one change (its predecessor type
/// is "none") unless count_initial is false.
inline int setup_estimate(const Instance& inst, Interval interval, double gamma, bool count_initial = true) {
  if (!(gamma > 0)) throw std::invalid_argument("setup_estimate: gamma must be > 0");
  std::vector<detail::SeqJob> jobs;
  for (const Job& j : inst.jobs)
    if (interval.contains(j.release)) jobs.push_back({j.release, j.type_id, j.id});
  return detail::setup_estimate_sequence(std::move(jobs), gamma, count_initial);
}

// ---------------------------------------------------------------------------
// Partitioning of the release horizon into groups of candidate intervals and
// their dense/sparse classification.

struct PartitionConfig {
  double gamma = 1;
  double epsilon = 0.5;
  double setup = 1;
  std::size_t n = 1;   // instance size entering the log^2 n factor
  double c2 = 1.0;

  // ceil(eps^2 Gamma / (c2 s^2 log^2 n)), natural logarithm, at least 1
  int mu() const {
    const double ln = std::log(static_cast<double>(n));
    if (!(ln > 0)) return 1;
    const double raw = std::ceil(epsilon * epsilon * gamma / (c2 * setup * setup * ln * ln));
    return raw < 1 ? 1 : static_cast<int>(raw);
  }
};

enum class GroupLabel { Dense, Sparse };

inline const char* to_string(GroupLabel l) { return l == GroupLabel::Dense ? "DENSE" : "SPARSE"; }

struct GroupStats {
  double workload = 0;
  int setup_estimate = 0;
  GroupLabel label = GroupLabel::Sparse;
};

struct PartitionReport {
  std::vector<Interval> candidates;  // pairwise disjoint length-gamma windows
  std::vector<Interval> groups;      // tile [r_min, r_max]; left-open except the first
  std::vector<GroupStats> per_group;
};

/// Gamma = alpha^(i-1) for the largest i with alpha^i <= c1 eps^-2
/// alpha^(q+1) s ln^2 n.
inline double select_gamma(double alpha, int q, double epsilon, double setup, std::size_t n, double c1) {
  const double ln = std::log(static_cast<double>(n));
  const double cap = c1 * std::pow(alpha, q + 1) * setup * ln * ln / (epsilon * epsilon);
  if (!(alpha > 1) || !(cap >= alpha)) throw std::invalid_argument("select_gamma: no admissible power");
  int i = 1;
  double power = alpha;  // alpha^i
  while (power * alpha <= cap) {
    power *= alpha;
    ++i;
  }
  return std::pow(alpha, i - 1);
}

/// Candidate detection, greedy selection of the earliest disjoint candidates,
/// grouping into runs of mu candidates, and dense/sparse labels. A candidate
/// is a length-gamma window holding at least gamma/4 released workload of a
/// single type; the sweep over {r_j} and {r_j - gamma} is exhaustive because
/// single-type window workloads change only at those points.
inline PartitionReport partition(const Instance& inst, const PartitionConfig& config) {
  if (inst.jobs.empty()) throw std::invalid_argument("partition: empty instance");
  if (!(config.gamma > 0)) throw std::invalid_argument("partition: gamma must be > 0");
  const double gamma = config.gamma;
  const double r_min = inst.jobs.front().release;
  const double r_max = inst.jobs.back().release;

  std::vector<double> breakpoints;
  breakpoints.reserve(2 * inst.jobs.size());
  for (const Job& j : inst.jobs) {
    breakpoints.push_back(j.release);
    breakpoints.push_back(j.release - gamma);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  std::vector<double> by_type(static_cast<std::size_t>(inst.num_types), 0.0);
  auto qualifies = [&](double lo) {
    std::fill(by_type.begin(), by_type.end(), 0.0);
    const Interval window{lo, lo + gamma};
    double best = 0;
    for (const Job& j : inst.jobs)
      if (window.contains(j.release)) best = std::max(best, by_type[static_cast<std::size_t>(j.type_id)] += j.size);
    return best >= gamma / 4.0 - kTimeTol;
  };

  PartitionReport report;
  double blocked_until = -std::numeric_limits<double>::infinity();
  for (double lo : breakpoints) {
    if (lo <= blocked_until + kTimeTol) continue;  // would overlap the previous candidate
    if (!qualifies(lo)) continue;
    report.candidates.push_back(Interval{lo, lo + gamma});
    blocked_until = lo + gamma;
  }

  const int mu = config.mu();
  std::vector<double> bounds;  // right endpoints of full groups
  for (std::size_t i = static_cast<std::size_t>(mu) - 1; i < report.candidates.size();
       i += static_cast<std::size_t>(mu)) {
    const double b = report.candidates[i].hi;
    if (b >= r_max - kTimeTol) break;
    bounds.push_back(b);
  }
  double prev = r_min;
  for (double b : bounds) {
    report.groups.push_back(Interval{prev, b});
    prev = b;
  }
  report.groups.push_back(Interval{prev, r_max});  // last group extends (or clamps) to r_max

  for (std::size_t g = 0; g < report.groups.size(); ++g) {
    const Interval iv = report.groups[g];
    std::vector<detail::SeqJob> members;
    double w = 0;
    for (const Job& j : inst.jobs) {
      const bool in_left = g == 0 ? j.release >= iv.lo - kTimeTol : j.release > iv.lo + kTimeTol;
      if (in_left && j.release <= iv.hi + kTimeTol) {
        members.push_back({j.release, j.type_id, j.id});
        w += j.size;
      }
    }
    const int ns = detail::setup_estimate_sequence(std::move(members), gamma, true);
    const bool dense = w + ns * config.setup >= iv.length() - kTimeTol;
    report.per_group.push_back(GroupStats{w, ns, dense ? GroupLabel::Dense : GroupLabel::Sparse});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Subschedule extraction for balance runs.

/// The suffix view of the lambda level alpha^q: jobs from the last
/// batch-starting job whose flow is at most (alpha - delta) alpha^q through
/// the last job scheduled at that level, with the batches they form.
struct SubscheduleView {
  int q = 1;
  double delta = 3;
  std::vector<int> jobs;       // ids ordered by start time
  std::vector<Batch> batches;  // batches restricted to the view's jobs
  double release_first = 0;    // release of the first job in the view
  double release_last = 0;     // release of the last job in the view
};

/// Locates S over the level alpha^q and its qualifying suffix. Returns
/// nullopt when no job ran at that level or no suffix start qualifies;
/// refuses schedules without a lambda trace.
inline std::optional<SubscheduleView> extract_subschedule(const Instance& inst, const Schedule& sched, int q,
                                                          double alpha = 13.0, double delta = 3.0) {
  if (!sched.has_lambda_trace())
    throw std::invalid_argument("extract_subschedule: schedule has no lambda trace");
  if (q < 1) throw std::invalid_argument("extract_subschedule: q must be >= 1");

  double level = alpha;  // alpha^q by the same repeated multiplication the policy uses
  for (int i = 1; i < q; ++i) level *= alpha;

  struct Row {
    int id;
    double flow;
    bool starts_batch;
    bool at_level;
  };
  std::vector<Row> rows;
  bool setup_seen = true;  // the first job always starts a batch
  for (const ScheduleEntry& e : sched.entries) {
    if (e.kind == EntryKind::Setup) setup_seen = true;
    if (e.kind != EntryKind::Job) continue;
    const Job& j = inst.job(e.job_id);
    const double lam = sched.lambda_trace[static_cast<std::size_t>(e.job_id)];
    rows.push_back(Row{e.job_id, e.end - j.release, setup_seen, std::abs(lam - level) <= kTimeTol * level});
    setup_seen = false;
  }

  std::ptrdiff_t first = -1, last = -1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows.size()); ++i) {
    if (!rows[static_cast<std::size_t>(i)].at_level) continue;
    if (first < 0) first = i;
    last = i;
  }
  if (first < 0) return std::nullopt;

  const double flow_cap = (alpha - delta) * level;
  std::ptrdiff_t start = -1;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    if (r.starts_batch && r.flow <= flow_cap + kTimeTol) start = i;
  }
  if (start < 0) return std::nullopt;

  SubscheduleView view;
  view.q = q;
  view.delta = delta;
  for (std::ptrdiff_t i = start; i <= last; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    const Job& j = inst.job(r.id);
    view.jobs.push_back(r.id);
    if (r.starts_batch || view.batches.empty()) view.batches.push_back(Batch{j.type_id, {}, 0.0});
    view.batches.back().job_ids.push_back(r.id);
    view.batches.back().workload += j.size;
  }
  view.release_first = inst.job(view.jobs.front()).release;
  view.release_last = inst.job(view.jobs.back()).release;
  return view;
}

}  // namespace ssched
