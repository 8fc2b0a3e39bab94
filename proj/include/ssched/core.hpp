#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssched {

// Absolute tolerance for all time comparisons. Perturbed sizes are
// continuous, so tie-breaking has to go through a fixed tolerance to stay
// deterministic.
inline constexpr double kTimeTol = 1e-9;

struct Job {
  int id = 0;          // 0-based, unique within an instance
  double release = 0;  // r_j >= 0
  double size = 0;     // p_j > 0 (>= 1 before perturbation)
  int type_id = 0;     // in [0, num_types)
};

/// A problem instance: n jobs over k types sharing one setup duration.
/// Jobs are stored sorted by (release, id); use job(id) for id lookups.
struct Instance {
  double setup = 0;
  int num_types = 0;
  std::vector<Job> jobs;
  std::vector<int> id_index;  // job id -> position in jobs

  std::size_t size() const { return jobs.size(); }
  const Job& job(int id) const { return jobs[static_cast<std::size_t>(id_index[static_cast<std::size_t>(id)])]; }
};

/// Validates fields, sorts by (release, id) and builds the id lookup.
/// Throws std::invalid_argument on structural errors.
inline Instance make_instance(double setup, int num_types, std::vector<Job> jobs) {
  if (!(setup > 0)) throw std::invalid_argument("instance: setup must be > 0");
  if (num_types < 1) throw std::invalid_argument("instance: num_types must be >= 1");
  const int n = static_cast<int>(jobs.size());
  std::vector<char> seen(jobs.size(), 0);
  for (const Job& j : jobs) {
    if (j.id < 0 || j.id >= n || seen[static_cast<std::size_t>(j.id)])
      throw std::invalid_argument("instance: job ids must be unique in 0..n-1");
    seen[static_cast<std::size_t>(j.id)] = 1;
    if (!(j.size > 0)) throw std::invalid_argument("instance: job size must be > 0 (id " + std::to_string(j.id) + ")");
    if (!(j.release >= 0)) throw std::invalid_argument("instance: release must be >= 0 (id " + std::to_string(j.id) + ")");
    if (j.type_id < 0 || j.type_id >= num_types)
      throw std::invalid_argument("instance: type_id out of range (id " + std::to_string(j.id) + ")");
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    if (a.release != b.release) return a.release < b.release;
    return a.id < b.id;
  });
  Instance inst;
  inst.setup = setup;
  inst.num_types = num_types;
  inst.jobs = std::move(jobs);
  inst.id_index.assign(inst.jobs.size(), -1);
  for (std::size_t pos = 0; pos < inst.jobs.size(); ++pos)
    inst.id_index[static_cast<std::size_t>(inst.jobs[pos].id)] = static_cast<int>(pos);
  return inst;
}

enum class EntryKind { Setup, Job, Idle };

inline const char* to_string(EntryKind k) {
  switch (k) {
    case EntryKind::Setup: return "SETUP";
    case EntryKind::Job: return "JOB";
    case EntryKind::Idle: return "IDLE";
  }
  return "?";
}

/// One machine activity over [start, end). job_id is set iff kind == Job.
struct ScheduleEntry {
  EntryKind kind = EntryKind::Idle;
  double start = 0;
  double end = 0;
  int job_id = -1;
};

/// A timed, contiguous sequence of setups, executions and explicit idle
/// periods. lambda_trace[id] holds the balance parameter at the job's start
/// for schedules produced by the balance policies; empty otherwise.
struct Schedule {
  std::vector<ScheduleEntry> entries;
  std::vector<double> lambda_trace;

  bool has_lambda_trace() const { return !lambda_trace.empty(); }
};

/// Maximal run of same-type executions with no intermediate setup.
struct Batch {
  int type_id = -1;
  std::vector<int> job_ids;
  double workload = 0;  // sum of member sizes
};

/// Closed interval [lo, hi] on the time axis.
struct Interval {
  double lo = 0;
  double hi = 0;

  static Interval everything() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo - kTimeTol && t <= hi + kTimeTol; }
  bool covers(double a, double b) const { return a >= lo - kTimeTol && b <= hi + kTimeTol; }
};

struct FlowReport {
  std::vector<double> per_job_flow;  // indexed by job id
  double max_flow = 0;
  int argmax_job = -1;
};

/// Checks every schedule invariant and returns one message per violation
/// (empty result means feasible). Violations are data, not errors.
inline std::vector<std::string> validate_schedule(const Instance& inst, const Schedule& sched) {
  std::vector<std::string> out;
  const int n = static_cast<int>(inst.size());
  std::vector<int> times_scheduled(static_cast<std::size_t>(n), 0);
  int last_job_type = -1;       // type of previous Job entry, -1 before the first
  bool setup_since_job = false; // a Setup entry occurred after the previous Job entry

  for (std::size_t i = 0; i < sched.entries.size(); ++i) {
    const ScheduleEntry& e = sched.entries[i];
    const std::string at = "entry " + std::to_string(i) + ": ";
    if (e.end < e.start - kTimeTol) out.push_back(at + "negative duration");
    if (i > 0 && std::abs(e.start - sched.entries[i - 1].end) > kTimeTol)
      out.push_back(at + "not contiguous with previous entry");
    switch (e.kind) {
      case EntryKind::Setup:
        if (std::abs((e.end - e.start) - inst.setup) > kTimeTol)
          out.push_back(at + "setup duration differs from s");
        setup_since_job = true;
        break;
      case EntryKind::Idle:
        break;
      case EntryKind::Job: {
        if (e.job_id < 0 || e.job_id >= n) {
          out.push_back(at + "unknown job id " + std::to_string(e.job_id));
          break;
        }
        const Job& j = inst.job(e.job_id);
        times_scheduled[static_cast<std::size_t>(e.job_id)]++;
        if (e.start < j.release - kTimeTol)
          out.push_back(at + "job " + std::to_string(e.job_id) + " started before release");
        if (std::abs((e.end - e.start) - j.size) > kTimeTol)
          out.push_back(at + "job " + std::to_string(e.job_id) + " duration differs from size");
        const bool needs_setup = (last_job_type < 0) || (last_job_type != j.type_id);
        if (needs_setup && !setup_since_job)
          out.push_back(at + "missing setup before job " + std::to_string(e.job_id));
        if (!needs_setup && setup_since_job)
          out.push_back(at + "redundant setup between same-type jobs");
        last_job_type = j.type_id;
        setup_since_job = false;
        break;
      }
    }
  }
  for (int id = 0; id < n; ++id) {
    const int c = times_scheduled[static_cast<std::size_t>(id)];
    if (c == 0) out.push_back("job " + std::to_string(id) + ": never scheduled");
    if (c > 1) out.push_back("job " + std::to_string(id) + ": scheduled " + std::to_string(c) + " times");
  }
  return out;
}

/// Per-job flow times F_j = c_j - r_j and their maximum.
/// Rejects invalid schedules with the first violation message.
inline FlowReport flow_report(const Instance& inst, const Schedule& sched) {
  auto violations = validate_schedule(inst, sched);
  if (!violations.empty()) throw std::invalid_argument("flow_report: invalid schedule: " + violations.front());
  FlowReport rep;
  rep.per_job_flow.assign(inst.size(), 0.0);
  for (const ScheduleEntry& e : sched.entries) {
    if (e.kind != EntryKind::Job) continue;
    rep.per_job_flow[static_cast<std::size_t>(e.job_id)] = e.end - inst.job(e.job_id).release;
  }
  rep.max_flow = -std::numeric_limits<double>::infinity();
  for (std::size_t id = 0; id < rep.per_job_flow.size(); ++id) {
    if (rep.per_job_flow[id] > rep.max_flow) {
      rep.max_flow = rep.per_job_flow[id];
      rep.argmax_job = static_cast<int>(id);
    }
  }
  if (rep.per_job_flow.empty()) rep.max_flow = 0;
  return rep;
}

/// Splits the execution sequence into batches. Boundaries sit exactly at
/// setup entries; idle periods do not break a batch.
inline std::vector<Batch> batches_of(const Instance& inst, const Schedule& sched) {
  std::vector<Batch> out;
  bool open = false;
  for (const ScheduleEntry& e : sched.entries) {
    if (e.kind == EntryKind::Setup) {
      open = false;
    } else if (e.kind == EntryKind::Job) {
      const Job& j = inst.job(e.job_id);
      if (!open) {
        out.push_back(Batch{j.type_id, {}, 0.0});
        open = true;
      }
      out.back().job_ids.push_back(e.job_id);
      out.back().workload += j.size;
    }
  }
  return out;
}

/// Total setup + idle duration attributed to jobs released in `released_in`
/// whose executions lie inside `interval`. Overhead is attributed to the job
/// entry it directly precedes.
inline double overhead_in(const Instance& inst, const Schedule& sched, Interval interval, Interval released_in) {
  double total = 0;
  double pending_overhead = 0;
  for (const ScheduleEntry& e : sched.entries) {
    if (e.kind == EntryKind::Job) {
      const Job& j = inst.job(e.job_id);
      if (released_in.contains(j.release) && interval.covers(e.start, e.end)) total += pending_overhead;
      pending_overhead = 0;
    } else {
      pending_overhead += e.end - e.start;
    }
  }
  return total;
}

/// w(I): total size of jobs released inside the closed interval.
inline double workload_in(const Instance& inst, Interval interval) {
  double w = 0;
  for (const Job& j : inst.jobs)
    if (interval.contains(j.release)) w += j.size;
  return w;
}

}  // namespace ssched
