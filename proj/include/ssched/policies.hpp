#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ssched/core.hpp"

namespace ssched {

/// What a non-clairvoyant policy gets to see at a decision point: the clock,
/// the type the machine is configured for (absent before the first setup) and
/// the released-but-unstarted jobs. Sizes are hidden by construction.
struct PendingJob {
  int job_id;
  double release;
  int type_id;
};

struct MachineView {
  double now = 0;
  std::optional<int> active_type;
  std::vector<PendingJob> pending;  // sorted by (release, job_id)
};

/// Decision rule plus a completion callback for internal state updates.
/// Implementations may only look at job metadata in the view, never at sizes.
class Policy {
 public:
  virtual ~Policy() = default;

  // Called only with a non-empty pending set; must return one of its ids.
  virtual std::optional<int> choose(const MachineView& view) = 0;

  virtual void on_complete(int /*job_id*/, double /*flow_time*/) {}

  // Balance-style policies expose their current parameter so the simulator
  // can record a lambda trace; others return nullopt.
  virtual std::optional<double> current_lambda() const { return std::nullopt; }

  // A new policy instance with the same rule and initial state.
  virtual std::unique_ptr<Policy> fresh() const = 0;
};

namespace detail {

// Smallest adjusted release time, ties broken by preferring the active type,
// then the smaller release, then the smaller id. Adjusted releases within
// kTimeTol of the minimum count as tied.
inline int pick_by_adjusted_release(const MachineView& view, double lambda) {
  double min_rbar = std::numeric_limits<double>::infinity();
  for (const PendingJob& p : view.pending) {
    const bool same = view.active_type && *view.active_type == p.type_id;
    const double rbar = same ? p.release : p.release + lambda;
    if (rbar < min_rbar) min_rbar = rbar;
  }
  int best = -1;
  bool best_active = false;
  double best_release = 0;
  for (const PendingJob& p : view.pending) {
    const bool same = view.active_type && *view.active_type == p.type_id;
    const double rbar = same ? p.release : p.release + lambda;
    if (!(rbar <= min_rbar + kTimeTol)) continue;
    bool better;
    if (best < 0) {
      better = true;
    } else if (same != best_active) {
      better = same;
    } else if (p.release != best_release) {
      better = p.release < best_release;
    } else {
      better = p.job_id < best;
    }
    if (better) {
      best = p.job_id;
      best_active = same;
      best_release = p.release;
    }
  }
  return best;
}

}  // namespace detail

/// First-in-first-out: smallest (release, id). The no-setup baseline.
class FifoPolicy final : public Policy {
 public:
  std::optional<int> choose(const MachineView& view) override {
    int best = -1;
    double best_release = 0;
    for (const PendingJob& p : view.pending) {
      if (best < 0 || p.release < best_release || (p.release == best_release && p.job_id < best)) {
        best = p.job_id;
        best_release = p.release;
      }
    }
    return best;
  }
  std::unique_ptr<Policy> fresh() const override { return std::make_unique<FifoPolicy>(); }
};

/// The balance policy: trade off early releases against the type the machine
/// is configured for.
///
///   (1) lambda = alpha
///   (2) when the machine idles at t, run the available job with the
///       smallest adjusted release  (r_j if its type is active, r_j + lambda
///       otherwise), ties prefer the active type
///   (3) when a job completes with flow >= alpha * lambda, grow lambda
///
/// The growth step is applied repeatedly until flow < alpha * lambda, so
/// lambda lands on the smallest power of alpha whose next level exceeds the
/// observed flow; set saturate=false for the literal single multiplication.
class BalancePolicy final : public Policy {
 public:
  explicit BalancePolicy(double alpha = 13.0, bool saturate = true) : alpha_(alpha), lambda_(alpha), saturate_(saturate) {
    if (!(alpha > 1)) throw std::invalid_argument("balance policy: alpha must be > 1");
  }

  std::optional<int> choose(const MachineView& view) override {
    return detail::pick_by_adjusted_release(view, lambda_);
  }

  void on_complete(int, double flow_time) override {
    if (saturate_) {
      while (flow_time >= alpha_ * lambda_ - kTimeTol) lambda_ *= alpha_;
    } else if (flow_time >= alpha_ * lambda_ - kTimeTol) {
      lambda_ *= alpha_;
    }
  }

  std::optional<double> current_lambda() const override { return lambda_; }
  std::unique_ptr<Policy> fresh() const override { return std::make_unique<BalancePolicy>(alpha_, saturate_); }

  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double lambda_;
  bool saturate_;
};

/// Balance with a constant parameter. lambda = 0 degenerates to FIFO up to
/// exact release ties; lambda = +infinity exhausts the active type before
/// switching.
class BalanceFixedPolicy final : public Policy {
 public:
  explicit BalanceFixedPolicy(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0)) throw std::invalid_argument("balance-fixed policy: lambda must be >= 0");
  }

  std::optional<int> choose(const MachineView& view) override {
    return detail::pick_by_adjusted_release(view, lambda_);
  }

  std::optional<double> current_lambda() const override { return lambda_; }
  std::unique_ptr<Policy> fresh() const override { return std::make_unique<BalanceFixedPolicy>(lambda_); }

 private:
  double lambda_;
};

inline std::unique_ptr<Policy> balance_policy(double alpha = 13.0, bool saturate = true) {
  return std::make_unique<BalancePolicy>(alpha, saturate);
}
inline std::unique_ptr<Policy> fifo_policy() { return std::make_unique<FifoPolicy>(); }
inline std::unique_ptr<Policy> balance_fixed_policy(double lambda) {
  return std::make_unique<BalanceFixedPolicy>(lambda);
}

/// Runs the policy over the instance. Decisions happen when the machine is
/// idle: at t = 0, at completions, and at arrivals into an idle machine. A
/// chosen job of a non-active type gets a setup immediately before it; the
/// machine never idles while jobs are pending. Gaps are materialized as
/// explicit idle entries.
inline Schedule simulate(const Instance& inst, Policy& policy) {
  Schedule sched;
  const std::size_t n = inst.size();
  if (n == 0) return sched;
  const bool trace_lambda = policy.current_lambda().has_value();
  if (trace_lambda) sched.lambda_trace.assign(n, 0.0);

  std::vector<PendingJob> pending;  // kept sorted by (release, id): arrivals append in that order
  std::size_t next_arrival = 0;     // index into inst.jobs, which is sorted by (release, id)
  double now = inst.jobs.front().release > kTimeTol ? inst.jobs.front().release : 0.0;
  std::optional<int> active_type;
  std::size_t done = 0;

  auto admit_released = [&](double t) {
    while (next_arrival < n && inst.jobs[next_arrival].release <= t + kTimeTol) {
      const Job& j = inst.jobs[next_arrival++];
      pending.push_back(PendingJob{j.id, j.release, j.type_id});
    }
  };
  admit_released(now);

  while (done < n) {
    if (pending.empty()) {
      const double r = inst.jobs[next_arrival].release;
      if (!sched.entries.empty() && r > now + kTimeTol)
        sched.entries.push_back(ScheduleEntry{EntryKind::Idle, now, r, -1});
      now = r;
      admit_released(now);
      continue;
    }

    MachineView view{now, active_type, pending};
    const std::optional<int> choice = policy.choose(view);
    const auto it = choice ? std::find_if(pending.begin(), pending.end(),
                                          [&](const PendingJob& p) { return p.job_id == *choice; })
                           : pending.end();
    if (it == pending.end())
      throw std::logic_error("simulate: policy did not choose a pending job");
    const Job& j = inst.job(*choice);

    if (!active_type || *active_type != j.type_id) {
      sched.entries.push_back(ScheduleEntry{EntryKind::Setup, now, now + inst.setup, -1});
      now += inst.setup;
      active_type = j.type_id;
    }
    if (trace_lambda) sched.lambda_trace[static_cast<std::size_t>(j.id)] = *policy.current_lambda();
    sched.entries.push_back(ScheduleEntry{EntryKind::Job, now, now + j.size, j.id});
    now += j.size;
    pending.erase(it);
    ++done;
    admit_released(now);
    policy.on_complete(j.id, now - j.release);
  }
  return sched;
}

}  // namespace ssched
