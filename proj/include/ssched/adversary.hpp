#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssched/core.hpp"
#include "ssched/offline.hpp"
#include "ssched/policies.hpp"

namespace ssched {

/// Phase layout of the adaptive hard instance family: P phases of P unit
/// jobs, setup time fixed at 1, two fresh types per phase, and a two-step
/// gap between phases.
struct AdversaryConfig {
  int num_phases = 2;       // P; the instance has P*P jobs
  double setup = 1.0;
  double phase_gap = 2.0;
};

struct AdversaryResult {
  Instance instance;
  Schedule policy_schedule;  // the policy's run on the finished instance
};

/// Builds the instance adaptively against the given policy. Phase i releases
/// one job of a fresh type at the phase start and one of a second fresh type
/// one step later; the adversary simulates the policy with the phase's
/// remaining releases withheld, observes which of the two candidates it
/// starts first, and commits the remaining P-2 jobs (released at steps
/// 2..P-1) to that preferred type.
inline AdversaryResult build_adversary_instance(const AdversaryConfig& config, const Policy& policy) {
  const int P = config.num_phases;
  if (P < 2) throw std::invalid_argument("adversary: need at least 2 phases");

  std::vector<Job> committed;
  committed.reserve(static_cast<std::size_t>(P) * static_cast<std::size_t>(P));
  for (int phase = 0; phase < P; ++phase) {
    const double t0 = phase * (P + config.phase_gap);
    const int base_id = phase * P;
    const int type_a = 2 * phase;
    const int type_b = 2 * phase + 1;
    const Job cand_a{base_id, t0, 1.0, type_a};
    const Job cand_b{base_id + 1, t0 + 1.0, 1.0, type_b};

    std::vector<Job> provisional = committed;
    provisional.push_back(cand_a);
    provisional.push_back(cand_b);
    const Instance probe = make_instance(config.setup, 2 * (phase + 1), std::move(provisional));
    const auto fresh = policy.fresh();
    const Schedule probe_schedule = simulate(probe, *fresh);

    double start_a = 0, start_b = 0;
    for (const ScheduleEntry& e : probe_schedule.entries) {
      if (e.kind != EntryKind::Job) continue;
      if (e.job_id == cand_a.id) start_a = e.start;
      if (e.job_id == cand_b.id) start_b = e.start;
    }
    const int preferred = start_a <= start_b ? type_a : type_b;

    committed.push_back(cand_a);
    committed.push_back(cand_b);
    for (int step = 2; step < P; ++step)
      committed.push_back(Job{base_id + step, t0 + step, 1.0, preferred});
  }

  AdversaryResult result;
  result.instance = make_instance(config.setup, 2 * P, std::move(committed));
  const auto fresh = policy.fresh();
  result.policy_schedule = simulate(result.instance, *fresh);
  return result;
}

namespace detail {

struct PhaseShape {
  int lone_id;                // the candidate whose type got no further jobs
  std::vector<int> bulk_ids;  // remaining jobs of the phase in release order
};

// Checks the instance against the phase grid and recovers per-phase roles.
// Throws if the instance was not produced by build_adversary_instance.
inline std::vector<PhaseShape> adversary_shape(const Instance& inst) {
  const int n = static_cast<int>(inst.size());
  const int P = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (P < 2 || P * P != n) throw std::invalid_argument("adversary shape: job count is not a square");
  if (std::abs(inst.setup - 1.0) > kTimeTol) throw std::invalid_argument("adversary shape: setup time is not 1");
  if (inst.num_types != 2 * P) throw std::invalid_argument("adversary shape: expected 2*P types");

  std::vector<PhaseShape> phases;
  for (int phase = 0; phase < P; ++phase) {
    const double t0 = phase * (P + 2.0);
    const int base_id = phase * P;
    const Job& cand_a = inst.job(base_id);
    const Job& cand_b = inst.job(base_id + 1);
    if (std::abs(cand_a.release - t0) > kTimeTol || std::abs(cand_b.release - (t0 + 1.0)) > kTimeTol)
      throw std::invalid_argument("adversary shape: candidate releases off the phase grid");
    if (cand_a.type_id == cand_b.type_id)
      throw std::invalid_argument("adversary shape: phase candidates share a type");
    int bulk_type = -1;
    PhaseShape shape;
    for (int step = 0; step < P; ++step) {
      const Job& j = inst.job(base_id + step);
      if (std::abs(j.size - 1.0) > kTimeTol) throw std::invalid_argument("adversary shape: non-unit job size");
      if (std::abs(j.release - (t0 + step)) > kTimeTol)
        throw std::invalid_argument("adversary shape: release off the phase grid");
      if (step >= 2) {
        if (j.type_id != cand_a.type_id && j.type_id != cand_b.type_id)
          throw std::invalid_argument("adversary shape: phase job of a foreign type");
        if (bulk_type < 0) bulk_type = j.type_id;
        if (j.type_id != bulk_type) throw std::invalid_argument("adversary shape: mixed bulk types");
      }
    }
    if (bulk_type < 0) bulk_type = cand_a.type_id;  // P == 2: treat the first candidate as the bulk
    shape.lone_id = bulk_type == cand_a.type_id ? cand_b.id : cand_a.id;
    shape.bulk_ids.clear();
    for (int step = 0; step < P; ++step) {
      const int id = base_id + step;
      if (id != shape.lone_id) shape.bulk_ids.push_back(id);
    }
    phases.push_back(std::move(shape));
  }
  return phases;
}

}  // namespace detail

/// The explicit clairvoyant witness for adversary instances: per phase, first
/// the job of the type with only one job, then all remaining jobs in release
/// order. Its maximum flow time stays bounded (at most 5) for every P, which
/// certifies the optimum without running a solver.
inline Schedule optimal_phase_schedule(const Instance& inst) {
  const auto phases = detail::adversary_shape(inst);
  std::vector<int> order;
  order.reserve(inst.size());
  for (const auto& phase : phases) {
    order.push_back(phase.lone_id);
    for (int id : phase.bulk_ids) order.push_back(id);
  }
  Schedule sched = schedule_in_order(inst, order);
  const auto violations = validate_schedule(inst, sched);
  if (!violations.empty())
    throw std::logic_error("optimal_phase_schedule: infeasible witness: " + violations.front());
  return sched;
}

}  // namespace ssched
