#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ssched/core.hpp"
#include "ssched/offline.hpp"
#include "ssched/policies.hpp"

namespace ssched {

enum class PerturbKind { Uniform, TruncNormal };

/// Multiplicative smoothing model: sizes become (1 + X) p with X drawn from
/// U(-eps, eps) or from a normal with sigma = eps / sqrt(2.64) truncated at
/// -1 and 1. Draws are keyed by (seed, trial, job id), so results do not
/// depend on iteration or thread order.
struct PerturbationSpec {
  PerturbKind kind = PerturbKind::Uniform;
  double epsilon = 0.5;
  std::uint64_t seed = 0;

  double sigma() const { return epsilon / std::sqrt(2.64); }
  void check() const {
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("perturbation: epsilon must be in (0,1)");
  }
};

namespace rng {

inline constexpr double kPi = 3.14159265358979323846;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent substream addressed by (seed, trial, unit).
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t trial, std::uint64_t unit) {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    s = state_ ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    state_ = splitmix64(s);
    s = state_ ^ (unit * 0xda942042e4dd58b5ULL + 0x9fb21c651e98df25ULL);
    state_ = splitmix64(s);
  }

  std::uint64_t next_bits() { return splitmix64(state_); }

  // uniform on [0, 1)
  double next_unit() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1]
  double next_unit_open0() { return (static_cast<double>(next_bits() >> 11) + 1.0) * 0x1.0p-53; }

  // standard normal via Box-Muller (the second variate is discarded)
  double next_normal() {
    const double u1 = next_unit_open0();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace rng

/// One relative perturbation X for the substream (seed, trial, unit).
inline double draw_perturbation(const PerturbationSpec& spec, std::uint64_t trial, std::uint64_t unit) {
  rng::Substream rs(spec.seed, trial, unit);
  if (spec.kind == PerturbKind::Uniform) return -spec.epsilon + 2.0 * spec.epsilon * rs.next_unit();
  // rejection from the untruncated normal; acceptance is near 1 for the
  // sigma values reachable with epsilon < 1
  const double sigma = spec.sigma();
  for (;;) {
    const double x = sigma * rs.next_normal();
    if (x > -1.0 && x < 1.0) return x;
  }
}

/// Rescales every size independently; releases and types stay untouched.
inline Instance perturb(const Instance& inst, const PerturbationSpec& spec, std::uint64_t trial = 0) {
  spec.check();
  std::vector<Job> jobs = inst.jobs;
  for (Job& j : jobs) j.size *= 1.0 + draw_perturbation(spec, trial, static_cast<std::uint64_t>(j.id));
  return make_instance(inst.setup, inst.num_types, std::move(jobs));
}

/// Reference variance of the truncated normal perturbation with unit base
/// size: sigma^2 (1 - (2/s) phi(2/s) / (2 Phi(2/s) - 1)). Used by the
/// distribution checks.
inline double truncated_variance_reference(double sigma) {
  const double a = 2.0 / sigma;
  const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * rng::kPi);
  const double big_phi = 0.5 * (1.0 + std::erf(a / std::sqrt(2.0)));
  return sigma * sigma * (1.0 - a * phi / (2.0 * big_phi - 1.0));
}

enum class OptMode { ExactDp, ExactBrute, LowerBoundProxy };

inline const char* to_string(OptMode m) {
  switch (m) {
    case OptMode::ExactDp: return "EXACT_DP";
    case OptMode::ExactBrute: return "EXACT_BRUTE";
    case OptMode::LowerBoundProxy: return "LOWER_BOUND_PROXY";
  }
  return "?";
}

struct SmoothedTrial {
  double alg_flow = 0;
  double opt_or_bound = 0;
  double ratio = 0;
};

/// With LowerBoundProxy the denominator is a certified lower bound on the
/// optimum, so per-trial ratios over-estimate the true competitive ratio.
struct SmoothedRunReport {
  int trials = 0;
  OptMode opt_mode = OptMode::LowerBoundProxy;
  std::vector<SmoothedTrial> per_trial;
  double mean_ratio = 0;
  double median_ratio = 0;
  double std_error = 0;
};

/// Monte-Carlo smoothed competitiveness: the instance is fixed before any
/// perturbation is drawn (oblivious adversary); each trial perturbs with an
/// independent substream, runs the policy, and divides by the chosen
/// denominator. Trials may run on several threads; the report only depends
/// on (instance, spec, trials, policy, opt_mode).
inline SmoothedRunReport smoothed_experiment(const Instance& inst, const PerturbationSpec& spec, int trials,
                                             const Policy& policy, OptMode opt_mode, int num_threads = 1) {
  spec.check();
  if (trials < 1) throw std::invalid_argument("smoothed_experiment: trials must be >= 1");
  if (opt_mode == OptMode::ExactBrute && inst.size() > 10)
    throw std::runtime_error("smoothed_experiment: instance too large for EXACT_BRUTE; use LOWER_BOUND_PROXY");
  if (opt_mode == OptMode::ExactDp) {
    std::vector<std::uint64_t> per_type(static_cast<std::size_t>(inst.num_types), 1);
    for (const Job& j : inst.jobs) per_type[static_cast<std::size_t>(j.type_id)]++;
    std::uint64_t states = static_cast<std::uint64_t>(inst.num_types);
    for (std::uint64_t d : per_type) {
      if (states > 10'000'000ULL / d + 1) states = 20'000'000ULL;
      else states *= d;
    }
    if (states > 10'000'000ULL)
      throw std::runtime_error("smoothed_experiment: instance too large for EXACT_DP; use LOWER_BOUND_PROXY");
  }

  SmoothedRunReport rep;
  rep.trials = trials;
  rep.opt_mode = opt_mode;
  rep.per_trial.assign(static_cast<std::size_t>(trials), SmoothedTrial{});

  auto run_trial = [&](int t) {
    const Instance hat = perturb(inst, spec, static_cast<std::uint64_t>(t));
    const auto pol = policy.fresh();
    const Schedule sched = simulate(hat, *pol);
    const double flow = flow_report(hat, sched).max_flow;
    double denom = 0;
    switch (opt_mode) {
      case OptMode::ExactDp: denom = dp_opt(hat).opt_flow; break;
      case OptMode::ExactBrute: denom = brute_force_opt(hat).opt_flow; break;
      case OptMode::LowerBoundProxy: denom = lower_bound(hat); break;
    }
    rep.per_trial[static_cast<std::size_t>(t)] = SmoothedTrial{flow, denom, flow / denom};
  };

  if (num_threads <= 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < num_threads; ++w)
      pool.emplace_back([&] {
        try {
          for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(trials);
        }
      });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  double sum = 0;
  for (const auto& tr : rep.per_trial) sum += tr.ratio;
  rep.mean_ratio = sum / trials;
  double var = 0;
  for (const auto& tr : rep.per_trial) var += (tr.ratio - rep.mean_ratio) * (tr.ratio - rep.mean_ratio);
  rep.std_error = trials > 1 ? std::sqrt(var / (trials - 1)) / std::sqrt(static_cast<double>(trials)) : 0.0;
  std::vector<double> sorted;
  sorted.reserve(rep.per_trial.size());
  for (const auto& tr : rep.per_trial) sorted.push_back(tr.ratio);
  std::sort(sorted.begin(), sorted.end());
  rep.median_ratio = trials % 2 == 1 ? sorted[static_cast<std::size_t>(trials / 2)]
                                     : 0.5 * (sorted[static_cast<std::size_t>(trials / 2 - 1)] +
                                              sorted[static_cast<std::size_t>(trials / 2)]);
  return rep;
}

/// Empirical frequency of the workload tail events
///   up:   w_hat >= w + (eps/5) sqrt(floor(w)/3)
///   down: w_hat <= w - (eps/5) sqrt(floor(w)/3)
/// over independent perturbations of the whole job set.
inline std::pair<double, double> tail_probability_test(const std::vector<double>& sizes,
                                                       const PerturbationSpec& spec, int samples) {
  spec.check();
  if (samples < 1000) throw std::invalid_argument("tail_probability_test: need at least 1000 samples");
  double w = 0;
  for (double p : sizes) w += p;
  const double threshold = (spec.epsilon / 5.0) * std::sqrt(std::floor(w) / 3.0);
  int up = 0, down = 0;
  for (int sidx = 0; sidx < samples; ++sidx) {
    double w_hat = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j)
      w_hat += sizes[j] * (1.0 + draw_perturbation(spec, static_cast<std::uint64_t>(sidx), j));
    if (w_hat >= w + threshold) ++up;
    if (w_hat <= w - threshold) ++down;
  }
  return {static_cast<double>(up) / samples, static_cast<double>(down) / samples};
}

}  // namespace ssched
