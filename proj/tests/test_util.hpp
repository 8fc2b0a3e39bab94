#pragma once

#include <tuple>
#include <vector>

#include "ssched/core.hpp"

namespace ssched::testutil {

// (release, size, type) rows; ids follow the row order
inline Instance make(double setup, int num_types, const std::vector<std::tuple<double, double, int>>& rows) {
  std::vector<Job> jobs;
  int id = 0;
  for (const auto& [r, p, t] : rows) jobs.push_back(Job{id++, r, p, t});
  return make_instance(setup, num_types, std::move(jobs));
}

// Reference instance used across the suites: s=2, two types,
// job0(r=0,p=1,A) job1(r=0,p=1,B) job2(r=0.5,p=1,A).
inline Instance e1() {
  return make(2.0, 2, {{0.0, 1.0, 0}, {0.0, 1.0, 1}, {0.5, 1.0, 0}});
}

// Independent earliest-start evaluation of a fixed processing order; test-side
// oracle kept separate from the library's schedule builder. A setup begins at
// max(release, machine-free) when the type changes and the job runs right
// after it.
inline double order_max_flow(const Instance& inst, const std::vector<int>& order) {
  double free_at = 0;
  int last_type = -1;
  double worst = 0;
  for (int id : order) {
    const Job& j = inst.job(id);
    double at = j.release > free_at ? j.release : free_at;
    if (last_type != j.type_id) {
      at += inst.setup;
      last_type = j.type_id;
    }
    free_at = at + j.size;
    if (free_at - j.release > worst) worst = free_at - j.release;
  }
  return worst;
}

// Exhaustive-permutation oracle for tiny instances.
inline double enumerate_opt(const Instance& inst) {
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(inst.size()); ++i) order.push_back(i);
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, order_max_flow(inst, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace ssched::testutil
