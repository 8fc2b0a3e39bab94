#include <catch2/catch_amalgamated.hpp>

#include "ssched/core.hpp"
#include "ssched/policies.hpp"
#include "ssched/smoothing.hpp"
#include "test_util.hpp"

using namespace ssched;
using testutil::e1;
using testutil::make;

TEST_CASE("make_instance validates and sorts") {
  Instance inst = make(2.0, 2, {{3.0, 1.0, 0}, {1.0, 2.0, 1}});
  REQUIRE(inst.jobs.front().id == 1);  // sorted by release
  REQUIRE(inst.job(0).release == 3.0);
  REQUIRE(inst.job(1).size == 2.0);

  CHECK_THROWS_AS(make(0.0, 1, {{0, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make(1.0, 1, {{0, 0.0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make(1.0, 1, {{-1.0, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(make(1.0, 1, {{0, 1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(make_instance(1.0, 1, {Job{0, 0, 1, 0}, Job{0, 0, 1, 0}}), std::invalid_argument);
}

TEST_CASE("validate_schedule accepts a well-formed two-job schedule") {
  Instance inst = make(2.0, 2, {{0, 1, 0}, {0, 1, 1}});
  Schedule s;
  s.entries = {
      {EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 0}, {EntryKind::Setup, 3, 5, -1}, {EntryKind::Job, 5, 6, 1}};
  CHECK(validate_schedule(inst, s).empty());
}

TEST_CASE("validate_schedule reports the named violations") {
  Instance inst = make(2.0, 2, {{1.0, 1, 0}, {0, 1, 1}});

  SECTION("job started before release") {
    Schedule bad;
    bad.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 0}};
    Instance late = make(2.0, 1, {{5.0, 1, 0}});
    auto v = validate_schedule(late, bad);
    REQUIRE(v.size() == 1);
    CHECK(v.front().find("before release") != std::string::npos);
  }

  SECTION("missing setup on a type change") {
    Schedule s;
    s.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 1}, {EntryKind::Job, 3, 4, 0}};
    auto v = validate_schedule(inst, s);
    REQUIRE(v.size() == 1);
    CHECK(v.front().find("missing setup") != std::string::npos);
  }

  SECTION("gap without an idle entry") {
    Schedule s;
    s.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2.5, 3.5, 1}};
    auto v = validate_schedule(inst, s);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("contiguous") != std::string::npos);
  }

  SECTION("setup with the wrong duration") {
    Schedule s;
    s.entries = {{EntryKind::Setup, 0, 1, -1}, {EntryKind::Job, 1, 2, 1}};
    auto v = validate_schedule(inst, s);
    CHECK_FALSE(v.empty());
    CHECK(v.front().find("setup duration") != std::string::npos);
  }

  SECTION("redundant setup between same-type jobs") {
    Instance two = make(2.0, 1, {{0, 1, 0}, {0, 1, 0}});
    Schedule s;
    s.entries = {{EntryKind::Setup, 0, 2, -1},
                 {EntryKind::Job, 2, 3, 0},
                 {EntryKind::Setup, 3, 5, -1},
                 {EntryKind::Job, 5, 6, 1}};
    auto v = validate_schedule(two, s);
    REQUIRE(v.size() == 1);
    CHECK(v.front().find("redundant setup") != std::string::npos);
  }

  SECTION("missing and duplicated jobs") {
    Schedule s;
    s.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 1}, {EntryKind::Job, 3, 4, 1}};
    auto v = validate_schedule(inst, s);
    REQUIRE(v.size() >= 2);
  }
}

TEST_CASE("flow report on the basic single-job schedule") {
  Instance inst = make(2.0, 1, {{0, 1, 0}});
  Schedule s;
  s.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 0}};
  FlowReport rep = flow_report(inst, s);
  CHECK(rep.max_flow == Catch::Approx(3.0));  // s + p
  CHECK(rep.argmax_job == 0);
}

TEST_CASE("flow report rejects invalid schedules with the first violation") {
  Instance inst = make(2.0, 1, {{5.0, 1, 0}});
  Schedule bad;
  bad.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 0}};
  CHECK_THROWS_WITH(flow_report(inst, bad), Catch::Matchers::ContainsSubstring("before release"));
}

TEST_CASE("E1 under the shipped policies and the optimal order") {
  Instance inst = e1();

  SECTION("balance(13) reaches max flow 7") {
    BalancePolicy policy(13.0);
    Schedule s = simulate(inst, policy);
    REQUIRE(validate_schedule(inst, s).empty());
    CHECK(flow_report(inst, s).max_flow == Catch::Approx(7.0));

    auto batches = batches_of(inst, s);
    REQUIRE(batches.size() == 2);
    CHECK(batches[0].type_id == 0);
    CHECK(batches[0].job_ids == std::vector<int>{0, 2});
    CHECK(batches[0].workload == Catch::Approx(2.0));
    CHECK(batches[1].job_ids == std::vector<int>{1});
    CHECK(batches[1].workload == Catch::Approx(1.0));

    CHECK(overhead_in(inst, s, Interval::everything(), Interval::everything()) == Catch::Approx(4.0));
  }

  SECTION("the optimal order yields 6.5, matching exhaustive enumeration") {
    CHECK(testutil::enumerate_opt(inst) == Catch::Approx(6.5));
    CHECK(testutil::order_max_flow(inst, {1, 0, 2}) == Catch::Approx(6.5));
  }
}

TEST_CASE("batch structure follows setups only") {
  SECTION("single-type schedules form one batch") {
    Instance inst = make(1.0, 1, {{0, 1, 0}, {0, 2, 0}, {4, 1, 0}});
    FifoPolicy fifo;
    Schedule s = simulate(inst, fifo);
    auto batches = batches_of(inst, s);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0].job_ids.size() == 3);
    CHECK(batches[0].workload == Catch::Approx(4.0));
  }
  SECTION("alternating types form one batch per job") {
    Instance inst = make(1.0, 2, {{0, 1, 0}, {0, 1, 1}, {0, 1, 0}});
    FifoPolicy fifo;
    Schedule s = simulate(inst, fifo);
    CHECK(batches_of(inst, s).size() == 3);
  }
}

TEST_CASE("overhead attribution") {
  Instance inst = make(2.0, 1, {{0, 1, 0}});
  Schedule s;
  s.entries = {{EntryKind::Setup, 0, 2, -1}, {EntryKind::Job, 2, 3, 0}};
  CHECK(overhead_in(inst, s, Interval::everything(), Interval::everything()) == Catch::Approx(2.0));
  CHECK(overhead_in(inst, s, Interval::everything(), Interval{10, 20}) == 0.0);
}

TEST_CASE("overhead windows restrict by release and by execution span") {
  Instance inst = e1();
  BalancePolicy policy(13.0);
  Schedule s = simulate(inst, policy);
  // jobs released at 0 are j0 and j1 and they carry one setup each
  CHECK(overhead_in(inst, s, Interval::everything(), Interval{0, 0}) == Catch::Approx(4.0));
  // restricting executions to [0, 4] keeps only j0's setup
  CHECK(overhead_in(inst, s, Interval{0, 4}, Interval{0, 0}) == Catch::Approx(2.0));
  // idle time counts toward the job it precedes
  Instance gap = make(2.0, 1, {{0, 1, 0}, {5, 1, 0}});
  FifoPolicy fifo;
  Schedule gs = simulate(gap, fifo);
  CHECK(overhead_in(gap, gs, Interval::everything(), Interval{5, 5}) == Catch::Approx(2.0));  // idle [3,5)
}

TEST_CASE("batches concatenate to the job order and stay single-typed") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    rng::Substream rs(seed, 1, 2);
    std::vector<Job> jobs;
    const int n = 2 + static_cast<int>(rs.next_unit() * 10);
    for (int id = 0; id < n; ++id)
      jobs.push_back(Job{id, 10.0 * rs.next_unit(), 1.0 + 2.0 * rs.next_unit(),
                         static_cast<int>(rs.next_unit() * 3)});
    Instance inst = make_instance(1.5, 3, std::move(jobs));
    BalancePolicy policy(13.0);
    Schedule s = simulate(inst, policy);
    std::vector<int> order, concat;
    for (const auto& e : s.entries)
      if (e.kind == EntryKind::Job) order.push_back(e.job_id);
    for (const Batch& b : batches_of(inst, s)) {
      for (int id : b.job_ids) {
        concat.push_back(id);
        CHECK(inst.job(id).type_id == b.type_id);
      }
    }
    CHECK(concat == order);
  }
}

TEST_CASE("workload_in on closed intervals") {
  Instance inst = e1();
  CHECK(workload_in(inst, Interval{0, 0}) == Catch::Approx(2.0));
  CHECK(workload_in(inst, Interval{-5, -1}) == 0.0);
  CHECK(workload_in(inst, Interval::everything()) == Catch::Approx(3.0));
}

TEST_CASE("workload_in is additive over a split of an interval") {
  rng::Substream rs(99, 0, 0);
  for (int round = 0; round < 50; ++round) {
    std::vector<Job> jobs;
    const int n = 1 + static_cast<int>(rs.next_unit() * 12);
    for (int id = 0; id < n; ++id)
      jobs.push_back(Job{id, 10.0 * rs.next_unit(), 1.0 + 3.0 * rs.next_unit(), 0});
    Instance inst = make_instance(1.0, 1, std::move(jobs));
    const double mid = 10.0 * rs.next_unit();
    const double lhs = workload_in(inst, Interval{0, 10});
    const double split = workload_in(inst, Interval{0, mid}) +
                         workload_in(inst, Interval{std::nextafter(mid, 1e9), 10});
    CHECK(lhs == Catch::Approx(split).margin(1e-12));
  }
}

TEST_CASE("schedules from policies validate round-trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rng::Substream rs(seed, 1, 2);
    std::vector<Job> jobs;
    const int n = 1 + static_cast<int>(rs.next_unit() * 10);
    for (int id = 0; id < n; ++id)
      jobs.push_back(Job{id, 8.0 * rs.next_unit(), 1.0 + 2.0 * rs.next_unit(),
                         static_cast<int>(rs.next_unit() * 3)});
    Instance inst = make_instance(1.5, 3, std::move(jobs));
    BalancePolicy bal(13.0);
    FifoPolicy fifo;
    CHECK(validate_schedule(inst, simulate(inst, bal)).empty());
    CHECK(validate_schedule(inst, simulate(inst, fifo)).empty());
  }
}

TEST_CASE("every valid schedule has F_j >= p_j and sums of batch workloads match") {
  Instance inst = e1();
  BalancePolicy policy(13.0);
  Schedule s = simulate(inst, policy);
  FlowReport rep = flow_report(inst, s);
  for (int id = 0; id < static_cast<int>(inst.size()); ++id)
    CHECK(rep.per_job_flow[static_cast<std::size_t>(id)] >= inst.job(id).size - kTimeTol);
  double total = 0;
  for (const Batch& b : batches_of(inst, s)) total += b.workload;
  CHECK(total == Catch::Approx(3.0));
}
