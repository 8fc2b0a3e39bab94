#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssched/cli.hpp"
#include "ssched/io.hpp"
#include "ssched/offline.hpp"
#include "ssched/smoothing.hpp"
#include "test_util.hpp"

using namespace ssched;
using testutil::e1;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::vector<const char*> argv;
  argv.push_back("ssched");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string last_line(const std::string& text) {
  auto end = text.find_last_not_of('\n');
  if (end == std::string::npos) return "";
  auto start = text.rfind('\n', end);
  return text.substr(start == std::string::npos ? 0 : start + 1,
                     end - (start == std::string::npos ? 0 : start + 1) + 1);
}

const char* kE1Text = "s 2 k 2\n0 1 0\n0 1 1\n0.5 1 0\n";

}  // namespace

TEST_CASE("instance parsing") {
  SECTION("comments, blanks and the header") {
    Instance inst = parse_instance("# a comment\n\ns 2 k 2 # trailing\n0 1 0\n0 1 1\n0.5 1 0\n");
    CHECK(inst.setup == 2.0);
    CHECK(inst.num_types == 2);
    REQUIRE(inst.size() == 3);
    CHECK(inst.job(2).release == 0.5);
  }
  SECTION("malformed lines carry the line number") {
    CHECK_THROWS_WITH(parse_instance("s 2 k 2\n0 1\n"), Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_instance("bogus\n"), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_instance(""), Catch::Matchers::ContainsSubstring("header"));
    CHECK_THROWS_WITH(parse_instance("s 2 k 1\n0 1 5\n"), Catch::Matchers::ContainsSubstring("type_id"));
  }
}

TEST_CASE("print/parse round-trips exactly") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Instance inst = cli::gen_random(1 + static_cast<int>(seed % 12), 3, 17.3, 4.7, seed, 1.25);
    Instance back = parse_instance(print_instance(inst));
    REQUIRE(back.size() == inst.size());
    CHECK(back.setup == inst.setup);
    CHECK(back.num_types == inst.num_types);
    for (int id = 0; id < static_cast<int>(inst.size()); ++id) {
      CHECK(back.job(id).release == inst.job(id).release);
      CHECK(back.job(id).size == inst.job(id).size);
      CHECK(back.job(id).type_id == inst.job(id).type_id);
    }
  }
}

TEST_CASE("gen-random is deterministic and guarded") {
  Instance a = cli::gen_random(6, 2, 10, 4, 99);
  Instance b = cli::gen_random(6, 2, 10, 4, 99);
  for (int id = 0; id < 6; ++id) {
    CHECK(a.job(id).release == b.job(id).release);
    CHECK(a.job(id).size == b.job(id).size);
    CHECK(a.job(id).type_id == b.job(id).type_id);
  }
  CHECK_THROWS_AS(cli::gen_random(0, 2, 10, 4, 1), std::invalid_argument);
}

TEST_CASE("cli simulate prints the schedule and max_flow") {
  CliResult res = run_cli({"simulate", "--policy", "balance", "--alpha", "13"}, kE1Text);
  REQUIRE(res.code == 0);
  CHECK(res.out.find("kind,start,end,job_id") == 0);
  CHECK(res.out.find("SETUP,0,2,") != std::string::npos);
  CHECK(last_line(res.out) == "max_flow,7");
}

TEST_CASE("cli opt prints opt_flow and a witness") {
  CliResult res = run_cli({"opt", "--mode", "brute"}, kE1Text);
  REQUIRE(res.code == 0);
  CHECK(res.out.find("opt_flow,6.5\n") == 0);
  CHECK(res.out.find("kind,start,end,job_id") != std::string::npos);
  CliResult dp = run_cli({"opt", "--mode", "dp"}, kE1Text);
  CHECK(dp.out.find("opt_flow,6.5\n") == 0);
}

TEST_CASE("cli lb prints the bound components") {
  CliResult res = run_cli({"lb"}, kE1Text);
  REQUIRE(res.code == 0);
  CHECK(res.out.find("setup,2\n") != std::string::npos);
  CHECK(res.out.find("p_max,1\n") != std::string::npos);
  CHECK(res.out.find("interval,4.5\n") != std::string::npos);
  CHECK(last_line(res.out) == "lower_bound,4.5");
}

TEST_CASE("cli refusals exit 1 with a reason") {
  CliResult res = run_cli({"opt", "--mode", "brute"},
                          "s 1 k 1\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n0 1 0\n");
  CHECK(res.code == 1);
  CHECK(res.err.find("error:") == 0);
  CliResult bad = run_cli({"simulate"}, "not an instance\n");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 1") != std::string::npos);
}

TEST_CASE("cli adversary writes artifacts and a summary") {
  const char* tmp = std::getenv("TMPDIR");
  const std::string prefix = std::string(tmp ? tmp : "/tmp") + "/ssched_adv_test";
  CliResult res = run_cli({"adversary", "--phases", "4", "--policy", "fifo", "--out", prefix});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("phases,n,alg_flow,opt_upper\n4,16,7,5\n") != std::string::npos);
  std::ifstream inst_file(prefix + ".instance.txt");
  REQUIRE(inst_file.good());
  Instance inst = parse_instance(inst_file);
  CHECK(inst.size() == 16);
  CHECK(std::ifstream(prefix + ".alg.csv").good());
  CHECK(std::ifstream(prefix + ".opt.csv").good());
}

TEST_CASE("cli smooth emits per-trial rows and a summary row") {
  CliResult res = run_cli({"smooth", "--dist", "uniform", "--eps", "0.5", "--trials", "5", "--opt", "brute",
                           "--seed", "3"},
                          kE1Text);
  REQUIRE(res.code == 0);
  CHECK(res.out.find("trial,alg_flow,opt_or_bound,ratio\n") == 0);
  CHECK(res.out.find("\n0,") != std::string::npos);
  CHECK(res.out.find("\n4,") != std::string::npos);
  CHECK(last_line(res.out).find("summary,EXACT_BRUTE,") == 0);
}

TEST_CASE("cli analyze emits the partition and the subschedule views") {
  CliResult part = run_cli({"analyze", "--gamma", "4", "--eps", "0.5"}, "s 1 k 1\n0 1 0\n1 1 0\n");
  REQUIRE(part.code == 0);
  CHECK(part.out.find("candidate,-4,0,,,") != std::string::npos);
  CHECK(part.out.find("group,") != std::string::npos);

  CliResult view = run_cli({"analyze", "--subschedule", "1"}, kE1Text);
  REQUIRE(view.code == 0);
  CHECK(view.out.find("subschedule_q,1\n") == 0);
  CHECK(view.out.find("job,1,1,7\n") != std::string::npos);

  CliResult absent = run_cli({"analyze", "--subschedule", "3"}, kE1Text);
  REQUIRE(absent.code == 0);
  CHECK(absent.out.find("subschedule,absent") == 0);
}

TEST_CASE("regression anchor: generated 8-job two-type instance") {
  // frozen from the first brute-force run over this seed
  Instance inst = cli::gen_random(8, 2, 10.0, 4.0, 1, 2.0);
  OptResult res = brute_force_opt(inst);
  CHECK(res.opt_flow == Catch::Approx(13.82830306840683).margin(1e-9));
  CHECK(dp_opt(inst).opt_flow == Catch::Approx(res.opt_flow).margin(1e-9));
}

TEST_CASE("cli gen-random round-trips through simulate") {
  CliResult gen = run_cli({"gen-random", "--n", "5", "--k", "2", "--horizon", "10", "--size-max", "3", "--seed", "4",
                           "--setup", "2"});
  REQUIRE(gen.code == 0);
  CliResult sim = run_cli({"simulate", "--policy", "fifo"}, gen.out);
  REQUIRE(sim.code == 0);
  CHECK(last_line(sim.out).find("max_flow,") == 0);
}
