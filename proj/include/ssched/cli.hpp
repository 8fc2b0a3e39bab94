#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssched/adversary.hpp"
#include "ssched/analysis.hpp"
#include "ssched/core.hpp"
#include "ssched/io.hpp"
#include "ssched/offline.hpp"
#include "ssched/policies.hpp"
#include "ssched/smoothing.hpp"

namespace ssched::cli {

/// Seeded test-corpus generator: releases uniform on [0, horizon], sizes
/// uniform on [1, size_max], types uniform on [0, k).
inline Instance gen_random(int n, int k, double horizon, double size_max, std::uint64_t seed, double setup = 1.0) {
  if (n < 1) throw std::invalid_argument("gen_random: n must be >= 1");
  if (k < 1) throw std::invalid_argument("gen_random: k must be >= 1");
  if (!(size_max >= 1)) throw std::invalid_argument("gen_random: size_max must be >= 1");
  if (!(horizon >= 0)) throw std::invalid_argument("gen_random: horizon must be >= 0");
  std::vector<Job> jobs;
  jobs.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    rng::Substream rs(seed, 0, static_cast<std::uint64_t>(id));
    Job j;
    j.id = id;
    j.release = horizon * rs.next_unit();
    j.size = 1.0 + (size_max - 1.0) * rs.next_unit();
    j.type_id = std::min(k - 1, static_cast<int>(static_cast<double>(k) * rs.next_unit()));
    jobs.push_back(j);
  }
  return make_instance(setup, k, std::move(jobs));
}

namespace detail {

struct PolicyFlags {
  std::string name = "balance";
  double alpha = 13.0;
  double lambda = 13.0;
  bool single_step = false;

  std::unique_ptr<Policy> make() const {
    if (name == "balance") return balance_policy(alpha, !single_step);
    if (name == "fifo") return fifo_policy();
    if (name == "balance-fixed") return balance_fixed_policy(lambda);
    throw std::invalid_argument("unknown policy '" + name + "'");
  }
};

inline void add_policy_flags(CLI::App* cmd, PolicyFlags& flags) {
  cmd->add_option("--policy", flags.name, "policy: balance | fifo | balance-fixed")
      ->check(CLI::IsMember({"balance", "fifo", "balance-fixed"}));
  cmd->add_option("--alpha", flags.alpha, "balance parameter growth base (default 13)");
  cmd->add_option("--lambda", flags.lambda, "fixed balance parameter for balance-fixed");
  cmd->add_flag("--single-step", flags.single_step,
                "grow lambda by one multiplication per trigger instead of saturating");
}

inline Instance read_instance(const std::string& path, std::istream& fallback) {
  if (path == "-") return parse_instance(fallback);
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open instance file '" + path + "'");
  return parse_instance(f);
}

}  // namespace detail

/// Command-line front end. Returns the process exit code; refusals and
/// malformed input yield exit 1 with a one-line reason on `err`.
inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"single-machine scheduling with setup times: simulation and verification lab"};
  app.require_subcommand(1);

  // --- simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "run an online policy; prints kind,start,end,job_id rows then a max_flow,<F> line");
  std::string sim_input = "-";
  sim->add_option("--input,-i", sim_input, "instance file ('-' for stdin)");
  detail::PolicyFlags sim_policy;
  detail::add_policy_flags(sim, sim_policy);

  // --- opt ----------------------------------------------------------------
  auto* opt = app.add_subcommand(
      "opt", "exact clairvoyant optimum; prints opt_flow,<F*> then the witness as kind,start,end,job_id rows");
  std::string opt_input = "-";
  std::string opt_mode = "dp";
  std::uint64_t opt_budget = 10'000'000;
  opt->add_option("--input,-i", opt_input, "instance file ('-' for stdin)");
  opt->add_option("--mode", opt_mode, "brute | dp")->check(CLI::IsMember({"brute", "dp"}));
  opt->add_option("--budget", opt_budget, "state budget for the dp mode");

  // --- lb -----------------------------------------------------------------
  auto* lb = app.add_subcommand(
      "lb", "optimal-flow lower bound; prints component,value rows (setup, p_max, interval, lower_bound)");
  std::string lb_input = "-";
  lb->add_option("--input,-i", lb_input, "instance file ('-' for stdin)");

  // --- adversary ----------------------------------------------------------
  auto* adv = app.add_subcommand(
      "adversary",
      "build the adaptive hard instance; writes PREFIX.instance.txt and both schedule CSVs, prints a "
      "phases,n,alg_flow,opt_upper summary row");
  int adv_phases = 0;
  long long adv_n = 0;
  std::string adv_out = "adversary";
  adv->add_option("--phases", adv_phases, "number of phases P (n = P*P)");
  adv->add_option("--n", adv_n, "job budget; uses P = floor(sqrt(n))");
  adv->add_option("--out", adv_out, "output file prefix");
  detail::PolicyFlags adv_policy;
  detail::add_policy_flags(adv, adv_policy);

  // --- smooth -------------------------------------------------------------
  auto* smooth = app.add_subcommand(
      "smooth",
      "Monte-Carlo smoothed competitiveness; prints trial,alg_flow,opt_or_bound,ratio rows then one "
      "summary,<opt_mode>,<mean>,<median>,<stderr> row");
  std::string smooth_input = "-";
  std::string smooth_dist = "uniform";
  std::string smooth_opt = "lb";
  double smooth_eps = 0.5;
  int smooth_trials = 100;
  std::uint64_t smooth_seed = 0;
  int smooth_jobs = 1;
  smooth->add_option("--input,-i", smooth_input, "instance file ('-' for stdin)");
  smooth->add_option("--dist", smooth_dist, "uniform | normal")->check(CLI::IsMember({"uniform", "normal"}));
  smooth->add_option("--eps", smooth_eps, "perturbation strength in (0,1)");
  smooth->add_option("--trials", smooth_trials, "number of Monte-Carlo trials");
  smooth->add_option("--opt", smooth_opt, "denominator: dp | brute | lb")->check(CLI::IsMember({"dp", "brute", "lb"}));
  smooth->add_option("--seed", smooth_seed, "base seed of the perturbation streams");
  smooth->add_option("--jobs", smooth_jobs, "worker threads (output order is by trial index)");
  detail::PolicyFlags smooth_policy;
  detail::add_policy_flags(smooth, smooth_policy);

  // --- analyze ------------------------------------------------------------
  auto* analyze = app.add_subcommand(
      "analyze",
      "with --gamma: candidate/group partition as record,lo,hi,workload,setup_estimate,label rows; with "
      "--subschedule q: the level-q view of a balance run (job,<id>,<type>,<flow> and batch rows)");
  std::string an_input = "-";
  double an_gamma = 0;
  double an_eps = 0.5;
  double an_c2 = 1.0;
  int an_q = 0;
  double an_alpha = 13.0;
  double an_delta = 3.0;
  analyze->add_option("--input,-i", an_input, "instance file ('-' for stdin)");
  analyze->add_option("--gamma", an_gamma, "candidate window length");
  analyze->add_option("--eps", an_eps, "perturbation strength entering mu");
  analyze->add_option("--c2", an_c2, "constant in the group size mu");
  analyze->add_option("--subschedule", an_q, "extract the level-q suffix view of a balance run");
  analyze->add_option("--alpha", an_alpha, "balance growth base");
  analyze->add_option("--delta", an_delta, "flow slack parameter of the suffix view");

  // --- gen-random ---------------------------------------------------------
  auto* gen = app.add_subcommand("gen-random", "emit a seeded random instance");
  int gen_n = 0, gen_k = 1;
  double gen_horizon = 0, gen_size_max = 1, gen_setup = 1;
  std::uint64_t gen_seed = 0;
  gen->add_option("--n", gen_n, "number of jobs")->required();
  gen->add_option("--k", gen_k, "number of types");
  gen->add_option("--horizon", gen_horizon, "releases drawn uniformly from [0, horizon]");
  gen->add_option("--size-max", gen_size_max, "sizes drawn uniformly from [1, size_max]");
  gen->add_option("--setup", gen_setup, "setup time of the emitted instance");
  gen->add_option("--seed", gen_seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*sim) {
      const Instance inst = detail::read_instance(sim_input, in);
      const auto policy = sim_policy.make();
      const Schedule sched = simulate(inst, *policy);
      const FlowReport rep = flow_report(inst, sched);
      schedule_csv(sched, out);
      out << "max_flow," << ssched::detail::fmt17(rep.max_flow) << "\n";
    } else if (*opt) {
      const Instance inst = detail::read_instance(opt_input, in);
      const OptResult res = opt_mode == "brute" ? brute_force_opt(inst) : dp_opt(inst, opt_budget);
      out << "opt_flow," << ssched::detail::fmt17(res.opt_flow) << "\n";
      schedule_csv(res.witness, out);
    } else if (*lb) {
      const Instance inst = detail::read_instance(lb_input, in);
      const LowerBoundParts parts = lower_bound_parts(inst);
      out << "component,value\n";
      out << "setup," << ssched::detail::fmt17(parts.setup_term) << "\n";
      out << "p_max," << ssched::detail::fmt17(parts.pmax_term) << "\n";
      out << "interval," << ssched::detail::fmt17(parts.interval_term) << "\n";
      out << "lower_bound," << ssched::detail::fmt17(parts.value) << "\n";
    } else if (*adv) {
      int P = adv_phases;
      if (P == 0 && adv_n > 0) P = static_cast<int>(std::floor(std::sqrt(static_cast<double>(adv_n))));
      if (P < 2) throw std::invalid_argument("adversary: give --phases P >= 2 or --n >= 4");
      const auto policy = adv_policy.make();
      const AdversaryResult res = build_adversary_instance(AdversaryConfig{P}, *policy);
      const Schedule witness = optimal_phase_schedule(res.instance);
      const double alg_flow = flow_report(res.instance, res.policy_schedule).max_flow;
      const double opt_upper = flow_report(res.instance, witness).max_flow;
      {
        std::ofstream f(adv_out + ".instance.txt");
        if (!f) throw std::runtime_error("cannot write " + adv_out + ".instance.txt");
        print_instance(res.instance, f);
      }
      {
        std::ofstream f(adv_out + ".alg.csv");
        if (!f) throw std::runtime_error("cannot write " + adv_out + ".alg.csv");
        schedule_csv(res.policy_schedule, f);
      }
      {
        std::ofstream f(adv_out + ".opt.csv");
        if (!f) throw std::runtime_error("cannot write " + adv_out + ".opt.csv");
        schedule_csv(witness, f);
      }
      out << "phases,n,alg_flow,opt_upper\n";
      out << P << "," << static_cast<long long>(res.instance.size()) << "," << ssched::detail::fmt17(alg_flow)
          << "," << ssched::detail::fmt17(opt_upper) << "\n";
    } else if (*smooth) {
      const Instance inst = detail::read_instance(smooth_input, in);
      PerturbationSpec spec;
      spec.kind = smooth_dist == "uniform" ? PerturbKind::Uniform : PerturbKind::TruncNormal;
      spec.epsilon = smooth_eps;
      spec.seed = smooth_seed;
      const OptMode mode = smooth_opt == "dp"      ? OptMode::ExactDp
                           : smooth_opt == "brute" ? OptMode::ExactBrute
                                                   : OptMode::LowerBoundProxy;
      const auto policy = smooth_policy.make();
      const SmoothedRunReport rep = smoothed_experiment(inst, spec, smooth_trials, *policy, mode, smooth_jobs);
      out << "trial,alg_flow,opt_or_bound,ratio\n";
      for (int t = 0; t < rep.trials; ++t) {
        const SmoothedTrial& tr = rep.per_trial[static_cast<std::size_t>(t)];
        out << t << "," << ssched::detail::fmt17(tr.alg_flow) << "," << ssched::detail::fmt17(tr.opt_or_bound)
            << "," << ssched::detail::fmt17(tr.ratio) << "\n";
      }
      out << "summary," << to_string(rep.opt_mode) << "," << ssched::detail::fmt17(rep.mean_ratio) << ","
          << ssched::detail::fmt17(rep.median_ratio) << "," << ssched::detail::fmt17(rep.std_error) << "\n";
    } else if (*analyze) {
      const Instance inst = detail::read_instance(an_input, in);
      if (an_q > 0) {
        BalancePolicy policy(an_alpha);
        const Schedule sched = simulate(inst, policy);
        const FlowReport rep = flow_report(inst, sched);
        const auto view = extract_subschedule(inst, sched, an_q, an_alpha, an_delta);
        if (!view) {
          out << "subschedule,absent\n";
        } else {
          out << "subschedule_q," << view->q << "\n";
          out << "release_first," << ssched::detail::fmt17(view->release_first) << "\n";
          out << "release_last," << ssched::detail::fmt17(view->release_last) << "\n";
          for (int id : view->jobs)
            out << "job," << id << "," << inst.job(id).type_id << ","
                << ssched::detail::fmt17(rep.per_job_flow[static_cast<std::size_t>(id)]) << "\n";
          for (std::size_t b = 0; b < view->batches.size(); ++b)
            out << "batch," << b << "," << view->batches[b].type_id << ","
                << ssched::detail::fmt17(view->batches[b].workload) << ","
                << view->batches[b].job_ids.size() << "\n";
        }
      } else {
        if (!(an_gamma > 0)) throw std::invalid_argument("analyze: give --gamma > 0 or --subschedule q");
        PartitionConfig config;
        config.gamma = an_gamma;
        config.epsilon = an_eps;
        config.setup = inst.setup;
        config.n = inst.size();
        config.c2 = an_c2;
        const PartitionReport report = partition(inst, config);
        out << "# group size mu uses natural logarithms; mu=" << config.mu() << "\n";
        out << "record,lo,hi,workload,setup_estimate,label\n";
        for (const Interval& c : report.candidates)
          out << "candidate," << ssched::detail::fmt17(c.lo) << "," << ssched::detail::fmt17(c.hi) << ",,,\n";
        for (std::size_t g = 0; g < report.groups.size(); ++g)
          out << "group," << ssched::detail::fmt17(report.groups[g].lo) << ","
              << ssched::detail::fmt17(report.groups[g].hi) << ","
              << ssched::detail::fmt17(report.per_group[g].workload) << "," << report.per_group[g].setup_estimate
              << "," << to_string(report.per_group[g].label) << "\n";
      }
    } else if (*gen) {
      print_instance(gen_random(gen_n, gen_k, gen_horizon, gen_size_max, gen_seed, gen_setup), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ssched::cli
