#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssched/core.hpp"

namespace ssched {

// Instance text format (line oriented, whitespace separated):
//   s <decimal> k <integer>
//   <release> <size> <type_id>     one line per job, ids assigned in order
// '#' starts a comment; blank lines are skipped.

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline Instance parse_instance(std::istream& in) {
  std::string line;
  int lineno = 0;
  bool have_header = false;
  double setup = 0;
  int num_types = 0;
  std::vector<Job> jobs;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = detail::strip_comment(line);
    if (detail::blank(body)) continue;
    std::istringstream ls(body);
    if (!have_header) {
      std::string s_tag, k_tag;
      if (!(ls >> s_tag >> setup >> k_tag >> num_types) || s_tag != "s" || k_tag != "k")
        throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 's <decimal> k <integer>'");
      have_header = true;
      continue;
    }
    Job j;
    if (!(ls >> j.release >> j.size >> j.type_id))
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected '<release> <size> <type_id>'");
    std::string extra;
    if (ls >> extra)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": trailing tokens");
    j.id = static_cast<int>(jobs.size());
    jobs.push_back(j);
  }
  if (!have_header) throw std::invalid_argument("empty instance: missing 's ... k ...' header");
  try {
    return make_instance(setup, num_types, std::move(jobs));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("instance file: ") + e.what());
  }
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

/// Prints jobs in id order so that parse(print(x)) == x exactly.
inline void print_instance(const Instance& inst, std::ostream& out) {
  out << "s " << detail::fmt17(inst.setup) << " k " << inst.num_types << "\n";
  for (int id = 0; id < static_cast<int>(inst.size()); ++id) {
    const Job& j = inst.job(id);
    out << detail::fmt17(j.release) << " " << detail::fmt17(j.size) << " " << j.type_id << "\n";
  }
}

inline std::string print_instance(const Instance& inst) {
  std::ostringstream out;
  print_instance(inst, out);
  return out.str();
}

inline void schedule_csv(const Schedule& sched, std::ostream& out) {
  out << "kind,start,end,job_id\n";
  for (const ScheduleEntry& e : sched.entries) {
    out << to_string(e.kind) << "," << detail::fmt17(e.start) << "," << detail::fmt17(e.end) << ",";
    if (e.kind == EntryKind::Job) out << e.job_id;
    out << "\n";
  }
}

}  // namespace ssched
