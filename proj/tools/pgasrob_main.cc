/*
 * Copyright (c) 2026, pgasrob authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// pgasrob: robustness checker for PGAS programs.
//
//   pgasrob check    PROGRAM [--nodes N] [--domain D] [--threads T]
//   pgasrob oracle   PROGRAM [--bound B] [--normal-form]
//   pgasrob simulate PROGRAM [--seed S | --schedule 0,1,...]
//   pgasrob hb       COMPUTATION
//
// Exit codes: 0 robust / no violation / acyclic, 1 not robust / violation
// found, 2 errors, resource bounds and stuck schedules.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgasrob/pgasrob.h"

namespace {

constexpr int kExitError = 2;

struct Config {
  std::string input;
  int nodes = 2;
  int domain = 2;
  int bound = 12;
  std::uint64_t seed = 0;
  int max_steps = 64;
  std::uint64_t max_states = 0;
  int threads = 1;
  bool json = false;
  bool normal_form = false;
  std::vector<int> schedule;
  bool emit_dot = false;
  std::string dot_path;
};

int Error(const std::string& what) {
  std::cerr << "pgasrob: " << what << "\n";
  return kExitError;
}

int ExitCode(pgasrob_outcome o) {
  switch (o) {
    case PGASROB_ROBUST:
    case PGASROB_NO_VIOLATION_WITHIN:
    case PGASROB_VALID:
    case PGASROB_ACCEPTING:
    case PGASROB_NOT_ACCEPTING:
    case PGASROB_ACYCLIC:
      return 0;
    case PGASROB_NOT_ROBUST:
    case PGASROB_VIOLATION_FOUND:
    case PGASROB_VIOLATING:
      return 1;
    default:
      return kExitError;
  }
}

int Print(const Config& cfg, pgasrob_report* r) {
  std::string dot = pgasrob_report_dot(r);
  bool dot_to_file = cfg.emit_dot && !cfg.dot_path.empty() && cfg.dot_path != "-";
  if (dot_to_file) {
    std::ofstream out(cfg.dot_path);
    if (!out) {
      pgasrob_report_free(r);
      return Error("cannot write " + cfg.dot_path);
    }
    out << dot;
  }
  if (cfg.json) {
    nlohmann::ordered_json j =
        nlohmann::ordered_json::parse(pgasrob_report_json(r));
    if (cfg.emit_dot && !dot_to_file) j["dot"] = dot;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << pgasrob_report_text(r);
    if (cfg.emit_dot && !dot_to_file) std::cout << dot;
  }
  int code = ExitCode(pgasrob_report_outcome(r));
  pgasrob_report_free(r);
  return code;
}

pgasrob_options Options(const Config& cfg) {
  pgasrob_options o;
  pgasrob_options_init(&o);
  o.nodes = cfg.nodes;
  o.domain = cfg.domain;
  o.bound = cfg.bound;
  o.seed = cfg.seed;
  o.max_steps = cfg.max_steps;
  o.max_states = cfg.max_states;
  o.threads = cfg.threads;
  o.emit_dot = cfg.emit_dot ? 1 : 0;
  return o;
}

int RunProgramCommand(const std::string& cmd, const Config& cfg) {
  pgasrob_program* p = nullptr;
  if (pgasrob_program_load(cfg.input.c_str(), &p) != PGASROB_OK) {
    return Error(pgasrob_last_error());
  }
  pgasrob_options o = Options(cfg);
  pgasrob_report* r = nullptr;
  pgasrob_status s;
  if (cmd == "check") {
    s = pgasrob_check(p, &o, &r);
  } else if (cmd == "oracle") {
    s = pgasrob_oracle(p, &o, cfg.normal_form ? 1 : 0, &r);
  } else if (cfg.schedule.empty()) {
    s = pgasrob_simulate(p, &o, nullptr, 0, &r);
  } else {
    s = pgasrob_simulate(p, &o, cfg.schedule.data(), cfg.schedule.size(), &r);
  }
  pgasrob_program_free(p);
  if (s != PGASROB_OK) return Error(pgasrob_last_error());
  return Print(cfg, r);
}

int RunHb(const Config& cfg) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) return Error("cannot open " + cfg.input);
  std::ostringstream ss;
  ss << in.rdbuf();
  pgasrob_options o = Options(cfg);
  pgasrob_report* r = nullptr;
  if (pgasrob_hb(ss.str().c_str(), &o, &r) != PGASROB_OK) {
    return Error(pgasrob_last_error());
  }
  return Print(cfg, r);
}

}  // namespace

int main(int argc, char** argv) {
  pgasrob_set_log_level(nullptr);
  CLI::App app{"Robustness checker for PGAS programs"};
  app.set_version_flag("--version", pgasrob_version());
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub, const char* what) {
    sub->add_option("input", cfg.input, what)->required();
    sub->add_flag("--json", cfg.json, "Print the report as JSON");
    sub->add_option("--emit-dot", cfg.dot_path,
                    "Emit the happens-before graph as DOT (to FILE, or "
                    "stdout without one)")
        ->expected(0, 1);
  };
  auto instance = [&](CLI::App* sub) {
    sub->add_option("--nodes,-n", cfg.nodes, "Number of processes N")
        ->check(CLI::Range(1, 200));
    sub->add_option("--domain,-d", cfg.domain, "Domain size |D|")
        ->check(CLI::Range(1, 256));
    sub->add_option("--max-states", cfg.max_states,
                    "Search cap (0 = unbounded)");
  };

  CLI::App* check = app.add_subcommand("check", "Decide robustness");
  common(check, "Program file");
  instance(check);
  check->add_option("--threads,-j", cfg.threads, "Worker threads")
      ->check(CLI::Range(1, 256));

  CLI::App* oracle =
      app.add_subcommand("oracle", "Bounded brute-force violation search");
  common(oracle, "Program file");
  instance(oracle);
  oracle->add_option("--bound,-b", cfg.bound, "Maximum computation length")
      ->check(CLI::Range(0, 128));
  oracle->add_flag("--normal-form", cfg.normal_form,
                   "Only consider computations in normal form");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run one schedule of the program");
  common(simulate, "Program file");
  instance(simulate);
  simulate->add_option("--seed", cfg.seed, "Random schedule seed");
  simulate->add_option("--steps", cfg.max_steps, "Random schedule length")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--schedule", cfg.schedule,
                       "Explicit step-choice indices")
      ->delimiter(',');

  CLI::App* hb = app.add_subcommand(
      "hb", "Happens-before relation of a computation (text or JSON)");
  common(hb, "Computation file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }
  for (CLI::App* sub : {check, oracle, simulate, hb}) {
    if (sub->parsed() && sub->count("--emit-dot") > 0) cfg.emit_dot = true;
  }
  if (hb->parsed()) return RunHb(cfg);
  for (CLI::App* sub : {check, oracle, simulate}) {
    if (sub->parsed()) return RunProgramCommand(sub->get_name(), cfg);
  }
  return kExitError;
}
