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

#include "pgasrob/pgasrob.h"

#include <cstdlib>
#include <exception>
#include <new>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pgasrob/dsl.hh"
#include "pgasrob/oracle.hh"
#include "pgasrob/report.hh"
#include "pgasrob/robustness.hh"

struct pgasrob_program {
  pgasrob::ProgramCode code;
  std::string text;
};

struct pgasrob_report {
  pgasrob_outcome outcome = PGASROB_ROBUST;
  std::string json;
  std::string text;
  std::string dot;
};

namespace {

thread_local std::string last_error;

pgasrob_status Fail(pgasrob_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename F>
pgasrob_status Guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const pgasrob::ParseError& e) {
    return Fail(PGASROB_ERR_PARSE, e.what());
  } catch (const pgasrob::InternalError& e) {
    return Fail(PGASROB_ERR_INTERNAL, e.what());
  } catch (const pgasrob::MalformedComputation& e) {
    return Fail(PGASROB_ERR_INVALID, e.what());
  } catch (const std::invalid_argument& e) {
    return Fail(PGASROB_ERR_INVALID, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(PGASROB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(PGASROB_ERR_INTERNAL, e.what());
  }
}

pgasrob_options Defaults(const pgasrob_options* opts) {
  pgasrob_options o;
  pgasrob_options_init(&o);
  return opts ? *opts : o;
}

pgasrob::Instance MakeInstance(const pgasrob_program* p,
                               const pgasrob_options& o) {
  pgasrob::Instance inst{p->code, o.nodes, o.domain};
  auto diags = pgasrob::Validate(inst);
  if (!diags.empty()) {
    throw std::invalid_argument(
        pgasrob::RenderDiagnostic(p->code.source_name, diags.front()));
  }
  return inst;
}

pgasrob_status Emit(pgasrob_report** out, pgasrob_outcome outcome,
                    const pgasrob::Json& json, std::string text,
                    std::string dot) {
  if (!out) return Fail(PGASROB_ERR_ARGUMENT, "null report pointer");
  auto* r = new pgasrob_report;
  r->outcome = outcome;
  r->json = json.dump(2);
  r->text = std::move(text);
  r->dot = std::move(dot);
  *out = r;
  return PGASROB_OK;
}

pgasrob_status Load(pgasrob::ProgramCode code, pgasrob_program** out) {
  if (!out) return Fail(PGASROB_ERR_ARGUMENT, "null program pointer");
  auto* p = new pgasrob_program;
  p->text = pgasrob::PrintProgram(code);
  p->code = std::move(code);
  *out = p;
  return PGASROB_OK;
}

}  // namespace

extern "C" {

void pgasrob_options_init(pgasrob_options* opts) {
  if (!opts) return;
  opts->nodes = 2;
  opts->domain = 2;
  opts->bound = 12;
  opts->seed = 0;
  opts->max_steps = 64;
  opts->max_states = 0;
  opts->threads = 1;
  opts->emit_dot = 0;
}

const char* pgasrob_version(void) { return "1.0.0"; }

const char* pgasrob_last_error(void) { return last_error.c_str(); }

void pgasrob_set_log_level(const char* level) {
  static bool configured = false;
  if (!configured) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("pgasrob"));
    spdlog::set_pattern("[%l] %v");
    configured = true;
  }
  if (!level) level = std::getenv("PGASROB_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level)
                          : spdlog::level::warn);
}

pgasrob_status pgasrob_program_from_source(const char* text, const char* name,
                                           pgasrob_program** out) {
  return Guard([&] {
    if (!text) return Fail(PGASROB_ERR_ARGUMENT, "null source text");
    return Load(pgasrob::ParseProgram(text, name ? name : "<input>"), out);
  });
}

pgasrob_status pgasrob_program_load(const char* path, pgasrob_program** out) {
  return Guard([&] {
    if (!path) return Fail(PGASROB_ERR_ARGUMENT, "null path");
    pgasrob::ProgramCode code;
    try {
      code = pgasrob::LoadProgram(path);
    } catch (const pgasrob::ParseError&) {
      throw;
    } catch (const std::exception& e) {
      return Fail(PGASROB_ERR_IO, e.what());
    }
    return Load(std::move(code), out);
  });
}

void pgasrob_program_free(pgasrob_program* program) { delete program; }

const char* pgasrob_program_text(const pgasrob_program* program) {
  return program ? program->text.c_str() : "";
}

int pgasrob_program_state_count(const pgasrob_program* program) {
  return program ? program->code.state_count : 0;
}

int pgasrob_program_transition_count(const pgasrob_program* program) {
  return program ? static_cast<int>(program->code.transitions.size()) : 0;
}

pgasrob_status pgasrob_validate(const pgasrob_program* program,
                                const pgasrob_options* opts,
                                pgasrob_report** out) {
  return Guard([&] {
    if (!program) return Fail(PGASROB_ERR_ARGUMENT, "null program");
    pgasrob_options o = Defaults(opts);
    pgasrob::Instance inst{program->code, o.nodes, o.domain};
    auto diags = pgasrob::Validate(inst);
    std::string text;
    for (const auto& d : diags) {
      text += pgasrob::RenderDiagnostic(program->code.source_name, d) + "\n";
    }
    return Emit(out, diags.empty() ? PGASROB_VALID : PGASROB_DIAGNOSTICS,
                pgasrob::DiagnosticsToJson(program->code.source_name, diags),
                text, "");
  });
}

pgasrob_status pgasrob_check(const pgasrob_program* program,
                             const pgasrob_options* opts,
                             pgasrob_report** out) {
  return Guard([&] {
    if (!program) return Fail(PGASROB_ERR_ARGUMENT, "null program");
    pgasrob_options o = Defaults(opts);
    pgasrob::Instance inst = MakeInstance(program, o);
    pgasrob::CheckOptions co;
    co.threads = o.threads;
    co.max_states = o.max_states;
    pgasrob::Verdict v = pgasrob::CheckRobustness(inst, co);
    pgasrob_outcome outcome = v.outcome == pgasrob::Outcome::kRobust
                                  ? PGASROB_ROBUST
                              : v.outcome == pgasrob::Outcome::kNotRobust
                                  ? PGASROB_NOT_ROBUST
                                  : PGASROB_RESOURCE_BOUND;
    std::string dot;
    if (o.emit_dot && v.outcome == pgasrob::Outcome::kNotRobust) {
      dot = pgasrob::HbToDot(v.computation,
                             pgasrob::HappensBefore(v.computation),
                             v.violation);
    }
    return Emit(out, outcome, pgasrob::VerdictToJson(v),
                pgasrob::VerdictText(v), dot);
  });
}

pgasrob_status pgasrob_oracle(const pgasrob_program* program,
                              const pgasrob_options* opts, int normal_form,
                              pgasrob_report** out) {
  return Guard([&] {
    if (!program) return Fail(PGASROB_ERR_ARGUMENT, "null program");
    pgasrob_options o = Defaults(opts);
    if (o.bound < 0 || o.bound > pgasrob::kMaxOracleBound) {
      return Fail(PGASROB_ERR_ARGUMENT,
                  "bound must lie in 0.." +
                      std::to_string(pgasrob::kMaxOracleBound));
    }
    pgasrob::Instance inst = MakeInstance(program, o);
    pgasrob::OracleVerdict v =
        normal_form ? pgasrob::OracleNormalFormCheck(inst, o.bound, o.max_states)
                    : pgasrob::OracleCheck(inst, o.bound, o.max_states);
    pgasrob_outcome outcome =
        v.status == pgasrob::OracleStatus::kViolationFound
            ? PGASROB_VIOLATION_FOUND
        : v.status == pgasrob::OracleStatus::kNoViolationWithin
            ? PGASROB_NO_VIOLATION_WITHIN
            : PGASROB_EXHAUSTED;
    std::string dot;
    if (o.emit_dot && v.status == pgasrob::OracleStatus::kViolationFound) {
      dot = pgasrob::HbToDot(v.computation,
                             pgasrob::HappensBefore(v.computation),
                             v.violation);
    }
    return Emit(out, outcome, pgasrob::OracleToJson(v, normal_form != 0),
                pgasrob::OracleText(v, normal_form != 0), dot);
  });
}

pgasrob_status pgasrob_simulate(const pgasrob_program* program,
                                const pgasrob_options* opts,
                                const int* choices, size_t choice_count,
                                pgasrob_report** out) {
  return Guard([&] {
    if (!program) return Fail(PGASROB_ERR_ARGUMENT, "null program");
    pgasrob_options o = Defaults(opts);
    pgasrob::Instance inst = MakeInstance(program, o);
    pgasrob::ScheduleResult r =
        choices ? pgasrob::RunSchedule(
                      inst, std::span<const int>(choices, choice_count))
                : pgasrob::RunRandom(inst, o.seed, o.max_steps);
    pgasrob_outcome outcome = r.stuck       ? PGASROB_STUCK
                              : r.accepting ? PGASROB_ACCEPTING
                                            : PGASROB_NOT_ACCEPTING;
    std::string dot;
    if (o.emit_dot) {
      pgasrob::HbRelation hb = pgasrob::HappensBefore(r.computation);
      auto cyc = pgasrob::FindViolation(hb);
      dot = pgasrob::HbToDot(r.computation, hb,
                             cyc ? *cyc : std::vector<pgasrob::HbEdge>{});
    }
    return Emit(out, outcome, pgasrob::ScheduleToJson(r),
                pgasrob::ScheduleText(r), dot);
  });
}

pgasrob_status pgasrob_hb(const char* computation, const pgasrob_options* opts,
                          pgasrob_report** out) {
  return Guard([&] {
    if (!computation) return Fail(PGASROB_ERR_ARGUMENT, "null computation");
    pgasrob_options o = Defaults(opts);
    std::string text(computation);
    size_t first = text.find_first_not_of(" \t\r\n");
    pgasrob::Computation c;
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
      pgasrob::Json j;
      try {
        j = pgasrob::Json::parse(text);
        if (j.is_object()) j = j.at("computation");
        c = pgasrob::ComputationFromJson(j);
      } catch (const pgasrob::Json::exception& e) {
        return Fail(PGASROB_ERR_PARSE, e.what());
      } catch (const std::invalid_argument& e) {
        return Fail(PGASROB_ERR_PARSE, e.what());
      }
    } else {
      try {
        c = pgasrob::ParseComputation(text);
      } catch (const std::runtime_error& e) {
        return Fail(PGASROB_ERR_PARSE, e.what());
      }
    }
    pgasrob::HbRelation hb = pgasrob::HappensBefore(c);
    auto cyc = pgasrob::FindViolation(hb);
    std::string dot;
    if (o.emit_dot) {
      dot = pgasrob::HbToDot(c, hb, cyc ? *cyc : std::vector<pgasrob::HbEdge>{});
    }
    return Emit(out, cyc ? PGASROB_VIOLATING : PGASROB_ACYCLIC,
                pgasrob::HbToJson(c, hb), pgasrob::HbText(c, hb), dot);
  });
}

pgasrob_outcome pgasrob_report_outcome(const pgasrob_report* report) {
  return report ? report->outcome : PGASROB_ROBUST;
}

const char* pgasrob_report_json(const pgasrob_report* report) {
  return report ? report->json.c_str() : "";
}

const char* pgasrob_report_text(const pgasrob_report* report) {
  return report ? report->text.c_str() : "";
}

const char* pgasrob_report_dot(const pgasrob_report* report) {
  return report ? report->dot.c_str() : "";
}

void pgasrob_report_free(pgasrob_report* report) { delete report; }

}  // extern "C"
