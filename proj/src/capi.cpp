#include "fclear/fclear.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "fclear/depgraph.hpp"
#include "fclear/io.hpp"
#include "fclear/model.hpp"
#include "fclear/objectives.hpp"
#include "fclear/reductions.hpp"
#include "fclear/solver.hpp"

using nlohmann::json;

struct fclear_system {
  fclear::FinancialSystem sys;
};

namespace {

thread_local std::string g_last_error;

int code_of(fclear::ErrorCode c) {
  using EC = fclear::ErrorCode;
  switch (c) {
    case EC::InvalidSystem: return FCLEAR_E_INVALID_SYSTEM;
    case EC::ParseError: return FCLEAR_E_PARSE;
    case EC::HashMismatch: return FCLEAR_E_HASH_MISMATCH;
    case EC::PropagationDiverged: return FCLEAR_E_DIVERGED;
    case EC::EnumerationCapExceeded: return FCLEAR_E_ENUM_CAP;
    case EC::TooManyBanks: return FCLEAR_E_TOO_MANY_BANKS;
    case EC::MissingDesignation: return FCLEAR_E_MISSING_DESIGNATION;
    case EC::BadK: return FCLEAR_E_BAD_K;
    case EC::UnsplittableContract: return FCLEAR_E_UNSPLITTABLE;
    case EC::BadArgument: return FCLEAR_E_BAD_ARGUMENT;
  }
  return FCLEAR_E_INTERNAL;
}

template <typename F>
int wrap(F&& f) {
  try {
    f();
    g_last_error.clear();
    return FCLEAR_OK;
  } catch (const fclear::Error& e) {
    g_last_error = e.what();
    return code_of(e.code);
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return FCLEAR_E_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FCLEAR_E_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** slot, const std::string& s) {
  if (slot) *slot = dup_string(s);
}

const fclear::FinancialSystem& need_sys(const fclear_system* sys) {
  if (!sys) throw fclear::Error(fclear::ErrorCode::BadArgument, "null system handle");
  return sys->sys;
}

std::vector<double> parse_rates(const fclear::FinancialSystem& sys, const char* rates_json) {
  if (!rates_json) throw fclear::Error(fclear::ErrorCode::BadArgument, "null rates");
  return fclear::rates_from_json(sys, json::parse(rates_json));
}

json id_map(const fclear::FinancialSystem& sys, const std::vector<double>& values) {
  json out = json::object();
  for (int b = 0; b < sys.size(); ++b) out[sys.banks[b].id] = values[b];
  return out;
}

}  // namespace

extern "C" {

const char* fclear_version(void) { return "1.0.0"; }

const char* fclear_last_error(void) { return g_last_error.c_str(); }

void fclear_string_free(char* s) { std::free(s); }

void fclear_system_free(fclear_system* sys) { delete sys; }

int fclear_system_from_json(const char* text, fclear_system** out) {
  return wrap([&] {
    if (!text || !out)
      throw fclear::Error(fclear::ErrorCode::BadArgument, "null argument");
    auto sys = fclear::system_from_json(json::parse(text));
    *out = new fclear_system{std::move(sys)};
  });
}

int fclear_system_to_json(const fclear_system* sys, char** out_json) {
  return wrap([&] { set_out(out_json, fclear::system_to_json(need_sys(sys)).dump(2)); });
}

int fclear_solve(const fclear_system* sys, double damping, int max_iterations, double eps,
                 char** out_json) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    fclear::IterateOptions opt;
    if (damping > 0.0) opt.damping = damping;
    if (max_iterations > 0) opt.max_iterations = max_iterations;
    if (eps > 0.0) opt.eps = eps;
    fclear::IterateResult res = fclear::iterate(s, opt);
    const char* status = res.status == fclear::IterateStatus::Converged ? "converged"
                         : res.status == fclear::IterateStatus::MaxIterations ? "max-iterations"
                                                                              : "oscillating";
    json out{{"status", status},
             {"iterations", res.iterations},
             {"systemHash", fclear::system_hash(s)},
             {"rates", id_map(s, res.rates)},
             {"equities", id_map(s, fclear::equities(s, res.rates))}};
    set_out(out_json, out.dump(2));
  });
}

int fclear_check(const fclear_system* sys, const char* rates_json, double tol, char** out_json) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    auto rates = parse_rates(s, rates_json);
    auto viol = fclear::check_clearing(s, rates, tol > 0 ? tol : 1e-9);
    json vj = json::array();
    for (const auto& v : viol)
      vj.push_back(json{{"bank", s.banks[v.bank].id}, {"kind", v.kind}, {"detail", v.detail}});
    set_out(out_json, json{{"valid", viol.empty()}, {"violations", vj}}.dump(2));
  });
}

int fclear_equities(const fclear_system* sys, const char* rates_json, char** out_json) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    auto rates = parse_rates(s, rates_json);
    set_out(out_json, json{{"equities", id_map(s, fclear::equities(s, rates))}}.dump(2));
  });
}

int fclear_pareto_compare(const fclear_system* sys, const char* r1_json, const char* r2_json,
                          double tol, char** out_verdict) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    auto r1 = parse_rates(s, r1_json);
    auto r2 = parse_rates(s, r2_json);
    auto v = fclear::pareto_compare(s, r1, r2, tol > 0 ? tol : 1e-9);
    const char* name = v == fclear::ParetoVerdict::Equal            ? "Equal"
                       : v == fclear::ParetoVerdict::StrictlyBetter ? "StrictlyBetter"
                       : v == fclear::ParetoVerdict::StrictlyWorse  ? "StrictlyWorse"
                                                                    : "Incomparable";
    set_out(out_verdict, name);
  });
}

int fclear_enumerate(const fclear_system* sys, const char* manifest_json, double tol,
                     char** out_json) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    fclear::SolutionSet set;
    bool continuum = false;
    if (manifest_json && *manifest_json) {
      json manifest = json::parse(manifest_json);
      auto drivers = fclear::drivers_from_manifest(s, manifest);
      fclear::EnumerateOptions opt;
      if (tol > 0) opt.tol = tol;
      // Manifest drivers pin every cycle of a compiled system, so the
      // undamped sweep propagates the exact 0/1 rates the constructions
      // rely on; damping would leave phantom residue on knife-edge banks.
      opt.damping = 1.0;
      opt.max_iterations = 20000;
      set = fclear::enumerate_solutions(s, drivers, opt);
    } else {
      auto res = fclear::enumerate_default_sets(s, tol > 0 ? tol : 1e-9);
      set = std::move(res.set);
      continuum = res.continuum_suspected;
    }
    auto summary = fclear::solution_space_summary(s, set.solutions, tol > 0 ? tol : 1e-9);
    json out = fclear::solution_set_to_json(s, set);
    out["summary"] = json{{"essentialClasses", summary.essential_classes},
                          {"paretoFront", summary.pareto_front}};
    out["continuumSuspected"] = continuum;
    set_out(out_json, out.dump(2));
  });
}

int fclear_compile(const char* request_json, char** out_system_json, char** out_manifest_json) {
  return wrap([&] {
    if (!request_json) throw fclear::Error(fclear::ErrorCode::BadArgument, "null request");
    json req = json::parse(request_json);
    const std::string op = req.value("op", "");
    fclear::CompileOptions opt;
    opt.alpha = req.value("alpha", 1.0);
    opt.beta = req.value("beta", 1.0);
    opt.bounded = req.value("bounded", false);
    opt.modified_gadgets = req.value("modified", false);
    opt.m = req.value("m", 4);
    fclear::CompiledReduction out;
    if (op == "showcase") {
      const std::string kind = req.value("kind", "");
      fclear::ShowcaseKind sk;
      if (kind == "infinite-solutions") sk = fclear::ShowcaseKind::InfiniteSolutions;
      else if (kind == "exponential-solutions") sk = fclear::ShowcaseKind::ExponentialSolutions;
      else if (kind == "four-optima") sk = fclear::ShowcaseKind::FourOptima;
      else throw fclear::Error(fclear::ErrorCode::BadArgument, "unknown showcase kind '" + kind + "'");
      out = fclear::build_showcase(sk, req.value("param", 0));
    } else {
      if (op != "objective" && op != "decision" && op != "representative" && op != "pareto")
        throw fclear::Error(fclear::ErrorCode::BadArgument, "unknown compile op '" + op + "'");
      fclear::Graph g = fclear::parse_graph(req.value("graph", ""));
      if (op == "objective") {
        auto kind = fclear::objective_from_name(req.value("objective", ""));
        if (!kind)
          throw fclear::Error(fclear::ErrorCode::BadArgument, "unknown objective name");
        out = fclear::compile_objective(g, *kind, opt);
      } else if (op == "decision") {
        out = fclear::compile_decision(g, req.value("k", 1), opt);
      } else if (op == "representative") {
        auto res = fclear::compile_representative(g, req.value("k", 1),
                                                  req.value("mGenerating", 2),
                                                  req.value("mControls", 8), opt);
        out = std::move(res.compiled);
      } else {
        auto res = fclear::compile_pareto_suboptimal(g, req.value("k", 1), opt.alpha, opt.beta);
        out = std::move(res.compiled);
      }
    }
    set_out(out_system_json, fclear::system_to_json(out.system).dump(2));
    set_out(out_manifest_json, out.manifest.dump(2));
  });
}

int fclear_bounded_transform(const char* system_json, const char* manifest_json,
                             char** out_system_json, char** out_manifest_json) {
  return wrap([&] {
    if (!system_json || !manifest_json)
      throw fclear::Error(fclear::ErrorCode::BadArgument, "null argument");
    fclear::CompiledReduction in;
    in.system = fclear::system_from_json(json::parse(system_json));
    in.manifest = json::parse(manifest_json);
    fclear::CompiledReduction out = fclear::bounded_weight_transform(in);
    set_out(out_system_json, fclear::system_to_json(out.system).dump(2));
    set_out(out_manifest_json, out.manifest.dump(2));
  });
}

int fclear_oracle(const char* graph_text, char** out_json) {
  return wrap([&] {
    if (!graph_text) throw fclear::Error(fclear::ErrorCode::BadArgument, "null graph text");
    fclear::Graph g = fclear::parse_graph(graph_text);
    if (g.n > 26)
      throw fclear::Error(fclear::ErrorCode::BadArgument,
                          "exhaustive oracle limited to 26 vertices");
    auto witness = [&](int size, bool dominating) {
      for (uint32_t mask = 0; mask < (1u << g.n); ++mask) {
        if (__builtin_popcount(mask) != size || !fclear::is_independent(g, mask)) continue;
        if (dominating && !fclear::is_dominating(g, mask)) continue;
        json w = json::array();
        for (int v = 0; v < g.n; ++v)
          if (mask & (1u << v)) w.push_back(v + 1);
        return w;
      }
      return json::array();
    };
    const int maxis = fclear::max_independent_set(g);
    const int minids = fclear::min_independent_dominating_set(g);
    json out{{"maxis", json{{"size", maxis}, {"witness", witness(maxis, false)}}},
             {"minids", json{{"size", minids}, {"witness", witness(minids, true)}}}};
    set_out(out_json, out.dump(2));
  });
}

int fclear_evaluate_objective(const fclear_system* sys, const char* rates_json,
                              const char* objective_name, const char* designation_json,
                              double* out_value) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    if (!out_value) throw fclear::Error(fclear::ErrorCode::BadArgument, "null out_value");
    auto kind = fclear::objective_from_name(objective_name ? objective_name : "");
    if (!kind) throw fclear::Error(fclear::ErrorCode::BadArgument, "unknown objective name");
    auto rates = parse_rates(s, rates_json);
    fclear::Designation des;
    if (designation_json && *designation_json) {
      json dj = json::parse(designation_json);
      auto resolve = [&](const char* key) -> std::optional<int> {
        if (!dj.contains(key)) return std::nullopt;
        int idx = s.index_of(dj[key].get<std::string>());
        if (idx < 0)
          throw fclear::Error(fclear::ErrorCode::MissingDesignation,
                              std::string("designated bank '") + key + "' not in system");
        return idx;
      };
      des.v = resolve("v");
      des.v1 = resolve("v1");
      des.v2 = resolve("v2");
      if (dj.contains("group2"))
        for (const auto& id : dj["group2"]) {
          int idx = s.index_of(id.get<std::string>());
          if (idx < 0)
            throw fclear::Error(fclear::ErrorCode::MissingDesignation,
                                "designated group bank not in system");
          des.group2.push_back(idx);
        }
    }
    *out_value = fclear::evaluate_objective(s, rates, *kind, des);
  });
}

int fclear_depgraph(const fclear_system* sys, int aggregate, char** out_text, char** out_class) {
  return wrap([&] {
    const auto& s = need_sys(sys);
    auto g = fclear::build_dependency_graph(s, aggregate != 0);
    set_out(out_text, fclear::dependency_graph_to_text(g, s));
    set_out(out_class, fclear::dependency_class_name(fclear::classify_dependency_graph(g)));
  });
}

}  // extern "C"
