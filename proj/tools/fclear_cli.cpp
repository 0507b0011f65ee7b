// fclear: command-line front end over the C API.
//
// Subcommands: solve | enumerate | compile | oracle | evaluate | depgraph |
// showcase. Exit status: 0 success, 1 domain error, 2 usage error. All output
// is deterministically ordered.
#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fclear/fclear.h"

namespace {

using json = nlohmann::json;

const char* kUsage =
    "usage: fclear <command> [flags]\n"
    "\n"
    "commands:\n"
    "  solve      --system FILE [--method picard] [--eps E] [--max-iter N]\n"
    "             [--damping D] [--out FILE]\n"
    "  enumerate  --system FILE [--manifest FILE] [--report all|best]\n"
    "             [--tol T] [--out FILE]\n"
    "  compile    --graph FILE (--objective NAME | --mode decision|representative|pareto)\n"
    "             [--k K] [--multiplier M] [--alpha A] [--beta B] [--bounded]\n"
    "             [--modified] [--mg N] [--mc N] [--out FILE]\n"
    "  oracle     --graph FILE\n"
    "  evaluate   --system FILE --rates FILE [--objective NAME] [--tol T]\n"
    "  depgraph   --system FILE [--check red-cycle] [--per-contract]\n"
    "  showcase   --kind infinite-solutions|exponential-solutions|four-optima\n"
    "             [--param N] [--out FILE]\n";

const std::set<std::string> kBoolFlags = {"--bounded", "--modified", "--per-contract"};

struct Args {
  std::string cmd;
  std::map<std::string, std::string> flags;

  bool has(const std::string& f) const { return flags.count(f) != 0; }
  std::string get(const std::string& f, const std::string& dflt = "") const {
    auto it = flags.find(f);
    return it == flags.end() ? dflt : it->second;
  }
};

int usage_error(const std::string& msg) {
  if (!msg.empty()) std::cerr << "fclear: " << msg << "\n";
  std::cerr << kUsage;
  return 2;
}

bool parse_args(int argc, char** argv, Args& out, std::string& err) {
  if (argc < 2) {
    err = "missing command";
    return false;
  }
  out.cmd = argv[1];
  for (int i = 2; i < argc; ++i) {
    std::string f = argv[i];
    if (f.rfind("--", 0) != 0) {
      err = "unexpected argument '" + f + "'";
      return false;
    }
    if (kBoolFlags.count(f)) {
      out.flags[f] = "1";
      continue;
    }
    if (i + 1 >= argc) {
      err = "flag '" + f + "' needs a value";
      return false;
    }
    out.flags[f] = argv[++i];
  }
  return true;
}

struct CStr {
  char* p = nullptr;
  ~CStr() { fclear_string_free(p); }
};

struct CSys {
  fclear_system* p = nullptr;
  ~CSys() { fclear_system_free(p); }
};

int domain_error() {
  std::cerr << "fclear: " << fclear_last_error() << "\n";
  return 1;
}

bool slurp(const std::string& path, std::string& out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::ostringstream os;
  os << f.rdbuf();
  out = os.str();
  return true;
}

bool spit(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << content;
  return f.good();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double num_flag(const Args& a, const std::string& f, double dflt) {
  if (!a.has(f)) return dflt;
  return std::stod(a.get(f));
}

// Accepts "MaxEquity" or "max-equity" spellings.
std::string canonical_objective(const std::string& name) {
  static const char* kNames[] = {"MaxEquity",    "MinEquity",  "MinDefault",    "MaxSurviving",
                                 "MaxPrefer",    "MinLeastPrefer", "MinUnpaid", "MaxPaid",
                                 "MinPropUnpaid", "MaxPropPaid", "MinDiffEq",   "AllianceBalance"};
  auto squash = [](const std::string& s) {
    std::string out;
    for (char c : s)
      if (c != '-' && c != '_') out.push_back(static_cast<char>(std::tolower(c)));
    return out;
  };
  const std::string want = squash(name);
  for (const char* n : kNames)
    if (squash(n) == want) return n;
  return "";
}

std::vector<std::string> bank_order(const json& system_json) {
  std::vector<std::string> ids;
  if (system_json.contains("banks"))
    for (const auto& b : system_json["banks"]) ids.push_back(b.at("id").get<std::string>());
  return ids;
}

std::string tuple_of(const json& by_id, const std::vector<std::string>& order) {
  std::string out = "(";
  for (size_t i = 0; i < order.size(); ++i) {
    if (i) out += ", ";
    out += fmt(by_id.at(order[i]).get<double>());
  }
  out += ")";
  return out;
}

int cmd_solve(const Args& a) {
  std::string text;
  if (!a.has("--system")) return usage_error("solve needs --system");
  if (!slurp(a.get("--system"), text)) return usage_error("cannot read " + a.get("--system"));
  const std::string method = a.get("--method", "picard");
  if (method != "picard") return usage_error("unknown method '" + method + "'");
  CSys sys;
  if (fclear_system_from_json(text.c_str(), &sys.p) != FCLEAR_OK) return domain_error();
  CStr res;
  if (fclear_solve(sys.p, num_flag(a, "--damping", 1.0),
                   static_cast<int>(num_flag(a, "--max-iter", 10000)),
                   num_flag(a, "--eps", 1e-9), &res.p) != FCLEAR_OK)
    return domain_error();
  json out = json::parse(res.p);
  auto order = bank_order(json::parse(text));
  std::cout << "status: " << out["status"].get<std::string>() << "\n";
  std::cout << "iterations: " << out["iterations"].get<int>() << "\n";
  std::cout << "r = " << tuple_of(out["rates"], order) << "\n";
  std::cout << "q = " << tuple_of(out["equities"], order) << "\n";
  for (const auto& id : order)
    std::cout << id << ": r=" << fmt(out["rates"][id].get<double>())
              << " q=" << fmt(out["equities"][id].get<double>()) << "\n";
  if (a.has("--out")) {
    json rates_file{{"systemHash", out["systemHash"]}, {"rates", out["rates"]}};
    if (!spit(a.get("--out"), rates_file.dump(2) + "\n"))
      return usage_error("cannot write " + a.get("--out"));
  }
  return out["status"] == "converged" ? 0 : 1;
}

int cmd_enumerate(const Args& a) {
  std::string text;
  if (!a.has("--system")) return usage_error("enumerate needs --system");
  if (!slurp(a.get("--system"), text)) return usage_error("cannot read " + a.get("--system"));
  json system_json = json::parse(text, nullptr, false);
  if (system_json.is_discarded()) {
    std::cerr << "fclear: " << a.get("--system") << " is not valid JSON\n";
    return 1;
  }
  std::string manifest_text;
  if (a.has("--manifest")) {
    if (!slurp(a.get("--manifest"), manifest_text))
      return usage_error("cannot read " + a.get("--manifest"));
  } else if (system_json.contains("manifest")) {
    manifest_text = system_json["manifest"].dump();
  }
  CSys sys;
  if (fclear_system_from_json(text.c_str(), &sys.p) != FCLEAR_OK) return domain_error();
  CStr res;
  if (fclear_enumerate(sys.p, manifest_text.empty() ? nullptr : manifest_text.c_str(),
                       num_flag(a, "--tol", 1e-9), &res.p) != FCLEAR_OK)
    return domain_error();
  json out = json::parse(res.p);
  const auto& sols = out["solutions"];
  std::cout << "solutions: " << sols.size() << "\n";
  std::cout << "diverged: " << out["diverged"].size() << "\n";
  std::cout << "essential-classes: " << out["summary"]["essentialClasses"].get<int>() << "\n";
  {
    std::cout << "pareto-front:";
    for (const auto& i : out["summary"]["paretoFront"]) std::cout << " " << i.get<int>();
    std::cout << "\n";
  }

  json manifest = manifest_text.empty() ? json::object() : json::parse(manifest_text);
  const std::string report = a.get("--report", "all");
  if (report == "all") {
    for (const auto& sol : sols) {
      std::cout << (sol["assignment"].get<std::string>().empty()
                        ? std::string("(unconstrained)")
                        : sol["assignment"].get<std::string>());
      if (manifest.contains("decode") && manifest["decode"].contains("activity")) {
        std::cout << "  set={";
        bool first = true;
        int vertex = 0;
        for (const auto& id : manifest["decode"]["activity"]) {
          ++vertex;
          if (sol["rates"][id.get<std::string>()].get<double>() >= 0.5) {
            if (!first) std::cout << ",";
            std::cout << vertex;
            first = false;
          }
        }
        std::cout << "}";
      }
      std::cout << "\n";
    }
  } else if (report == "best") {
    if (!manifest.contains("objective")) {
      std::cerr << "fclear: --report best needs a compiled system with a manifest objective\n";
      return 1;
    }
    const std::string obj = manifest["objective"].get<std::string>();
    const std::string designation =
        manifest.contains("designated") ? manifest["designated"].dump() : "";
    const bool maximize = obj.rfind("Max", 0) == 0;
    bool have = false;
    double best = 0.0;
    std::string best_assignment;
    for (const auto& sol : sols) {
      json rates_file{{"rates", sol["rates"]}};
      double value = 0.0;
      if (fclear_evaluate_objective(sys.p, rates_file.dump().c_str(), obj.c_str(),
                                    designation.empty() ? nullptr : designation.c_str(),
                                    &value) != FCLEAR_OK)
        return domain_error();
      std::cout << (sol["assignment"].get<std::string>().empty()
                        ? std::string("(unconstrained)")
                        : sol["assignment"].get<std::string>())
                << "  " << obj << "=" << fmt(value) << "\n";
      if (!have || (maximize ? value > best : value < best)) {
        have = true;
        best = value;
        best_assignment = sol["assignment"].get<std::string>();
      }
    }
    if (!have) {
      std::cerr << "fclear: no solutions found\n";
      return 1;
    }
    std::cout << "best " << obj << " = " << fmt(best) << "\n";
  } else {
    return usage_error("unknown report '" + report + "'");
  }
  if (a.has("--out") && !spit(a.get("--out"), res.p))
    return usage_error("cannot write " + a.get("--out"));
  return 0;
}

int cmd_compile(const Args& a) {
  std::string graph_text;
  if (!a.has("--graph")) return usage_error("compile needs --graph");
  if (!slurp(a.get("--graph"), graph_text)) return usage_error("cannot read " + a.get("--graph"));
  json req{{"graph", graph_text},
           {"alpha", num_flag(a, "--alpha", 1.0)},
           {"beta", num_flag(a, "--beta", 1.0)},
           {"bounded", a.has("--bounded")},
           {"modified", a.has("--modified")},
           {"m", static_cast<int>(num_flag(a, "--multiplier", 4))},
           {"k", static_cast<int>(num_flag(a, "--k", 1))},
           {"mGenerating", static_cast<int>(num_flag(a, "--mg", 2))},
           {"mControls", static_cast<int>(num_flag(a, "--mc", 8))}};
  std::string mode = a.get("--mode", "");
  if (a.has("--objective")) {
    const std::string canon = canonical_objective(a.get("--objective"));
    if (canon.empty()) return usage_error("unknown objective '" + a.get("--objective") + "'");
    req["op"] = "objective";
    req["objective"] = canon;
  } else if (!mode.empty()) {
    if (mode != "decision" && mode != "representative" && mode != "pareto")
      return usage_error("unknown compile mode '" + mode + "'");
    req["op"] = mode;
  } else if (a.has("--k")) {
    req["op"] = "decision";
  } else {
    return usage_error("compile needs --objective or --mode");
  }
  CStr sys_json, manifest_json;
  if (fclear_compile(req.dump().c_str(), &sys_json.p, &manifest_json.p) != FCLEAR_OK)
    return domain_error();
  json combined = json::parse(sys_json.p);
  json manifest = json::parse(manifest_json.p);
  combined["manifest"] = manifest;
  std::cout << "banks: " << combined["banks"].size() << "\n";
  std::cout << "debts: " << combined["debts"].size() << "\n";
  std::cout << "cds: " << combined["cds"].size() << "\n";
  if (manifest.contains("bounded"))
    std::cout << "max-weight: " << fmt(manifest["bounded"]["maxWeight"].get<double>()) << "\n";
  if (a.has("--out")) {
    if (!spit(a.get("--out"), combined.dump(2) + "\n"))
      return usage_error("cannot write " + a.get("--out"));
    std::cout << "wrote " << a.get("--out") << "\n";
  } else {
    std::cout << combined.dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle(const Args& a) {
  std::string graph_text;
  if (!a.has("--graph")) return usage_error("oracle needs --graph");
  if (!slurp(a.get("--graph"), graph_text)) return usage_error("cannot read " + a.get("--graph"));
  CStr res;
  if (fclear_oracle(graph_text.c_str(), &res.p) != FCLEAR_OK) return domain_error();
  json out = json::parse(res.p);
  auto line = [&](const char* key) {
    std::cout << key << ": " << out[key]["size"].get<int>() << " {";
    bool first = true;
    for (const auto& v : out[key]["witness"]) {
      if (!first) std::cout << ",";
      std::cout << v.get<int>();
      first = false;
    }
    std::cout << "}\n";
  };
  line("maxis");
  line("minids");
  return 0;
}

int cmd_evaluate(const Args& a) {
  std::string sys_text, rates_text;
  if (!a.has("--system") || !a.has("--rates"))
    return usage_error("evaluate needs --system and --rates");
  if (!slurp(a.get("--system"), sys_text)) return usage_error("cannot read " + a.get("--system"));
  if (!slurp(a.get("--rates"), rates_text)) return usage_error("cannot read " + a.get("--rates"));
  CSys sys;
  if (fclear_system_from_json(sys_text.c_str(), &sys.p) != FCLEAR_OK) return domain_error();
  CStr check;
  if (fclear_check(sys.p, rates_text.c_str(), num_flag(a, "--tol", 1e-9), &check.p) != FCLEAR_OK)
    return domain_error();
  json cj = json::parse(check.p);
  if (!cj["valid"].get<bool>()) {
    std::cout << "valid: false\n";
    for (const auto& v : cj["violations"])
      std::cout << "violation: " << v["bank"].get<std::string>() << " "
                << v["kind"].get<std::string>() << " " << fmt(v["detail"].get<double>()) << "\n";
    return 1;
  }
  std::cout << "valid: true\n";
  if (a.has("--objective")) {
    const std::string canon = canonical_objective(a.get("--objective"));
    if (canon.empty()) return usage_error("unknown objective '" + a.get("--objective") + "'");
    json system_json = json::parse(sys_text, nullptr, false);
    std::string designation;
    if (!system_json.is_discarded() && system_json.contains("manifest") &&
        system_json["manifest"].contains("designated"))
      designation = system_json["manifest"]["designated"].dump();
    double value = 0.0;
    if (fclear_evaluate_objective(sys.p, rates_text.c_str(), canon.c_str(),
                                  designation.empty() ? nullptr : designation.c_str(),
                                  &value) != FCLEAR_OK)
      return domain_error();
    std::cout << canon << " = " << fmt(value) << "\n";
  }
  return 0;
}

int cmd_depgraph(const Args& a) {
  std::string text;
  if (!a.has("--system")) return usage_error("depgraph needs --system");
  if (!slurp(a.get("--system"), text)) return usage_error("cannot read " + a.get("--system"));
  CSys sys;
  if (fclear_system_from_json(text.c_str(), &sys.p) != FCLEAR_OK) return domain_error();
  CStr edges, cls;
  if (fclear_depgraph(sys.p, a.has("--per-contract") ? 0 : 1, &edges.p, &cls.p) != FCLEAR_OK)
    return domain_error();
  const std::string klass = cls.p;
  const std::string check = a.get("--check", "");
  if (check == "red-cycle") {
    if (klass == "General") {
      // Name a mutual red pair when one exists; the branching gadget's
      // x <-> y is the canonical case.
      std::set<std::pair<std::string, std::string>> red;
      std::istringstream is(edges.p);
      std::string color, u, v;
      while (is >> color >> u >> v)
        if (color == "R") red.insert({u, v});
      std::string named;
      for (const auto& [u2, v2] : red)
        if (u2 < v2 && red.count({v2, u2})) {
          named = u2 + "<->" + v2;
          break;
        }
      std::cout << "General: red cycle " << (named.empty() ? "present" : named) << "\n";
      return 0;
    }
    std::cout << klass << ": no red-containing cycle\n";
    return 0;
  }
  if (!check.empty()) return usage_error("unknown check '" + check + "'");
  std::cout << "class: " << klass << "\n";
  std::cout << edges.p;
  return 0;
}

int cmd_showcase(const Args& a) {
  const std::string kind = a.get("--kind", "");
  if (kind.empty()) return usage_error("showcase needs --kind");
  json req{{"op", "showcase"}, {"kind", kind}, {"param", static_cast<int>(num_flag(a, "--param", 0))}};
  CStr sys_json, manifest_json;
  if (fclear_compile(req.dump().c_str(), &sys_json.p, &manifest_json.p) != FCLEAR_OK)
    return domain_error();
  json combined = json::parse(sys_json.p);
  json manifest = json::parse(manifest_json.p);
  combined["manifest"] = manifest;
  std::cout << "kind: " << manifest["kind"].get<std::string>() << "\n";
  std::cout << "banks: " << combined["banks"].size() << "\n";
  if (manifest.contains("h")) std::cout << "h: " << fmt(manifest["h"].get<double>()) << "\n";
  if (a.has("--out")) {
    if (!spit(a.get("--out"), combined.dump(2) + "\n"))
      return usage_error("cannot write " + a.get("--out"));
    std::cout << "wrote " << a.get("--out") << "\n";
  } else {
    std::cout << combined.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  std::string err;
  if (!parse_args(argc, argv, args, err)) return usage_error(err);
  try {
    if (args.cmd == "solve") return cmd_solve(args);
    if (args.cmd == "enumerate") return cmd_enumerate(args);
    if (args.cmd == "compile") return cmd_compile(args);
    if (args.cmd == "oracle") return cmd_oracle(args);
    if (args.cmd == "evaluate") return cmd_evaluate(args);
    if (args.cmd == "depgraph") return cmd_depgraph(args);
    if (args.cmd == "showcase") return cmd_showcase(args);
    if (args.cmd == "--help" || args.cmd == "help") {
      std::cout << kUsage;
      return 0;
    }
    if (args.cmd == "--version" || args.cmd == "version") {
      std::cout << "fclear " << fclear_version() << "\n";
      return 0;
    }
  } catch (const std::invalid_argument&) {
    return usage_error("bad numeric flag value");
  } catch (const json::exception& e) {
    std::cerr << "fclear: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fclear: " << e.what() << "\n";
    return 1;
  }
  return usage_error("unknown command '" + args.cmd + "'");
}
