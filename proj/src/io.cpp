#include "fclear/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fclear {

namespace {

using json = nlohmann::json;

std::string require_string(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw Error(ErrorCode::ParseError, std::string("missing or non-string field '") + key + "'");
  return j[key].get<std::string>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

int resolve(const FinancialSystem& sys, const std::string& id, const char* what) {
  int idx = sys.index_of(id);
  if (idx < 0)
    throw Error(ErrorCode::ParseError, std::string(what) + " references unknown bank '" + id + "'");
  return idx;
}

// Shortest decimal that round-trips a double.
std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  for (int prec = 1; prec <= 16; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof probe, "%.*g", prec, x);
    std::sscanf(probe, "%lf", &back);
    if (back == x) return probe;
  }
  return buf;
}

}  // namespace

json system_to_json(const FinancialSystem& sys) {
  json banks = json::array();
  for (const auto& b : sys.banks) {
    json bj = json{{"id", b.id}, {"external", b.external}};
    if (!b.role.empty()) bj["role"] = b.role;
    banks.push_back(std::move(bj));
  }
  json debts = json::array();
  for (const auto& d : sys.debts)
    debts.push_back(json{{"debtor", sys.banks[d.debtor].id},
                         {"creditor", sys.banks[d.creditor].id},
                         {"weight", d.weight}});
  json cdss = json::array();
  for (const auto& c : sys.cdss)
    cdss.push_back(json{{"debtor", sys.banks[c.debtor].id},
                        {"creditor", sys.banks[c.creditor].id},
                        {"reference", sys.banks[c.reference].id},
                        {"weight", c.weight}});
  return json{{"version", 1}, {"alpha", sys.alpha}, {"beta", sys.beta},
              {"banks", banks}, {"debts", debts},  {"cds", cdss}};
}

FinancialSystem system_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "system file must be a JSON object");
  FinancialSystem sys;
  sys.alpha = number_or(j, "alpha", 1.0);
  sys.beta = number_or(j, "beta", 1.0);
  if (!j.contains("banks") || !j["banks"].is_array())
    throw Error(ErrorCode::ParseError, "system file needs a 'banks' array");
  for (const auto& bj : j["banks"]) {
    std::string role = bj.contains("role") ? require_string(bj, "role") : "";
    sys.add_bank(require_string(bj, "id"), number_or(bj, "external", 0.0), role);
  }
  if (j.contains("debts"))
    for (const auto& dj : j["debts"])
      sys.add_debt(resolve(sys, require_string(dj, "debtor"), "debt"),
                   resolve(sys, require_string(dj, "creditor"), "debt"),
                   number_or(dj, "weight", 0.0));
  if (j.contains("cds"))
    for (const auto& cj : j["cds"])
      sys.add_cds(resolve(sys, require_string(cj, "debtor"), "cds"),
                  resolve(sys, require_string(cj, "creditor"), "cds"),
                  resolve(sys, require_string(cj, "reference"), "cds"),
                  number_or(cj, "weight", 0.0));
  sys.validate();
  return sys;
}

std::string canonical_serialization(const FinancialSystem& sys) {
  std::ostringstream os;
  os << "fclear-system-v1\n";
  os << "alpha " << format_double(sys.alpha) << "\n";
  os << "beta " << format_double(sys.beta) << "\n";

  std::vector<int> order(sys.banks.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return sys.banks[a].id < sys.banks[b].id; });
  for (int b : order)
    os << "bank " << sys.banks[b].id << " " << format_double(sys.banks[b].external) << "\n";

  std::vector<std::string> lines;
  for (const auto& d : sys.debts)
    lines.push_back("debt " + sys.banks[d.debtor].id + " " + sys.banks[d.creditor].id + " " +
                    format_double(d.weight));
  for (const auto& c : sys.cdss)
    lines.push_back("cds " + sys.banks[c.debtor].id + " " + sys.banks[c.creditor].id + " " +
                    sys.banks[c.reference].id + " " + format_double(c.weight));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << "\n";
  return os.str();
}

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string system_hash(const FinancialSystem& sys) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(canonical_serialization(sys)));
  return buf;
}

json rates_to_json(const FinancialSystem& sys, const std::vector<double>& rates, bool with_hash) {
  if (static_cast<int>(rates.size()) != sys.size())
    throw Error(ErrorCode::BadArgument, "rate vector length does not match the system");
  json r = json::object();
  for (int b = 0; b < sys.size(); ++b) r[sys.banks[b].id] = rates[b];
  json out = json{{"rates", r}};
  if (with_hash) out["systemHash"] = system_hash(sys);
  return out;
}

std::vector<double> rates_from_json(const FinancialSystem& sys, const json& j) {
  if (!j.is_object() || !j.contains("rates") || !j["rates"].is_object())
    throw Error(ErrorCode::ParseError, "recovery file needs a 'rates' object");
  if (j.contains("systemHash")) {
    const std::string want = j["systemHash"].get<std::string>();
    const std::string have = system_hash(sys);
    if (want != have)
      throw Error(ErrorCode::HashMismatch,
                  "recovery file was written for system " + want + ", not " + have);
  }
  std::vector<double> rates(sys.size(), -1.0);
  for (const auto& [id, val] : j["rates"].items()) {
    int idx = resolve(sys, id, "rates");
    if (!val.is_number()) throw Error(ErrorCode::ParseError, "rate for '" + id + "' not a number");
    rates[idx] = val.get<double>();
  }
  for (int b = 0; b < sys.size(); ++b)
    if (rates[b] < 0.0)
      throw Error(ErrorCode::ParseError, "recovery file misses bank '" + sys.banks[b].id + "'");
  return rates;
}

json solution_set_to_json(const FinancialSystem& sys, const SolutionSet& set) {
  json sols = json::array();
  for (const auto& s : set.solutions) {
    json r = json::object();
    for (int b = 0; b < sys.size(); ++b) r[sys.banks[b].id] = s.rates[b];
    sols.push_back(json{{"assignment", s.assignment}, {"rates", r}});
  }
  return json{{"count", set.solutions.size()},
              {"solutions", sols},
              {"diverged", set.diverged}};
}

Graph parse_graph(const std::string& text) {
  Graph g;
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  long want_edges = -1;
  auto add_edge = [&](long a, long b, int lineno) {
    if (a < 1 || b < 1 || a > g.n || b > g.n || a == b)
      throw Error(ErrorCode::ParseError,
                  "graph line " + std::to_string(lineno) + ": bad edge endpoints");
    int u = static_cast<int>(a - 1), v = static_cast<int>(b - 1);
    if (u > v) std::swap(u, v);
    if (std::find(g.edges.begin(), g.edges.end(), std::make_pair(u, v)) == g.edges.end())
      g.edges.emplace_back(u, v);
  };
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;       // blank
    if (tok == "c" || tok[0] == '#') continue;  // comment
    if (tok == "p") {
      std::string kind;
      long n = 0, m2 = 0;
      if (!(ls >> kind >> n >> m2) || n <= 0)
        throw Error(ErrorCode::ParseError, "bad DIMACS problem line");
      g.n = static_cast<int>(n);
      want_edges = m2;
      have_header = true;
      continue;
    }
    if (tok == "e") {
      long a = 0, b = 0;
      if (!have_header || !(ls >> a >> b))
        throw Error(ErrorCode::ParseError,
                    "graph line " + std::to_string(lineno) + ": bad edge line");
      add_edge(a, b, lineno);
      continue;
    }
    // Plain edge-list: first non-comment line is "N M", the rest are "a b".
    char* end = nullptr;
    long first = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
      throw Error(ErrorCode::ParseError, "graph line " + std::to_string(lineno) + ": expected numbers");
    long second = 0;
    if (!(ls >> second))
      throw Error(ErrorCode::ParseError, "graph line " + std::to_string(lineno) + ": expected two numbers");
    if (!have_header) {
      if (first <= 0) throw Error(ErrorCode::ParseError, "graph needs a positive vertex count");
      g.n = static_cast<int>(first);
      want_edges = second;
      have_header = true;
    } else {
      add_edge(first, second, lineno);
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "empty graph file");
  if (want_edges >= 0 && static_cast<long>(g.edges.size()) != want_edges)
    throw Error(ErrorCode::ParseError,
                "graph header announces " + std::to_string(want_edges) + " edges, found " +
                    std::to_string(g.edges.size()));
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  os << g.n << " " << g.edges.size() << "\n";
  for (auto [a, b] : g.edges) os << a + 1 << " " << b + 1 << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, "cannot open '" + path + "' for writing");
  f << content;
  if (!f.good()) throw Error(ErrorCode::ParseError, "failed writing '" + path + "'");
}

}  // namespace fclear
