#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "phaseflow/errors.hpp"
#include "phaseflow/version.hpp"

namespace phaseflow::cli {

namespace {

const std::vector<std::string> kSpecCommands{"profile", "interp", "cell", "gamma"};
const std::vector<std::string> kSolverCommands{"profile", "cell", "gamma"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (!s.empty() && s.back() == ',') parts.emplace_back();
  return parts;
}

double to_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || p != end || !std::isfinite(v))
    throw UsageError("--" + key + ": '" + s + "' is not a finite number");
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || p != end) throw UsageError("--" + key + ": '" + s + "' is not an integer");
  return v;
}

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

void one_of(const RunConfig& c, const std::string& key, std::initializer_list<const char*> allowed) {
  const auto v = c.text(key);
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw UsageError("--" + key + ": '" + v + "' is not one of " + list);
}

void strictly_monotone(const std::vector<double>& v, const std::string& key, bool increasing) {
  require(!v.empty(), "--" + key + ": schedule is empty");
  for (double x : v) require(x > 0.0, "--" + key + ": entries must be positive");
  for (std::size_t i = 1; i < v.size(); ++i)
    require(increasing ? v[i] > v[i - 1] : v[i] < v[i - 1],
            "--" + key + ": schedule must be strictly " + (increasing ? "increasing" : "decreasing"));
}

void validate(const RunConfig& c) {
  const auto& cmd = c.command;
  require(c.integer("threads") >= 0, "--threads must be >= 0");
  require(c.integer("seed") >= 0, "--seed must be >= 0");
  one_of(c, "cache", {"reuse", "recompute"});
  require(!c.text("out").empty(), "--out must not be empty");

  auto has = [&](const std::string& key) { return c.values.contains(key); };

  if (has("k")) {
    const auto k = c.integer("k");
    require(k >= 1 && k <= 4, "--k must be between 1 and 4 (got " + std::to_string(k) + ")");
    if (has("q") && !c.reals("q").empty()) {
      const auto q = c.reals("q");
      require(q.size() == static_cast<std::size_t>(k),
              "--q needs k = " + std::to_string(k) + " entries q_1..q_k");
      require(q.back() == 1.0, "--q: the top coefficient q_k must be 1");
    }
  }
  if (has("extrapolation")) one_of(c, "extrapolation", {"none", "linear"});
  if (has("method")) one_of(c, "method", {"newton", "lbfgs"});
  if (has("field-format")) one_of(c, "field-format", {"csv", "binary"});
  if (has("T")) strictly_monotone(c.reals("T"), "T", true);
  if (has("T")) for (double T : c.reals("T")) require(T > 0.5, "--T: entries must exceed 1/2");
  if (has("h")) require(c.real("h") >= 0.0, "--h must be >= 0 (0 picks the default)");
  if (has("tol")) require(c.real("tol") > 0.0, "--tol must be positive");

  if (cmd == "interp") {
    const auto k = c.integer("k");
    require(k >= 2, "interp needs k >= 2");
    const auto ell = c.integer("ell");
    require(ell >= 1 && ell < k, "--ell must satisfy 1 <= ell <= k - 1");
    one_of(c, "family", {"all", "fourier", "spline", "descent"});
    require(c.integer("budget") >= 100, "--budget must be >= 100");
    require(c.real("q-test") >= 0.0, "--q-test must be >= 0");
    require(c.real("eps") >= 0.0, "--eps must be >= 0");
    require(c.integer("tests") >= 0, "--tests must be >= 0");
    require(c.flag("adversarial") || !c.text("field").empty(), "interp needs --adversarial or --field");
    require(c.flag("adversarial") || c.real("q-test") > 0.0, "--field checks need --q-test > 0");
  }
  if (cmd == "cell") {
    strictly_monotone(c.reals("eps"), "eps", false);
    require(c.integer("angles") >= 0, "--angles must be >= 0");
    require(c.integer("angles") > 0 || !c.texts("nu").empty(), "cell needs --nu or --angles");
    for (const auto& t : c.texts("nu")) parse_angle(t);
    require(c.integer("cells") >= 0, "--cells must be >= 0");
    require(c.real("r-band") > 0.0, "--r-band must be positive");
    one_of(c, "lateral", {"periodic", "clamped"});
    require(c.integer("starts") >= 0, "--starts must be >= 0");
  }
  if (cmd == "gamma") {
    const auto dim = c.integer("dim");
    require(dim == 1 || dim == 2, "--dim must be 1 or 2");
    strictly_monotone(c.reals("eps"), "eps", false);
    parse_angle(c.text("nu"));
    require(c.integer("n") >= 16, "--n must be >= 16");
    require(c.integer("cells") >= 0, "--cells must be >= 0");
  }
  if (cmd == "norms") {
    const auto d = c.integer("d");
    const auto ell = c.integer("ell");
    require(d >= 1 && d <= 3, "--d must be between 1 and 3");
    require(ell >= 1 && ell <= 8, "--ell must be between 1 and 8");
    require(c.integer("budget") >= 1, "--budget must be >= 1");
  }
  if (cmd == "check-well") {
    require(c.real("lower") < c.real("upper"), "--lower must be below --upper");
    require(c.real("step") > 0.0, "--step must be positive");
    require(c.real("alpha") > 0.0 && c.real("beta") > 0.0, "--alpha and --beta must be positive");
  }
}

json input_digests(const RunConfig& c) {
  json d = json::object();
  auto add = [&](const std::string& key, const std::string& path) {
    if (path.empty()) return;
    try {
      d[key] = sha256_file(path);
    } catch (const IoError&) {
      d[key] = "missing";  // the run itself reports the I/O error
    }
  };
  if (c.values.contains("well") && c.text("well") != "quartic") add("well", c.text("well"));
  if (c.command == "gamma" && c.integer("dim") == 2) {
    const auto g = c.text("g-table");
    add("g-table", g.empty() ? (c.out_dir() / "cell_polar.csv").string() : g);
  }
  if (c.values.contains("field")) add("field", c.text("field"));
  for (const char* key : {"norm", "compare"}) {
    if (!c.values.contains(key)) continue;
    const auto tok = c.text(key);
    if (tok.rfind("wfrob:", 0) == 0) add(key, tok.substr(6));
  }
  return d;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> cmds{"profile", "interp", "cell", "gamma", "norms", "check-well"};
  return cmds;
}

const std::vector<KeyInfo>& registry() {
  using K = KeyKind;
  static const std::vector<KeyInfo> keys{
      {"out", K::Text, "phaseflow-out", {}, "output directory", false},
      {"cache", K::Text, "reuse", {}, "reuse | recompute", false},
      {"cache-dir", K::Text, "", {}, "cache location (default <out>/.cache)", false},
      {"threads", K::Int, 0, {}, "worker threads, 0 = all cores", false},
      {"seed", K::Int, 1, {}, "random seed"},

      {"k", K::Int, 2, kSpecCommands, "highest derivative order"},
      {"q", K::RealList, json::array(), kSolverCommands, "coefficients q_1..q_k (default 0,...,0,1)"},
      {"norm", K::Text, "operatorial", kSolverCommands, "operatorial | frobenius | maxcomp | wfrob:<csv>"},
      {"well", K::Text, "quartic", {"profile", "interp", "cell", "gamma", "check-well"}, "quartic or a CSV path"},
      {"extrapolation", K::Text, "none", {"profile", "interp", "cell", "gamma", "check-well"},
       "table potentials: none | linear"},
      {"method", K::Text, "newton", kSolverCommands, "newton | lbfgs"},
      {"field-format", K::Text, "csv", kSolverCommands, "csv | binary"},

      {"T", K::RealList, json::array({2.0, 4.0, 8.0, 16.0}), {"profile", "gamma"}, "half-widths for m(T)"},
      {"h", K::Real, 0.0, {"profile", "gamma"}, "profile grid spacing, 0 = default for k"},
      {"tol", K::Real, 1e-4, {"profile", "gamma"}, "tolerance on |m(T_last) - m(T_prev)|"},
      {"multistart", K::Flag, true, {"profile"}, "extra ramp widths and perturbed starts"},
      {"tail-threshold", K::Real, 1e-3, {"profile"}, "bound on derivatives near the ends"},

      {"ell", K::Int, 1, {"interp"}, "lower order"},
      {"adversarial", K::Flag, false, {"interp"}, "estimate the threshold q_hat"},
      {"family", K::Text, "all", {"interp"}, "all | fourier | spline | descent"},
      {"budget", K::Int, 1000, {"interp", "norms"}, "candidates per family"},
      {"field", K::Text, "", {"interp"}, "1D field CSV to check"},
      {"eps", K::Real, 0.0, {"interp"}, "scaled form when > 0"},
      {"q-test", K::Real, 0.0, {"interp"}, "coefficient to test (0 = 0.9 q_hat)"},
      {"tests", K::Int, 0, {"interp"}, "random test functions checked at q-test"},

      {"eps", K::RealList, json::array({0.2, 0.1, 0.05}), {"cell"}, "decreasing eps schedule"},
      {"nu", K::TextList, json::array({"90deg"}), {"cell"}, "normal angles (90deg, 0.5pi, radians)"},
      {"angles", K::Int, 0, {"cell"}, "scan n angles in [0, pi) instead of --nu"},
      {"cells", K::Int, 0, {"cell", "gamma"}, "cells per axis, 0 = ceil(6 / eps)"},
      {"r-band", K::Real, 0.1, {"cell"}, "width of the fixed boundary bands"},
      {"lateral", K::Text, "periodic", {"cell"}, "periodic | clamped"},
      {"tol", K::Real, 1e-2, {"cell"}, "tolerance on the last two g_eps"},
      {"basis-check", K::Flag, false, {"cell"}, "solve with the flipped tangent as well"},
      {"starts", K::Int, 3, {"cell"}, "perturbed starts at the first eps"},

      {"dim", K::Int, 1, {"gamma"}, "1 or 2"},
      {"eps", K::RealList, json::array({0.1, 0.05, 0.02, 0.01}), {"gamma"}, "decreasing eps schedule"},
      {"nu", K::Text, "90deg", {"gamma"}, "interface normal (2D)"},
      {"g-table", K::Text, "", {"gamma"}, "g table CSV (2D); default <out>/cell_polar.csv"},
      {"n", K::Int, 8000, {"gamma"}, "intervals on (-1, 1) (1D)"},

      {"d", K::Int, 2, {"norms"}, "dimension"},
      {"ell", K::Int, 2, {"norms"}, "tensor order"},
      {"norm", K::Text, "operatorial", {"norms"}, "norm to evaluate"},
      {"compare", K::Text, "frobenius", {"norms"}, "norm for the equivalence constants"},
      {"tensor", K::RealList, json::array(), {"norms"}, "stored components in sorted-index order"},

      {"lower", K::Real, -3.0, {"check-well"}, "scan start"},
      {"upper", K::Real, 3.0, {"check-well"}, "scan end"},
      {"step", K::Real, 1e-3, {"check-well"}, "scan spacing"},
      {"alpha", K::Real, 1.0, {"check-well"}, "quadratic growth constant"},
      {"beta", K::Real, 1.0, {"check-well"}, "envelope constant"},
  };
  return keys;
}

std::vector<const KeyInfo*> keys_for(const std::string& command) {
  std::vector<const KeyInfo*> out;
  for (const auto& k : registry())
    if (k.commands.empty() || std::ranges::find(k.commands, command) != k.commands.end()) out.push_back(&k);
  return out;
}

json coerce(const KeyInfo& key, const json& raw) {
  const std::string& name = key.name;
  auto as_string = [&]() -> std::string {
    if (!raw.is_string()) throw UsageError("--" + name + ": expected a string");
    return raw.get<std::string>();
  };
  switch (key.kind) {
    case KeyKind::Int:
      if (raw.is_number_integer()) return raw;
      if (raw.is_number_float()) {
        const double v = raw.get<double>();
        if (v == std::floor(v) && std::abs(v) < 9e15) return static_cast<long long>(v);
        throw UsageError("--" + name + ": expected an integer");
      }
      return to_integer(name, trim(as_string()));
    case KeyKind::Real:
      if (raw.is_number()) return raw.get<double>();
      return to_real(name, trim(as_string()));
    case KeyKind::Text:
      return as_string();
    case KeyKind::Flag: {
      if (raw.is_boolean()) return raw;
      const auto v = lower(trim(as_string()));
      if (v.empty() || v == "true" || v == "1" || v == "yes" || v == "on") return true;
      if (v == "false" || v == "0" || v == "no" || v == "off") return false;
      throw UsageError("--" + name + ": '" + v + "' is not a boolean");
    }
    case KeyKind::RealList: {
      json out = json::array();
      if (raw.is_array()) {
        for (const auto& e : raw) {
          if (e.is_number()) out.push_back(e.get<double>());
          else if (e.is_string()) out.push_back(to_real(name, trim(e.get<std::string>())));
          else throw UsageError("--" + name + ": list entries must be numbers");
        }
      } else if (raw.is_number()) {
        out.push_back(raw.get<double>());
      } else {
        const auto s = trim(as_string());
        if (!s.empty())
          for (const auto& part : split(s)) out.push_back(to_real(name, part));
      }
      return out;
    }
    case KeyKind::TextList: {
      json out = json::array();
      if (raw.is_array()) {
        for (const auto& e : raw) {
          if (!e.is_string()) throw UsageError("--" + name + ": list entries must be strings");
          out.push_back(trim(e.get<std::string>()));
        }
      } else {
        const auto s = trim(as_string());
        if (!s.empty())
          for (const auto& part : split(s)) {
            if (part.empty()) throw UsageError("--" + name + ": empty list entry");
            out.push_back(part);
          }
      }
      return out;
    }
  }
  throw UsageError("--" + name + ": unsupported key type");
}

long long RunConfig::integer(const std::string& key) const { return values.at(key).get<long long>(); }
double RunConfig::real(const std::string& key) const { return values.at(key).get<double>(); }
std::string RunConfig::text(const std::string& key) const { return values.at(key).get<std::string>(); }
bool RunConfig::flag(const std::string& key) const { return values.at(key).get<bool>(); }
std::vector<double> RunConfig::reals(const std::string& key) const {
  return values.at(key).get<std::vector<double>>();
}
std::vector<std::string> RunConfig::texts(const std::string& key) const {
  return values.at(key).get<std::vector<std::string>>();
}

std::filesystem::path RunConfig::cache_dir() const {
  const auto d = text("cache-dir");
  return d.empty() ? out_dir() / ".cache" : std::filesystem::path(d);
}

RunConfig build_config(const std::string& command, const std::string& config_path,
                       const std::vector<std::pair<std::string, std::string>>& flags) {
  if (std::ranges::find(subcommands(), command) == subcommands().end())
    throw UsageError("unknown subcommand '" + command + "'");
  const auto keys = keys_for(command);
  auto find = [&](const std::string& name) -> const KeyInfo* {
    for (const auto* k : keys)
      if (k->name == name) return k;
    return nullptr;
  };

  RunConfig c;
  c.command = command;
  c.values = json::object();
  for (const auto* k : keys) c.values[k->name] = k->fallback;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file " + config_path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError(config_path + ": invalid JSON (" + e.what() + ")");
    }
    if (!file.is_object()) throw UsageError(config_path + ": expected a flat JSON object");
    for (const auto& [name, raw] : file.items()) {
      if (name == "header") continue;  // provenance block of an echoed config
      if (name == "subcommand") {
        if (!raw.is_string() || raw.get<std::string>() != command)
          throw UsageError(config_path + ": subcommand " + raw.dump() + " does not match '" + command + "'");
        continue;
      }
      const auto* k = find(name);
      if (k == nullptr) throw UsageError(config_path + ": unknown key '" + name + "' for " + command);
      c.values[name] = coerce(*k, raw);
    }
  }

  for (const auto& [name, raw] : flags) {
    const auto* k = find(name);
    if (k == nullptr) throw UsageError("unknown option --" + name + " for " + command);
    c.values[name] = coerce(*k, json(raw));
  }

  validate(c);
  c.threads = resolve_threads(c.integer("threads"));
  c.values["threads"] = c.threads;

  json keyed = json::object();
  for (const auto* k : keys)
    if (k->hashed) keyed[k->name] = c.values[k->name];
  const json basis{{"version", kVersion}, {"command", command}, {"config", keyed}, {"inputs", input_digests(c)}};
  c.hash = sha256_hex(basis.dump());
  return c;
}

double parse_angle(const std::string& token) {
  const auto t = lower(trim(token));
  auto number = [&](const std::string& s) { return to_real("nu", s); };
  if (t.size() > 3 && t.ends_with("deg")) return number(t.substr(0, t.size() - 3)) * std::numbers::pi / 180.0;
  if (t == "pi") return std::numbers::pi;
  if (t.size() > 2 && t.ends_with("pi")) return number(t.substr(0, t.size() - 2)) * std::numbers::pi;
  return number(t);
}

unsigned resolve_threads(long long requested) {
  long long n = requested;
  if (const char* env = std::getenv("PHASEFLOW_THREADS"); env != nullptr && *env != '\0') {
    try {
      n = to_integer("threads", trim(env));
    } catch (const UsageError&) {
      throw UsageError(std::string("PHASEFLOW_THREADS: '") + env + "' is not an integer");
    }
    if (n < 0) throw UsageError("PHASEFLOW_THREADS must be >= 0");
  }
  if (n == 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(n);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace phaseflow::cli
