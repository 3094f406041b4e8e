#include "twincast/config.hpp"

#include <cctype>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace twincast {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_int_value(const std::string& s, int& out) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) return false;
    if (v < INT_MIN || v > INT_MAX) return false;
    out = static_cast<int>(v);
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_double_value(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

std::string trim(std::string_view sv) {
  std::size_t a = 0, b = sv.size();
  while (a < b && std::isspace(static_cast<unsigned char>(sv[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(sv[b - 1]))) --b;
  return std::string(sv.substr(a, b - a));
}

}  // namespace

std::vector<std::string> validate_config(const SystemConfig& c) {
  std::vector<std::string> errs;
  auto pos_int = [&](const char* name, int v) {
    if (v <= 0) errs.push_back(std::string(name) + " must be a positive integer");
  };
  pos_int("M", c.M);
  pos_int("N", c.N);
  pos_int("K", c.K);
  pos_int("V", c.V);
  pos_int("C", c.C);
  pos_int("rho", c.rho);
  pos_int("F1", c.F1);
  pos_int("F2", c.F2);
  pos_int("max_clusters", c.max_clusters);
  if (c.rho > c.V) errs.push_back("rho <= V violated");
  auto unit = [&](const char* name, double v) {
    if (!(v >= 0.0 && v <= 1.0))
      errs.push_back(std::string(name) + " must lie in [0, 1]");
  };
  unit("lambda", c.lambda);
  unit("lambda_tilde", c.lambda_tilde);
  auto pos = [&](const char* name, double v) {
    if (!(v > 0.0)) errs.push_back(std::string(name) + " must be > 0");
  };
  pos("B", c.B);
  pos("omega", c.omega);
  pos("mu", c.mu);
  pos("T", c.T);
  pos("varpi1", c.varpi1);
  pos("varpi2", c.varpi2);
  pos("varpi3", c.varpi3);
  pos("varpi4", c.varpi4);
  pos("delta1", c.delta1);
  pos("delta2", c.delta2);
  pos("delta3", c.delta3);
  return errs;
}

const char* demand_mode_name(DemandMode mode) {
  return mode == DemandMode::Literal ? "literal" : "dimensional";
}

const char* group_swipe_mode_name(GroupSwipeMode mode) {
  return mode == GroupSwipeMode::Mean ? "mean" : "literal";
}

std::string serialize_config(const SystemConfig& c) {
  std::ostringstream os;
  os << "M = " << c.M << "\n";
  os << "B = " << fmt_double(c.B) << "\n";
  os << "N = " << c.N << "\n";
  os << "omega = " << fmt_double(c.omega) << "\n";
  os << "mu = " << fmt_double(c.mu) << "\n";
  os << "T = " << fmt_double(c.T) << "\n";
  os << "K = " << c.K << "\n";
  os << "V = " << c.V << "\n";
  os << "C = " << c.C << "\n";
  os << "rho = " << c.rho << "\n";
  os << "F1 = " << c.F1 << "\n";
  os << "F2 = " << c.F2 << "\n";
  os << "lambda = " << fmt_double(c.lambda) << "\n";
  os << "lambda_tilde = " << fmt_double(c.lambda_tilde) << "\n";
  os << "varpi1 = " << fmt_double(c.varpi1) << "\n";
  os << "varpi2 = " << fmt_double(c.varpi2) << "\n";
  os << "varpi3 = " << fmt_double(c.varpi3) << "\n";
  os << "varpi4 = " << fmt_double(c.varpi4) << "\n";
  os << "delta1 = " << fmt_double(c.delta1) << "\n";
  os << "delta2 = " << fmt_double(c.delta2) << "\n";
  os << "delta3 = " << fmt_double(c.delta3) << "\n";
  os << "demand_mode = " << demand_mode_name(c.demand_mode) << "\n";
  os << "max_clusters = " << c.max_clusters << "\n";
  os << "group_swipe_mode = " << group_swipe_mode_name(c.group_swipe_mode)
     << "\n";
  return os.str();
}

ConfigParse parse_config(std::string_view text) {
  ConfigParse result;
  SystemConfig& c = result.config;

  std::map<std::string, bool> seen;
  using Setter = std::function<bool(const std::string&)>;
  std::map<std::string, Setter> setters;
  auto int_field = [&](const char* key, int& field) {
    setters[key] = [&field](const std::string& v) {
      return parse_int_value(v, field);
    };
  };
  auto dbl_field = [&](const char* key, double& field) {
    setters[key] = [&field](const std::string& v) {
      return parse_double_value(v, field);
    };
  };
  int_field("M", c.M);
  dbl_field("B", c.B);
  int_field("N", c.N);
  dbl_field("omega", c.omega);
  dbl_field("mu", c.mu);
  dbl_field("T", c.T);
  int_field("K", c.K);
  int_field("V", c.V);
  int_field("C", c.C);
  int_field("rho", c.rho);
  int_field("F1", c.F1);
  int_field("F2", c.F2);
  dbl_field("lambda", c.lambda);
  dbl_field("lambda_tilde", c.lambda_tilde);
  dbl_field("varpi1", c.varpi1);
  dbl_field("varpi2", c.varpi2);
  dbl_field("varpi3", c.varpi3);
  dbl_field("varpi4", c.varpi4);
  dbl_field("delta1", c.delta1);
  dbl_field("delta2", c.delta2);
  dbl_field("delta3", c.delta3);
  int_field("max_clusters", c.max_clusters);
  setters["demand_mode"] = [&c](const std::string& v) {
    if (v == "literal") c.demand_mode = DemandMode::Literal;
    else if (v == "dimensional") c.demand_mode = DemandMode::Dimensional;
    else return false;
    return true;
  };
  setters["group_swipe_mode"] = [&c](const std::string& v) {
    if (v == "mean") c.group_swipe_mode = GroupSwipeMode::Mean;
    else if (v == "literal") c.group_swipe_mode = GroupSwipeMode::LiteralClamped;
    else return false;
    return true;
  };

  // Core parameter keys that must appear in every config file; the three
  // mode/cluster keys are optional and default.
  const std::vector<std::string> required = {
      "M",      "B",      "N",      "omega",  "mu",     "T",      "K",
      "V",      "C",      "rho",    "F1",     "F2",     "lambda",
      "lambda_tilde", "varpi1", "varpi2", "varpi3", "varpi4", "delta1",
      "delta2", "delta3"};

  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back("line " + std::to_string(line_no) +
                              ": expected key = value");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) {
      result.errors.push_back("unknown key '" + key + "'");
      continue;
    }
    if (seen[key]) {
      result.errors.push_back("duplicate key '" + key + "'");
      continue;
    }
    seen[key] = true;
    if (!it->second(value)) {
      result.errors.push_back("invalid value for '" + key + "': " + value);
    }
  }
  for (const auto& key : required) {
    if (!seen[key]) result.errors.push_back("missing key '" + key + "'");
  }
  if (result.errors.empty()) {
    auto verrs = validate_config(c);
    result.errors.insert(result.errors.end(), verrs.begin(), verrs.end());
  }
  return result;
}

ConfigParse load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ConfigParse r;
    r.errors.push_back("cannot open config file '" + path + "'");
    return r;
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace twincast
