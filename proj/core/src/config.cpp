#include "ends/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ends {
namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& path, int line, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || t.empty())
    fail(path, line, "expected a number, got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& path, int line, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(path, line, "expected true/false, got '" + t + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& path, int line,
                                      const std::string& text) {
  std::vector<double> out;
  for (const auto& piece : split(text, ','))
    out.push_back(parse_number(path, line, piece));
  return out;
}

std::vector<ProbePoint> parse_probes(const std::string& path, int line,
                                     const std::string& text) {
  // entries separated by ';', each "w0[,w1]:r"
  std::vector<ProbePoint> out;
  for (const auto& raw : split(text, ';')) {
    const std::string entry = trim(raw);
    if (entry.empty()) continue;
    const std::size_t colon = entry.rfind(':');
    if (colon == std::string::npos)
      fail(path, line, "probe '" + entry + "' needs the form omega:r");
    ProbePoint p;
    p.r = parse_number(path, line, entry.substr(colon + 1));
    const auto coords = parse_number_list(path, line, entry.substr(0, colon));
    if (coords.empty() || coords.size() > 2)
      fail(path, line, "probe '" + entry + "' needs 1 or 2 angular coordinates");
    p.omega.w0 = coords[0];
    p.omega.w1 = coords.size() > 1 ? coords[1] : 0.0;
    out.push_back(p);
  }
  if (out.empty()) fail(path, line, "empty probe list");
  return out;
}

ExpectRule parse_expect(const std::string& path, int line, const std::string& key,
                        const std::string& value) {
  ExpectRule rule;
  rule.key = key;
  rule.line = line;
  const std::string v = trim(value);
  const auto starts = [&](const char* p) { return v.rfind(p, 0) == 0; };
  if (starts("le:")) {
    rule.op = ExpectRule::Op::Le;
    rule.number = parse_number(path, line, v.substr(3));
  } else if (starts("ge:")) {
    rule.op = ExpectRule::Op::Ge;
    rule.number = parse_number(path, line, v.substr(3));
  } else if (starts("near:")) {
    rule.op = ExpectRule::Op::Near;
    const auto parts = split(v.substr(5), ':');
    if (parts.size() != 2) fail(path, line, "expected near:VALUE:TOL");
    rule.number = parse_number(path, line, parts[0]);
    rule.tol = parse_number(path, line, parts[1]);
  } else {
    rule.op = ExpectRule::Op::Equals;
    rule.literal = v;
  }
  return rule;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path);

  ExperimentConfig cfg;
  cfg.path = path;

  std::string section;
  std::string line_text;
  int line = 0;
  while (std::getline(is, line_text)) {
    ++line;
    const std::string t = trim(line_text);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(path, line, "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      static const char* known[] = {"manifold", "comparison", "criterion",
                                    "barrier", "grid", "exhaust", "run", "expect"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* s) {
            return section == s;
          }) == std::end(known))
        fail(path, line, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) fail(path, line, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(path, line, "empty key");
    if (section.empty()) fail(path, line, "key outside any [section]");

    if (section == "expect") {
      cfg.expects.push_back(parse_expect(path, line, key, value));
      continue;
    }

    const auto is_key = [&](const char* sec, const char* k) {
      return section == sec && key == k;
    };
    if (is_key("manifold", "topology")) {
      if (value == "single_end") cfg.topology = Topology::SingleEnd;
      else if (value == "two_ends") cfg.topology = Topology::TwoEnds;
      else fail(path, line, "topology must be single_end or two_ends");
    } else if (is_key("manifold", "cross_section")) {
      if (value != "circle" && value != "torus")
        fail(path, line, "cross_section must be circle or torus");
      cfg.cross_kind = value;
    } else if (is_key("manifold", "torus_lu")) cfg.torus_lu = parse_number(path, line, value);
    else if (is_key("manifold", "torus_lv")) cfg.torus_lv = parse_number(path, line, value);
    else if (is_key("manifold", "warp")) cfg.warp = value;
    else if (is_key("manifold", "warp_minus")) cfg.warp_minus = value;
    else if (is_key("manifold", "r_start")) cfg.r_start = parse_number(path, line, value);
    else if (is_key("manifold", "expansive_from")) cfg.expansive_from = parse_number(path, line, value);
    else if (is_key("manifold", "expansive_from_minus")) cfg.expansive_from_minus = parse_number(path, line, value);
    else if (is_key("manifold", "validation_span")) cfg.validation_span = parse_number(path, line, value);
    else if (is_key("manifold", "inner_data")) cfg.inner_data = value;
    else if (is_key("manifold", "data")) cfg.data = value;
    else if (is_key("manifold", "data_minus")) cfg.data_minus = value;
    else if (is_key("comparison", "warp")) cfg.comparison_warp = value;
    else if (is_key("comparison", "r0")) cfg.comparison_r0 = parse_number(path, line, value);
    else if (is_key("comparison", "hyperbolic_a")) cfg.hyperbolic_a = parse_number(path, line, value);
    else if (is_key("criterion", "tail_r_max")) cfg.tail_r_max = parse_number(path, line, value);
    else if (is_key("barrier", "center0")) cfg.center0 = parse_number(path, line, value);
    else if (is_key("barrier", "center1")) cfg.center1 = parse_number(path, line, value);
    else if (is_key("barrier", "half_width0")) cfg.half_width0 = parse_number(path, line, value);
    else if (is_key("barrier", "half_width1")) cfg.half_width1 = parse_number(path, line, value);
    else if (is_key("barrier", "psi")) cfg.psi = value;
    else if (is_key("barrier", "sigma_r_max")) cfg.sigma_r_max = parse_number(path, line, value);
    else if (is_key("barrier", "sigma_floor")) cfg.sigma_floor = parse_number(path, line, value);
    else if (is_key("barrier", "angular_fraction")) cfg.angular_fraction = parse_number(path, line, value);
    else if (is_key("barrier", "cap_nodes")) cfg.cap_nodes = static_cast<int>(parse_number(path, line, value));
    else if (is_key("grid", "cross_nodes")) cfg.cross_nodes = static_cast<int>(parse_number(path, line, value));
    else if (is_key("grid", "radial_nodes")) cfg.radial_nodes = static_cast<int>(parse_number(path, line, value));
    else if (is_key("grid", "graded")) cfg.graded = parse_bool(path, line, value);
    else if (is_key("exhaust", "schedule")) cfg.schedule = parse_number_list(path, line, value);
    else if (is_key("exhaust", "probes")) cfg.probes = parse_probes(path, line, value);
    else if (is_key("exhaust", "tol")) cfg.tol_exhaustion = parse_number(path, line, value);
    else if (is_key("run", "seed")) cfg.seed = static_cast<std::uint64_t>(parse_number(path, line, value));
    else fail(path, line, "unknown key '" + key + "' in section [" + section + "]");
  }

  if (cfg.warp.empty()) throw ConfigError(path + ": [manifold] warp is required");
  if (cfg.topology == Topology::TwoEnds && cfg.warp_minus.empty())
    throw ConfigError(path + ": two_ends topology requires warp_minus");
  return cfg;
}

std::map<std::string, std::string> parse_report(const std::string& report) {
  std::map<std::string, std::string> out;
  std::istringstream is(report);
  std::string line;
  while (std::getline(is, line)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    out[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  return out;
}

std::vector<ExpectOutcome> evaluate_expects(const std::vector<ExpectRule>& rules,
                                            const std::string& report) {
  const auto fields = parse_report(report);
  std::vector<ExpectOutcome> out;
  for (const auto& rule : rules) {
    ExpectOutcome oc;
    oc.rule = rule;
    const auto it = fields.find(rule.key);
    if (it == fields.end()) {
      oc.actual = "<missing>";
      out.push_back(std::move(oc));
      continue;
    }
    oc.actual = it->second;
    switch (rule.op) {
      case ExpectRule::Op::Equals:
        oc.ok = oc.actual == rule.literal;
        break;
      case ExpectRule::Op::Le:
      case ExpectRule::Op::Ge:
      case ExpectRule::Op::Near: {
        char* end = nullptr;
        const double v = std::strtod(oc.actual.c_str(), &end);
        if (end == oc.actual.c_str()) {
          oc.ok = false;
          break;
        }
        if (rule.op == ExpectRule::Op::Le) oc.ok = v <= rule.number;
        else if (rule.op == ExpectRule::Op::Ge) oc.ok = v >= rule.number;
        else oc.ok = std::abs(v - rule.number) <= rule.tol;
        break;
      }
    }
    out.push_back(std::move(oc));
  }
  return out;
}

}  // namespace ends
