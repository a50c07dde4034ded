#include "wirepick/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "wirepick/errors.hpp"

namespace wirepick {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("not an integer: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + std::string(s) + "'");
}

std::string format_number(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

struct Field {
  std::function<void(ControllerConfig&, std::string_view)> set;
  std::function<std::string(const ControllerConfig&)> get;
};

template <typename Member>
Field angle_field(Member member) {
  return {[member](ControllerConfig& c, std::string_view v) { std::invoke(member, c) = parse_angle(v); },
          [member](const ControllerConfig& c) { return format_number(std::invoke(member, c)); }};
}

template <typename Member>
Field number_field(Member member) {
  return {[member](ControllerConfig& c, std::string_view v) { std::invoke(member, c) = parse_number(v); },
          [member](const ControllerConfig& c) { return format_number(std::invoke(member, c)); }};
}

template <typename Member>
Field int_field(Member member) {
  return {[member](ControllerConfig& c, std::string_view v) { std::invoke(member, c) = parse_int(v); },
          [member](const ControllerConfig& c) { return std::to_string(std::invoke(member, c)); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["theta3"] = angle_field([](auto& c) -> auto& { return c.swing.theta3; });
    t["theta4"] = angle_field([](auto& c) -> auto& { return c.swing.theta4; });
    t["theta5"] = angle_field([](auto& c) -> auto& { return c.swing.theta5; });
    t["omega"] = angle_field([](auto& c) -> auto& { return c.swing.omega; });
    t["n"] = int_field([](auto& c) -> auto& { return c.swing.n; });
    t["f_stop"] = number_field(&ControllerConfig::f_stop);
    t["f_fail"] = number_field(&ControllerConfig::f_fail);
    t["delta_f"] = number_field(&ControllerConfig::delta_f);
    t["delta_theta"] = angle_field(&ControllerConfig::delta_theta);
    t["angle_max"] = angle_field(&ControllerConfig::angle_max);
    t["omega_max"] = angle_field(&ControllerConfig::omega_max);
    t["spin_theta5"] = angle_field(&ControllerConfig::spin_theta5);
    t["spin_omega"] = angle_field(&ControllerConfig::spin_omega);
    t["sample_period"] = number_field(&ControllerConfig::sample_period);
    t["regrasp_after_transports"] = int_field(&ControllerConfig::regrasp_after_transports);
    t["loop_cap"] = int_field(&ControllerConfig::loop_cap);
    t["keep_traces"] = {[](ControllerConfig& c, std::string_view v) { c.keep_traces = parse_bool(v); },
                        [](const ControllerConfig& c) { return std::string(c.keep_traces ? "true" : "false"); }};
    t["filter_window"] = int_field([](auto& c) -> auto& { return c.signal.filter_window; });
    t["grad_eps"] = number_field([](auto& c) -> auto& { return c.signal.grad_eps; });
    t["tail_fraction"] = number_field([](auto& c) -> auto& { return c.signal.tail_fraction; });
    t["near_zero_ratio"] = number_field([](auto& c) -> auto& { return c.signal.near_zero_ratio; });
    t["plateau_window"] = int_field([](auto& c) -> auto& { return c.tuner.plateau_window; });
    t["plateau_eps"] = number_field([](auto& c) -> auto& { return c.tuner.plateau_eps; });
    t["fail_margin"] = number_field([](auto& c) -> auto& { return c.tuner.fail_margin; });
    t["n_rotations"] = int_field([](auto& c) -> auto& { return c.grasp.n_rotations; });
    t["n_heights"] = int_field([](auto& c) -> auto& { return c.grasp.n_heights; });
    t["top_k"] = int_field([](auto& c) -> auto& { return c.grasp.top_k; });
    t["nms_radius"] = int_field([](auto& c) -> auto& { return c.grasp.nms_radius; });
    t["mid_bias_alpha"] = number_field([](auto& c) -> auto& { return c.grasp.mid_bias_alpha; });
    return t;
  }();
  return table;
}

}  // namespace

ThresholdState ControllerConfig::initial_thresholds() const {
  ThresholdState th;
  th.f_stop = f_stop;
  th.f_fail = f_fail;
  th.delta_f = delta_f;
  th.delta_theta = delta_theta;
  return th;
}

double parse_angle(std::string_view text) {
  std::string s(trim(text));
  // normalise the glyph to ascii
  for (std::size_t pos; (pos = s.find("π")) != std::string::npos;) s.replace(pos, std::string("π").size(), "pi");
  const auto pi_pos = s.find("pi");
  if (pi_pos == std::string::npos) return parse_number(s);

  double coeff = 1.0;
  std::string_view head = trim(std::string_view(s).substr(0, pi_pos));
  if (!head.empty()) {
    if (head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    if (head == "-") coeff = -1.0;
    else coeff = parse_number(head);
  }
  std::string_view tail = trim(std::string_view(s).substr(pi_pos + 2));
  double denom = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("bad angle expression: '" + std::string(text) + "'");
    denom = parse_number(tail.substr(1));
    if (denom == 0.0) throw ConfigError("angle expression divides by zero");
  }
  return coeff * kPi / denom;
}

void check_config(const ControllerConfig& c) {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(c.f_stop > 0.0, "f_stop must be positive");
  require(c.f_fail > 0.0, "f_fail must be positive");
  require(c.f_fail < c.f_stop, "f_fail must be < f_stop");
  require(c.delta_f > 0.0, "delta_f must be positive");
  require(c.delta_theta > 0.0, "delta_theta must be positive");
  require(c.angle_max > 0.0, "angle_max must be positive");
  require(c.omega_max > 0.0, "omega_max must be positive");
  for (double a : {c.swing.theta3, c.swing.theta4, c.swing.theta5, c.spin_theta5})
    require(a >= 0.0 && a <= c.angle_max, "swing angle outside [0, angle_max]");
  require(c.swing.omega > 0.0 && c.swing.omega <= c.omega_max, "omega outside (0, omega_max]");
  require(c.spin_omega > 0.0 && c.spin_omega <= c.omega_max, "spin_omega outside (0, omega_max]");
  require(c.swing.n >= 1, "n must be >= 1");
  require(c.sample_period > 0.0, "sample_period must be positive");
  require(c.regrasp_after_transports >= 0, "regrasp_after_transports must be >= 0");
  require(c.loop_cap >= 1, "loop_cap must be >= 1");
  require(c.signal.filter_window >= 1 && c.signal.filter_window % 2 == 1,
          "filter_window must be odd and positive");
  require(c.signal.grad_eps > 0.0, "grad_eps must be positive");
  require(c.signal.tail_fraction > 0.0 && c.signal.tail_fraction <= 1.0,
          "tail_fraction must be in (0, 1]");
  require(c.signal.near_zero_ratio > 0.0 && c.signal.near_zero_ratio <= 1.0,
          "near_zero_ratio must be in (0, 1]");
  require(c.tuner.plateau_window >= 2, "plateau_window must be >= 2");
  require(c.tuner.plateau_eps > 0.0, "plateau_eps must be positive");
  require(c.tuner.fail_margin >= 0.0, "fail_margin must be >= 0");
  require(c.grasp.n_rotations >= 1, "n_rotations must be >= 1");
  require(c.grasp.n_heights >= 1, "n_heights must be >= 1");
  require(c.grasp.top_k >= 1, "top_k must be >= 1");
  require(c.grasp.nms_radius >= 0, "nms_radius must be >= 0");
  require(c.grasp.mid_bias_alpha >= 0.0 && c.grasp.mid_bias_alpha <= 1.0,
          "mid_bias_alpha must be in [0, 1]");
}

ControllerConfig validate_config(const RawConfig& raw) {
  ControllerConfig cfg;
  const auto& table = fields();
  for (const auto& [key, value] : raw) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second.set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  check_config(cfg);
  return cfg;
}

std::string serialize_config(const ControllerConfig& cfg) {
  std::ostringstream out;
  for (const auto& [key, field] : fields()) out << key << '=' << field.get(cfg) << '\n';
  return out.str();
}

RawConfig parse_config_text(std::string_view text) {
  RawConfig out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.insert_or_assign(std::string(key), std::string(value));
  }
  return out;
}

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RawConfig take_prefixed(RawConfig& raw, std::string_view prefix) {
  RawConfig taken;
  for (auto it = raw.begin(); it != raw.end();) {
    if (std::string_view(it->first).starts_with(prefix)) {
      taken.emplace(it->first.substr(prefix.size()), it->second);
      it = raw.erase(it);
    } else {
      ++it;
    }
  }
  return taken;
}

}  // namespace wirepick
