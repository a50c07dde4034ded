#pragma once

#include <map>
#include <string>
#include <string_view>

#include "wirepick/types.hpp"

namespace wirepick {

inline constexpr double kPi = 3.14159265358979323846;

// Force-trace event detection knobs.
struct SignalParams {
  int filter_window = 5;
  double grad_eps = 0.02;        // N per tick
  double tail_fraction = 0.25;
  // "Near zero" terminal force for the end-grasp test, as a fraction of F_fail.
  double near_zero_ratio = 0.3;

  friend bool operator==(const SignalParams&, const SignalParams&) = default;
};

// F_fail plateau detection.
struct TunerParams {
  int plateau_window = 3;
  double plateau_eps = 0.05;     // N
  double fail_margin = 0.15;     // N

  friend bool operator==(const TunerParams&, const TunerParams&) = default;
};

struct GraspParams {
  int n_rotations = 8;
  int n_heights = 4;
  int top_k = 20;
  int nms_radius = 3;            // px
  double mid_bias_alpha = 0.5;   // only used by the mid-bias policy

  friend bool operator==(const GraspParams&, const GraspParams&) = default;
};

struct ControllerConfig {
  SwingParams swing{kPi / 4, kPi / 3, kPi / 3, kPi / 2, 2};
  double f_stop = 3.0;
  double f_fail = 1.0;
  double delta_f = 0.1;
  double delta_theta = kPi / 18;
  double angle_max = kPi;
  double omega_max = kPi;
  double spin_theta5 = kPi / 3;
  double spin_omega = kPi / 2;
  double sample_period = 0.01;   // s per tick
  int regrasp_after_transports = 2;
  int loop_cap = 8;
  bool keep_traces = true;
  SignalParams signal;
  TunerParams tuner;
  GraspParams grasp;

  ThresholdState initial_thresholds() const;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

using RawConfig = std::map<std::string, std::string, std::less<>>;

// Builds a config from key/value overrides; missing keys take defaults.
// Throws ConfigError on unknown keys, unparsable values or broken invariants.
ControllerConfig validate_config(const RawConfig& raw);

// Checks cross-field invariants of an already populated config.
void check_config(const ControllerConfig& cfg);

// Emits every key as "key=value" lines; parse_config_text() re-reads it.
std::string serialize_config(const ControllerConfig& cfg);

// Flat key=value text with '#' comments. Later duplicates override earlier ones.
RawConfig parse_config_text(std::string_view text);
RawConfig read_config_file(const std::string& path);

// Decimal number or one of "pi", "pi/N", "k*pi/N", "kpi" (also with the π glyph).
double parse_angle(std::string_view text);

// Scalar parsers shared by every key=value table. Throw ConfigError.
double parse_number(std::string_view s);
int parse_int(std::string_view s);
bool parse_bool(std::string_view s);
// Shortest decimal that parses back to the same double.
std::string format_number(double v);

// Splits keys with the given prefix ("sim.") into a second map, prefix stripped.
RawConfig take_prefixed(RawConfig& raw, std::string_view prefix);

}  // namespace wirepick
