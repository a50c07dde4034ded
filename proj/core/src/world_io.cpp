#include "wirepick/world_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wirepick/controller.hpp"
#include "wirepick/errors.hpp"

namespace wirepick::sim {
namespace {

using json = nlohmann::ordered_json;

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("not an unsigned 64-bit integer: '" + std::string(s) + "'");
  return v;
}

struct Field {
  std::function<void(WorldConfig&, std::string_view)> set;
  std::function<std::string(const WorldConfig&)> get;
};

template <typename T>
Field number(T WorldConfig::*m) {
  return {[m](WorldConfig& c, std::string_view v) { c.*m = parse_number(v); },
          [m](const WorldConfig& c) { return format_number(c.*m); }};
}

Field integer(int WorldConfig::*m) {
  return {[m](WorldConfig& c, std::string_view v) { c.*m = parse_int(v); },
          [m](const WorldConfig& c) { return std::to_string(c.*m); }};
}

Field optional_number(std::optional<double> WorldConfig::*m) {
  return {[m](WorldConfig& c, std::string_view v) {
            if (v == "default") c.*m = std::nullopt;
            else c.*m = parse_number(v);
          },
          [m](const WorldConfig& c) { return (c.*m) ? format_number(*(c.*m)) : std::string("default"); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["object_profile"] = {[](WorldConfig& c, std::string_view v) {
                             auto p = profile_from_string(v);
                             if (!p) throw ConfigError("unknown object_profile '" + std::string(v) + "'");
                             c.object_profile = *p;
                           },
                           [](const WorldConfig& c) { return std::string(to_string(c.object_profile)); }};
    t["rng_seed"] = {[](WorldConfig& c, std::string_view v) { c.rng_seed = parse_u64(v); },
                     [](const WorldConfig& c) { return std::to_string(c.rng_seed); }};
    t["regrasp_vertical_tolerance"] = {
        [](WorldConfig& c, std::string_view v) { c.regrasp_vertical_tolerance = parse_angle(v); },
        [](const WorldConfig& c) { return format_number(c.regrasp_vertical_tolerance); }};
    t["n_objects"] = integer(&WorldConfig::n_objects);
    t["capacity"] = integer(&WorldConfig::capacity);
    t["camera_pixels"] = integer(&WorldConfig::camera_pixels);
    t["lift_samples"] = integer(&WorldConfig::lift_samples);
    t["transport_samples"] = integer(&WorldConfig::transport_samples);
    t["noise_sigma"] = number(&WorldConfig::noise_sigma);
    t["swing_break_gain"] = number(&WorldConfig::swing_break_gain);
    t["slip_gain"] = number(&WorldConfig::slip_gain);
    t["eject_gain"] = number(&WorldConfig::eject_gain);
    t["p_pull"] = number(&WorldConfig::p_pull);
    t["grasp_miss_prob"] = number(&WorldConfig::grasp_miss_prob);
    t["bin_size"] = number(&WorldConfig::bin_size);
    t["cable_radius"] = number(&WorldConfig::cable_radius);
    t["node_spacing"] = number(&WorldConfig::node_spacing);
    t["lift_height"] = number(&WorldConfig::lift_height);
    t["lifted_fraction_exponent"] = number(&WorldConfig::lifted_fraction_exponent);
    t["lift_tension_gain"] = number(&WorldConfig::lift_tension_gain);
    t["transport_tension_gain"] = number(&WorldConfig::transport_tension_gain);
    t["spike_rate"] = number(&WorldConfig::spike_rate);
    t["dangle_min"] = number(&WorldConfig::dangle_min);
    t["reach"] = number(&WorldConfig::reach);
    t["entangle_prob"] = optional_number(&WorldConfig::entangle_prob);
    t["hang_sigma"] = optional_number(&WorldConfig::hang_sigma);
    return t;
  }();
  return table;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_number(v.get<double>());
  throw FormatError("expected a scalar value");
}

RawConfig raw_from_object(const json& obj, const char* what) {
  if (!obj.is_object()) throw FormatError(std::string(what) + " must be an object");
  RawConfig raw;
  for (auto it = obj.begin(); it != obj.end(); ++it) raw[it.key()] = scalar_text(it.value());
  return raw;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

WorldConfig world_config_from_raw(const RawConfig& raw, WorldConfig base) {
  const auto& table = fields();
  for (const auto& [key, value] : raw) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown world config key '" + key + "'");
    try {
      it->second.set(base, value);
    } catch (const ConfigError& e) {
      throw ConfigError("world config key '" + key + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

std::string serialize_world_config(const WorldConfig& config) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + "=" + f.get(config) + "\n";
  return out;
}

std::vector<std::string> world_config_keys() {
  std::vector<std::string> keys;
  for (const auto& kv : fields()) keys.push_back(kv.first);
  return keys;
}

std::string snapshot_to_json(const BinState& w) {
  json doc;
  doc["version"] = kSnapshotVersion;
  json cfg = json::object();
  for (const auto& [key, f] : fields()) cfg[key] = f.get(w.config);
  doc["config"] = cfg;
  json bodies = json::array();
  for (const auto& b : w.bodies) {
    json jb;
    jb["id"] = b.id;
    jb["length"] = b.length;
    jb["weight"] = b.weight;
    jb["connector_a"] = b.connector_a;
    jb["connector_b"] = b.connector_b;
    jb["grasp_point"] = b.grasp_point ? json(*b.grasp_point) : json(nullptr);
    json pts = json::array();
    for (const auto& p : b.polyline) pts.push_back(json::array({p.x, p.y, p.z}));
    jb["polyline"] = pts;
    bodies.push_back(jb);
  }
  doc["bodies"] = bodies;
  json edges = json::array();
  for (const auto& e : w.graph.edges) edges.push_back(json::array({e.a, e.b, e.weight}));
  doc["graph"] = {{"nodes", w.graph.nodes}, {"edges", edges}};
  doc["rng"] = {{"seed", w.rng.seed()}, {"draws", w.rng.draws()}};
  json forced = json::object();
  for (const auto& [site, q] : w.forced.queues)
    if (!q.empty()) forced[site] = std::vector<double>(q.begin(), q.end());
  doc["forced"] = forced;
  doc["held"] = w.held ? json(*w.held) : json(nullptr);
  doc["next_id"] = w.next_id;
  doc["delivered"] = w.delivered;
  doc["ejected"] = w.ejected;
  doc["placed"] = w.placed;
  return doc.dump();
}

BinState snapshot_from_json(std::string_view text) {
  const json doc = parse_json(text, "snapshot");
  try {
    if (doc.at("version").get<int>() != kSnapshotVersion)
      throw FormatError("unsupported snapshot version " + doc.at("version").dump());
    BinState w;
    w.config = world_config_from_raw(raw_from_object(doc.at("config"), "config"));
    for (const auto& jb : doc.at("bodies")) {
      HarnessBody b;
      b.id = jb.at("id").get<int>();
      b.length = jb.at("length").get<double>();
      b.weight = jb.at("weight").get<double>();
      b.connector_a = jb.at("connector_a").get<double>();
      b.connector_b = jb.at("connector_b").get<double>();
      if (!jb.at("grasp_point").is_null()) b.grasp_point = jb.at("grasp_point").get<double>();
      for (const auto& p : jb.at("polyline")) {
        if (p.size() != 3) throw FormatError("polyline points need three coordinates");
        b.polyline.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      }
      w.bodies.push_back(std::move(b));
    }
    w.graph.nodes = doc.at("graph").at("nodes").get<std::vector<int>>();
    for (const auto& e : doc.at("graph").at("edges")) {
      if (e.size() != 3) throw FormatError("edges need [a, b, weight]");
      w.graph.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    }
    w.rng = Rng::at_cursor(doc.at("rng").at("seed").get<std::uint64_t>(),
                           doc.at("rng").at("draws").get<std::uint64_t>());
    for (auto it = doc.at("forced").begin(); it != doc.at("forced").end(); ++it)
      for (double v : it.value().get<std::vector<double>>()) w.forced.push(it.key(), v);
    if (!doc.at("held").is_null()) w.held = doc.at("held").get<int>();
    w.next_id = doc.at("next_id").get<int>();
    w.delivered = doc.at("delivered").get<int>();
    w.ejected = doc.at("ejected").get<int>();
    w.placed = doc.at("placed").get<int>();
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::string& path, const BinState& world) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << snapshot_to_json(world) << '\n';
}

BinState load_snapshot(const std::string& path) { return snapshot_from_json(read_file(path)); }

Scenario parse_scenario(std::string_view text) {
  const json doc = parse_json(text, "scenario");
  try {
    if (doc.value("version", 0) != kScenarioVersion)
      throw FormatError("unsupported scenario version");
    Scenario sc;
    sc.name = doc.value("name", std::string("scenario"));
    if (doc.contains("world")) sc.world = world_config_from_raw(raw_from_object(doc["world"], "world"));
    if (doc.contains("edges"))
      for (const auto& e : doc["edges"]) {
        if (e.size() != 3) throw FormatError("edges need [a, b, weight]");
        sc.extra_edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
      }
    if (doc.contains("grasp"))
      sc.grasp = std::make_pair(doc["grasp"].at("id").get<int>(), doc["grasp"].at("s").get<double>());
    if (doc.contains("forced"))
      for (const auto& f : doc["forced"]) {
        if (f.size() != 2) throw FormatError("forced entries need [site, value]");
        const auto site = f[0].get<std::string>();
        if (!is_known_site(site)) throw FormatError("unknown forced-outcome site '" + site + "'");
        const double v = f[1].is_boolean() ? (f[1].get<bool>() ? 1.0 : 0.0) : f[1].get<double>();
        sc.forced.emplace_back(site, v);
      }
    if (doc.contains("controller")) sc.controller = raw_from_object(doc["controller"], "controller");
    sc.policy = doc.value("policy", sc.policy);
    if (!policy_from_string(sc.policy)) throw FormatError("unknown policy '" + sc.policy + "'");
    sc.attempts = doc.value("attempts", 1);
    if (sc.attempts < 1) throw FormatError("attempts must be >= 1");
    return sc;
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

BinState scenario_world(const Scenario& scenario) {
  BinState w = init_world(scenario.world);
  for (const auto& e : scenario.extra_edges) {
    if (!w.contains(e.a) || !w.contains(e.b))
      throw ParameterError("scenario edge refers to a missing body");
    w.graph.add_crossing(e.a, e.b, e.weight);
  }
  for (const auto& [site, v] : scenario.forced) w.forced.push(site, v);
  if (scenario.grasp && !w.contains(scenario.grasp->first))
    throw ParameterError("scenario grasp refers to a missing body");
  return w;
}

}  // namespace wirepick::sim
