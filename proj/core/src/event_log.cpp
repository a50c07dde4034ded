#include "wirepick/event_log.hpp"

#include <istream>

#include <json.hpp>

#include "wirepick/errors.hpp"

namespace wirepick {
namespace {

using json = nlohmann::ordered_json;

json thresholds_json(const ThresholdState& th) {
  return {{"f_stop", th.f_stop}, {"f_fail", th.f_fail}, {"f_fail_converged", th.f_fail_converged}};
}

}  // namespace

std::string event_line(int episode, const PrimitiveEvent& ev) {
  json j;
  j["schema"] = kLogSchemaVersion;
  j["type"] = "event";
  j["episode"] = episode;
  j["attempt"] = ev.attempt_id;
  j["iteration"] = ev.iteration;
  j["phase"] = std::string(to_string(ev.phase));
  j["primitive"] = ev.primitive;
  j["event"] = ev.event;
  if (ev.params)
    j["params"] = {{"theta3", ev.params->theta3}, {"theta4", ev.params->theta4},
                   {"theta5", ev.params->theta5}, {"omega", ev.params->omega}, {"n", ev.params->n}};
  if (ev.force) j["force"] = *ev.force;
  j["thresholds"] = thresholds_json(ev.thresholds);
  return j.dump();
}

std::string attempt_line(int episode, Policy policy, const AttemptRecord& r) {
  json j;
  j["schema"] = kLogSchemaVersion;
  j["type"] = "attempt";
  j["episode"] = episode;
  j["policy"] = std::string(to_string(policy));
  j["attempt"] = r.attempt_id;
  j["outcome"] = std::string(to_string(r.outcome));
  j["failure_mode"] = r.failure_mode ? json(std::string(to_string(*r.failure_mode))) : json(nullptr);
  j["counts"] = {{"lift", r.counts.lift},
                 {"swing", r.counts.swing},
                 {"spin", r.counts.spin},
                 {"regrasp", r.counts.regrasp},
                 {"transport", r.counts.transport}};
  j["n_transport"] = r.n_transport;
  j["delivered"] = r.objects_delivered;
  j["ejected"] = r.objects_ejected;
  j["thresholds"] = thresholds_json(r.thresholds_after);
  return j.dump();
}

std::optional<LoggedAttempt> parse_log_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("log line: ") + e.what());
  }
  try {
    if (j.at("schema").get<int>() != kLogSchemaVersion)
      throw FormatError("unsupported log schema " + j.at("schema").dump());
    const auto type = j.at("type").get<std::string>();
    if (type == "event") return std::nullopt;
    if (type != "attempt") throw FormatError("unknown log line type '" + type + "'");
    LoggedAttempt a;
    a.episode = j.at("episode").get<int>();
    a.policy = j.at("policy").get<std::string>();
    auto& r = a.record;
    r.attempt_id = j.at("attempt").get<int>();
    const auto outcome = outcome_from_string(j.at("outcome").get<std::string>());
    if (!outcome) throw FormatError("unknown outcome " + j.at("outcome").dump());
    r.outcome = *outcome;
    if (!j.at("failure_mode").is_null()) {
      const auto mode = failure_mode_from_string(j.at("failure_mode").get<std::string>());
      if (!mode) throw FormatError("unknown failure mode " + j.at("failure_mode").dump());
      r.failure_mode = *mode;
    }
    const auto& c = j.at("counts");
    r.counts.lift = c.at("lift").get<int>();
    r.counts.swing = c.at("swing").get<int>();
    r.counts.spin = c.at("spin").get<int>();
    r.counts.regrasp = c.at("regrasp").get<int>();
    r.counts.transport = c.at("transport").get<int>();
    r.n_transport = j.at("n_transport").get<int>();
    r.objects_delivered = j.at("delivered").get<int>();
    r.objects_ejected = j.at("ejected").get<int>();
    const auto& th = j.at("thresholds");
    r.thresholds_after.f_stop = th.at("f_stop").get<double>();
    r.thresholds_after.f_fail = th.at("f_fail").get<double>();
    r.thresholds_after.f_fail_converged = th.at("f_fail_converged").get<bool>();
    return a;
  } catch (const json::exception& e) {
    throw FormatError(std::string("log line: ") + e.what());
  }
}

std::vector<LoggedAttempt> read_attempt_log(std::istream& in) {
  std::vector<LoggedAttempt> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (auto a = parse_log_line(line)) out.push_back(std::move(*a));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace wirepick
