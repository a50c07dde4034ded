#include "wirepick/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "wirepick/errors.hpp"

namespace wirepick {

void write_trace_jsonl(std::ostream& out, const ForceTrace& trace) {
  for (const auto& s : trace.samples) {
    nlohmann::ordered_json j;
    j["t"] = s.t;
    j["f_z"] = s.f_z;
    if (s.tau) j["tau"] = *s.tau;
    out << j.dump() << '\n';
  }
}

ForceTrace read_trace_jsonl(std::istream& in, Phase phase) {
  ForceTrace trace;
  trace.phase = phase;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ForceSample s;
      s.t = j.at("t").get<std::int64_t>();
      s.f_z = j.at("f_z").get<double>();
      if (auto it = j.find("tau"); it != j.end() && !it->is_null()) s.tau = it->get<double>();
      trace.samples.push_back(s);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    trace.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("invalid trace: ") + e.what());
  }
  return trace;
}

void save_trace(const std::string& path, const ForceTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write_trace_jsonl(out, trace);
}

ForceTrace load_trace(const std::string& path, Phase phase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_trace_jsonl(in, phase);
}

}  // namespace wirepick
