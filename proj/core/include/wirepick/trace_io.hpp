#pragma once

#include <iosfwd>
#include <string>

#include "wirepick/types.hpp"

namespace wirepick {

// JSON-lines, one sample per line: {"t":0,"f_z":0.12} or {"t":0,"f_z":0.12,"tau":0.01}.
// The phase is not stored; callers supply it on import.
void write_trace_jsonl(std::ostream& out, const ForceTrace& trace);
ForceTrace read_trace_jsonl(std::istream& in, Phase phase);

void save_trace(const std::string& path, const ForceTrace& trace);
ForceTrace load_trace(const std::string& path, Phase phase);

}  // namespace wirepick
