#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wirepick/controller.hpp"
#include "wirepick/types.hpp"

namespace wirepick {

inline constexpr int kLogSchemaVersion = 1;

// One JSON object per line. "type" is "event" for primitive events and
// "attempt" for attempt summaries; both carry "schema" and "episode".
std::string event_line(int episode, const PrimitiveEvent& event);
std::string attempt_line(int episode, Policy policy, const AttemptRecord& record);

struct LoggedAttempt {
  int episode = 0;
  std::string policy;
  AttemptRecord record;  // traces are not logged
};

// nullopt for event lines. Throws FormatError on malformed lines or schema mismatch.
std::optional<LoggedAttempt> parse_log_line(std::string_view line);

// Reads every attempt line of a JSONL stream, skipping events and blank lines.
std::vector<LoggedAttempt> read_attempt_log(std::istream& in);

}  // namespace wirepick
