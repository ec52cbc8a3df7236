#pragma once

#include "toolcal/types.hpp"

namespace toolcal {

// Number of whitespace-delimited segments; the fixed token rule for L.
std::int64_t count_tokens(const std::string & text);

// Parses the interior of a call block: a JSON array of objects with a
// "name" string and an optional "arguments" object. Duplicate calls are
// preserved as distinct entries. Malformed payloads yield an empty list
// and ok=false rather than throwing.
struct CallParse {
    std::vector<ToolCall> calls;
    bool ok = false;
};
CallParse parse_call_block(const std::string & call_block);

// Convenience wrapper matching the one-result signature; malformed input
// maps to an empty list.
std::vector<ToolCall> parse_tool_calls(const std::string & call_block);

// Canonical text form of a call list (compact JSON, sorted keys).
std::string serialize_calls(const std::vector<ToolCall> & calls);

// Parses a full trajectory. The accepted grammar is exactly one
// <think>...</think> block followed by exactly one <tool_call>...</tool_call>
// block with nothing but whitespace outside. Never throws: malformed text
// returns a Trajectory with empty calls and format_valid=false so the format
// guardrail can penalize instead of crashing.
Trajectory parse_trajectory(const std::string & raw_text);

// Renders (reasoning, calls) into the tag grammar accepted above.
std::string render_trajectory_text(const std::string & reasoning, const std::vector<ToolCall> & calls);

}  // namespace toolcal
