#include "toolcal/parse.hpp"

#include "toolcal/values.hpp"

#include <cctype>

namespace toolcal {

namespace {

constexpr const char * kThinkOpen = "<think>";
constexpr const char * kThinkClose = "</think>";
constexpr const char * kCallOpen = "<tool_call>";
constexpr const char * kCallClose = "</tool_call>";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool whitespace_only(const std::string & s, size_t from, size_t to) {
    for (size_t i = from; i < to; i++) {
        if (!is_space(s[i])) return false;
    }
    return true;
}

// All occurrences of a literal tag.
std::vector<size_t> find_all(const std::string & s, const std::string & tag) {
    std::vector<size_t> out;
    size_t pos = s.find(tag);
    while (pos != std::string::npos) {
        out.push_back(pos);
        pos = s.find(tag, pos + 1);
    }
    return out;
}

}  // namespace

std::int64_t count_tokens(const std::string & text) {
    std::int64_t n = 0;
    bool in_token = false;
    for (char c : text) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            n++;
        }
    }
    return n;
}

CallParse parse_call_block(const std::string & call_block) {
    CallParse result;
    json payload = json::parse(call_block, nullptr, false);
    if (payload.is_discarded() || !payload.is_array()) {
        return result;
    }
    for (const auto & entry : payload) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
            return CallParse{};
        }
        ToolCall call;
        call.function_name = entry["name"].get<std::string>();
        for (auto it = entry.begin(); it != entry.end(); ++it) {
            if (it.key() == "name") continue;
            if (it.key() == "arguments") {
                if (!it.value().is_object() || !is_legal_value(it.value())) {
                    return CallParse{};
                }
                call.arguments = it.value();
            } else {
                return CallParse{};  // unknown member
            }
        }
        result.calls.push_back(std::move(call));
    }
    result.ok = true;
    return result;
}

std::vector<ToolCall> parse_tool_calls(const std::string & call_block) {
    return parse_call_block(call_block).calls;
}

std::string serialize_calls(const std::vector<ToolCall> & calls) {
    json arr = json::array();
    for (const auto & c : calls) {
        arr.push_back(json{{"name", c.function_name}, {"arguments", c.arguments}});
    }
    return arr.dump();
}

Trajectory parse_trajectory(const std::string & raw_text) {
    Trajectory t;
    t.raw_text = raw_text;
    t.length_tokens = count_tokens(raw_text);
    t.format_valid = false;

    const auto think_open = find_all(raw_text, kThinkOpen);
    const auto think_close = find_all(raw_text, kThinkClose);
    const auto call_open = find_all(raw_text, kCallOpen);
    const auto call_close = find_all(raw_text, kCallClose);
    if (think_open.size() != 1 || think_close.size() != 1 ||
        call_open.size() != 1 || call_close.size() != 1) {
        return t;
    }
    // <think> is a prefix of neither tag, but </think> contains no other tag;
    // positions must be strictly ordered with whitespace-only gaps outside.
    const size_t a = think_open[0];
    const size_t b = think_close[0];
    const size_t c = call_open[0];
    const size_t d = call_close[0];
    const size_t b_end = b + std::string(kThinkClose).size();
    const size_t d_end = d + std::string(kCallClose).size();
    if (!(a + std::string(kThinkOpen).size() <= b && b_end <= c &&
          c + std::string(kCallOpen).size() <= d)) {
        return t;
    }
    if (!whitespace_only(raw_text, 0, a) ||
        !whitespace_only(raw_text, b_end, c) ||
        !whitespace_only(raw_text, d_end, raw_text.size())) {
        return t;
    }
    t.reasoning = raw_text.substr(a + std::string(kThinkOpen).size(),
                                  b - a - std::string(kThinkOpen).size());
    const std::string block = raw_text.substr(c + std::string(kCallOpen).size(),
                                              d - c - std::string(kCallOpen).size());
    CallParse parsed = parse_call_block(block);
    if (!parsed.ok) {
        return t;
    }
    t.calls = std::move(parsed.calls);
    t.format_valid = true;
    return t;
}

std::string render_trajectory_text(const std::string & reasoning, const std::vector<ToolCall> & calls) {
    return std::string(kThinkOpen) + reasoning + kThinkClose +
           kCallOpen + serialize_calls(calls) + kCallClose;
}

}  // namespace toolcal
