#include "toolcal/values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <regex>
#include <stdexcept>

namespace toolcal {

namespace {

// Doubles above 2^53 lose integer precision; leave those as floats.
constexpr double kMaxExactDouble = 9007199254740992.0;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(const std::string & s) {
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) b++;
    while (e > b && is_space(s[e - 1])) e--;
    return s.substr(b, e - b);
}

}  // namespace

ValueKind kind_of(const json & v) {
    switch (v.type()) {
        case json::value_t::string:          return ValueKind::String;
        case json::value_t::boolean:         return ValueKind::Boolean;
        case json::value_t::number_integer:  return ValueKind::Integer;
        case json::value_t::number_unsigned: return ValueKind::Integer;
        case json::value_t::number_float: {
            double d = v.get<double>();
            if (std::isfinite(d) && std::trunc(d) == d && std::abs(d) < kMaxExactDouble) {
                return ValueKind::Integer;
            }
            return ValueKind::Number;
        }
        case json::value_t::array:  return ValueKind::Array;
        case json::value_t::object: return ValueKind::Object;
        default:
            throw std::invalid_argument("value has no legal kind: " + v.dump());
    }
}

bool is_legal_value(const json & v) {
    switch (v.type()) {
        case json::value_t::string:
        case json::value_t::boolean:
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
        case json::value_t::number_float:
            return true;
        case json::value_t::array:
            return std::all_of(v.begin(), v.end(), [](const json & e) { return is_legal_value(e); });
        case json::value_t::object: {
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!is_legal_value(it.value())) return false;
            }
            return true;
        }
        default:
            return false;
    }
}

json canonical_value(const json & v) {
    switch (v.type()) {
        case json::value_t::string:
            return json(trim(v.get<std::string>()));
        case json::value_t::boolean:
            return v;
        case json::value_t::number_integer:
            return v;
        case json::value_t::number_unsigned: {
            std::uint64_t u = v.get<std::uint64_t>();
            if (u <= static_cast<std::uint64_t>(INT64_MAX)) {
                return json(static_cast<std::int64_t>(u));
            }
            return v;
        }
        case json::value_t::number_float: {
            double d = v.get<double>();
            if (std::isfinite(d) && std::trunc(d) == d && std::abs(d) < kMaxExactDouble) {
                return json(static_cast<std::int64_t>(d));
            }
            return v;
        }
        case json::value_t::array: {
            json out = json::array();
            for (const auto & e : v) out.push_back(canonical_value(e));
            return out;
        }
        case json::value_t::object: {
            json out = json::object();  // nlohmann objects keep keys sorted
            for (auto it = v.begin(); it != v.end(); ++it) {
                out[it.key()] = canonical_value(it.value());
            }
            return out;
        }
        default:
            throw std::invalid_argument("cannot canonicalize value: " + v.dump());
    }
}

json canonicalize_value(const json & v, const ParamSpec & spec) {
    (void) spec;  // no cross-kind coercion: the declared kind never alters the form
    return canonical_value(v);
}

bool values_equal(const json & a, const json & b) {
    return canonical_value(a) == canonical_value(b);
}

bool kind_matches(const json & v, ValueKind declared) {
    ValueKind k = kind_of(v);
    if (declared == ValueKind::Number) {
        return k == ValueKind::Number || k == ValueKind::Integer;
    }
    return k == declared;
}

bool satisfies(const json & v, const Constraint & c) {
    switch (c.type) {
        case Constraint::Type::EnumSet: {
            json cv = canonical_value(v);
            for (const auto & e : c.enum_values) {
                if (canonical_value(e) == cv) return true;
            }
            return false;
        }
        case Constraint::Type::Range: {
            if (!v.is_number()) return false;
            double d = v.get<double>();
            return d >= c.lo && d <= c.hi;
        }
        case Constraint::Type::Pattern: {
            if (!v.is_string()) return false;
            try {
                std::regex re(c.pattern, std::regex::ECMAScript);
                return std::regex_match(v.get<std::string>(), re);
            } catch (const std::regex_error &) {
                return false;
            }
        }
    }
    return false;
}

bool satisfies_all(const json & v, const ParamSpec & spec) {
    for (const auto & c : spec.constraints) {
        if (!satisfies(v, c)) return false;
    }
    return true;
}

json canonical_call(const ToolCall & c) {
    return json{{"name", c.function_name}, {"arguments", canonical_value(c.arguments)}};
}

bool calls_exactly_equal(const std::vector<ToolCall> & a, const std::vector<ToolCall> & b) {
    if (a.size() != b.size()) return false;
    std::vector<std::string> ca, cb;
    ca.reserve(a.size());
    cb.reserve(b.size());
    for (const auto & c : a) ca.push_back(canonical_call(c).dump());
    for (const auto & c : b) cb.push_back(canonical_call(c).dump());
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    return ca == cb;
}

}  // namespace toolcal
