#include "toolcal/types.hpp"

#include "toolcal/parse.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace toolcal {

std::string to_string(ValueKind k) {
    switch (k) {
        case ValueKind::String:  return "string";
        case ValueKind::Integer: return "integer";
        case ValueKind::Number:  return "number";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Array:   return "array";
        case ValueKind::Object:  return "object";
    }
    return "string";
}

ValueKind value_kind_from_string(const std::string & s) {
    if (s == "string")  return ValueKind::String;
    if (s == "integer") return ValueKind::Integer;
    if (s == "number")  return ValueKind::Number;
    if (s == "boolean") return ValueKind::Boolean;
    if (s == "array")   return ValueKind::Array;
    if (s == "object")  return ValueKind::Object;
    throw std::invalid_argument("unknown value kind: " + s);
}

Constraint Constraint::enum_set(std::vector<json> values) {
    if (values.empty()) {
        throw std::invalid_argument("enum constraint requires a nonempty set");
    }
    Constraint c;
    c.type = Type::EnumSet;
    c.enum_values = std::move(values);
    return c;
}

Constraint Constraint::range(double lo, double hi) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("range constraint requires lo <= hi");
    }
    Constraint c;
    c.type = Type::Range;
    c.lo = lo;
    c.hi = hi;
    return c;
}

Constraint Constraint::regex(std::string pattern) {
    Constraint c;
    c.type = Type::Pattern;
    c.pattern = std::move(pattern);
    return c;
}

const ParamSpec * ToolSchema::find_param(const std::string & name) const {
    for (const auto & p : params) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

void ToolSchema::validate() const {
    if (function_name.empty()) {
        throw std::invalid_argument("schema function_name must be nonempty");
    }
    std::set<std::string> seen;
    for (const auto & p : params) {
        if (p.name.empty()) {
            throw std::invalid_argument("param name must be nonempty in schema " + function_name);
        }
        if (!seen.insert(p.name).second) {
            throw std::invalid_argument("duplicate param '" + p.name + "' in schema " + function_name);
        }
    }
}

SchemaMap schema_map(const std::vector<ToolSchema> & schemas) {
    SchemaMap m;
    for (const auto & s : schemas) {
        m[s.function_name] = s;
    }
    return m;
}

std::vector<std::string> ToolCall::argument_keys() const {
    std::vector<std::string> keys;
    for (auto it = arguments.begin(); it != arguments.end(); ++it) {
        keys.push_back(it.key());
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string to_string(Outcome o) {
    return o == Outcome::Success ? "success" : "failure";
}

Outcome outcome_from_string(const std::string & s) {
    if (s == "success") return Outcome::Success;
    if (s == "failure") return Outcome::Failure;
    throw std::invalid_argument("unknown outcome: " + s);
}

std::string to_string(Finding f) {
    switch (f) {
        case Finding::Ok:                  return "ok";
        case Finding::UnknownKey:          return "unknown_key";
        case Finding::TypeMismatch:        return "type_mismatch";
        case Finding::ConstraintViolation: return "constraint_violation";
        case Finding::MissingRequired:     return "missing_required";
    }
    return "ok";
}

bool ValidationReport::all_ok() const {
    return std::all_of(findings.begin(), findings.end(),
                       [](const Entry & e) { return e.finding == Finding::Ok; });
}

// --- JSON (de)serialization ---

json to_json(const Constraint & c) {
    switch (c.type) {
        case Constraint::Type::EnumSet: return json{{"enum", c.enum_values}};
        case Constraint::Type::Range:   return json{{"range", {c.lo, c.hi}}};
        case Constraint::Type::Pattern: return json{{"pattern", c.pattern}};
    }
    return json::object();
}

Constraint constraint_from_json(const json & j) {
    if (!j.is_object() || j.size() != 1) {
        throw std::invalid_argument("constraint must be a single-key object");
    }
    if (j.contains("enum")) {
        if (!j["enum"].is_array()) throw std::invalid_argument("enum constraint must hold an array");
        return Constraint::enum_set(std::vector<json>(j["enum"].begin(), j["enum"].end()));
    }
    if (j.contains("range")) {
        const auto & r = j["range"];
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw std::invalid_argument("range constraint must be [lo, hi]");
        }
        return Constraint::range(r[0].get<double>(), r[1].get<double>());
    }
    if (j.contains("pattern")) {
        if (!j["pattern"].is_string()) throw std::invalid_argument("pattern constraint must be a string");
        return Constraint::regex(j["pattern"].get<std::string>());
    }
    throw std::invalid_argument("unknown constraint: " + j.dump());
}

json to_json(const ParamSpec & p) {
    json j{{"name", p.name}, {"kind", to_string(p.kind)}, {"required", p.required}};
    if (!p.constraints.empty()) {
        json cs = json::array();
        for (const auto & c : p.constraints) cs.push_back(to_json(c));
        j["constraints"] = cs;
    }
    return j;
}

ParamSpec param_spec_from_json(const json & j) {
    ParamSpec p;
    p.name = j.at("name").get<std::string>();
    p.kind = value_kind_from_string(j.at("kind").get<std::string>());
    p.required = j.value("required", false);
    if (j.contains("constraints")) {
        for (const auto & c : j.at("constraints")) {
            p.constraints.push_back(constraint_from_json(c));
        }
    }
    return p;
}

json to_json(const ToolSchema & s) {
    json ps = json::array();
    for (const auto & p : s.params) ps.push_back(to_json(p));
    return json{{"function_name", s.function_name}, {"params", ps}};
}

ToolSchema schema_from_json(const json & j) {
    ToolSchema s;
    s.function_name = j.at("function_name").get<std::string>();
    for (const auto & p : j.at("params")) {
        s.params.push_back(param_spec_from_json(p));
    }
    s.validate();
    return s;
}

json to_json(const ToolCall & c) {
    return json{{"name", c.function_name}, {"arguments", c.arguments}};
}

ToolCall call_from_json(const json & j) {
    if (!j.is_object()) throw std::invalid_argument("call must be an object");
    ToolCall c;
    c.function_name = j.at("name").get<std::string>();
    if (j.contains("arguments")) {
        if (!j["arguments"].is_object()) throw std::invalid_argument("arguments must be an object");
        c.arguments = j["arguments"];
    }
    return c;
}

std::vector<ToolCall> calls_from_json(const json & j) {
    if (!j.is_array()) throw std::invalid_argument("call list must be an array");
    std::vector<ToolCall> out;
    for (const auto & e : j) out.push_back(call_from_json(e));
    return out;
}

std::vector<ToolSchema> schemas_from_json(const json & j) {
    if (!j.is_array()) throw std::invalid_argument("schema list must be an array");
    std::vector<ToolSchema> out;
    for (const auto & e : j) out.push_back(schema_from_json(e));
    return out;
}

json to_json(const FailureProfile & f) {
    return json{{"name_error", f.name_error},
                {"key_error", f.key_error},
                {"type_error", f.type_error},
                {"constraint_error", f.constraint_error},
                {"value_error", f.value_error}};
}

FailureProfile failure_from_json(const json & j) {
    FailureProfile f;
    f.name_error = j.at("name_error").get<bool>();
    f.key_error = j.at("key_error").get<bool>();
    f.type_error = j.at("type_error").get<bool>();
    f.constraint_error = j.at("constraint_error").get<bool>();
    f.value_error = j.at("value_error").get<bool>();
    return f;
}

json to_json(const CaseProfile & p) {
    return json{{"hardness", p.hardness}, {"band", p.band}, {"failure", to_json(p.failure)}};
}

CaseProfile profile_from_json(const json & j) {
    CaseProfile p;
    p.hardness = j.at("hardness").get<double>();
    p.band = j.at("band").get<int>();
    p.failure = failure_from_json(j.at("failure"));
    if (p.hardness < 0.0 || p.hardness > 1.0) {
        throw std::invalid_argument("profile hardness out of [0,1]");
    }
    return p;
}

json to_json(const ExecutionCase & c) {
    json refs = json::array();
    for (const auto & r : c.reference_calls) refs.push_back(to_json(r));
    json schemas = json::array();
    for (const auto & s : c.schemas) schemas.push_back(to_json(s));
    json j{{"id", c.id},
           {"query", c.query},
           {"raw_text", c.trajectory.raw_text},
           {"reference_calls", refs},
           {"schemas", schemas},
           {"outcome", to_string(c.outcome)}};
    if (c.profile) {
        j["profile"] = to_json(*c.profile);
    }
    return j;
}

ExecutionCase case_from_json(const json & j) {
    ExecutionCase c;
    c.id = j.at("id").get<std::string>();
    c.query = j.at("query").get<std::string>();
    c.trajectory = parse_trajectory(j.at("raw_text").get<std::string>());
    c.reference_calls = calls_from_json(j.at("reference_calls"));
    c.schemas = schemas_from_json(j.at("schemas"));
    c.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    if (j.contains("profile") && !j["profile"].is_null()) {
        c.profile = profile_from_json(j["profile"]);
    }
    return c;
}

}  // namespace toolcal
