#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace toolcal {

using json = nlohmann::json;

// The six literal kinds a tool argument may take.
enum class ValueKind { String, Integer, Number, Boolean, Array, Object };

std::string to_string(ValueKind k);
ValueKind value_kind_from_string(const std::string & s);

// A single parameter constraint: enum membership, inclusive numeric range,
// or a full-match regular expression over strings.
struct Constraint {
    enum class Type { EnumSet, Range, Pattern };
    Type type = Type::EnumSet;
    std::vector<json> enum_values;  // EnumSet
    double lo = 0.0, hi = 0.0;      // Range
    std::string pattern;            // Pattern

    static Constraint enum_set(std::vector<json> values);
    static Constraint range(double lo, double hi);
    static Constraint regex(std::string pattern);
};

struct ParamSpec {
    std::string name;
    ValueKind kind = ValueKind::String;
    bool required = false;
    std::vector<Constraint> constraints;
};

struct ToolSchema {
    std::string function_name;
    std::vector<ParamSpec> params;

    const ParamSpec * find_param(const std::string & name) const;
    void validate() const;  // throws std::invalid_argument on broken invariants
};

using SchemaMap = std::map<std::string, ToolSchema>;

SchemaMap schema_map(const std::vector<ToolSchema> & schemas);

// A structured tool invocation: a function name plus a key->literal map.
struct ToolCall {
    std::string function_name;
    json arguments = json::object();

    std::vector<std::string> argument_keys() const;
};

struct Trajectory {
    std::string raw_text;
    std::string reasoning;
    std::vector<ToolCall> calls;
    std::int64_t length_tokens = 0;
    bool format_valid = false;
};

struct FailureProfile {
    bool name_error = false;
    bool key_error = false;
    bool type_error = false;
    bool constraint_error = false;
    bool value_error = false;

    bool any() const { return name_error || key_error || type_error || constraint_error || value_error; }
    bool structural() const { return name_error || key_error || type_error || constraint_error; }
};

struct CaseProfile {
    double hardness = 0.0;
    int band = 0;
    FailureProfile failure;
};

enum class Outcome { Success, Failure };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string & s);

struct ExecutionCase {
    std::string id;
    std::string query;
    Trajectory trajectory;
    Outcome outcome = Outcome::Failure;
    std::vector<ToolCall> reference_calls;
    std::vector<ToolSchema> schemas;
    std::optional<CaseProfile> profile;
};

// Per-key classification produced by validate_call.
enum class Finding { Ok, UnknownKey, TypeMismatch, ConstraintViolation, MissingRequired };

std::string to_string(Finding f);

struct ValidationReport {
    struct Entry {
        std::string key;
        Finding finding = Finding::Ok;
    };
    std::vector<Entry> findings;

    bool all_ok() const;
};

// --- JSON (de)serialization for the on-disk case format (docs/FORMAT.md) ---

json to_json(const Constraint & c);
json to_json(const ParamSpec & p);
json to_json(const ToolSchema & s);
json to_json(const ToolCall & c);
json to_json(const FailureProfile & f);
json to_json(const CaseProfile & p);
json to_json(const ExecutionCase & c);

Constraint constraint_from_json(const json & j);
ParamSpec param_spec_from_json(const json & j);
ToolSchema schema_from_json(const json & j);
ToolCall call_from_json(const json & j);
std::vector<ToolCall> calls_from_json(const json & j);
std::vector<ToolSchema> schemas_from_json(const json & j);
FailureProfile failure_from_json(const json & j);
CaseProfile profile_from_json(const json & j);
ExecutionCase case_from_json(const json & j);

}  // namespace toolcal
