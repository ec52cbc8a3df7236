#include "toolcal/validate.hpp"

#include "toolcal/values.hpp"

#include <stdexcept>

namespace toolcal {

ValidationReport validate_call(const ToolCall & call, const ToolSchema & schema) {
    if (call.function_name != schema.function_name) {
        throw std::invalid_argument("validate_call: function name mismatch: call '" +
                                    call.function_name + "' vs schema '" + schema.function_name + "'");
    }
    ValidationReport report;
    for (const auto & key : call.argument_keys()) {
        const json & value = call.arguments.at(key);
        const ParamSpec * spec = schema.find_param(key);
        Finding f = Finding::Ok;
        if (spec == nullptr) {
            f = Finding::UnknownKey;
        } else if (!kind_matches(value, spec->kind)) {
            f = Finding::TypeMismatch;
        } else if (!satisfies_all(value, *spec)) {
            f = Finding::ConstraintViolation;
        }
        report.findings.push_back({key, f});
    }
    for (const auto & p : schema.params) {
        if (p.required && !call.arguments.contains(p.name)) {
            report.findings.push_back({p.name, Finding::MissingRequired});
        }
    }
    return report;
}

}  // namespace toolcal
