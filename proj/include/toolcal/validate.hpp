#pragma once

#include "toolcal/types.hpp"

namespace toolcal {

// Classifies every argument key of the call against the schema and reports
// required-but-absent parameters. Precondition: matching function names.
ValidationReport validate_call(const ToolCall & call, const ToolSchema & schema);

}  // namespace toolcal
