#pragma once

// Test-only oracles: straight-line evaluations of the scoring definitions,
// sharing only the data types with the library under test.

#include "toolcal/types.hpp"

#include <random>

namespace oracles {

using toolcal::json;
using toolcal::SchemaMap;
using toolcal::ToolCall;
using toolcal::ToolSchema;

// Common integer scale that makes every pair weight exact (key unions here
// never exceed 16).
constexpr long long kScale = 720720;  // lcm(1..16)

// Pair affinity as an exact scaled integer.
long long pair_weight_scaled(const ToolCall & ref, const ToolCall & pred);

// Maximum total pair weight over all injective assignments, by enumeration.
long long best_weight_scaled(const std::vector<ToolCall> & refs,
                             const std::vector<ToolCall> & preds);

// The lexicographically smallest maximum-weight max-cardinality pair list.
std::vector<std::pair<int, int>> best_pairs(const std::vector<ToolCall> & refs,
                                            const std::vector<ToolCall> & preds);

// Direct evaluation of the six structural components.
struct NaiveVector {
    double r_name, r_key, r_type, r_constraint, r_value, r_exact;
};
NaiveVector naive_reward_vector(const std::vector<ToolCall> & refs,
                                const std::vector<ToolCall> & preds, const SchemaMap & schemas);

// Random instance generators (deterministic under the given engine).
struct Instance {
    std::vector<ToolCall> refs;
    std::vector<ToolCall> preds;
    std::vector<ToolSchema> schemas;
};
Instance random_instance(std::mt19937_64 & rng, int max_calls, int max_params);

}  // namespace oracles
