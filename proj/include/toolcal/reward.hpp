#pragma once

#include "toolcal/align.hpp"
#include "toolcal/types.hpp"

namespace toolcal {

// The six structural components, each in [0,1]; exact is 0/1.
struct RewardVector {
    double r_name = 0.0;
    double r_key = 0.0;
    double r_type = 0.0;
    double r_constraint = 0.0;
    double r_value = 0.0;
    double r_exact = 0.0;

    double raw_sum() const { return r_name + r_key + r_type + r_constraint + r_value + r_exact; }
};

json to_json(const RewardVector & v);

// Scores predicted calls against references under the best alignment.
//   r_name        Jaccard of the overall function-name sets
//   r_key         mean per-pair key Jaccard over aligned pairs (empty-empty -> 1)
//   r_type        mean indicator over overlapping keys: predicted kind matches
//                 the schema kind declared for the reference's key
//   r_constraint  mean indicator: predicted value satisfies the key's constraints
//   r_value       mean indicator: canonical equality with the reference value
//   r_exact       order-insensitive canonical multiset equality
// With both sides empty the vector is all ones (a correct "no call" answer).
// Throws when a reference function name has no schema.
RewardVector reward_vector(const std::vector<ToolCall> & refs,
                           const std::vector<ToolCall> & preds,
                           const SchemaMap & schemas);

// Normalized tool-side reward 2*sum/6 - 1 in [-1, 1].
double tool_reward(const RewardVector & v);

// Failure flags: a dimension is flagged iff its component is below 1.
// The exactness dimension has no failure counterpart.
FailureProfile derive_failure_profile(const RewardVector & v);

}  // namespace toolcal
