#include "toolcal/reward.hpp"

#include "toolcal/values.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace toolcal {

json to_json(const RewardVector & v) {
    return json{{"r_name", v.r_name},       {"r_key", v.r_key},
                {"r_type", v.r_type},       {"r_constraint", v.r_constraint},
                {"r_value", v.r_value},     {"r_exact", v.r_exact}};
}

RewardVector reward_vector(const std::vector<ToolCall> & refs,
                           const std::vector<ToolCall> & preds,
                           const SchemaMap & schemas) {
    for (const auto & r : refs) {
        if (schemas.find(r.function_name) == schemas.end()) {
            throw std::invalid_argument("no schema for reference function '" + r.function_name + "'");
        }
    }

    RewardVector v;
    // An exact canonical multiset match admits a perfect pairing, so every
    // dimension scores 1 regardless of how the name/key matcher would have
    // tie-broken the alignment. This also covers the both-empty case.
    if (calls_exactly_equal(refs, preds)) {
        v.r_name = v.r_key = v.r_type = v.r_constraint = v.r_value = v.r_exact = 1.0;
        return v;
    }

    // Predictions are scored as a multiset: aligning against a canonically
    // ordered copy keeps every component invariant under pred permutation
    // even when equal-affinity ties exist.
    std::vector<ToolCall> sorted_preds = preds;
    std::stable_sort(sorted_preds.begin(), sorted_preds.end(),
                     [](const ToolCall & a, const ToolCall & b) {
                         return canonical_call(a).dump() < canonical_call(b).dump();
                     });

    std::set<std::string> ref_names, pred_names;
    for (const auto & c : refs) ref_names.insert(c.function_name);
    for (const auto & c : preds) pred_names.insert(c.function_name);
    std::vector<std::string> name_inter, name_union;
    std::set_intersection(ref_names.begin(), ref_names.end(), pred_names.begin(), pred_names.end(),
                          std::back_inserter(name_inter));
    std::set_union(ref_names.begin(), ref_names.end(), pred_names.begin(), pred_names.end(),
                   std::back_inserter(name_union));
    v.r_name = name_union.empty() ? 0.0
                                  : static_cast<double>(name_inter.size()) / name_union.size();

    const Alignment alignment = align_calls(refs, sorted_preds);

    double key_sum = 0.0;
    double type_sum = 0.0, constraint_sum = 0.0, value_sum = 0.0;
    int overlap_count = 0;
    for (const auto & [ri, pj] : alignment.pairs) {
        const ToolCall & g = refs[ri];
        const ToolCall & p = sorted_preds[pj];
        const auto gk = g.argument_keys();
        const auto pk = p.argument_keys();
        std::vector<std::string> inter, uni;
        std::set_intersection(gk.begin(), gk.end(), pk.begin(), pk.end(), std::back_inserter(inter));
        std::set_union(gk.begin(), gk.end(), pk.begin(), pk.end(), std::back_inserter(uni));
        key_sum += uni.empty() ? 1.0 : static_cast<double>(inter.size()) / uni.size();

        const ToolSchema & schema = schemas.at(g.function_name);
        for (const auto & key : inter) {
            const json & gv = g.arguments.at(key);
            const json & pv = p.arguments.at(key);
            const ParamSpec * spec = schema.find_param(key);
            bool type_ok, constraint_ok;
            if (spec != nullptr) {
                type_ok = kind_matches(pv, spec->kind);
                constraint_ok = satisfies_all(pv, *spec);
            } else {
                // Key outside the declared schema: fall back to the reference
                // value's kind; no constraints to satisfy.
                type_ok = kind_of(pv) == kind_of(gv);
                constraint_ok = true;
            }
            type_sum += type_ok ? 1.0 : 0.0;
            constraint_sum += constraint_ok ? 1.0 : 0.0;
            value_sum += values_equal(pv, gv) ? 1.0 : 0.0;
            overlap_count++;
        }
    }
    v.r_key = alignment.pairs.empty() ? 0.0 : key_sum / alignment.pairs.size();
    if (overlap_count > 0) {
        v.r_type = type_sum / overlap_count;
        v.r_constraint = constraint_sum / overlap_count;
        v.r_value = value_sum / overlap_count;
    }
    v.r_exact = calls_exactly_equal(refs, preds) ? 1.0 : 0.0;
    return v;
}

double tool_reward(const RewardVector & v) {
    return 2.0 * v.raw_sum() / 6.0 - 1.0;
}

FailureProfile derive_failure_profile(const RewardVector & v) {
    FailureProfile f;
    f.name_error = v.r_name < 1.0;
    f.key_error = v.r_key < 1.0;
    f.type_error = v.r_type < 1.0;
    f.constraint_error = v.r_constraint < 1.0;
    f.value_error = v.r_value < 1.0;
    return f;
}

}  // namespace toolcal
