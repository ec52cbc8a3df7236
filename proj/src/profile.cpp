#include "toolcal/profile.hpp"

#include "toolcal/validate.hpp"
#include "toolcal/values.hpp"

#include <stdexcept>

namespace toolcal {

json to_json(const JudgeVerdict & v) {
    return json{{"coherence", v.coherence},
                {"parameterization", v.parameterization},
                {"schema_adherence", v.schema_adherence},
                {"aggregate", v.aggregate}};
}

double hardness(bool verifier_pass, double judge_score) {
    if (verifier_pass) {
        return 0.0;
    }
    if (!(judge_score >= 0.0 && judge_score <= 1.0)) {
        throw std::invalid_argument("judge score must lie in [0,1]");
    }
    return 1.0 - judge_score;
}

bool verify(const Trajectory & pred, const std::vector<ToolCall> & reference_calls,
            const SchemaMap & schemas) {
    if (!pred.format_valid) {
        return false;
    }
    if (!calls_exactly_equal(reference_calls, pred.calls)) {
        return false;
    }
    for (const auto & call : pred.calls) {
        auto it = schemas.find(call.function_name);
        if (it == schemas.end()) {
            return false;
        }
        if (!validate_call(call, it->second).all_ok()) {
            return false;
        }
    }
    return true;
}

JudgeVerdict stub_judge(const Trajectory & trajectory, const RewardVector & v) {
    JudgeVerdict out;
    out.coherence = trajectory.format_valid ? 1.0 : 0.0;
    out.parameterization = (v.r_key + v.r_value) / 2.0;
    out.schema_adherence = (v.r_type + v.r_constraint) / 2.0;
    out.aggregate = (out.coherence + out.parameterization + out.schema_adherence) / 3.0;
    return out;
}

std::vector<double> default_band_thresholds() {
    return {1.0 / 3.0, 2.0 / 3.0};
}

int band_of(double hardness_value, const std::vector<double> & thresholds) {
    if (!(hardness_value >= 0.0 && hardness_value <= 1.0)) {
        throw std::invalid_argument("hardness must lie in [0,1]");
    }
    int band = 0;
    for (double t : thresholds) {
        if (hardness_value >= t) band++;
    }
    return band;
}

std::pair<std::vector<ExecutionCase>, std::vector<ExecutionCase>>
partition(const std::vector<ExecutionCase> & cases, double threshold) {
    std::vector<ExecutionCase> easy, hard;
    for (const auto & c : cases) {
        if (!c.profile) {
            throw std::invalid_argument("cannot partition unprofiled case '" + c.id + "'");
        }
        (c.profile->hardness <= threshold ? easy : hard).push_back(c);
    }
    return {std::move(easy), std::move(hard)};
}

CaseProfile profile_case(const ExecutionCase & c, const Judge & judge,
                         const std::vector<double> & thresholds) {
    const SchemaMap schemas = schema_map(c.schemas);
    const RewardVector v = reward_vector(c.reference_calls, c.trajectory.calls, schemas);
    const bool pass = verify(c.trajectory, c.reference_calls, schemas);
    CaseProfile profile;
    if (pass) {
        profile.hardness = 0.0;
    } else {
        profile.hardness = hardness(false, judge.score(c, v).aggregate);
    }
    profile.band = band_of(profile.hardness, thresholds);
    profile.failure = derive_failure_profile(v);
    return profile;
}

}  // namespace toolcal
