#pragma once

#include "toolcal/reward.hpp"
#include "toolcal/types.hpp"

namespace toolcal {

// Rubric scores for a failed trajectory, each in [0,1].
struct JudgeVerdict {
    double coherence = 0.0;
    double parameterization = 0.0;
    double schema_adherence = 0.0;
    double aggregate = 0.0;
};

json to_json(const JudgeVerdict & v);

// Hardness: 0 when the verifier passed, else 1 - judge score.
double hardness(bool verifier_pass, double judge_score);

// The exactness verifier: format-valid, canonically exact, and every call
// schema-clean under validate_call.
bool verify(const Trajectory & pred, const std::vector<ToolCall> & reference_calls,
            const SchemaMap & schemas);

// Deterministic rubric standing in for an external judge:
//   coherence          1 if format-valid else 0
//   parameterization   mean(r_key, r_value)
//   schema_adherence   mean(r_type, r_constraint)
//   aggregate          mean of the three
JudgeVerdict stub_judge(const Trajectory & trajectory, const RewardVector & v);

// Scoring interface so an external judge can replace the stub.
class Judge {
  public:
    virtual ~Judge() = default;
    virtual JudgeVerdict score(const ExecutionCase & c, const RewardVector & v) const = 0;
};

class StubJudge : public Judge {
  public:
    JudgeVerdict score(const ExecutionCase & c, const RewardVector & v) const override {
        return stub_judge(c.trajectory, v);
    }
};

// Difficulty band of a hardness value under ascending thresholds
// (default {1/3, 2/3} -> 3 bands).
std::vector<double> default_band_thresholds();
int band_of(double hardness_value, const std::vector<double> & thresholds = default_band_thresholds());

// Splits profiled cases into (easy, hard) with easy := hardness <= threshold,
// preserving order within each side. Throws on an unprofiled case.
std::pair<std::vector<ExecutionCase>, std::vector<ExecutionCase>>
partition(const std::vector<ExecutionCase> & cases, double threshold = 0.5);

// Runs verifier + judge over one case and fills its profile.
CaseProfile profile_case(const ExecutionCase & c, const Judge & judge,
                         const std::vector<double> & thresholds = default_band_thresholds());

}  // namespace toolcal
