#pragma once

#include "toolcal/env.hpp"
#include "toolcal/shaping.hpp"
#include "toolcal/types.hpp"

#include <map>
#include <random>

namespace toolcal {

// --- policy ----------------------------------------------------------------

// Length buckets available to the simulated policy.
std::vector<std::int64_t> default_length_buckets();

// Categorical policy over (length bucket, call template) actions, one logit
// table per query class, with frozen reference and previous-iterate copies.
struct PolicyState {
    std::vector<std::int64_t> buckets = default_length_buckets();
    std::map<int, std::vector<double>> logits;
    std::map<int, std::vector<double>> old_logits;
    std::map<int, std::vector<double>> ref_logits;

    int actions() const { return static_cast<int>(buckets.size()) * kTemplateCount; }
    int bucket_of(int action) const { return action / kTemplateCount; }
    CallTemplate template_of(int action) const { return static_cast<CallTemplate>(action % kTemplateCount); }
    std::int64_t length_of(int action) const { return buckets[bucket_of(action)]; }

    bool has_class(int class_id) const { return logits.count(class_id) != 0; }
    void ensure_class(int class_id, const std::vector<double> & init);
    std::vector<double> probs(int class_id) const;
    std::vector<double> old_probs(int class_id) const;
    std::vector<double> ref_probs(int class_id) const;
    void refresh_old();
};

std::vector<double> softmax(const std::vector<double> & logits);

// --- GRPO math ---------------------------------------------------------------

// Group-relative advantages: (R - mean) / (population std + eps_stab).
std::vector<double> group_advantages(const std::vector<double> & rewards, double eps_stab);

// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A); ratio must be positive.
double clipped_term(double ratio, double advantage, double eps);

// Exact KL divergence between categorical distributions on the same support.
double kl_categorical(const std::vector<double> & p, const std::vector<double> & q);

struct TrajectoryGroup {
    int class_id = 0;
    std::string query_id;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<double> behavior_logp;  // log pi_old(action)
};

enum class Strategy { NoSelection, TwoStage, HardToEasy, EasyToHard };
enum class RewardVariant { Composite, UnshapedThink, ExactOnlyTool };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string & s);
std::string to_string(RewardVariant v);
RewardVariant reward_variant_from_string(const std::string & s);

struct TrainConfig {
    int group_size = 8;
    double clip_eps = 0.2;
    double kl_beta = 0.01;
    double eps_stab = 1e-8;
    double learning_rate = 0.35;
    int total_steps = 500;
    Strategy strategy = Strategy::EasyToHard;
    std::uint64_t seed = 1;
    RewardVariant reward_variant = RewardVariant::Composite;
    int budget_percentile = 80;
    double partition_threshold = 0.5;
    int t_warmup = 0;  // 0 -> half of total_steps

    void validate() const;
    int effective_warmup() const;
};

json to_json(const TrainConfig & c);
TrainConfig train_config_from_json(const json & j);

// Mean of clipped terms over the group minus beta * KL(pi || pi_ref) for the
// group's query class.
double surrogate_objective(const TrajectoryGroup & group, const PolicyState & policy,
                           const TrainConfig & cfg);

// Analytic gradient of surrogate_objective w.r.t. the class logits.
std::vector<double> surrogate_gradient(const TrajectoryGroup & group, const PolicyState & policy,
                                       const TrainConfig & cfg);

// One ascent step on each touched class (gradients averaged per class), then
// pi_old is refreshed. Throws on a non-finite gradient or empty input.
void policy_step(PolicyState & policy, const std::vector<TrajectoryGroup> & groups,
                 const TrainConfig & cfg);

// --- synthetic environment ---------------------------------------------------

struct SimQuery {
    int class_id = 0;
    std::string id;
    double hardness = 0.0;
    int band = 0;
    std::vector<ToolCall> reference_calls;
    std::vector<ToolSchema> schemas;
    std::int64_t length_need = 0;
};

struct RolloutResult {
    Trajectory trajectory;
    int action = 0;
    double behavior_logp = 0.0;
    CallTemplate emitted = CallTemplate::Correct;
};

// Samples one action from pi_old and emits a trajectory. An error-template
// action always emits its variant; a correct-template action succeeds with
// probability p(L) and otherwise degrades to an error variant drawn from the
// policy's own error-template preference at the same bucket.
RolloutResult rollout(const PolicyState & policy, const SimQuery & query, std::mt19937_64 & rng,
                      const SuccessModel & model = {});

// Deterministic training stream: indices into `cases`.
std::vector<int> schedule_cases(const std::vector<ExecutionCase> & cases, Strategy strategy,
                                std::uint64_t seed, double partition_threshold = 0.5);

// --- training loop -------------------------------------------------------------

struct StepMetrics {
    int step = 0;
    std::string case_id;
    int band = 0;
    double mean_reward = 0.0;
    double adv_variance = 0.0;  // within-group reward variance / 16
    std::vector<double> band_length;
    std::vector<double> band_exact;
    double overall_length = 0.0;
    double overall_exact = 0.0;
    double fail_name = 0.0, fail_key = 0.0, fail_type = 0.0, fail_constraint = 0.0, fail_value = 0.0;
};

struct TrainingReport {
    std::vector<StepMetrics> steps;
    std::vector<double> final_band_length;
    std::vector<double> final_band_exact;
    double final_length = 0.0;
    double final_exact = 0.0;
    double final_structural = 0.0;  // any of name/key/type/constraint flagged
    double final_fail_name = 0.0, final_fail_key = 0.0, final_fail_type = 0.0,
           final_fail_constraint = 0.0, final_fail_value = 0.0;
    double initial_adv_variance = 0.0;
    double final_adv_variance = 0.0;
    ShapingConfig shaping;
    json policy_snapshot;

    std::string to_csv() const;
    json summary_json() const;
};

// Runs the full loop: schedule -> sample group -> composite reward ->
// group advantages -> policy step. Pure function of (cases, cfg).
TrainingReport train(const std::vector<ExecutionCase> & cases, const TrainConfig & cfg);

}  // namespace toolcal
