#pragma once

#include "toolcal/reward.hpp"
#include "toolcal/types.hpp"

namespace toolcal {

// Per-band length budgets plus the warm-up horizon for the annealed baseline.
struct ShapingConfig {
    std::vector<double> l_max;     // initial relaxed limit per band
    std::vector<double> l_target;  // target concise length per band
    int t_warmup = 250;
    double min_budget = 16.0;  // floor for degenerate band estimates
    std::vector<double> band_thresholds{1.0 / 3.0, 2.0 / 3.0};

    int bands() const { return static_cast<int>(l_max.size()); }
    void validate() const;  // throws on broken invariants
};

json to_json(const ShapingConfig & c);
ShapingConfig shaping_config_from_json(const json & j);

// Fallback used when no case base is available (one entry per band).
ShapingConfig default_shaping_config();

// Budgets from data: per band, l_target = percentile of reasoning lengths
// among verified-successful cases, l_max = maximum observed length in the
// band. Bands with no successful cases fall back to the global percentile,
// and everything is floored at min_budget.
ShapingConfig estimate_shaping_config(const std::vector<ExecutionCase> & cases,
                                      int percentile = 80, int t_warmup = 250,
                                      const std::vector<double> & thresholds = {1.0 / 3.0, 2.0 / 3.0});

// Eq.-style annealed baseline: l_max -> l_target linearly over t_warmup steps.
double empirical_length(int band, std::int64_t step, const ShapingConfig & cfg);

struct ShapingCoefficients {
    double rho = 0.0;     // excess-length ratio, max(0, L/L_emp - 1)
    double lambda = 0.0;  // gating weight, 1 - hardness
    double alpha = 1.0;   // piecewise multiplier applied to the answer score
};

ShapingCoefficients shaping_coefficient(double hardness_value, double answer, double length,
                                        double l_emp);

// Reasoning-side reward alpha * r_a.
double think_reward(double alpha, double answer);

// Answer-score proxy: 2 * tool_reward in [-2, 2].
double answer_score(const RewardVector & v);

// Tag-encapsulation guardrail: +1 well-formed, -1 otherwise.
double format_reward(const Trajectory & traj);

// Full decomposition of the composite reward for one trajectory.
struct RewardBreakdown {
    double r_a = 0.0;
    std::int64_t length = 0;
    double l_emp = 0.0;
    double rho = 0.0;
    double lambda = 0.0;
    double alpha = 1.0;
    double r_think = 0.0;
    double r_format = 0.0;
    double r_tool = 0.0;
    double r_total = 0.0;
    RewardVector vector;
    FailureProfile failure;
    bool verifier = false;
};

json to_json(const RewardBreakdown & b);

RewardBreakdown composite_reward(const Trajectory & traj, const std::vector<ToolCall> & refs,
                                 const SchemaMap & schemas, double hardness_value, int band,
                                 std::int64_t step, const ShapingConfig & cfg);

}  // namespace toolcal
