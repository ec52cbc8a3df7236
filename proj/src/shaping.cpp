#include "toolcal/shaping.hpp"

#include "toolcal/profile.hpp"
#include "toolcal/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toolcal {

void ShapingConfig::validate() const {
    if (l_max.empty() || l_max.size() != l_target.size()) {
        throw std::invalid_argument("shaping config needs matching per-band l_max/l_target");
    }
    if (l_max.size() != band_thresholds.size() + 1) {
        throw std::invalid_argument("shaping config band count must match thresholds + 1");
    }
    for (size_t d = 0; d < l_max.size(); d++) {
        if (!(l_target[d] <= l_max[d])) {
            throw std::invalid_argument("l_target must not exceed l_max in band " + std::to_string(d));
        }
        if (!(l_target[d] > 0.0)) {
            throw std::invalid_argument("l_target must be positive in band " + std::to_string(d));
        }
    }
    if (t_warmup < 1) {
        throw std::invalid_argument("t_warmup must be >= 1");
    }
    if (!(min_budget > 0.0)) {
        throw std::invalid_argument("min_budget must be positive");
    }
}

json to_json(const ShapingConfig & c) {
    return json{{"l_max", c.l_max},
                {"l_target", c.l_target},
                {"t_warmup", c.t_warmup},
                {"min_budget", c.min_budget},
                {"band_thresholds", c.band_thresholds}};
}

ShapingConfig shaping_config_from_json(const json & j) {
    ShapingConfig c = default_shaping_config();
    if (j.contains("l_max")) c.l_max = j["l_max"].get<std::vector<double>>();
    if (j.contains("l_target")) c.l_target = j["l_target"].get<std::vector<double>>();
    if (j.contains("t_warmup")) c.t_warmup = j["t_warmup"].get<int>();
    if (j.contains("min_budget")) c.min_budget = j["min_budget"].get<double>();
    if (j.contains("band_thresholds")) c.band_thresholds = j["band_thresholds"].get<std::vector<double>>();
    c.validate();
    return c;
}

ShapingConfig default_shaping_config() {
    ShapingConfig c;
    c.l_max = {512.0, 768.0, 1024.0};
    c.l_target = {128.0, 256.0, 512.0};
    c.t_warmup = 250;
    return c;
}

namespace {

// Nearest-rank percentile of a sorted sample.
double percentile_of(const std::vector<double> & sorted, int pct) {
    if (sorted.empty()) {
        return 0.0;
    }
    const double rank = std::ceil(pct / 100.0 * sorted.size());
    const size_t idx = static_cast<size_t>(std::max(1.0, rank)) - 1;
    return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

ShapingConfig estimate_shaping_config(const std::vector<ExecutionCase> & cases, int percentile,
                                      int t_warmup, const std::vector<double> & thresholds) {
    if (percentile < 1 || percentile > 100) {
        throw std::invalid_argument("budget percentile must lie in [1,100]");
    }
    const int n_bands = static_cast<int>(thresholds.size()) + 1;
    std::vector<std::vector<double>> success_lengths(n_bands);
    std::vector<double> all_success;
    std::vector<double> max_observed(n_bands, 0.0);
    double global_max = 0.0;
    for (const auto & c : cases) {
        if (!c.profile) {
            throw std::invalid_argument("cannot estimate budgets from unprofiled case '" + c.id + "'");
        }
        const int band = band_of(c.profile->hardness, thresholds);
        const double len = static_cast<double>(c.trajectory.length_tokens);
        max_observed[band] = std::max(max_observed[band], len);
        global_max = std::max(global_max, len);
        const SchemaMap schemas = schema_map(c.schemas);
        if (verify(c.trajectory, c.reference_calls, schemas)) {
            success_lengths[band].push_back(len);
            all_success.push_back(len);
        }
    }
    std::sort(all_success.begin(), all_success.end());

    ShapingConfig cfg;
    cfg.t_warmup = t_warmup;
    cfg.band_thresholds = thresholds;
    for (int d = 0; d < n_bands; d++) {
        auto & lens = success_lengths[d];
        std::sort(lens.begin(), lens.end());
        double target = lens.empty() ? percentile_of(all_success, percentile)
                                     : percentile_of(lens, percentile);
        double maximum = max_observed[d] > 0.0 ? max_observed[d] : global_max;
        target = std::max(target, cfg.min_budget);
        maximum = std::max(maximum, target);
        cfg.l_target.push_back(target);
        cfg.l_max.push_back(maximum);
    }
    cfg.validate();
    return cfg;
}

double empirical_length(int band, std::int64_t step, const ShapingConfig & cfg) {
    if (band < 0 || band >= cfg.bands()) {
        throw std::invalid_argument("unknown band " + std::to_string(band));
    }
    if (step < 0) {
        throw std::invalid_argument("step must be nonnegative");
    }
    const double frac = std::min(1.0, static_cast<double>(step) / cfg.t_warmup);
    return cfg.l_max[band] - (cfg.l_max[band] - cfg.l_target[band]) * frac;
}

ShapingCoefficients shaping_coefficient(double hardness_value, double answer, double length,
                                        double l_emp) {
    if (!(hardness_value >= 0.0 && hardness_value <= 1.0)) {
        throw std::invalid_argument("hardness must lie in [0,1]");
    }
    if (!(l_emp > 0.0)) {
        throw std::invalid_argument("degenerate length baseline (l_emp <= 0)");
    }
    ShapingCoefficients s;
    s.rho = std::max(0.0, length / l_emp - 1.0);
    s.lambda = 1.0 - hardness_value;
    if (answer > 0.0) {
        s.alpha = std::max(0.0, 1.0 - s.lambda * s.rho);
    } else if (answer < 0.0) {
        s.alpha = 1.0 + s.lambda * s.rho;
    } else {
        s.alpha = 1.0;
    }
    return s;
}

double think_reward(double alpha, double answer) {
    return alpha * answer;
}

double answer_score(const RewardVector & v) {
    return 2.0 * tool_reward(v);
}

double format_reward(const Trajectory & traj) {
    return traj.format_valid ? 1.0 : -1.0;
}

json to_json(const RewardBreakdown & b) {
    json j{{"r_a", b.r_a},         {"l", b.length},        {"l_emp", b.l_emp},
           {"rho", b.rho},         {"lambda", b.lambda},   {"alpha", b.alpha},
           {"r_think", b.r_think}, {"r_format", b.r_format}, {"r_tool", b.r_tool},
           {"r_total", b.r_total}};
    j.update(to_json(b.vector));
    return j;
}

RewardBreakdown composite_reward(const Trajectory & traj, const std::vector<ToolCall> & refs,
                                 const SchemaMap & schemas, double hardness_value, int band,
                                 std::int64_t step, const ShapingConfig & cfg) {
    RewardBreakdown b;
    b.vector = reward_vector(refs, traj.calls, schemas);
    b.failure = derive_failure_profile(b.vector);
    b.verifier = verify(traj, refs, schemas);
    b.r_tool = tool_reward(b.vector);
    b.r_a = answer_score(b.vector);
    b.length = traj.length_tokens;
    b.l_emp = empirical_length(band, step, cfg);
    const ShapingCoefficients s =
        shaping_coefficient(hardness_value, b.r_a, static_cast<double>(b.length), b.l_emp);
    b.rho = s.rho;
    b.lambda = s.lambda;
    b.alpha = s.alpha;
    b.r_think = think_reward(b.alpha, b.r_a);
    b.r_format = format_reward(traj);
    b.r_total = b.r_think + b.r_format + b.r_tool;
    return b;
}

}  // namespace toolcal
