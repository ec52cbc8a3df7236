#include "toolcal/grpo.hpp"

#include "toolcal/parse.hpp"
#include "toolcal/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

namespace toolcal {

std::vector<std::int64_t> default_length_buckets() {
    return {32, 64, 128, 256, 512, 1024};
}

std::vector<double> softmax(const std::vector<double> & logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (size_t i = 0; i < logits.size(); i++) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (auto & x : p) x /= z;
    return p;
}

void PolicyState::ensure_class(int class_id, const std::vector<double> & init) {
    if (has_class(class_id)) return;
    if (static_cast<int>(init.size()) != actions()) {
        throw std::invalid_argument("class init size must match the action space");
    }
    logits[class_id] = init;
    old_logits[class_id] = init;
    ref_logits.emplace(class_id, std::vector<double>(actions(), 0.0));
}

std::vector<double> PolicyState::probs(int class_id) const {
    auto it = logits.find(class_id);
    if (it == logits.end()) return softmax(std::vector<double>(actions(), 0.0));
    return softmax(it->second);
}

std::vector<double> PolicyState::old_probs(int class_id) const {
    auto it = old_logits.find(class_id);
    if (it == old_logits.end()) return softmax(std::vector<double>(actions(), 0.0));
    return softmax(it->second);
}

std::vector<double> PolicyState::ref_probs(int class_id) const {
    auto it = ref_logits.find(class_id);
    if (it == ref_logits.end()) return softmax(std::vector<double>(actions(), 0.0));
    return softmax(it->second);
}

void PolicyState::refresh_old() {
    old_logits = logits;
}

std::vector<double> group_advantages(const std::vector<double> & rewards, double eps_stab) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("group advantages need at least two rewards");
    }
    const double n = static_cast<double>(rewards.size());
    const double mu = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rewards) var += (r - mu) * (r - mu);
    var /= n;
    const double denom = std::sqrt(var) + eps_stab;
    std::vector<double> out(rewards.size());
    for (size_t i = 0; i < rewards.size(); i++) {
        out[i] = (rewards[i] - mu) / denom;
    }
    return out;
}

double clipped_term(double ratio, double advantage, double eps) {
    if (!(ratio > 0.0)) {
        throw std::invalid_argument("probability ratio must be positive");
    }
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    return std::min(ratio * advantage, clipped * advantage);
}

double kl_categorical(const std::vector<double> & p, const std::vector<double> & q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("KL requires identical support");
    }
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); i++) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) {
            throw std::invalid_argument("KL undefined: q vanishes where p is positive");
        }
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::NoSelection: return "no_selection";
        case Strategy::TwoStage:    return "two_stage";
        case Strategy::HardToEasy:  return "hard_to_easy";
        case Strategy::EasyToHard:  return "easy_to_hard";
    }
    return "easy_to_hard";
}

Strategy strategy_from_string(const std::string & s) {
    if (s == "no_selection") return Strategy::NoSelection;
    if (s == "two_stage")    return Strategy::TwoStage;
    if (s == "hard_to_easy") return Strategy::HardToEasy;
    if (s == "easy_to_hard") return Strategy::EasyToHard;
    throw std::invalid_argument("unknown curriculum strategy: " + s);
}

std::string to_string(RewardVariant v) {
    switch (v) {
        case RewardVariant::Composite:     return "composite";
        case RewardVariant::UnshapedThink: return "unshaped_think";
        case RewardVariant::ExactOnlyTool: return "exact_only";
    }
    return "composite";
}

RewardVariant reward_variant_from_string(const std::string & s) {
    if (s == "composite")      return RewardVariant::Composite;
    if (s == "unshaped_think") return RewardVariant::UnshapedThink;
    if (s == "exact_only")     return RewardVariant::ExactOnlyTool;
    throw std::invalid_argument("unknown reward variant: " + s);
}

void TrainConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("group size must be >= 2");
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw std::invalid_argument("clip margin must lie in (0,1)");
    if (kl_beta < 0.0) throw std::invalid_argument("KL coefficient must be >= 0");
    if (!(eps_stab > 0.0)) throw std::invalid_argument("stabilizer must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (total_steps < 0) throw std::invalid_argument("total steps must be >= 0");
    if (budget_percentile < 1 || budget_percentile > 100) {
        throw std::invalid_argument("budget percentile must lie in [1,100]");
    }
}

int TrainConfig::effective_warmup() const {
    if (t_warmup > 0) return t_warmup;
    return std::max(1, total_steps / 2);
}

json to_json(const TrainConfig & c) {
    return json{{"group_size", c.group_size},
                {"clip_eps", c.clip_eps},
                {"kl_beta", c.kl_beta},
                {"eps_stab", c.eps_stab},
                {"learning_rate", c.learning_rate},
                {"total_steps", c.total_steps},
                {"strategy", to_string(c.strategy)},
                {"seed", c.seed},
                {"reward_variant", to_string(c.reward_variant)},
                {"budget_percentile", c.budget_percentile},
                {"partition_threshold", c.partition_threshold},
                {"t_warmup", c.t_warmup}};
}

TrainConfig train_config_from_json(const json & j) {
    TrainConfig c;
    if (j.contains("group_size")) c.group_size = j["group_size"].get<int>();
    if (j.contains("clip_eps")) c.clip_eps = j["clip_eps"].get<double>();
    if (j.contains("kl_beta")) c.kl_beta = j["kl_beta"].get<double>();
    if (j.contains("eps_stab")) c.eps_stab = j["eps_stab"].get<double>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("total_steps")) c.total_steps = j["total_steps"].get<int>();
    if (j.contains("strategy")) c.strategy = strategy_from_string(j["strategy"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("reward_variant")) {
        c.reward_variant = reward_variant_from_string(j["reward_variant"].get<std::string>());
    }
    if (j.contains("budget_percentile")) c.budget_percentile = j["budget_percentile"].get<int>();
    if (j.contains("partition_threshold")) c.partition_threshold = j["partition_threshold"].get<double>();
    if (j.contains("t_warmup")) c.t_warmup = j["t_warmup"].get<int>();
    c.validate();
    return c;
}

namespace {

double safe_log(double p) {
    return std::log(std::max(p, 1e-300));
}

}  // namespace

double surrogate_objective(const TrajectoryGroup & group, const PolicyState & policy,
                           const TrainConfig & cfg) {
    if (group.actions.empty() || group.actions.size() != group.rewards.size() ||
        group.actions.size() != group.behavior_logp.size()) {
        throw std::invalid_argument("malformed trajectory group");
    }
    const std::vector<double> pi = policy.probs(group.class_id);
    const std::vector<double> adv = group_advantages(group.rewards, cfg.eps_stab);
    double acc = 0.0;
    for (size_t i = 0; i < group.actions.size(); i++) {
        const double ratio = pi[group.actions[i]] / std::exp(group.behavior_logp[i]);
        acc += clipped_term(ratio, adv[i], cfg.clip_eps);
    }
    acc /= static_cast<double>(group.actions.size());
    const double kl = kl_categorical(pi, policy.ref_probs(group.class_id));
    return acc - cfg.kl_beta * kl;
}

std::vector<double> surrogate_gradient(const TrajectoryGroup & group, const PolicyState & policy,
                                       const TrainConfig & cfg) {
    const std::vector<double> pi = policy.probs(group.class_id);
    const std::vector<double> ref = policy.ref_probs(group.class_id);
    const std::vector<double> adv = group_advantages(group.rewards, cfg.eps_stab);
    const size_t n = pi.size();
    const double g_inv = 1.0 / static_cast<double>(group.actions.size());
    std::vector<double> grad(n, 0.0);

    for (size_t i = 0; i < group.actions.size(); i++) {
        const int a = group.actions[i];
        const double ratio = pi[a] / std::exp(group.behavior_logp[i]);
        if (!(ratio > 0.0)) {
            throw std::invalid_argument("probability ratio must be positive");
        }
        const double unclipped = ratio * adv[i];
        const double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * adv[i];
        // d min(u, c)/d logits: the unclipped branch moves with the ratio; the
        // clipped branch is flat outside the clip window.
        bool moves = unclipped <= clipped;
        if (!moves && ratio > 1.0 - cfg.clip_eps && ratio < 1.0 + cfg.clip_eps) {
            moves = true;
        }
        if (moves) {
            const double coef = g_inv * adv[i] * ratio;
            for (size_t k = 0; k < n; k++) {
                grad[k] -= coef * pi[k];
            }
            grad[a] += coef;
        }
    }

    // KL(pi || ref) gradient: pi_k * (log(pi_k / ref_k) - KL).
    const double kl = kl_categorical(pi, ref);
    for (size_t k = 0; k < n; k++) {
        const double term = pi[k] * (safe_log(pi[k]) - safe_log(ref[k]) - kl);
        grad[k] -= cfg.kl_beta * term;
    }
    return grad;
}

void policy_step(PolicyState & policy, const std::vector<TrajectoryGroup> & groups,
                 const TrainConfig & cfg) {
    if (groups.empty()) {
        throw std::invalid_argument("policy step needs at least one group");
    }
    std::map<int, std::vector<double>> sums;
    std::map<int, int> counts;
    for (const auto & g : groups) {
        if (!policy.has_class(g.class_id)) {
            throw std::invalid_argument("policy step on unknown class " + std::to_string(g.class_id));
        }
        const std::vector<double> grad = surrogate_gradient(g, policy, cfg);
        auto & acc = sums[g.class_id];
        if (acc.empty()) acc.assign(grad.size(), 0.0);
        for (size_t k = 0; k < grad.size(); k++) acc[k] += grad[k];
        counts[g.class_id]++;
    }
    for (auto & [cid, acc] : sums) {
        auto & z = policy.logits.at(cid);
        for (size_t k = 0; k < acc.size(); k++) {
            const double step = cfg.learning_rate * acc[k] / counts[cid];
            if (!std::isfinite(step)) {
                throw std::runtime_error("non-finite policy gradient");
            }
            z[k] += step;
        }
    }
    policy.refresh_old();
}

RolloutResult rollout(const PolicyState & policy, const SimQuery & query, std::mt19937_64 & rng,
                      const SuccessModel & model) {
    const std::vector<double> pi = policy.old_probs(query.class_id);
    RolloutResult out;
    out.action = sample_categorical(rng, pi);
    out.behavior_logp = safe_log(pi[out.action]);

    const std::int64_t length = policy.length_of(out.action);
    const CallTemplate intent = policy.template_of(out.action);
    CallTemplate emitted = intent;
    if (intent == CallTemplate::Correct) {
        const double p = model.correct_probability(static_cast<double>(length),
                                                   static_cast<double>(query.length_need));
        if (rand_unit(rng) < p) {
            emitted = CallTemplate::Correct;
        } else {
            // Failure residual mirrors the policy's own preference among the
            // error templates at this bucket.
            const int bucket = policy.bucket_of(out.action);
            std::vector<double> weights(kTemplateCount - 1, 0.0);
            double total = 0.0;
            for (int e = 1; e < kTemplateCount; e++) {
                weights[e - 1] = pi[bucket * kTemplateCount + e];
                total += weights[e - 1];
            }
            if (total <= 1e-12) {
                weights.assign(kTemplateCount - 1, 1.0);
                total = static_cast<double>(kTemplateCount - 1);
            }
            for (auto & w : weights) w /= total;
            emitted = static_cast<CallTemplate>(1 + sample_categorical(rng, weights));
        }
    }
    out.emitted = emitted;

    std::vector<ToolCall> calls;
    calls.reserve(query.reference_calls.size());
    for (const auto & ref : query.reference_calls) {
        calls.push_back(apply_template(ref, emitted));
    }
    out.trajectory = parse_trajectory(render_emission(length, calls));
    return out;
}

std::vector<int> schedule_cases(const std::vector<ExecutionCase> & cases, Strategy strategy,
                                std::uint64_t seed, double partition_threshold) {
    for (const auto & c : cases) {
        if (!c.profile) {
            throw std::invalid_argument("cannot schedule unprofiled case '" + c.id + "'");
        }
    }
    std::vector<int> order(cases.size());
    std::iota(order.begin(), order.end(), 0);

    auto shuffle_range = [](std::vector<int> & v, std::mt19937_64 & rng) {
        for (size_t i = v.size(); i > 1; i--) {
            const size_t j = static_cast<size_t>(rand_below(rng, i));
            std::swap(v[i - 1], v[j]);
        }
    };

    switch (strategy) {
        case Strategy::EasyToHard:
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return cases[a].profile->hardness < cases[b].profile->hardness;
            });
            break;
        case Strategy::HardToEasy:
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return cases[a].profile->hardness > cases[b].profile->hardness;
            });
            break;
        case Strategy::TwoStage: {
            std::vector<int> easy, hard;
            for (int i : order) {
                (cases[i].profile->hardness <= partition_threshold ? easy : hard).push_back(i);
            }
            std::mt19937_64 rng_easy(stream_seed(seed, 0x2e5, 0, 0));
            std::mt19937_64 rng_hard(stream_seed(seed, 0x2e5, 1, 0));
            shuffle_range(easy, rng_easy);
            shuffle_range(hard, rng_hard);
            order = easy;
            order.insert(order.end(), hard.begin(), hard.end());
            break;
        }
        case Strategy::NoSelection: {
            std::mt19937_64 rng(stream_seed(seed, 0x75f, 0, 0));
            shuffle_range(order, rng);
            break;
        }
    }
    return order;
}

namespace {

// Per-case cache used by the training loop and the expected-metric report.
struct SimCase {
    SimQuery query;
    SchemaMap schemas;
    std::array<FailureProfile, kTemplateCount> template_flags;
    std::vector<double> p_correct;  // per bucket
};

void apply_reward_variant(RewardBreakdown & b, RewardVariant variant, double hardness_value) {
    switch (variant) {
        case RewardVariant::Composite:
            return;
        case RewardVariant::UnshapedThink:
            b.alpha = 1.0;
            b.r_think = b.r_a;
            b.r_total = b.r_think + b.r_format + b.r_tool;
            return;
        case RewardVariant::ExactOnlyTool: {
            b.r_tool = 2.0 * b.vector.r_exact - 1.0;
            b.r_a = 2.0 * b.r_tool;
            const ShapingCoefficients s =
                shaping_coefficient(hardness_value, b.r_a, static_cast<double>(b.length), b.l_emp);
            b.rho = s.rho;
            b.lambda = s.lambda;
            b.alpha = s.alpha;
            b.r_think = think_reward(b.alpha, b.r_a);
            b.r_total = b.r_think + b.r_format + b.r_tool;
            return;
        }
    }
}

struct ExpectedMetrics {
    std::vector<double> band_length;
    std::vector<double> band_exact;
    double overall_length = 0.0;
    double overall_exact = 0.0;
    double fail[5] = {0, 0, 0, 0, 0};
};

ExpectedMetrics expected_metrics(const std::vector<SimCase> & sims, const PolicyState & policy,
                                 const SuccessModel & model, int n_bands) {
    ExpectedMetrics m;
    m.band_length.assign(n_bands, 0.0);
    m.band_exact.assign(n_bands, 0.0);
    std::vector<int> band_counts(n_bands, 0);
    const int n_buckets = static_cast<int>(policy.buckets.size());
    std::map<int, std::vector<double>> class_probs;
    std::map<int, std::vector<double>> class_noise;
    for (const auto & sc : sims) {
        auto pit = class_probs.find(sc.query.class_id);
        if (pit == class_probs.end()) {
            pit = class_probs.emplace(sc.query.class_id, policy.probs(sc.query.class_id)).first;
            const std::vector<double> & probs = pit->second;
            // error-template preference per bucket, for the failure residual
            std::vector<double> noise(static_cast<size_t>(n_buckets) * (kTemplateCount - 1));
            for (int bkt = 0; bkt < n_buckets; bkt++) {
                double total = 0.0;
                for (int e = 1; e < kTemplateCount; e++) total += probs[bkt * kTemplateCount + e];
                for (int e = 1; e < kTemplateCount; e++) {
                    noise[bkt * (kTemplateCount - 1) + (e - 1)] =
                        total <= 1e-12 ? 1.0 / (kTemplateCount - 1)
                                       : probs[bkt * kTemplateCount + e] / total;
                }
            }
            class_noise.emplace(sc.query.class_id, std::move(noise));
        }
        const std::vector<double> & pi = pit->second;
        const std::vector<double> & noise = class_noise.at(sc.query.class_id);
        double exp_len = 0.0, exp_exact = 0.0, exp_fail[5] = {0, 0, 0, 0, 0};
        for (int a = 0; a < policy.actions(); a++) {
            const double pa = pi[a];
            const int bkt = policy.bucket_of(a);
            const CallTemplate t = policy.template_of(a);
            exp_len += pa * static_cast<double>(policy.buckets[bkt]);
            auto add_flags = [&](const FailureProfile & f, double w) {
                exp_fail[0] += w * (f.name_error ? 1.0 : 0.0);
                exp_fail[1] += w * (f.key_error ? 1.0 : 0.0);
                exp_fail[2] += w * (f.type_error ? 1.0 : 0.0);
                exp_fail[3] += w * (f.constraint_error ? 1.0 : 0.0);
                exp_fail[4] += w * (f.value_error ? 1.0 : 0.0);
            };
            if (t == CallTemplate::Correct) {
                const double p = sc.p_correct[bkt];
                exp_exact += pa * p;
                for (int e = 1; e < kTemplateCount; e++) {
                    const double w = pa * (1.0 - p) * noise[bkt * (kTemplateCount - 1) + (e - 1)];
                    add_flags(sc.template_flags[e], w);
                }
            } else {
                add_flags(sc.template_flags[static_cast<int>(t)], pa);
            }
        }
        (void) model;
        m.overall_length += exp_len;
        m.overall_exact += exp_exact;
        for (int f = 0; f < 5; f++) m.fail[f] += exp_fail[f];
        const int band = sc.query.band;
        m.band_length[band] += exp_len;
        m.band_exact[band] += exp_exact;
        band_counts[band]++;
    }
    const double n = static_cast<double>(sims.size());
    if (n > 0) {
        m.overall_length /= n;
        m.overall_exact /= n;
        for (int f = 0; f < 5; f++) m.fail[f] /= n;
    }
    for (int b = 0; b < n_bands; b++) {
        if (band_counts[b] > 0) {
            m.band_length[b] /= band_counts[b];
            m.band_exact[b] /= band_counts[b];
        }
    }
    return m;
}

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

TrainingReport train(const std::vector<ExecutionCase> & cases, const TrainConfig & cfg) {
    cfg.validate();
    if (cases.empty()) {
        throw std::invalid_argument("cannot train on an empty case base");
    }
    const std::vector<double> thresholds = default_band_thresholds();
    const ShapingConfig shaping =
        estimate_shaping_config(cases, cfg.budget_percentile, cfg.effective_warmup(), thresholds);
    const int n_bands = shaping.bands();
    const SuccessModel model;

    PolicyState policy;
    const int n_buckets = static_cast<int>(policy.buckets.size());

    // Query classes are (tool family, band); ids assigned in case order.
    std::map<std::pair<std::string, int>, int> class_ids;
    std::vector<SimCase> sims;
    sims.reserve(cases.size());
    std::vector<std::string> class_family;
    std::vector<int> class_band;
    for (const auto & c : cases) {
        SimCase sc;
        sc.query.id = c.id;
        sc.query.hardness = c.profile->hardness;
        sc.query.band = band_of(c.profile->hardness, thresholds);
        sc.query.reference_calls = c.reference_calls;
        sc.query.schemas = c.schemas;
        sc.query.length_need = length_need_from_hardness(c.profile->hardness);
        sc.schemas = schema_map(c.schemas);
        const std::string family =
            c.reference_calls.empty() ? std::string("(none)") : c.reference_calls[0].function_name;
        const auto key = std::make_pair(family, sc.query.band);
        auto it = class_ids.find(key);
        if (it == class_ids.end()) {
            it = class_ids.emplace(key, static_cast<int>(class_ids.size())).first;
            class_family.push_back(family);
            class_band.push_back(sc.query.band);
        }
        sc.query.class_id = it->second;
        for (int t = 0; t < kTemplateCount; t++) {
            std::vector<ToolCall> emitted;
            for (const auto & ref : sc.query.reference_calls) {
                emitted.push_back(apply_template(ref, static_cast<CallTemplate>(t)));
            }
            sc.template_flags[t] =
                derive_failure_profile(reward_vector(sc.query.reference_calls, emitted, sc.schemas));
        }
        for (int bkt = 0; bkt < n_buckets; bkt++) {
            sc.p_correct.push_back(model.correct_probability(
                static_cast<double>(policy.buckets[bkt]),
                static_cast<double>(sc.query.length_need)));
        }
        sims.push_back(std::move(sc));
    }

    const std::vector<int> stream =
        schedule_cases(cases, cfg.strategy, cfg.seed, cfg.partition_threshold);

    TrainingReport report;
    report.shaping = shaping;

    // Lazy class initialization with within-family transfer: a class first
    // touched by training starts from the most recently trained logits of its
    // own family (uniform when the family is fresh).
    std::map<std::string, int> family_last_trained;
    std::map<std::string, int> visits;

    for (int t = 0; t < cfg.total_steps; t++) {
        const int case_index = stream[t % stream.size()];
        SimCase & sc = sims[case_index];
        const int cid = sc.query.class_id;
        const std::string & family = class_family[cid];
        if (!policy.has_class(cid)) {
            auto inherit = family_last_trained.find(family);
            if (inherit != family_last_trained.end()) {
                policy.ensure_class(cid, policy.logits.at(inherit->second));
            } else {
                policy.ensure_class(cid, std::vector<double>(policy.actions(), 0.0));
            }
        }

        const int visit = visits[sc.query.id]++;
        TrajectoryGroup group;
        group.class_id = cid;
        group.query_id = sc.query.id;
        for (int i = 0; i < cfg.group_size; i++) {
            std::mt19937_64 rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(case_index),
                                            static_cast<std::uint64_t>(visit),
                                            static_cast<std::uint64_t>(i)));
            RolloutResult rr = rollout(policy, sc.query, rng, model);
            RewardBreakdown b = composite_reward(rr.trajectory, sc.query.reference_calls, sc.schemas,
                                                 sc.query.hardness, sc.query.band, t, shaping);
            apply_reward_variant(b, cfg.reward_variant, sc.query.hardness);
            group.actions.push_back(rr.action);
            group.behavior_logp.push_back(rr.behavior_logp);
            group.rewards.push_back(b.r_total);
        }

        StepMetrics sm;
        sm.step = t;
        sm.case_id = sc.query.id;
        sm.band = sc.query.band;
        const double n = static_cast<double>(group.rewards.size());
        const double mu = std::accumulate(group.rewards.begin(), group.rewards.end(), 0.0) / n;
        double var = 0.0;
        for (double r : group.rewards) var += (r - mu) * (r - mu);
        var /= n;
        sm.mean_reward = mu;
        sm.adv_variance = var / 16.0;  // reward range scale^2

        policy_step(policy, {group}, cfg);
        family_last_trained[family] = cid;

        const ExpectedMetrics em = expected_metrics(sims, policy, model, n_bands);
        sm.band_length = em.band_length;
        sm.band_exact = em.band_exact;
        sm.overall_length = em.overall_length;
        sm.overall_exact = em.overall_exact;
        sm.fail_name = em.fail[0];
        sm.fail_key = em.fail[1];
        sm.fail_type = em.fail[2];
        sm.fail_constraint = em.fail[3];
        sm.fail_value = em.fail[4];
        report.steps.push_back(std::move(sm));
    }

    const ExpectedMetrics em = expected_metrics(sims, policy, model, n_bands);
    report.final_band_length = em.band_length;
    report.final_band_exact = em.band_exact;
    report.final_length = em.overall_length;
    report.final_exact = em.overall_exact;
    report.final_fail_name = em.fail[0];
    report.final_fail_key = em.fail[1];
    report.final_fail_type = em.fail[2];
    report.final_fail_constraint = em.fail[3];
    report.final_fail_value = em.fail[4];

    // Structural failure rate: expected probability that an emission flags
    // any of name/key/type/constraint (value-only slips excluded).
    double structural = 0.0;
    for (const auto & sc : sims) {
        const std::vector<double> pi = policy.probs(sc.query.class_id);
        double case_structural = 0.0;
        for (int a = 0; a < policy.actions(); a++) {
            const int bkt = policy.bucket_of(a);
            const CallTemplate t = policy.template_of(a);
            if (t == CallTemplate::Correct) {
                double total = 0.0, weighted = 0.0;
                for (int e = 1; e < kTemplateCount; e++) {
                    total += pi[bkt * kTemplateCount + e];
                    weighted += pi[bkt * kTemplateCount + e] *
                                (sc.template_flags[e].structural() ? 1.0 : 0.0);
                }
                const double mix = total <= 1e-12
                                       ? 0.75  // three of four templates are structural
                                       : weighted / total;
                case_structural += pi[a] * (1.0 - sc.p_correct[bkt]) * mix;
            } else {
                case_structural +=
                    pi[a] * (sc.template_flags[static_cast<int>(t)].structural() ? 1.0 : 0.0);
            }
        }
        structural += case_structural;
    }
    report.final_structural = sims.empty() ? 0.0 : structural / static_cast<double>(sims.size());

    const int window = std::max(1, std::min(25, static_cast<int>(report.steps.size())));
    if (!report.steps.empty()) {
        double first = 0.0, last = 0.0;
        for (int i = 0; i < window; i++) first += report.steps[i].adv_variance;
        for (int i = 0; i < window; i++) {
            last += report.steps[report.steps.size() - 1 - i].adv_variance;
        }
        report.initial_adv_variance = first / window;
        report.final_adv_variance = last / window;
    }

    json classes = json::array();
    for (const auto & [key, cid] : class_ids) {
        json entry{{"id", cid}, {"family", key.first}, {"band", key.second}};
        entry["trained"] = policy.has_class(cid);
        if (policy.has_class(cid)) {
            entry["logits"] = policy.logits.at(cid);
        }
        classes.push_back(std::move(entry));
    }
    report.policy_snapshot = json{{"buckets", policy.buckets}, {"classes", classes}};
    return report;
}

std::string TrainingReport::to_csv() const {
    std::string out = "step,case_id,band,mean_reward,adv_variance";
    const size_t bands = final_band_length.size();
    for (size_t b = 0; b < bands; b++) out += ",length_band" + std::to_string(b);
    for (size_t b = 0; b < bands; b++) out += ",exact_band" + std::to_string(b);
    out += ",overall_length,overall_exact,fail_name,fail_key,fail_type,fail_constraint,fail_value\n";
    for (const auto & s : steps) {
        out += std::to_string(s.step) + "," + s.case_id + "," + std::to_string(s.band) + "," +
               fmt_double(s.mean_reward) + "," + fmt_double(s.adv_variance);
        for (size_t b = 0; b < bands; b++) out += "," + fmt_double(b < s.band_length.size() ? s.band_length[b] : 0.0);
        for (size_t b = 0; b < bands; b++) out += "," + fmt_double(b < s.band_exact.size() ? s.band_exact[b] : 0.0);
        out += "," + fmt_double(s.overall_length) + "," + fmt_double(s.overall_exact) + "," +
               fmt_double(s.fail_name) + "," + fmt_double(s.fail_key) + "," + fmt_double(s.fail_type) +
               "," + fmt_double(s.fail_constraint) + "," + fmt_double(s.fail_value) + "\n";
    }
    return out;
}

json TrainingReport::summary_json() const {
    return json{{"steps", steps.size()},
                {"final_band_length", final_band_length},
                {"final_band_exact", final_band_exact},
                {"final_length", final_length},
                {"final_exact", final_exact},
                {"final_structural", final_structural},
                {"final_fail", {{"name", final_fail_name},
                                {"key", final_fail_key},
                                {"type", final_fail_type},
                                {"constraint", final_fail_constraint},
                                {"value", final_fail_value}}},
                {"initial_adv_variance", initial_adv_variance},
                {"final_adv_variance", final_adv_variance},
                {"shaping", to_json(shaping)},
                {"policy", policy_snapshot}};
}

}  // namespace toolcal
