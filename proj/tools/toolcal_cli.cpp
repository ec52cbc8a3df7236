#include "toolcal/align.hpp"
#include "toolcal/grpo.hpp"
#include "toolcal/parse.hpp"
#include "toolcal/profile.hpp"
#include "toolcal/service.hpp"
#include "toolcal/shaping.hpp"
#include "toolcal/store.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace toolcal;

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

json read_json_file(const std::string & path) {
    std::ifstream in(path);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open " + path);
    }
    return json::parse(in);
}

void write_text_file(const std::string & path, const std::string & content) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        throw std::runtime_error("cannot write " + path);
    }
    out << content;
}

struct ConfigFile {
    ShapingConfig shaping = default_shaping_config();
    TrainConfig train;
    bool has_shaping = false;
};

ConfigFile load_config(const std::string & path) {
    ConfigFile cfg;
    if (path.empty()) {
        return cfg;
    }
    const json j = read_json_file(path);
    if (j.contains("shaping")) {
        cfg.shaping = shaping_config_from_json(j["shaping"]);
        cfg.has_shaping = true;
    }
    if (j.contains("train")) {
        cfg.train = train_config_from_json(j["train"]);
    }
    return cfg;
}

// Value may be inline JSON or @path to a file holding it.
json parse_inline_json(const std::string & arg) {
    if (!arg.empty() && arg[0] == '@') {
        return read_json_file(arg.substr(1));
    }
    return json::parse(arg);
}

int cmd_score(const std::string & cases_path, const std::string & config_path,
              const std::string & schemas_path, const std::string & out_path,
              std::int64_t step_override) {
    const ConfigFile cfg = load_config(config_path);
    SchemaMap extra;
    if (!schemas_path.empty()) {
        extra = schema_map(schemas_from_json(read_json_file(schemas_path)));
    }
    const LoadResult loaded = load_cases(cases_path);
    if (!loaded.skipped_lines.empty()) {
        std::cerr << "skipped " << loaded.skipped_lines.size() << " malformed line(s)\n";
    }

    std::string csv =
        "id,hardness,band,l,l_emp,rho,lambda,alpha,r_name,r_key,r_type,r_constraint,r_value,"
        "r_exact,r_tool,r_a,r_think,r_format,r_total,verifier\n";
    double sum_total = 0.0, sum_tool = 0.0, sum_think = 0.0, sum_len = 0.0;
    int verified = 0;
    for (const auto & c : loaded.cases) {
        SchemaMap schemas = extra;
        for (const auto & s : c.schemas) schemas[s.function_name] = s;
        const double h = c.profile ? c.profile->hardness : 0.5;
        const int band = c.profile ? c.profile->band : band_of(h, cfg.shaping.band_thresholds);
        const std::int64_t step = step_override >= 0 ? step_override : cfg.shaping.t_warmup;
        const RewardBreakdown b =
            composite_reward(c.trajectory, c.reference_calls, schemas, h, band, step, cfg.shaping);
        csv += c.id + "," + fmt(h) + "," + std::to_string(band) + "," + std::to_string(b.length) +
               "," + fmt(b.l_emp) + "," + fmt(b.rho) + "," + fmt(b.lambda) + "," + fmt(b.alpha) +
               "," + fmt(b.vector.r_name) + "," + fmt(b.vector.r_key) + "," + fmt(b.vector.r_type) +
               "," + fmt(b.vector.r_constraint) + "," + fmt(b.vector.r_value) + "," +
               fmt(b.vector.r_exact) + "," + fmt(b.r_tool) + "," + fmt(b.r_a) + "," +
               fmt(b.r_think) + "," + fmt(b.r_format) + "," + fmt(b.r_total) + "," +
               (b.verifier ? "1" : "0") + "\n";
        sum_total += b.r_total;
        sum_tool += b.r_tool;
        sum_think += b.r_think;
        sum_len += static_cast<double>(b.length);
        verified += b.verifier ? 1 : 0;
    }
    if (!out_path.empty()) {
        write_text_file(out_path, csv);
    } else {
        std::cout << csv;
    }
    const double n = loaded.cases.empty() ? 1.0 : static_cast<double>(loaded.cases.size());
    std::cout << "cases: " << loaded.cases.size() << "  mean_r_total: " << fmt(sum_total / n)
              << "  mean_r_tool: " << fmt(sum_tool / n) << "  mean_r_think: " << fmt(sum_think / n)
              << "  mean_length: " << fmt(sum_len / n) << "  verified: " << verified << "\n";
    return 0;
}

int cmd_profile(const std::string & cases_path, const std::string & out_path) {
    const LoadResult loaded = load_cases(cases_path);
    if (!loaded.skipped_lines.empty()) {
        std::cerr << "skipped " << loaded.skipped_lines.size() << " malformed line(s)\n";
    }
    StubJudge judge;
    std::vector<ExecutionCase> profiled;
    profiled.reserve(loaded.cases.size());
    for (auto c : loaded.cases) {
        c.profile = profile_case(c, judge);
        profiled.push_back(std::move(c));
    }
    save_cases(out_path, profiled);
    std::cout << "profiled " << profiled.size() << " case(s) -> " << out_path << "\n";
    return 0;
}

int cmd_match(const std::string & refs_arg, const std::string & preds_arg) {
    const std::vector<ToolCall> refs = calls_from_json(parse_inline_json(refs_arg));
    const std::vector<ToolCall> preds = calls_from_json(parse_inline_json(preds_arg));
    const Alignment a = align_calls(refs, preds);
    std::cout << "pairs:";
    for (const auto & [r, p] : a.pairs) {
        std::cout << " (" << r << "," << p << ")";
    }
    std::cout << "\ntotal_weight: " << fmt(a.total_weight) << "\n";
    std::cout << "unmatched_refs:";
    for (int r : a.unmatched_refs) std::cout << " " << r;
    std::cout << "\nunmatched_preds:";
    for (int p : a.unmatched_preds) std::cout << " " << p;
    std::cout << "\n";
    for (const auto & [r, p] : a.pairs) {
        std::cout << "  s_match(" << r << "," << p << ") = " << fmt(match_score(refs[r], preds[p]))
                  << "\n";
    }
    return 0;
}

int cmd_generate(int count, const std::string & mix, int families, std::uint64_t seed,
                 const std::string & out_path) {
    GenSpec spec;
    if (mix.empty()) {
        spec = default_gen_spec(seed);
        spec.count = count;
        spec.families = families;
    } else {
        std::vector<double> shares;
        std::stringstream ss(mix);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            shares.push_back(std::stod(tok));
        }
        spec = GenSpec::from_mix(count, shares, families, seed);
    }
    const std::vector<ExecutionCase> cases = generate_cases(spec);
    save_cases(out_path, cases);
    std::cout << "generated " << cases.size() << " case(s) -> " << out_path << "\n";
    return 0;
}

int cmd_simulate(const std::string & cases_path, const std::string & config_path,
                 const std::string & strategy, int steps, std::int64_t seed,
                 const std::string & variant, int budget_percentile, const std::string & out_csv,
                 const std::string & out_summary) {
    const ConfigFile cfg_file = load_config(config_path);
    TrainConfig cfg = cfg_file.train;
    if (!strategy.empty()) cfg.strategy = strategy_from_string(strategy);
    if (steps >= 0) cfg.total_steps = steps;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!variant.empty()) cfg.reward_variant = reward_variant_from_string(variant);
    if (budget_percentile > 0) cfg.budget_percentile = budget_percentile;

    std::vector<ExecutionCase> cases;
    if (cases_path.empty()) {
        cases = generate_cases(default_gen_spec(cfg.seed));
    } else {
        const LoadResult loaded = load_cases(cases_path);
        if (!loaded.skipped_lines.empty()) {
            std::cerr << "skipped " << loaded.skipped_lines.size() << " malformed line(s)\n";
        }
        cases = loaded.cases;
    }

    const TrainingReport report = train(cases, cfg);
    if (!out_csv.empty()) {
        write_text_file(out_csv, report.to_csv());
    }
    const json summary = report.summary_json();
    if (!out_summary.empty()) {
        write_text_file(out_summary, summary.dump(2) + "\n");
    }
    json brief = summary;
    brief.erase("policy");
    std::cout << brief.dump(2) << "\n";
    return 0;
}

int cmd_serve(const std::string & transport, int port, const std::string & config_path,
              const std::string & schemas_path) {
    const ConfigFile cfg = load_config(config_path);
    std::vector<ToolSchema> defaults;
    if (!schemas_path.empty()) {
        defaults = schemas_from_json(read_json_file(schemas_path));
    }
    RewardService service(cfg.shaping, defaults);
    if (transport == "stdio") {
        serve_stream(service, std::cin, std::cout);
        return 0;
    }
    if (transport == "socket") {
        serve_socket(service, port);
        return 0;
    }
    throw std::runtime_error("unknown transport '" + transport + "'");
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{"deterministic reward engine and training simulator for LLM tool use"};
    app.require_subcommand(1);

    std::string cases_path, config_path, schemas_path, out_path, summary_path;
    std::string refs_arg, preds_arg, mix, strategy, variant, transport = "stdio";
    int count = 500, families = 4, steps = -1, port = 7711, budget_percentile = -1;
    std::int64_t seed = -1, step_override = -1;

    auto * score = app.add_subcommand("score", "batch-score a case file and print the breakdown");
    score->add_option("--cases", cases_path, "case file (JSONL)")->required();
    score->add_option("--config", config_path, "config file (JSON)");
    score->add_option("--schemas", schemas_path, "extra schema file (JSON array)");
    score->add_option("--out", out_path, "write per-case CSV here instead of stdout");
    score->add_option("--step", step_override, "training step used for the length baseline");

    auto * profile = app.add_subcommand("profile", "populate case profiles via verifier + judge");
    profile->add_option("--cases", cases_path, "case file (JSONL)")->required();
    profile->add_option("--out", out_path, "output case file")->required();

    auto * match = app.add_subcommand("match", "print the call alignment for two call lists");
    match->add_option("--refs", refs_arg, "reference calls (JSON or @file)")->required();
    match->add_option("--preds", preds_arg, "predicted calls (JSON or @file)")->required();

    auto * generate = app.add_subcommand("generate", "write a synthetic case base");
    generate->add_option("--count", count, "number of cases");
    generate->add_option("--mix", mix, "comma-separated hardness mix, e.g. 0.7,0.3");
    generate->add_option("--families", families, "number of tool families");
    generate->add_option("--seed", seed, "rng seed");
    generate->add_option("--out", out_path, "output case file")->required();

    auto * simulate = app.add_subcommand("simulate", "run the desk-scale training loop");
    simulate->add_option("--cases", cases_path, "case file (default: built-in synthetic suite)");
    simulate->add_option("--config", config_path, "config file (JSON)");
    simulate->add_option("--strategy", strategy,
                         "no_selection | two_stage | hard_to_easy | easy_to_hard");
    simulate->add_option("--steps", steps, "policy updates to run");
    simulate->add_option("--seed", seed, "rng seed");
    simulate->add_option("--variant", variant, "composite | unshaped_think | exact_only");
    simulate->add_option("--budget-percentile", budget_percentile, "length budget percentile");
    simulate->add_option("--out", out_path, "metrics CSV path");
    simulate->add_option("--summary", summary_path, "summary JSON path");

    auto * serve = app.add_subcommand("serve", "start the scoring service");
    serve->add_option("--transport", transport, "stdio | socket");
    serve->add_option("--port", port, "port for socket transport");
    serve->add_option("--config", config_path, "config file (JSON)");
    serve->add_option("--schemas", schemas_path, "default schema file (JSON array)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (score->parsed()) {
            return cmd_score(cases_path, config_path, schemas_path, out_path, step_override);
        }
        if (profile->parsed()) {
            return cmd_profile(cases_path, out_path);
        }
        if (match->parsed()) {
            return cmd_match(refs_arg, preds_arg);
        }
        if (generate->parsed()) {
            return cmd_generate(count, mix, families,
                                seed >= 0 ? static_cast<std::uint64_t>(seed) : 1, out_path);
        }
        if (simulate->parsed()) {
            return cmd_simulate(cases_path, config_path, strategy, steps, seed, variant,
                                budget_percentile, out_path, summary_path);
        }
        if (serve->parsed()) {
            return cmd_serve(transport, port, config_path, schemas_path);
        }
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
