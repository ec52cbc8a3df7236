#include "toolcal/env.hpp"

#include "toolcal/parse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toolcal {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t s = mix64(run_seed ^ 0xd6e8feb86659fd93ULL);
    s = mix64(s ^ a);
    s = mix64(s ^ b);
    s = mix64(s ^ c);
    return s;
}

std::uint64_t rand_u64(std::mt19937_64 & rng) {
    return rng();
}

std::uint64_t rand_below(std::mt19937_64 & rng, std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("rand_below: empty range");
    }
    // multiply-shift with rejection; unbiased and portable
    const std::uint64_t threshold = -n % n;
    for (;;) {
        const std::uint64_t x = rng();
        const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        const std::uint64_t lo = static_cast<std::uint64_t>(m);
        if (lo >= threshold) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

double rand_unit(std::mt19937_64 & rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_range(std::mt19937_64 & rng, double lo, double hi) {
    return lo + (hi - lo) * rand_unit(rng);
}

int sample_categorical(std::mt19937_64 & rng, const std::vector<double> & probs) {
    const double u = rand_unit(rng);
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); i++) {
        acc += probs[i];
        if (u < acc) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(probs.size()) - 1;
}

std::string to_string(CallTemplate t) {
    switch (t) {
        case CallTemplate::Correct:    return "correct";
        case CallTemplate::WrongName:  return "wrong_name";
        case CallTemplate::MissingKey: return "missing_key";
        case CallTemplate::WrongType:  return "wrong_type";
        case CallTemplate::WrongValue: return "wrong_value";
    }
    return "correct";
}

double SuccessModel::correct_probability(double length, double length_need) const {
    const double frac = length_need <= 0.0 ? 1.0 : std::min(1.0, length / length_need);
    return p_min + (p_max - p_min) * frac;
}

std::int64_t length_need_from_hardness(double hardness_value) {
    if (!(hardness_value >= 0.0 && hardness_value <= 1.0)) {
        throw std::invalid_argument("hardness must lie in [0,1]");
    }
    return static_cast<std::int64_t>(std::llround(64.0 + 960.0 * hardness_value));
}

std::vector<ToolSchema> default_schema_pool(int families) {
    if (families < 1) {
        throw std::invalid_argument("schema pool needs at least one family");
    }
    static const char * kNames[] = {"lookup_weather", "convert_units", "query_orders",
                                    "schedule_meeting", "search_flights", "update_profile",
                                    "fetch_stock", "translate_text"};
    static const char * kEnums[][3] = {
        {"celsius", "fahrenheit", "kelvin"}, {"metric", "imperial", "nautical"},
        {"open", "shipped", "returned"},     {"short", "standard", "extended"},
        {"economy", "business", "first"},    {"viewer", "editor", "admin"},
        {"daily", "weekly", "monthly"},      {"formal", "casual", "technical"}};
    std::vector<ToolSchema> pool;
    for (int f = 0; f < families; f++) {
        ToolSchema s;
        const int base = f % 8;
        s.function_name = std::string(kNames[base]) + (f >= 8 ? "_" + std::to_string(f / 8) : "");
        ParamSpec a{"amount", ValueKind::Integer, true, {Constraint::range(0.0, 1000000.0)}};
        ParamSpec b{"mode", ValueKind::String, true,
                    {Constraint::enum_set({json(kEnums[base][0]), json(kEnums[base][1]), json(kEnums[base][2])})}};
        ParamSpec c{"ratio", ValueKind::Number, true, {Constraint::range(0.0, 1.0)}};
        s.params = {a, b, c};
        pool.push_back(std::move(s));
    }
    return pool;
}

ToolCall reference_call_for(const ToolSchema & schema, std::uint64_t case_key) {
    ToolCall call;
    call.function_name = schema.function_name;
    const std::uint64_t k = mix64(case_key);
    const auto & mode_enum = schema.params[1].constraints[0].enum_values;
    call.arguments["amount"] = static_cast<std::int64_t>(10 + k % 900);
    call.arguments["mode"] = mode_enum[(k >> 17) % mode_enum.size()];
    call.arguments["ratio"] = 0.25 * static_cast<double>((k >> 40) % 4);  // exact quarters
    return call;
}

ToolCall apply_template(const ToolCall & reference, CallTemplate t) {
    ToolCall call = reference;
    switch (t) {
        case CallTemplate::Correct:
            break;
        case CallTemplate::WrongName:
            call.function_name += "_v2";
            break;
        case CallTemplate::MissingKey:
            call.arguments.erase("mode");
            call.arguments.erase("ratio");
            break;
        case CallTemplate::WrongType:
            call.arguments["amount"] = "unbounded";  // string where an integer belongs
            break;
        case CallTemplate::WrongValue:
            call.arguments["amount"] = reference.arguments["amount"].get<std::int64_t>() + 1;
            break;
    }
    return call;
}

std::string render_emission(std::int64_t length_tokens, const std::vector<ToolCall> & calls) {
    std::string reasoning;
    reasoning.reserve(static_cast<size_t>(length_tokens) * 3);
    for (std::int64_t i = 0; i < length_tokens; i++) {
        if (i) reasoning += ' ';
        reasoning += "mm";
    }
    return render_trajectory_text(reasoning, calls);
}

}  // namespace toolcal
