#pragma once

#include "toolcal/types.hpp"

#include <random>

namespace toolcal {

// --- deterministic rng helpers -------------------------------------------
// All sampling goes through these instead of std::*_distribution so that
// seeded runs are byte-identical across standard libraries.

std::uint64_t mix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

std::uint64_t rand_u64(std::mt19937_64 & rng);
std::uint64_t rand_below(std::mt19937_64 & rng, std::uint64_t n);  // [0, n)
double rand_unit(std::mt19937_64 & rng);                           // [0, 1)
double rand_range(std::mt19937_64 & rng, double lo, double hi);
int sample_categorical(std::mt19937_64 & rng, const std::vector<double> & probs);

// --- synthetic tool-use environment ---------------------------------------

// Emission templates: the correct call plus one variant per structural
// failure dimension of interest.
enum class CallTemplate { Correct = 0, WrongName, MissingKey, WrongType, WrongValue };
constexpr int kTemplateCount = 5;

std::string to_string(CallTemplate t);

// Execution-success model: probability that a correct-template attempt comes
// out schema-exact given the reasoning length spent.
struct SuccessModel {
    double p_min = 0.2;
    double p_max = 0.95;

    double correct_probability(double length, double length_need) const;
};

// Deliberation requirement as a function of hardness (linear, increasing).
std::int64_t length_need_from_hardness(double hardness_value);

// A pool of synthetic tool schemas ("families"). Every family exposes one
// function with an integer, an enum string, and a ranged number parameter,
// which keeps the per-template reward values identical across families.
std::vector<ToolSchema> default_schema_pool(int families);

// The reference call a given case should make against its family schema.
ToolCall reference_call_for(const ToolSchema & schema, std::uint64_t case_key);

// Materializes one emission template for a reference call.
ToolCall apply_template(const ToolCall & reference, CallTemplate t);

// Renders the full trajectory text for an emission: a reasoning block of
// exactly `length_tokens` whitespace tokens followed by the call block.
std::string render_emission(std::int64_t length_tokens, const std::vector<ToolCall> & calls);

}  // namespace toolcal
