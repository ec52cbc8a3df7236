#include "toolcal/store.hpp"

#include "toolcal/env.hpp"
#include "toolcal/parse.hpp"
#include "toolcal/profile.hpp"
#include "toolcal/reward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace toolcal {

LoadResult load_cases(const std::string & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open case file: " + path);
    }
    LoadResult result;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty()) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            result.skipped_lines.push_back(line_no);
            continue;
        }
        try {
            result.cases.push_back(case_from_json(j));
        } catch (const std::exception &) {
            result.skipped_lines.push_back(line_no);
        }
    }
    return result;
}

void save_cases(const std::string & path, const std::vector<ExecutionCase> & cases) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        throw std::runtime_error("cannot write case file: " + path);
    }
    for (const auto & c : cases) {
        out << to_json(c).dump() << "\n";
    }
}

CaseStore::CaseStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open case file: " + path_);
    }
    std::string line;
    std::streamoff offset = 0;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        const std::streamoff next = in.tellg() == std::streampos(-1)
                                        ? offset + static_cast<std::streamoff>(line.size()) + 1
                                        : static_cast<std::streamoff>(in.tellg());
        if (!line.empty()) {
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("id") || !j["id"].is_string()) {
                throw std::runtime_error("line " + std::to_string(line_no) + " of " + path_ +
                                         " is not a case record");
            }
            const std::string id = j["id"].get<std::string>();
            if (!index_.emplace(id, offset).second) {
                throw std::runtime_error("duplicate case id '" + id + "' in " + path_);
            }
        }
        offset = next;
    }
}

ExecutionCase CaseStore::get(const std::string & id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::runtime_error("no case with id '" + id + "' in " + path_);
    }
    std::ifstream in(path_, std::ios::binary);
    in.seekg(it->second);
    std::string line;
    std::getline(in, line);
    return case_from_json(json::parse(line));
}

std::vector<std::string> CaseStore::ids() const {
    std::vector<std::string> out;
    for (const auto & [id, off] : index_) out.push_back(id);
    return out;
}

GenSpec GenSpec::from_mix(int count, const std::vector<double> & shares, int families,
                          std::uint64_t seed) {
    if (shares.empty()) {
        throw std::invalid_argument("mix needs at least one share");
    }
    double total = 0.0;
    for (double s : shares) {
        if (s < 0.0) throw std::invalid_argument("mix shares must be nonnegative");
        total += s;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("mix shares must sum to a positive value");
    }
    GenSpec spec;
    spec.count = count;
    spec.families = families;
    spec.seed = seed;
    const double width = 1.0 / static_cast<double>(shares.size());
    for (size_t i = 0; i < shares.size(); i++) {
        spec.strata.push_back({shares[i] / total, i * width, (i + 1) * width});
    }
    return spec;
}

GenSpec default_gen_spec(std::uint64_t seed) {
    GenSpec spec;
    spec.count = 500;
    spec.families = 4;
    spec.seed = seed;
    spec.strata = {{0.5, 0.02, 0.18}, {0.2, 0.36, 0.60}, {0.3, 0.70, 0.95}};
    return spec;
}

namespace {

// Exact stratum allocation by largest remainder, then a seeded interleave.
std::vector<int> allocate_strata(const GenSpec & spec, std::mt19937_64 & rng) {
    const size_t k = spec.strata.size();
    std::vector<int> counts(k, 0);
    std::vector<std::pair<double, size_t>> remainders;
    int assigned = 0;
    for (size_t s = 0; s < k; s++) {
        const double exact = spec.strata[s].share * spec.count;
        counts[s] = static_cast<int>(std::floor(exact));
        assigned += counts[s];
        remainders.push_back({exact - std::floor(exact), s});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto & a, const auto & b) { return a.first > b.first; });
    for (int i = 0; assigned < spec.count; i = (i + 1) % static_cast<int>(k)) {
        counts[remainders[i % k].second]++;
        assigned++;
    }
    std::vector<int> labels;
    for (size_t s = 0; s < k; s++) {
        labels.insert(labels.end(), counts[s], static_cast<int>(s));
    }
    for (size_t i = labels.size(); i > 1; i--) {
        std::swap(labels[i - 1], labels[static_cast<size_t>(rand_below(rng, i))]);
    }
    return labels;
}

// Recorded reasoning length of a fabricated historical trajectory. Easy
// queries get tightly need-scaled traces; hard queries are a mixture of
// short shallow attempts and long deliberate ones.
std::int64_t recorded_length(int band, std::int64_t need, std::mt19937_64 & rng) {
    auto lognormal = [&](double sigma) {
        const double u1 = std::max(rand_unit(rng), 1e-12);
        const double u2 = rand_unit(rng);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return std::exp(sigma * z);
    };
    double len;
    if (band <= 0) {
        len = static_cast<double>(need) * lognormal(0.35);
    } else if (band == 1) {
        len = static_cast<double>(need) * lognormal(0.5);
    } else {
        if (rand_unit(rng) < 0.8) {
            len = 24.0 + static_cast<double>(rand_below(rng, 200));  // shallow attempt
        } else {
            len = static_cast<double>(need) * lognormal(0.3);
        }
    }
    return std::max<std::int64_t>(4, std::llround(std::min(len, 2048.0)));
}

double round12(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return std::stod(ss.str());
}

}  // namespace

std::vector<ExecutionCase> generate_cases(const GenSpec & spec) {
    if (spec.count < 0) {
        throw std::invalid_argument("case count must be nonnegative");
    }
    if (spec.count > 0 && spec.families < 1) {
        throw std::invalid_argument("case generation needs a nonempty schema pool");
    }
    for (const auto & s : spec.strata) {
        if (!(s.lo >= 0.0 && s.hi <= 1.0 && s.lo < s.hi)) {
            throw std::invalid_argument("stratum bounds must satisfy 0 <= lo < hi <= 1");
        }
    }
    std::vector<ExecutionCase> cases;
    if (spec.count == 0) {
        return cases;
    }
    const std::vector<ToolSchema> pool = default_schema_pool(spec.families);
    std::mt19937_64 alloc_rng(stream_seed(spec.seed, 0xa110c, 0, 0));
    const std::vector<int> labels = allocate_strata(spec, alloc_rng);
    const SuccessModel model;

    for (int i = 0; i < spec.count; i++) {
        std::mt19937_64 rng(stream_seed(spec.seed, 0xca5e, static_cast<std::uint64_t>(i), 0));
        const GenStratum & st = spec.strata[labels[i]];
        const double margin = 0.08 * (st.hi - st.lo);
        const double h = round12(rand_range(rng, st.lo + margin, st.hi - margin));
        const int band = band_of(h);
        const std::int64_t need = length_need_from_hardness(h);

        const ToolSchema & schema = pool[i % spec.families];
        const ToolCall reference = reference_call_for(schema, stream_seed(spec.seed, 0xca11, i, 0));

        const std::int64_t len = recorded_length(band, need, rng);
        const double p = model.correct_probability(static_cast<double>(len),
                                                   static_cast<double>(need));
        const bool success = rand_unit(rng) < p;
        const CallTemplate emitted =
            success ? CallTemplate::Correct
                    : static_cast<CallTemplate>(1 + rand_below(rng, kTemplateCount - 1));
        const ToolCall emitted_call = apply_template(reference, emitted);

        ExecutionCase c;
        char id[32];
        std::snprintf(id, sizeof(id), "case-%05d", i);
        c.id = id;
        c.query = "request " + std::to_string(i) + ": invoke " + schema.function_name;
        c.reference_calls = {reference};
        c.schemas = {schema};
        c.trajectory = parse_trajectory(render_emission(len, {emitted_call}));
        c.outcome = success ? Outcome::Success : Outcome::Failure;

        CaseProfile profile;
        profile.hardness = h;
        profile.band = band;
        profile.failure = derive_failure_profile(
            reward_vector(c.reference_calls, c.trajectory.calls, schema_map(c.schemas)));
        c.profile = profile;
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace toolcal
