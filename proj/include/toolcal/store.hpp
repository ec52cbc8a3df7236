#pragma once

#include "toolcal/types.hpp"

#include <cstdint>

namespace toolcal {

// JSONL case persistence: one case record per LF-terminated line.

struct LoadResult {
    std::vector<ExecutionCase> cases;
    std::vector<int> skipped_lines;  // 1-based line numbers of malformed records
};

// Reads every well-formed record; malformed lines are counted and skipped.
// Throws only when the file cannot be read at all.
LoadResult load_cases(const std::string & path);

void save_cases(const std::string & path, const std::vector<ExecutionCase> & cases);

// Random-access index over a case file.
class CaseStore {
  public:
    explicit CaseStore(std::string path);

    const std::string & path() const { return path_; }
    std::size_t count() const { return index_.size(); }
    bool contains(const std::string & id) const { return index_.count(id) != 0; }
    ExecutionCase get(const std::string & id) const;
    std::vector<std::string> ids() const;

  private:
    std::string path_;
    std::map<std::string, std::streamoff> index_;
};

// --- synthetic case generation ---------------------------------------------

struct GenStratum {
    double share = 1.0;
    double lo = 0.0;
    double hi = 1.0;
};

struct GenSpec {
    int count = 500;
    std::vector<GenStratum> strata;
    int families = 4;
    std::uint64_t seed = 1;

    // Equal subdivisions of [0,1], one per share (e.g. {0.7, 0.3} ->
    // [0,0.5] and (0.5,1]); hardness is drawn away from the edges.
    static GenSpec from_mix(int count, const std::vector<double> & shares, int families,
                            std::uint64_t seed);
};

// The tuned default suite used by `simulate` when no case file is given.
GenSpec default_gen_spec(std::uint64_t seed);

// Deterministic under seed; the stratum histogram matches the requested mix
// exactly. Cases arrive profiled (hardness, band, failure flags) with
// internally consistent trajectories and outcomes.
std::vector<ExecutionCase> generate_cases(const GenSpec & spec);

}  // namespace toolcal
