#pragma once

#include "toolcal/types.hpp"

namespace toolcal {

// A maximum-weight assignment between reference and predicted calls.
// Pairs are sorted by ref index; every index appears exactly once across
// pairs and the unmatched lists.
struct Alignment {
    std::vector<std::pair<int, int>> pairs;  // (ref_index, pred_index)
    double total_weight = 0.0;
    std::vector<int> unmatched_refs;
    std::vector<int> unmatched_preds;
};

// Pairwise affinity: name equality indicator plus Jaccard overlap of the
// argument-key sets. Two empty key sets score 1 on the Jaccard term, so
// identical empty calls reach the maximum of 2.
double match_score(const ToolCall & ref, const ToolCall & pred);

// Maximum-weight bipartite matching over all ref/pred pairs (Kuhn–Munkres on
// a zero-padded square matrix). The matching always has min(|refs|,|preds|)
// pairs — zero-weight pairs are admitted — and ties between equal-weight
// matchings resolve to the lexicographically smallest pair list.
Alignment align_calls(const std::vector<ToolCall> & refs, const std::vector<ToolCall> & preds);

}  // namespace toolcal
