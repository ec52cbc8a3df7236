#include "toolcal/align.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace toolcal {

namespace {

struct KeyOverlap {
    int inter = 0;
    int uni = 0;
};

KeyOverlap key_overlap(const ToolCall & a, const ToolCall & b) {
    const auto ka = a.argument_keys();
    const auto kb = b.argument_keys();
    std::vector<std::string> inter, uni;
    std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(inter));
    std::set_union(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(uni));
    return {static_cast<int>(inter.size()), static_cast<int>(uni.size())};
}

long long gcd_ll(long long a, long long b) {
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Exact integer weights: s_match * D with D a common multiple of every key
// union size present, so ties and maxima are decided without float error.
constexpr long long kScaleCap = 1000000000000000LL;  // 1e15

long long common_scale(const std::vector<KeyOverlap> & overlaps) {
    long long d = 1;
    std::set<int> unions;
    for (const auto & o : overlaps) {
        if (o.uni > 1) unions.insert(o.uni);
    }
    for (int u : unions) {
        long long g = gcd_ll(d, u);
        if (d / g > kScaleCap / u) {
            return 0;  // overflow: caller falls back to rounded scaling
        }
        d = d / g * u;
    }
    return d;
}

// Hungarian algorithm (min-cost perfect assignment on an n x n matrix),
// potentials formulation. cost is row-major, n*n entries.
long long min_cost_assignment(const std::vector<long long> & cost, int n, std::vector<int> * row_of_col) {
    const long long INF = LLONG_MAX / 4;
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; i++) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, INF);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            long long delta = INF;
            for (int j = 1; j <= n; j++) {
                if (used[j]) continue;
                long long cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; j++) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    long long total = 0;
    for (int j = 1; j <= n; j++) {
        total += cost[(p[j] - 1) * n + (j - 1)];
    }
    if (row_of_col) {
        row_of_col->assign(n, -1);
        for (int j = 1; j <= n; j++) (*row_of_col)[j - 1] = p[j] - 1;
    }
    return total;
}

// Maximum total integer weight over assignments between the given row and
// column subsets (zero-padded to square, so cardinality min(|rows|,|cols|)).
long long best_weight(const std::vector<long long> & w, int n_cols_full,
                      const std::vector<int> & rows, const std::vector<int> & cols) {
    if (rows.empty() || cols.empty()) return 0;
    const int s = static_cast<int>(std::max(rows.size(), cols.size()));
    std::vector<long long> cost(static_cast<size_t>(s) * s, 0);
    for (size_t r = 0; r < rows.size(); r++) {
        for (size_t c = 0; c < cols.size(); c++) {
            cost[r * s + c] = -w[rows[r] * static_cast<size_t>(n_cols_full) + cols[c]];
        }
    }
    return -min_cost_assignment(cost, s, nullptr);
}

}  // namespace

double match_score(const ToolCall & ref, const ToolCall & pred) {
    const double delta = ref.function_name == pred.function_name ? 1.0 : 0.0;
    const KeyOverlap o = key_overlap(ref, pred);
    const double jaccard = o.uni == 0 ? 1.0 : static_cast<double>(o.inter) / o.uni;
    return delta + jaccard;
}

Alignment align_calls(const std::vector<ToolCall> & refs, const std::vector<ToolCall> & preds) {
    Alignment out;
    const int nr = static_cast<int>(refs.size());
    const int np = static_cast<int>(preds.size());
    if (nr == 0 || np == 0) {
        for (int i = 0; i < nr; i++) out.unmatched_refs.push_back(i);
        for (int j = 0; j < np; j++) out.unmatched_preds.push_back(j);
        return out;
    }

    std::vector<KeyOverlap> overlaps(static_cast<size_t>(nr) * np);
    for (int i = 0; i < nr; i++) {
        for (int j = 0; j < np; j++) {
            overlaps[i * static_cast<size_t>(np) + j] = key_overlap(refs[i], preds[j]);
        }
    }
    const long long scale = common_scale(overlaps);
    std::vector<long long> w(static_cast<size_t>(nr) * np);
    for (int i = 0; i < nr; i++) {
        for (int j = 0; j < np; j++) {
            const KeyOverlap & o = overlaps[i * static_cast<size_t>(np) + j];
            const long long delta = refs[i].function_name == preds[j].function_name ? 1 : 0;
            if (scale > 0) {
                const long long jac = o.uni == 0 ? scale : o.inter * (scale / o.uni);
                w[i * static_cast<size_t>(np) + j] = delta * scale + jac;
            } else {
                w[i * static_cast<size_t>(np) + j] =
                    llround(match_score(refs[i], preds[j]) * 1000000000000.0);
            }
        }
    }

    std::vector<int> all_rows(nr), all_cols(np);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const long long best_total = best_weight(w, np, all_rows, all_cols);
    const int cardinality = std::min(nr, np);

    // Greedy lexicographic reconstruction: for each ref in order, fix the
    // smallest pred that still completes to a max-weight full matching.
    std::vector<char> pred_used(np, false);
    long long fixed_weight = 0;
    for (int i = 0; i < nr; i++) {
        const int fixed = static_cast<int>(out.pairs.size());
        if (fixed == cardinality) break;
        std::vector<int> rest_rows;
        for (int r = i + 1; r < nr; r++) rest_rows.push_back(r);
        for (int j = 0; j < np; j++) {
            if (pred_used[j]) continue;
            std::vector<int> rest_cols;
            for (int c = 0; c < np; c++) {
                if (!pred_used[c] && c != j) rest_cols.push_back(c);
            }
            const int completion = static_cast<int>(std::min(rest_rows.size(), rest_cols.size()));
            if (fixed + 1 + completion != cardinality) continue;
            const long long candidate = fixed_weight + w[i * static_cast<size_t>(np) + j] +
                                        best_weight(w, np, rest_rows, rest_cols);
            if (candidate == best_total) {
                out.pairs.emplace_back(i, j);
                pred_used[j] = true;
                fixed_weight = fixed_weight + w[i * static_cast<size_t>(np) + j];
                break;
            }
        }
    }

    std::vector<char> ref_used(nr, false);
    for (const auto & [ri, pj] : out.pairs) {
        ref_used[ri] = true;
        out.total_weight += match_score(refs[ri], preds[pj]);
    }
    for (int i = 0; i < nr; i++) {
        if (!ref_used[i]) out.unmatched_refs.push_back(i);
    }
    for (int j = 0; j < np; j++) {
        if (!pred_used[j]) out.unmatched_preds.push_back(j);
    }
    return out;
}

}  // namespace toolcal
