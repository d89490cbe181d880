#pragma once

#include <vector>

namespace dra {

struct BinningPolicy {
    long n_grp = 10;          // requested groups
    long n_min = 1;           // minimum observations per group
    long max_groups = 10000;  // cap on groups (and on n_grp derived from counts)
};

struct DistinctValue {
    double value = 0;  // strictly increasing across the input
    double count = 0;  // observations sharing the value (integer-valued)
};

// Target group size: max(int(N/n_grp + 0.5), n_min).
double bin_target_size(double n_total, const BinningPolicy& policy);

// Percentile grouping that never splits a distinct value: assign values
// greedily while the cumulative count stays under the target and at least
// half of the next value's count fits; collapse the last group into the
// previous one when its count is at most half the target. Returns a group
// index per distinct value, contiguous from 0.
std::vector<long> assign_bins(const std::vector<DistinctValue>& values,
                              const BinningPolicy& policy);

// Derived group request for the finest summaries: int(n_k / n_min), capped.
long groups_from_min_count(double n_k, long min_count, long max_groups);

// Merges any group smaller than n_min into a neighbor so every emitted
// group meets the floor (a single group is left as-is). The paper's
// collapse rule alone can leave an under-floor group when ties are heavy.
std::vector<long> repair_floor(const std::vector<long>& assignment,
                               const std::vector<DistinctValue>& values, long n_min);

}  // namespace dra
