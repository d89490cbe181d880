#include "binning.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace dra {

double bin_target_size(double n_total, const BinningPolicy& policy) {
    if (policy.n_grp < 1)
        throw ConfigError("requested group count must be at least 1");
    double target = std::trunc(n_total / static_cast<double>(policy.n_grp) + 0.5);
    return std::max(target, static_cast<double>(policy.n_min));
}

std::vector<long> assign_bins(const std::vector<DistinctValue>& values,
                              const BinningPolicy& policy) {
    if (values.empty())
        throw DataError("cannot bin an empty value list");
    double n_total = 0;
    for (size_t j = 0; j < values.size(); ++j) {
        if (values[j].count < 1)
            throw DataError("distinct-value counts must be at least 1");
        if (j > 0 && !(values[j].value > values[j - 1].value))
            throw DataError("distinct values must be strictly increasing");
        n_total += values[j].count;
    }
    const double target = bin_target_size(n_total, policy);

    std::vector<long> group(values.size());
    long g = 0;
    double cum = values[0].count;
    group[0] = 0;
    for (size_t j = 1; j < values.size(); ++j) {
        double f = values[j].count;
        if (cum < target && cum + f / 2.0 <= target) {
            group[j] = g;
            cum += f;
        } else {
            group[j] = ++g;
            cum = f;
        }
    }
    // Collapse an undersized final group into the previous one.
    if (g > 0 && cum <= target / 2.0) {
        for (auto& gj : group)
            if (gj == g) gj = g - 1;
    }
    return group;
}

long groups_from_min_count(double n_k, long min_count, long max_groups) {
    if (min_count < 1)
        throw ConfigError("min_count_per_grp must be at least 1");
    long n_grp = static_cast<long>(std::trunc(n_k / static_cast<double>(min_count)));
    n_grp = std::max(1L, n_grp);
    return std::min(n_grp, max_groups);
}

std::vector<long> repair_floor(const std::vector<long>& assignment,
                               const std::vector<DistinctValue>& values, long n_min) {
    std::vector<long> group = assignment;
    for (;;) {
        long n_groups = *std::max_element(group.begin(), group.end()) + 1;
        if (n_groups <= 1) return group;
        std::vector<double> counts(static_cast<size_t>(n_groups), 0.0);
        for (size_t j = 0; j < group.size(); ++j)
            counts[static_cast<size_t>(group[j])] += values[j].count;
        long victim = -1;
        for (long gi = 0; gi < n_groups; ++gi)
            if (counts[static_cast<size_t>(gi)] < static_cast<double>(n_min)) {
                victim = gi;
                break;
            }
        if (victim < 0) return group;
        long into = victim > 0 ? victim - 1 : 1;
        for (auto& gj : group) {
            if (gj == victim) gj = into;
            if (gj > victim) --gj;  // keep indices contiguous
        }
    }
}

}  // namespace dra
