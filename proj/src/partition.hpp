#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dra {

// Seeded Fisher-Yates with mt19937_64 and multiply-shift bounded indices:
// reproducible across platforms, unlike std::shuffle.
void seeded_shuffle(std::vector<size_t>& indices, std::uint64_t seed);

struct PartitionOptions {
    std::vector<size_t> sizes;  // explicit sizes; empty => near-equal split into k
    size_t k = 0;
    std::uint64_t seed = 0;
    bool add_site_dummies = false;  // dummy_dp_var2..varK columns, partner 1 reference
};

// Splits a CSV into <name>_<k>.csv files (test-mode naming), preserving
// cell text verbatim. Returns the written file paths.
std::vector<std::filesystem::path> partition_csv(const std::filesystem::path& input,
                                                 const PartitionOptions& options,
                                                 const std::filesystem::path& out_dir,
                                                 const std::string& name);

}  // namespace dra
