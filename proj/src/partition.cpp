#include "partition.hpp"

#include <numeric>
#include <random>

#include "csv.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace dra {

namespace {

// Lemire's multiply-shift reduction of a 64-bit draw onto [0, bound).
// The modulo bias is below 2^-64 per draw; what matters here is that the
// mapping is pinned, not implementation-defined.
size_t bounded(std::mt19937_64& rng, size_t bound) {
    using u128 = unsigned __int128;
    return static_cast<size_t>((u128(rng()) * u128(bound)) >> 64);
}

}  // namespace

void seeded_shuffle(std::vector<size_t>& indices, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (size_t i = indices.size(); i > 1; --i)
        std::swap(indices[i - 1], indices[bounded(rng, i)]);
}

std::vector<fs::path> partition_csv(const fs::path& input, const PartitionOptions& options,
                                    const fs::path& out_dir, const std::string& name) {
    CsvTable t = read_csv_file(input.string());
    const size_t n = t.rows.size();

    std::vector<size_t> sizes = options.sizes;
    if (sizes.empty()) {
        if (options.k < 1)
            throw ConfigError("partition needs explicit sizes or a part count");
        sizes.assign(options.k, n / options.k);
        for (size_t i = 0; i < n % options.k; ++i) ++sizes[i];
    }
    size_t total = std::accumulate(sizes.begin(), sizes.end(), size_t{0});
    if (total != n)
        throw ConfigError("partition sizes sum to " + std::to_string(total) +
                          " but the dataset has " + std::to_string(n) + " rows");
    const size_t k = sizes.size();

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (k > 1) seeded_shuffle(order, options.seed);  // one part: verbatim copy

    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    size_t next = 0;
    for (size_t part = 0; part < k; ++part) {
        std::vector<std::string> header = t.header;
        if (options.add_site_dummies)
            for (size_t j = 2; j <= k; ++j)
                header.push_back("dummy_dp_var" + std::to_string(j));
        std::string out = csv_line(header);
        for (size_t i = 0; i < sizes[part]; ++i, ++next) {
            std::vector<std::string> cells = t.rows[order[next]];
            if (options.add_site_dummies)
                for (size_t j = 2; j <= k; ++j)
                    cells.push_back(j == part + 1 ? "1" : "0");
            out += csv_line(cells);
        }
        fs::path path = out_dir / (name + "_" + std::to_string(part + 1) + ".csv");
        write_text_file(path.string(), out);
        written.push_back(path);
    }
    return written;
}

}  // namespace dra
