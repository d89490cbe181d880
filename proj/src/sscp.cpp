#include "sscp.hpp"

#include "csv.hpp"
#include "errors.hpp"

namespace dra {

namespace {

// Rank-1 accumulation of w * a a^T over rows, upper triangle then mirrored.
template <typename RowValue>
Eigen::MatrixXd accumulate(const std::vector<DesignRow>& rows, std::span<const double> w,
                           int d, RowValue value, bool compensated) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd comp;
    if (compensated) comp = Eigen::MatrixXd::Zero(d, d);
    for (size_t i = 0; i < rows.size(); ++i) {
        double wi = w[i];
        for (int s = 0; s < d; ++s) {
            double as = value(rows[i], i, s);
            for (int t = s; t < d; ++t) {
                double term = wi * as * value(rows[i], i, t);
                if (!compensated) {
                    acc(s, t) += term;
                } else {
                    double y = term - comp(s, t);
                    double sum = acc(s, t) + y;
                    comp(s, t) = (sum - acc(s, t)) - y;
                    acc(s, t) = sum;
                }
            }
        }
    }
    for (int s = 0; s < d; ++s)
        for (int t = 0; t < s; ++t) acc(s, t) = acc(t, s);
    return acc;
}

}  // namespace

SscpMatrix local_sscp(const std::vector<DesignRow>& rows, std::span<const double> y,
                      std::span<const double> w, bool compensated) {
    if (rows.empty())
        throw DataError("cannot build an SSCP matrix from an empty dataset");
    if (y.size() != rows.size() || w.size() != rows.size())
        throw ConfigError("SSCP input arity mismatch");
    const int p = static_cast<int>(rows.front().z.size());
    const int d = p + 1;
    SscpMatrix m;
    for (auto& r : rows)
        if (r.z.size() != p) throw ConfigError("SSCP input arity mismatch");
    m.values = accumulate(
        rows, w, d,
        [&](const DesignRow& r, size_t i, int s) {
            return s < p ? r.z[s] : y[i];
        },
        compensated);
    for (size_t i = 0; i < rows.size(); ++i) {
        m.n_obs += rows[i].freq;
        m.sum_weights += w[i];
    }
    return m;
}

SscpMatrix design_sscp(const std::vector<DesignRow>& rows, std::span<const double> w) {
    if (rows.empty())
        throw DataError("cannot build an SSCP matrix from an empty dataset");
    if (w.size() != rows.size())
        throw ConfigError("SSCP input arity mismatch");
    const int p = static_cast<int>(rows.front().z.size());
    SscpMatrix m;
    m.values = accumulate(
        rows, w, p,
        [](const DesignRow& r, size_t, int s) { return r.z[s]; }, false);
    for (size_t i = 0; i < rows.size(); ++i) {
        m.n_obs += rows[i].freq;
        m.sum_weights += w[i];
    }
    return m;
}

std::string serialize_sscp(const SscpMatrix& m) {
    const size_t d = m.labels.size();
    if (static_cast<size_t>(m.values.rows()) != d ||
        static_cast<size_t>(m.values.cols()) != d)
        throw ConfigError("SSCP labels do not match matrix dimension");
    std::vector<std::string> cells;
    cells.reserve(d + 1);
    cells.push_back("_NAME_");
    for (auto& l : m.labels) cells.push_back(l);
    std::string out = csv_line(cells);
    for (size_t r = 0; r < d; ++r) {
        cells.clear();
        cells.push_back(m.labels[r]);
        for (size_t c = 0; c < d; ++c)
            cells.push_back(format_double(m.values(static_cast<int>(r), static_cast<int>(c))));
        out += csv_line(cells);
    }
    auto sidecar = [&](const char* name, double v) {
        cells.assign(d + 1, "");
        cells[0] = name;
        cells[1] = format_double(v);
        out += csv_line(cells);
    };
    sidecar("_NOBS_", m.n_obs);
    sidecar("_SUMWGT_", m.sum_weights);
    return out;
}

SscpMatrix parse_sscp(std::string_view bytes, const std::string& context) {
    CsvTable t = parse_csv(bytes);
    if (t.header.size() < 2 || t.header[0] != "_NAME_")
        throw ProtocolError(context + ": SSCP file must start with a _NAME_ header");
    SscpMatrix m;
    m.labels.assign(t.header.begin() + 1, t.header.end());
    const size_t d = m.labels.size();
    if (t.rows.size() != d + 2)
        throw ProtocolError(context + ": SSCP file must have " + std::to_string(d + 2) +
                            " rows, got " + std::to_string(t.rows.size()));
    m.values.resize(static_cast<int>(d), static_cast<int>(d));
    for (size_t r = 0; r < d; ++r) {
        if (t.rows[r].size() != d + 1 || t.rows[r][0] != m.labels[r])
            throw ProtocolError(context + ": SSCP row " + std::to_string(r + 1) +
                                " does not match header label order");
        for (size_t c = 0; c < d; ++c)
            m.values(static_cast<int>(r), static_cast<int>(c)) =
                parse_double(t.rows[r][c + 1], context);
    }
    if (t.rows[d][0] != "_NOBS_" || t.rows[d + 1][0] != "_SUMWGT_")
        throw ProtocolError(context + ": SSCP sidecar rows missing");
    m.n_obs = parse_double(t.rows[d][1], context);
    m.sum_weights = parse_double(t.rows[d + 1][1], context);
    return m;
}

}  // namespace dra
