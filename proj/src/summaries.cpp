#include "summaries.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "errors.hpp"
#include "tail_prob.hpp"

namespace dra {

namespace {

// The pinned expansion offset ("a very small amount").
inline constexpr double kProbOffset = 1e-10;

struct DistinctAgg {
    double value = 0;
    double count = 0;       // sum of freq
    double resp = 0;        // freq-weighted sum of Y (or Y==1 count)
    double sum_y = 0;
    double sum_resid = 0;
    double sum_resid_sq = 0;
    double sum_var = 0;
    long first_row = 0;
};

}  // namespace

std::vector<BinSummary> residual_summary(std::vector<ScoredRow> rows,
                                         const BinningPolicy& policy, int partner_id,
                                         const FamilySpec& family) {
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const ScoredRow& r) { return r.freq == 0; }),
               rows.end());
    if (rows.empty())
        throw DataError("no observations to summarize");
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ScoredRow& a, const ScoredRow& b) { return a.mu < b.mu; });

    // One aggregate per distinct predicted value; ties are never split.
    std::vector<DistinctAgg> distinct;
    for (auto& r : rows) {
        if (distinct.empty() || r.mu != distinct.back().value) {
            distinct.push_back({});
            distinct.back().value = r.mu;
        }
        DistinctAgg& d = distinct.back();
        d.count += r.freq;
        d.sum_y += r.freq * r.outcome;
        if (!family.is_linear() && r.outcome == 1.0) d.resp += r.freq;
        d.sum_resid += r.freq * r.resid;
        d.sum_resid_sq += r.freq * r.resid * r.resid;
        d.sum_var += r.freq * r.variance;
    }

    std::vector<DistinctValue> values(distinct.size());
    double n_site = 0;
    for (size_t j = 0; j < distinct.size(); ++j) {
        values[j] = {distinct[j].value, distinct[j].count};
        n_site += distinct[j].count;
    }

    std::vector<long> group;
    if (n_site < static_cast<double>(policy.n_min)) {
        group.assign(values.size(), 0);  // site smaller than the floor: one bin
    } else {
        group = repair_floor(assign_bins(values, policy), values, policy.n_min);
    }

    long n_groups = *std::max_element(group.begin(), group.end()) + 1;
    std::vector<BinSummary> bins(static_cast<size_t>(n_groups));
    std::vector<double> sum_mu(static_cast<size_t>(n_groups), 0.0);
    std::vector<double> sum_y(static_cast<size_t>(n_groups), 0.0);
    std::vector<double> sum_resid(static_cast<size_t>(n_groups), 0.0);
    std::vector<double> sum_resid_sq(static_cast<size_t>(n_groups), 0.0);
    std::vector<double> sum_var(static_cast<size_t>(n_groups), 0.0);
    for (size_t j = 0; j < distinct.size(); ++j) {
        BinSummary& b = bins[static_cast<size_t>(group[j])];
        b.n_obs += distinct[j].count;
        b.distinct_prob_count += 1;
        b.resp_count += distinct[j].resp;
        sum_mu[static_cast<size_t>(group[j])] += distinct[j].count * distinct[j].value;
        sum_y[static_cast<size_t>(group[j])] += distinct[j].sum_y;
        sum_resid[static_cast<size_t>(group[j])] += distinct[j].sum_resid;
        sum_resid_sq[static_cast<size_t>(group[j])] += distinct[j].sum_resid_sq;
        sum_var[static_cast<size_t>(group[j])] += distinct[j].sum_var;
    }
    for (long gi = 0; gi < n_groups; ++gi) {
        BinSummary& b = bins[static_cast<size_t>(gi)];
        b.partner_id = partner_id;
        b.bin_nb = gi + 1;
        // A single-value bin's mean is that value, bit-exactly.
        if (b.distinct_prob_count == 1) {
            for (size_t j = 0; j < distinct.size(); ++j)
                if (group[j] == gi) {
                    b.prob_mean = distinct[j].value;
                    break;
                }
        } else {
            b.prob_mean = sum_mu[static_cast<size_t>(gi)] / b.n_obs;
        }
        b.resp_mean = sum_y[static_cast<size_t>(gi)] / b.n_obs;
        b.resid_mean = sum_resid[static_cast<size_t>(gi)] / b.n_obs;
        b.resid_sq_mean = sum_resid_sq[static_cast<size_t>(gi)] / b.n_obs;
        b.variance_mean = sum_var[static_cast<size_t>(gi)] / b.n_obs;
        if (family.is_linear()) {
            b.resp_count = 0;
            b.noresp_count = b.n_obs;
        } else {
            b.noresp_count = b.n_obs - b.resp_count;
        }
    }
    return bins;
}

void sort_bin_summaries(std::vector<BinSummary>& bins) {
    std::stable_sort(bins.begin(), bins.end(), [](const BinSummary& a, const BinSummary& b) {
        if (a.prob_mean != b.prob_mean) return a.prob_mean < b.prob_mean;
        return a.partner_id < b.partner_id;
    });
}

namespace {
const char* kBinCols[] = {"dp_cd",     "bin_nb",   "PROB",
                          "Nobs",      "Dist_PROB_Cnt_per_bin", "RESP_Mean",
                          "RESP",      "NO_RESP",  "Resid_Mean",
                          "Resid_Sq_Mean", "Var_Mean"};
}

std::string serialize_bin_summaries(const std::vector<BinSummary>& bins) {
    std::string out = csv_line({std::begin(kBinCols), std::end(kBinCols)});
    for (auto& b : bins)
        out += csv_line({std::to_string(b.partner_id), std::to_string(b.bin_nb),
                         format_double(b.prob_mean), format_double(b.n_obs),
                         format_double(b.distinct_prob_count), format_double(b.resp_mean),
                         format_double(b.resp_count), format_double(b.noresp_count),
                         format_double(b.resid_mean), format_double(b.resid_sq_mean),
                         format_double(b.variance_mean)});
    return out;
}

std::vector<BinSummary> parse_bin_summaries(std::string_view bytes, const std::string& context) {
    CsvTable t = parse_csv(bytes);
    if (t.header.size() != std::size(kBinCols))
        throw ProtocolError(context + ": malformed bin summary file");
    for (size_t i = 0; i < std::size(kBinCols); ++i)
        if (t.header[i] != kBinCols[i])
            throw ProtocolError(context + ": unexpected bin summary column " + t.header[i]);
    std::vector<BinSummary> bins;
    bins.reserve(t.rows.size());
    for (auto& row : t.rows) {
        BinSummary b;
        auto v = [&](int c) { return parse_double(row[static_cast<size_t>(c)], context); };
        b.partner_id = static_cast<int>(v(0));
        b.bin_nb = static_cast<long>(v(1));
        b.prob_mean = v(2);
        b.n_obs = v(3);
        b.distinct_prob_count = v(4);
        b.resp_mean = v(5);
        b.resp_count = v(6);
        b.noresp_count = v(7);
        b.resid_mean = v(8);
        b.resid_sq_mean = v(9);
        b.variance_mean = v(10);
        bins.push_back(b);
    }
    return bins;
}

RocResult roc_curve(const std::vector<BinSummary>& combined) {
    if (combined.empty())
        throw DataError("no bins for the ROC curve");
    // Merge bins sharing a threshold, then order by descending PROB.
    std::vector<BinSummary> bins = combined;
    sort_bin_summaries(bins);
    std::vector<RocPoint> merged;
    for (auto& b : bins) {
        if (!merged.empty() && merged.back().prob == b.prob_mean) {
            merged.back().pos += b.resp_count;
            merged.back().neg += b.noresp_count;
        } else {
            RocPoint pt;
            pt.prob = b.prob_mean;
            pt.pos = b.resp_count;  // reused as per-threshold counts pre-accumulation
            pt.neg = b.noresp_count;
            merged.push_back(pt);
        }
    }
    std::reverse(merged.begin(), merged.end());

    double total_pos = 0, total_neg = 0;
    for (auto& m : merged) {
        total_pos += m.pos;
        total_neg += m.neg;
    }
    if (total_pos == 0 || total_neg == 0)
        throw DataError("ROC is undefined: a response class is empty");

    RocResult out;
    double cum_pos = 0, cum_neg = 0;
    for (auto& m : merged) {
        cum_pos += m.pos;
        cum_neg += m.neg;
        RocPoint pt;
        pt.prob = m.prob;
        pt.pos = cum_pos;
        pt.falpos = cum_neg;
        pt.falneg = total_pos - cum_pos;
        pt.neg = total_neg - cum_neg;
        pt.sensit = cum_pos / total_pos;
        pt.one_minus_spec = cum_neg / total_neg;
        out.points.push_back(pt);
    }
    double auc = 0, prev_sens = 0, prev_oms = 0;
    for (auto& pt : out.points) {
        auc += 0.5 * (pt.sensit + prev_sens) * (pt.one_minus_spec - prev_oms);
        prev_sens = pt.sensit;
        prev_oms = pt.one_minus_spec;
    }
    out.auc = auc;
    return out;
}

std::vector<PseudoRecord> hl_expand(const BinSummary& bin) {
    if (bin.distinct_prob_count < 1)
        throw DataError("bin has no distinct predicted values");
    if (bin.distinct_prob_count > bin.n_obs)
        throw DataError("bin reports more distinct values than observations");
    std::vector<PseudoRecord> out;
    long dist = static_cast<long>(bin.distinct_prob_count);
    out.push_back({bin.prob_mean, bin.n_obs - dist + 1, bin.resp_mean});
    for (long j = 1; j < dist; ++j)
        out.push_back({bin.prob_mean + static_cast<double>(j) * kProbOffset, 1.0,
                       bin.resp_mean});
    return out;
}

HlResult hl_test(std::vector<PseudoRecord> records, long g) {
    if (g < 3)
        throw ConfigError("Hosmer-Lemeshow needs at least 3 groups");
    if (records.empty())
        throw DataError("no records for the Hosmer-Lemeshow test");
    std::stable_sort(records.begin(), records.end(),
                     [](const PseudoRecord& a, const PseudoRecord& b) { return a.prob < b.prob; });

    // Aggregate per distinct PROB (identical values may arrive from
    // different partners and must stay in one group).
    std::vector<DistinctValue> values;
    std::vector<double> event_sum;  // count-weighted response means
    for (auto& r : records) {
        if (!values.empty() && values.back().value == r.prob) {
            values.back().count += r.count;
            event_sum.back() += r.count * r.resp_mean;
        } else {
            values.push_back({r.prob, r.count});
            event_sum.push_back(r.count * r.resp_mean);
        }
    }

    BinningPolicy policy;
    policy.n_grp = g;
    policy.n_min = 1;
    std::vector<long> group = assign_bins(values, policy);
    long n_groups = *std::max_element(group.begin(), group.end()) + 1;

    std::vector<HlGroup> part(static_cast<size_t>(n_groups));
    std::vector<double> sum_mu(static_cast<size_t>(n_groups), 0.0);
    for (size_t j = 0; j < values.size(); ++j) {
        HlGroup& h = part[static_cast<size_t>(group[j])];
        h.total += values[j].count;
        h.obs_events += event_sum[j];
        sum_mu[static_cast<size_t>(group[j])] += values[j].count * values[j].value;
    }
    HlResult out;
    std::vector<long> bad_groups;
    for (long gi = 0; gi < n_groups; ++gi) {
        HlGroup& h = part[static_cast<size_t>(gi)];
        h.group = gi + 1;
        h.prob_mean = sum_mu[static_cast<size_t>(gi)] / h.total;
        h.resp_mean = h.obs_events / h.total;
        h.exp_events = h.total * h.prob_mean;
        h.obs_nonevents = h.total - h.obs_events;
        h.exp_nonevents = h.total - h.exp_events;
        if (!(h.prob_mean > 0.0 && h.prob_mean < 1.0)) {
            bad_groups.push_back(h.group);
            continue;
        }
        double d = h.resp_mean - h.prob_mean;
        out.chi_sq += h.total * d * d / (h.prob_mean * (1.0 - h.prob_mean));
    }
    if (!bad_groups.empty()) {
        std::string msg = "Hosmer-Lemeshow group mean probability hit {0,1} in group(s)";
        for (long b : bad_groups) msg += " " + std::to_string(b);
        throw NumericalError(msg);
    }
    out.partition = std::move(part);
    out.df = static_cast<double>(n_groups - 2);
    out.p_value = out.df < 1 ? 1.0
                 : out.chi_sq == 0 ? 1.0
                                   : chisq_upper_tail(out.chi_sq, out.df);
    return out;
}

}  // namespace dra
