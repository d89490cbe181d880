#pragma once

#include <string>
#include <vector>

#include "binning.hpp"
#include "family.hpp"

namespace dra {

// One privacy bin of scored observations, the unit of the residual/ROC/HL
// exchange (columns follow the published dataset naming).
struct BinSummary {
    int partner_id = 0;
    long bin_nb = 0;
    double prob_mean = 0;           // PROB: mean predicted outcome
    double n_obs = 0;               // Nobs
    double distinct_prob_count = 0; // Dist_PROB_Cnt_per_bin
    double resp_mean = 0;           // RESP_Mean
    double resp_count = 0;          // RESP (logistic; 0 for linear)
    double noresp_count = 0;        // NO_RESP
    double resid_mean = 0;
    double resid_sq_mean = 0;
    double variance_mean = 0;       // mean of the variance function
};

// One scored observation (weights do not enter the summaries; freq does).
struct ScoredRow {
    double mu = 0;
    double outcome = 0;
    double resid = 0;
    double variance = 0;
    double freq = 1;
};

// Percentile-binned summaries of a site's scored data. Rows with freq 0
// are skipped. If the site is smaller than the floor, everything lands in
// one bin. Emitted bins always meet the n_min floor (see repair_floor).
std::vector<BinSummary> residual_summary(std::vector<ScoredRow> rows,
                                         const BinningPolicy& policy, int partner_id,
                                         const FamilySpec& family);

// Deterministic merge order for cross-partner combination.
void sort_bin_summaries(std::vector<BinSummary>& bins);

std::string serialize_bin_summaries(const std::vector<BinSummary>& bins);
std::vector<BinSummary> parse_bin_summaries(std::string_view bytes, const std::string& context);

struct RocPoint {
    double prob = 0;
    double pos = 0, neg = 0, falpos = 0, falneg = 0;
    double sensit = 0, one_minus_spec = 0;
};

struct RocResult {
    std::vector<RocPoint> points;  // sorted by descending threshold
    double auc = 0;
};

// ROC over combined bins: one threshold per distinct PROB, trapezoidal AUC.
RocResult roc_curve(const std::vector<BinSummary>& combined);

struct PseudoRecord {
    double prob = 0;
    double count = 0;      // Nobsnew
    double resp_mean = 0;
};

// Spreads a bin back into Dist records: (PROB, Nobs-Dist+1) plus Dist-1
// unit records at PROB + j*1e-10, restoring cross-partner ordering detail
// for the Hosmer-Lemeshow grouping.
std::vector<PseudoRecord> hl_expand(const BinSummary& bin);

struct HlGroup {
    long group = 0;
    double total = 0;
    double prob_mean = 0;
    double resp_mean = 0;
    double obs_events = 0, exp_events = 0;
    double obs_nonevents = 0, exp_nonevents = 0;
};

struct HlResult {
    double chi_sq = 0;
    double df = 0;
    double p_value = 1;
    std::vector<HlGroup> partition;
};

// Hosmer-Lemeshow test over expanded pseudo-records: groups of about equal
// size, chi^2 = sum n_l (Ybar_l - mubar_l)^2 / (mubar_l (1 - mubar_l)),
// df = groups formed - 2.
HlResult hl_test(std::vector<PseudoRecord> records, long g);

}  // namespace dra
