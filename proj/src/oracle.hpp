#pragma once

#include "coordinator.hpp"
#include "dataset.hpp"

namespace dra {

// Pooled single-machine IRLS reference fit: identical initial values,
// convergence criterion and family arithmetic, computed directly from the
// pooled rows. The equivalence target for the distributed engine. Its
// roc/hl members hold the exact individual-level diagnostics (the
// min_count_per_grp=1 limit); bins_pct/bins_pct2 use the standard policies
// with the pooled data as a single site.
FitOutputs pooled_fit(const AnalyticDataset& data, const ModelSpec& spec,
                      const Eigen::VectorXd& beta0);

}  // namespace dra
