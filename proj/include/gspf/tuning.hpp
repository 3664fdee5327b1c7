#pragma once

#include "gspf/gs_stage.hpp"
#include "gspf/types.hpp"

#include <vector>

namespace gspf {

struct TuningRecord {
    double lambda = 0.0;
    double eta = 0.0;
    int kappa = 0;
    double bic = 0.0;
    int n_candidates = 0;
    int n_representatives = 0;
    bool degenerate = false;  // exact refit, bic is the -inf sentinel
};

/// BIC of the segmentation induced by the representatives: refit the level
/// model (intercept + initial-level block + one basis step-block per
/// representative) by unpenalized least squares in per-curve whitened
/// coordinates, then n log(RSS/n) + df log(n) with n = Td and
/// df = 1 + K |representatives|. An exact fit returns -infinity.
/// The pilot set drives the whitening covariance; scores are only comparable
/// across candidate sets when they share a pilot.
double bic_score(const FunctionalSequence& seq, const ChangePointSet& representatives,
                 const BasisSystem& basis, const ChangePointSet& pilot);

/// Single-set convenience: the representatives double as the pilot.
double bic_score(const FunctionalSequence& seq, const ChangePointSet& representatives,
                 const BasisSystem& basis);

struct GridSearchResult {
    TuningRecord best;
    std::vector<TuningRecord> all;
};

/// Exhaustive search over (lambda, eta, kappa): gs_fit, merge, elect, score.
/// Ties break toward larger lambda, then larger kappa, then smaller eta.
/// Relative lambda grids are scaled by the median group magnitude of the data.
GridSearchResult grid_search(const FunctionalSequence& seq, const BasisSystem& basis,
                             const DetectorConfig& config);

/// Variant reusing a precomputed solver context (the detector pipeline).
GridSearchResult grid_search(const FunctionalSequence& seq, const GsContext& ctx,
                             const BasisSystem& basis, const DetectorConfig& config);

}  // namespace gspf
