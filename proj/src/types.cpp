#include "gspf/types.hpp"

#include <algorithm>
#include <cmath>

namespace gspf {

const char* errc_name(errc code) {
    switch (code) {
        case errc::non_finite_entry: return "NonFiniteEntry";
        case errc::ragged_rows: return "RaggedRows";
        case errc::grid_mismatch: return "GridMismatch";
        case errc::degenerate_sample: return "DegenerateSample";
        case errc::not_psd: return "NotPSD";
        case errc::grid_too_small: return "GridTooSmall";
        case errc::negative_argument: return "NegativeArgument";
        case errc::cholesky_failure: return "CholeskyFailure";
        case errc::singular_group_gram: return "SingularGroupGram";
        case errc::window_too_small: return "WindowTooSmall";
        case errc::too_few_curves: return "TooFewCurves";
        case errc::singular_covariance: return "SingularCovariance";
        case errc::rank_deficient_design: return "RankDeficientDesign";
        case errc::out_of_range: return "OutOfRange";
        case errc::invalid_family_noise_pair: return "InvalidFamilyNoisePair";
        case errc::bessel_overflow: return "BesselOverflow";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::invalid_config: return "InvalidConfig";
        case errc::io_error: return "IoError";
    }
    return "UnknownError";
}

void Grid::validate() const {
    const int d = size();
    if (d < 3) {
        throw Error(errc::grid_too_small, "grid needs at least 3 points, got " + std::to_string(d));
    }
    for (int j = 0; j < d; ++j) {
        const double x = points[j];
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
            throw Error(errc::out_of_range, "grid point outside [0,1] at position " + std::to_string(j));
        }
        if (j > 0 && points[j] <= points[j - 1]) {
            throw Error(errc::out_of_range, "grid points must be strictly increasing");
        }
    }
}

Grid Grid::equispaced(int d) {
    Grid g;
    g.points.resize(d);
    for (int j = 0; j < d; ++j) {
        g.points[j] = static_cast<double>(j + 1) / static_cast<double>(d + 1);
    }
    g.validate();
    return g;
}

Eigen::VectorXd trapezoid_weights(const Grid& grid) {
    const int d = grid.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    for (int j = 0; j + 1 < d; ++j) {
        const double h = grid.points[j + 1] - grid.points[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

void FunctionalSequence::validate() const {
    grid.validate();
    if (values.rows() < 2) {
        throw Error(errc::too_few_curves, "need T >= 2 curves, got " + std::to_string(values.rows()));
    }
    if (values.cols() != grid.size()) {
        throw Error(errc::grid_mismatch,
                    "matrix has " + std::to_string(values.cols()) + " columns but grid has " +
                        std::to_string(grid.size()) + " points");
    }
    if (!values.allFinite()) {
        throw Error(errc::non_finite_entry, "sequence contains NaN or infinite entries");
    }
}

ChangePointSet::ChangePointSet(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.front() < 2) {
        throw Error(errc::out_of_range, "change point indices must be >= 2 (index 1 is the initial level)");
    }
}

void ChangePointSet::insert(int index) {
    if (index < 2) {
        throw Error(errc::out_of_range, "change point indices must be >= 2 (index 1 is the initial level)");
    }
    auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
    if (it == indices_.end() || *it != index) {
        indices_.insert(it, index);
    }
}

bool ChangePointSet::contains(int index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

void DetectorConfig::validate() const {
    if (gamma <= 1.0) {
        throw Error(errc::invalid_config, "gamma must be > 1");
    }
    if (!(fdr_alpha > 0.0 && fdr_alpha < 1.0)) {
        throw Error(errc::invalid_config, "fdr_alpha must lie in (0,1)");
    }
    if (!(fve_threshold > 0.0 && fve_threshold <= 1.0)) {
        throw Error(errc::invalid_config, "fve_threshold must lie in (0,1]");
    }
    if (lambda_grid.empty() || eta_grid.empty() || kappa_grid.empty()) {
        throw Error(errc::invalid_config, "tuning grids must be nonempty");
    }
    for (double v : lambda_grid) {
        if (!(v > 0.0)) throw Error(errc::invalid_config, "lambda grid values must be positive");
    }
    for (double v : eta_grid) {
        if (v < 0.0) throw Error(errc::invalid_config, "eta grid values must be nonnegative");
    }
    for (int k : kappa_grid) {
        if (k < 0) throw Error(errc::invalid_config, "kappa grid values must be nonnegative");
    }
    if (threads < 0) {
        throw Error(errc::invalid_config, "threads must be >= 0");
    }
}

DetectorConfig DetectorConfig::defaults() {
    DetectorConfig cfg;
    cfg.lambda_grid.resize(8);
    for (int i = 0; i < 8; ++i) {
        const double expo = -2.0 + 3.0 * static_cast<double>(i) / 7.0;
        cfg.lambda_grid[i] = std::pow(10.0, expo);
    }
    cfg.lambda_grid_absolute = false;
    cfg.eta_grid = {0.0, 1e-4, 1e-2, 1.0};
    cfg.kappa_grid = {1, 2, 5, 10, 15, 20, 30, 50, 80, 120};
    return cfg;
}

}  // namespace gspf
