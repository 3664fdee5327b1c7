#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types shared by every stage of the detector.
//
// Time indices are 1-based throughout the public interface: curve t lives in
// row t-1 of the value matrices, and a change point tau in {2,...,T} marks the
// FIRST index of the new regime (mu_tau != mu_{tau-1}). Index 1 encodes the
// initial level and is never a change point.

namespace gspf {

enum class errc {
    non_finite_entry,
    ragged_rows,
    grid_mismatch,
    degenerate_sample,
    not_psd,
    grid_too_small,
    negative_argument,
    cholesky_failure,
    singular_group_gram,
    window_too_small,
    too_few_curves,
    singular_covariance,
    rank_deficient_design,
    out_of_range,
    invalid_family_noise_pair,
    bessel_overflow,
    index_out_of_range,
    invalid_config,
    io_error,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

const char* errc_name(errc code);

/// Shared evaluation grid: strictly increasing points in [0,1], d >= 3.
struct Grid {
    Eigen::VectorXd points;

    int size() const { return static_cast<int>(points.size()); }
    void validate() const;

    /// Equispaced interior points j/(d+1), j = 1..d.
    static Grid equispaced(int d);
};

/// Trapezoidal quadrature weights for L2([0,1]) inner products on the grid.
Eigen::VectorXd trapezoid_weights(const Grid& grid);

/// T curves observed on a shared grid; row t-1 holds f_t.
struct FunctionalSequence {
    Eigen::MatrixXd values;  // T x d
    Grid grid;

    int T() const { return static_cast<int>(values.rows()); }
    int d() const { return static_cast<int>(values.cols()); }
    void validate() const;
};

/// Row 1 = f_1, row t = f_t - f_{t-1} for t >= 2.
struct DifferencedSequence {
    Eigen::MatrixXd values;  // T x d
    Grid grid;

    int T() const { return static_cast<int>(values.rows()); }
    int d() const { return static_cast<int>(values.cols()); }
};

/// Sorted unique time indices in {2,...,T}.
class ChangePointSet {
  public:
    ChangePointSet() = default;
    explicit ChangePointSet(std::vector<int> indices);

    void insert(int index);
    bool contains(int index) const;
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    const std::vector<int>& indices() const { return indices_; }

    auto begin() const { return indices_.begin(); }
    auto end() const { return indices_.end(); }

    friend bool operator==(const ChangePointSet& a, const ChangePointSet& b) {
        return a.indices_ == b.indices_;
    }

  private:
    std::vector<int> indices_;  // sorted, unique, each >= 2
};

/// Hyperparameters of the two-stage detector.
///
/// When lambda_grid_absolute is false the lambda grid holds multipliers that
/// grid_search scales by the median group least-squares magnitude of the data,
/// making the default grid portable across data scales.
struct DetectorConfig {
    std::vector<double> lambda_grid;
    bool lambda_grid_absolute = false;
    std::vector<double> eta_grid;
    std::vector<int> kappa_grid;
    double gamma = 3.0;
    double fdr_alpha = 0.01;
    double fve_threshold = 0.99;
    int threads = 1;

    void validate() const;

    /// lambda in 10^linspace(-2,1,8) (data-scaled), eta in {0,1e-4,1e-2,1},
    /// kappa in {1,2,5,10,...,120}, gamma 3, alpha 0.01, fve 0.99.
    static DetectorConfig defaults();
};

}  // namespace gspf
