#pragma once

#include "gspf/types.hpp"

namespace gspf {

/// Basis system from functional principal component analysis. Rows of
/// basis_matrix are orthonormal under the trapezoidal quadrature inner
/// product sum_j w_j b_k(x_j) b_l(x_j) = delta_kl.
struct BasisSystem {
    Eigen::MatrixXd basis_matrix;        // K x d
    Eigen::MatrixXd second_deriv_matrix; // K x d
    Eigen::VectorXd eigenvalues;         // K, descending
    double fve = 0.0;                    // fraction of variance explained by the K components
    Eigen::VectorXd quad_weights;        // d

    int K() const { return static_cast<int>(basis_matrix.rows()); }
    int d() const { return static_cast<int>(basis_matrix.cols()); }
};

/// Columnwise average of the curves.
Eigen::VectorXd estimate_mean(const FunctionalSequence& seq);

/// Sample covariance of the curves (divisor T-1).
Eigen::MatrixXd estimate_covariance(const FunctionalSequence& seq);

/// Eigenfunctions of the discretized covariance operator, truncated at the
/// smallest K whose cumulative eigenvalue fraction reaches fve_threshold.
/// Sign convention: the largest-magnitude entry of each basis row is positive.
BasisSystem fpca_basis(const Eigen::MatrixXd& cov, const Grid& grid, double fve_threshold);

/// Row-wise second derivatives via the three-point stencil for nonuniform
/// grids; endpoint rows copy the nearest interior value.
Eigen::MatrixXd second_derivatives(const Eigen::MatrixXd& basis_matrix, const Grid& grid);

/// FPCA of the pooled sample covariance of seq, with second derivatives
/// filled in. Convenience wrapper used by the detector pipeline.
BasisSystem make_basis(const FunctionalSequence& seq, double fve_threshold);

}  // namespace gspf
