#pragma once

#include "gspf/fpca.hpp"
#include "gspf/types.hpp"

namespace gspf {

/// R = eta * G'' + lambda * G (+ jitter I) with the quadrature-weighted Gram
/// matrices G = b W b^T and G'' = b'' W b''^T, plus its Cholesky factor L
/// (upper triangular, L^T L = R) used for the alpha = L a transform.
struct PenaltyMatrix {
    Eigen::MatrixXd r;           // K x K
    Eigen::MatrixXd chol_upper;  // K x K upper triangular
    double lambda = 0.0;
    double eta = 0.0;
};

/// Per-time coefficient blocks of the group-selection fit.
struct CoefficientBlocks {
    Eigen::MatrixXd alpha;       // T x K, transformed coefficients
    Eigen::MatrixXd a;           // T x K, original coefficients a_t = L^{-1} alpha_t
    Eigen::VectorXd group_norms; // T, ||alpha_t||_2
};

struct GsResult {
    CoefficientBlocks blocks;
    ChangePointSet candidates;  // {t >= 2 : group norm > 0}
    double objective = 0.0;
    double lambda = 0.0;
    double eta = 0.0;
    double gamma = 0.0;
    // stationarity diagnostics, computed at the solution
    double kkt_nonzero_residual = 0.0;  // max gradient norm over nonzero groups
    double kkt_zero_excess = 0.0;       // max(||z_t|| - lambda) over zero groups
};

/// MCP value rho(u; lambda, gamma) = lambda u - u^2/(2 gamma) for u <= gamma
/// lambda, gamma lambda^2 / 2 beyond the knee.
double mcp_penalty(double u, double lambda, double gamma);

/// d rho / du, zero beyond the knee.
double mcp_derivative(double u, double lambda, double gamma);

PenaltyMatrix build_penalty_matrix(const BasisSystem& basis, double lambda, double eta);

/// Closed-form minimizer of 1/2 ||z - theta||^2 + rho(||theta||; lambda, gamma)
/// for an orthonormalized group design (firm thresholding).
Eigen::VectorXd group_firm_threshold(const Eigen::VectorXd& z, double lambda, double gamma);

/// Precomputed quantities shared by every (lambda, eta) fit on one dataset:
/// the orthonormalized group design and the per-time projection coefficients.
/// Groups occupy disjoint observation rows, so each fit decomposes exactly
/// per time index.
class GsContext {
  public:
    GsContext(const DifferencedSequence& dseq, const BasisSystem& basis);

    GsResult fit(double lambda, double eta, double gamma) const;

    /// Median of ||z_t|| over t >= 2; scale anchor for the default lambda grid.
    double median_group_norm() const;

    int T() const { return static_cast<int>(z_.rows()); }
    int K() const { return static_cast<int>(z_.cols()); }

    /// Projection coefficients z_t of each differenced curve onto the
    /// orthonormalized group design (row t-1 holds z_t).
    const Eigen::MatrixXd& z() const { return z_; }

  private:
    Eigen::MatrixXd gram_;        // K x K, b W b^T
    Eigen::MatrixXd gram_dd_;     // K x K, b'' W b''^T
    Eigen::MatrixXd r0_;          // K x K upper, from thin QR of the group design
    Eigen::MatrixXd z_;           // T x K
    Eigen::VectorXd row_sq_norms_;  // T, ||y_t||^2
};

GsResult gs_fit(const DifferencedSequence& dseq, const BasisSystem& basis, double lambda,
                double eta, double gamma);

}  // namespace gspf
