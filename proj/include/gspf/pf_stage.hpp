#pragma once

#include "gspf/fpca.hpp"
#include "gspf/types.hpp"

#include <utility>
#include <vector>

namespace gspf {

/// Estimated per-curve noise covariance, shrunk toward (trace/d) I until the
/// condition number stays below 1e8.
struct NoiseCovariance {
    Eigen::MatrixXd sigma_hat;  // d x d
    double shrinkage_weight = 0.0;
};

/// Pool segment-demeaned residuals across the segmentation induced by the
/// representatives (segments shorter than two curves are merged with a
/// neighbor for estimation only); sample covariance with divisor T - #segments.
NoiseCovariance estimate_noise_covariance(const FunctionalSequence& seq,
                                          const ChangePointSet& representatives);

/// Implicit block-tridiagonal covariance of the stacked differenced noise:
/// diagonal blocks Sigma (t=1) and 2 Sigma (t>=2), super/sub-diagonal blocks
/// -Sigma. It factors as (M kron C)(M kron C)^T with M the differencing
/// operator and C C^T = Sigma, so whitening is a per-curve triangular solve
/// followed by cumulative sums; the Td x Td form is never materialized for
/// large problems. A singular Sigma falls back to eigenvalue truncation at
/// 1e-10 * lambda_max (generalized inverse path).
class SigmaXi {
  public:
    SigmaXi(Eigen::MatrixXd sigma, int T);

    int T() const { return T_; }
    int d() const { return static_cast<int>(sigma_.rows()); }
    /// Rows of a whitened curve; equals d unless the truncation path ran.
    int rank() const { return truncated_ ? static_cast<int>(white_.rows()) : d(); }
    bool truncated() const { return truncated_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }

    /// Apply the inverse Cholesky factor to stacked data ((T*d) x m),
    /// returning (T*rank()) x m.
    Eigen::MatrixXd whiten_stacked(const Eigen::MatrixXd& stacked) const;

    /// Dense Td x Td matrix for small problems (throws above T*d = 4000).
    Eigen::MatrixXd dense() const;

  private:
    Eigen::MatrixXd sigma_;  // d x d
    Eigen::MatrixXd chol_lower_;  // d x d when !truncated_
    Eigen::MatrixXd white_;       // rank x d when truncated_
    int T_ = 0;
    bool truncated_ = false;
};

SigmaXi build_sigma_xi_blocks(const Eigen::MatrixXd& sigma, int T);

/// Whiten a response and design together.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> whiten(const Eigen::VectorXd& y,
                                                   const Eigen::MatrixXd& design,
                                                   const SigmaXi& sigma_xi);

struct TestResult {
    int representative = 0;
    double f_stat = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool retained = false;
    bool df_warning = false;  // set when df2 <= 0 forced a skip with p_raw = 1
};

/// Partial F-test of the columns [tested_col_start, tested_col_start +
/// tested_col_count) of full_design against the model without them, after
/// whitening by sigma_xi. p_adjusted/retained are left for the BH pass.
TestResult partial_f_test(const Eigen::VectorXd& y, const Eigen::MatrixXd& full_design,
                          int tested_col_start, int tested_col_count, const SigmaXi& sigma_xi);

/// Benjamini-Hochberg step-up adjustment, capped at 1, in input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

/// Marks retained = (p_adjusted <= alpha) on each result and returns the
/// retained representatives.
ChangePointSet pf_filter(const ChangePointSet& representatives, std::vector<TestResult>& results,
                         double alpha);

/// Full stage-2 pass: estimate the noise covariance from the representative
/// segmentation, regress the differenced (time-centered) data on intercept +
/// initial-level block + one basis block per representative, whiten, test
/// every representative, and BH-adjust at level alpha.
std::vector<TestResult> run_pf_stage(const FunctionalSequence& seq, const BasisSystem& basis,
                                     const ChangePointSet& representatives, double alpha);

}  // namespace gspf
