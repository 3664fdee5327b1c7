#pragma once

#include "gspf/rng.hpp"
#include "gspf/types.hpp"

#include <cstdint>
#include <string>

namespace gspf {

struct MaternParams {
    double sigma = 0.1;
    double r = 0.1;
    double nu = 1.0;
};

/// Matern covariance
///   C(x,x') = sigma^2 sqrt(pi) r^{2 nu} / (2^{nu-1} Gamma(nu+1/2))
///             * (|x-x'|/r)^nu K_nu(|x-x'|/r),
/// with the analytic zero-distance limit on the diagonal.
Eigen::MatrixXd matern_cov(const Grid& grid, const MaternParams& params);

Eigen::VectorXd sample_gp(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);
Eigen::VectorXd sample_gp(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                          std::uint64_t seed);

/// Multivariate t draw as a Gaussian scale mixture: mean + (Lz) sqrt(df/chi2_df).
Eigen::VectorXd sample_tp(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int df,
                          Rng& rng);
Eigen::VectorXd sample_tp(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int df,
                          std::uint64_t seed);

enum class Family { constant, symmetric, asymmetric, sbar, benchmark };
enum class NoiseKind { gp, tp, iid_normal };

std::string family_name(Family family);
Family family_from_name(const std::string& name);
std::string noise_name(NoiseKind noise);
NoiseKind noise_from_name(const std::string& name);

/// One synthetic dataset request. Segment lengths are uniform integers on
/// {100,...,200}; the matern parameters apply to gp/tp noise.
struct SimulationSpec {
    Family family = Family::symmetric;
    int m = 0;  // number of change points, one of {0, 1, 5}
    NoiseKind noise = NoiseKind::gp;
    int df = 3;
    int d = 30;
    std::uint64_t seed = 0;
    MaternParams matern;

    void validate() const;
};

struct LabeledDataset {
    FunctionalSequence seq;
    ChangePointSet truth;
};

/// Deterministic generation: a pure function of the spec (seed included).
LabeledDataset generate(const SimulationSpec& spec);

}  // namespace gspf
