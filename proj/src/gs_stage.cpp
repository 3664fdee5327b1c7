#include "gspf/gs_stage.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace gspf {

double mcp_penalty(double u, double lambda, double gamma) {
    if (u < 0.0) {
        throw Error(errc::negative_argument, "mcp_penalty requires u >= 0");
    }
    if (!(lambda > 0.0) || !(gamma > 1.0)) {
        throw Error(errc::out_of_range, "mcp_penalty requires lambda > 0 and gamma > 1");
    }
    if (u <= gamma * lambda) {
        return lambda * u - u * u / (2.0 * gamma);
    }
    return 0.5 * gamma * lambda * lambda;
}

double mcp_derivative(double u, double lambda, double gamma) {
    if (u < 0.0) {
        throw Error(errc::negative_argument, "mcp_derivative requires u >= 0");
    }
    if (u >= gamma * lambda) return 0.0;
    return lambda - u / gamma;
}

namespace {

// Cholesky with escalating jitter; returns the upper factor U with U^T U = m.
Eigen::MatrixXd chol_upper_with_jitter(Eigen::MatrixXd m) {
    const int K = static_cast<int>(m.rows());
    const double base = std::max(m.trace() / K * 1e-12, 1e-300);
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(m + jitter * Eigen::MatrixXd::Identity(K, K));
        if (llt.info() == Eigen::Success) {
            return llt.matrixL().transpose();
        }
        jitter = (attempt == 0) ? base : jitter * 10.0;
    }
    throw Error(errc::cholesky_failure, "penalty matrix not positive definite after jitter escalation");
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& rows, const Eigen::VectorXd& w) {
    return rows * w.asDiagonal() * rows.transpose();
}

}  // namespace

PenaltyMatrix build_penalty_matrix(const BasisSystem& basis, double lambda, double eta) {
    if (!(lambda > 0.0)) {
        throw Error(errc::out_of_range, "build_penalty_matrix requires lambda > 0");
    }
    if (eta < 0.0) {
        throw Error(errc::negative_argument, "build_penalty_matrix requires eta >= 0");
    }
    PenaltyMatrix pm;
    pm.lambda = lambda;
    pm.eta = eta;
    pm.r = eta * weighted_gram(basis.second_deriv_matrix, basis.quad_weights) +
           lambda * weighted_gram(basis.basis_matrix, basis.quad_weights);
    pm.r = 0.5 * (pm.r + pm.r.transpose()).eval();
    pm.chol_upper = chol_upper_with_jitter(pm.r);
    return pm;
}

Eigen::VectorXd group_firm_threshold(const Eigen::VectorXd& z, double lambda, double gamma) {
    if (!(gamma > 1.0)) {
        throw Error(errc::out_of_range, "group_firm_threshold requires gamma > 1");
    }
    const double norm = z.norm();
    if (norm <= lambda) {
        return Eigen::VectorXd::Zero(z.size());
    }
    if (norm <= gamma * lambda) {
        const double scale = (gamma / (gamma - 1.0)) * (1.0 - lambda / norm);
        return scale * z;
    }
    return z;
}

GsContext::GsContext(const DifferencedSequence& dseq, const BasisSystem& basis) {
    const int d = dseq.d();
    const int K = basis.K();
    if (basis.d() != d) {
        throw Error(errc::grid_mismatch, "basis and sequence grids differ");
    }
    gram_ = weighted_gram(basis.basis_matrix, basis.quad_weights);
    gram_dd_ = weighted_gram(basis.second_deriv_matrix, basis.quad_weights);

    // Thin QR of the shared per-group design D = b(x)^T (d x K).
    Eigen::MatrixXd design = basis.basis_matrix.transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::MatrixXd q0 = qr.householderQ() * Eigen::MatrixXd::Identity(d, K);
    r0_ = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
    const double diag_min = r0_.diagonal().cwiseAbs().minCoeff();
    const double diag_max = r0_.diagonal().cwiseAbs().maxCoeff();
    if (diag_min <= 1e-12 * std::max(diag_max, 1.0)) {
        throw Error(errc::singular_group_gram, "group design is numerically rank deficient");
    }

    z_ = dseq.values * q0;
    row_sq_norms_ = dseq.values.rowwise().squaredNorm();
}

double GsContext::median_group_norm() const {
    const int T = this->T();
    std::vector<double> norms;
    norms.reserve(T - 1);
    for (int t = 1; t < T; ++t) {
        norms.push_back(z_.row(t).norm());
    }
    if (norms.empty()) return 1.0;
    std::nth_element(norms.begin(), norms.begin() + norms.size() / 2, norms.end());
    double med = norms[norms.size() / 2];
    if (norms.size() % 2 == 0) {
        auto lower = std::max_element(norms.begin(), norms.begin() + norms.size() / 2);
        med = 0.5 * (med + *lower);
    }
    return med;
}

GsResult GsContext::fit(double lambda, double eta, double gamma) const {
    if (!(gamma > 1.0)) {
        throw Error(errc::out_of_range, "gs_fit requires gamma > 1");
    }
    const int T = this->T();
    const int K = this->K();

    PenaltyMatrix pm;
    pm.lambda = lambda;
    pm.eta = eta;
    if (!(lambda > 0.0)) {
        throw Error(errc::out_of_range, "gs_fit requires lambda > 0");
    }
    if (eta < 0.0) {
        throw Error(errc::negative_argument, "gs_fit requires eta >= 0");
    }
    pm.r = (eta * gram_dd_ + lambda * gram_).eval();
    pm.r = 0.5 * (pm.r + pm.r.transpose()).eval();
    pm.chol_upper = chol_upper_with_jitter(pm.r);

    // Orthonormalize the transformed group design D L^{-1} = Q0 (R0 L^{-1}):
    // a K x K QR of S = R0 L^{-1} completes the factorization.
    Eigen::MatrixXd s = pm.chol_upper.transpose()
                            .triangularView<Eigen::Lower>()
                            .solve(r0_.transpose())
                            .transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(s);
    Eigen::MatrixXd q2 = qr.householderQ() * Eigen::MatrixXd::Identity(K, K);
    Eigen::MatrixXd rt = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
    const double diag_min = rt.diagonal().cwiseAbs().minCoeff();
    const double diag_max = rt.diagonal().cwiseAbs().maxCoeff();
    if (diag_min <= 1e-12 * std::max(diag_max, 1.0)) {
        throw Error(errc::singular_group_gram, "transformed group design is rank deficient");
    }

    GsResult res;
    res.lambda = lambda;
    res.eta = eta;
    res.gamma = gamma;
    res.blocks.alpha = Eigen::MatrixXd::Zero(T, K);
    res.blocks.a = Eigen::MatrixXd::Zero(T, K);
    res.blocks.group_norms = Eigen::VectorXd::Zero(T);

    double objective = 0.0;
    for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd z = z_.row(t).transpose();
        const bool penalized = (t >= 1);
        Eigen::VectorXd omega;
        if (penalized) {
            omega = group_firm_threshold(z, lambda, gamma);
        } else {
            omega = z;  // initial level, unpenalized least squares
        }
        const double omega_norm = omega.norm();

        objective += 0.5 * (row_sq_norms_[t] - z.squaredNorm() + (z - omega).squaredNorm());
        if (penalized) {
            objective += mcp_penalty(omega_norm, lambda, gamma);
            if (omega_norm == 0.0) {
                res.kkt_zero_excess = std::max(res.kkt_zero_excess, z.norm() - lambda);
            } else {
                const Eigen::VectorXd grad =
                    (omega - z) + mcp_derivative(omega_norm, lambda, gamma) * omega / omega_norm;
                res.kkt_nonzero_residual = std::max(res.kkt_nonzero_residual, grad.norm());
            }
        }

        if (omega_norm > 0.0) {
            // back-transform: alpha = Rt^{-1} Q2^T omega, a = L^{-1} alpha
            Eigen::VectorXd alpha =
                rt.triangularView<Eigen::Upper>().solve((q2.transpose() * omega).eval());
            Eigen::VectorXd a = pm.chol_upper.triangularView<Eigen::Upper>().solve(alpha);
            res.blocks.alpha.row(t) = alpha.transpose();
            res.blocks.a.row(t) = a.transpose();
            res.blocks.group_norms[t] = alpha.norm();
            if (penalized) {
                res.candidates.insert(t + 1);  // back to 1-based time
            }
        }
    }
    res.objective = objective;
    return res;
}

GsResult gs_fit(const DifferencedSequence& dseq, const BasisSystem& basis, double lambda,
                double eta, double gamma) {
    return GsContext(dseq, basis).fit(lambda, eta, gamma);
}

}  // namespace gspf
