#include "gspf/fpca.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace gspf {

Eigen::VectorXd estimate_mean(const FunctionalSequence& seq) {
    if (seq.values.rows() < 1) {
        throw Error(errc::too_few_curves, "estimate_mean needs at least one curve");
    }
    return seq.values.colwise().mean();
}

Eigen::MatrixXd estimate_covariance(const FunctionalSequence& seq) {
    const Eigen::Index T = seq.values.rows();
    if (T < 2) {
        throw Error(errc::degenerate_sample, "covariance needs T >= 2 curves");
    }
    Eigen::MatrixXd centered = seq.values.rowwise() - seq.values.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(T - 1);
    // enforce exact symmetry against roundoff
    cov = 0.5 * (cov + cov.transpose()).eval();
    return cov;
}

BasisSystem fpca_basis(const Eigen::MatrixXd& cov, const Grid& grid, double fve_threshold) {
    grid.validate();
    const int d = grid.size();
    if (cov.rows() != d || cov.cols() != d) {
        throw Error(errc::grid_mismatch, "covariance size does not match grid");
    }
    if (!(fve_threshold > 0.0 && fve_threshold <= 1.0)) {
        throw Error(errc::out_of_range, "fve threshold must lie in (0,1]");
    }

    BasisSystem basis;
    basis.quad_weights = trapezoid_weights(grid);
    const Eigen::VectorXd sqrt_w = basis.quad_weights.array().sqrt();

    // Discretized covariance operator: eigenproblem of W^{1/2} C W^{1/2}.
    Eigen::MatrixXd sym = sqrt_w.asDiagonal() * (0.5 * (cov + cov.transpose())) * sqrt_w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw Error(errc::not_psd, "eigendecomposition of the covariance operator failed");
    }

    // Eigen returns ascending order.
    Eigen::VectorXd values = eig.eigenvalues().reverse();
    Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

    const double trace = std::max(sym.trace(), 0.0);
    if (values.minCoeff() < -1e-8 * std::max(trace, 1.0)) {
        throw Error(errc::not_psd, "covariance has a significantly negative eigenvalue");
    }

    double total = 0.0;
    for (int k = 0; k < d; ++k) total += std::max(values[k], 0.0);

    int K = 1;
    if (total <= 0.0) {
        // Degenerate zero covariance: constant function with unit quadrature norm.
        basis.basis_matrix = Eigen::MatrixXd::Constant(1, d, 1.0 / std::sqrt(basis.quad_weights.sum()));
        basis.eigenvalues = Eigen::VectorXd::Zero(1);
        basis.fve = 1.0;
        basis.second_deriv_matrix = second_derivatives(basis.basis_matrix, grid);
        return basis;
    }

    double cum = 0.0;
    for (int k = 0; k < d; ++k) {
        cum += std::max(values[k], 0.0);
        K = k + 1;
        if (cum / total >= fve_threshold) break;
    }

    basis.eigenvalues = values.head(K).cwiseMax(0.0);
    basis.fve = basis.eigenvalues.sum() / total;
    basis.basis_matrix.resize(K, d);
    for (int k = 0; k < K; ++k) {
        // back to function values: phi = W^{-1/2} u, quadrature-orthonormal
        Eigen::VectorXd phi = vectors.col(k).array() / sqrt_w.array();
        int arg_max = 0;
        phi.cwiseAbs().maxCoeff(&arg_max);
        if (phi[arg_max] < 0.0) phi = -phi;
        basis.basis_matrix.row(k) = phi.transpose();
    }
    basis.second_deriv_matrix = second_derivatives(basis.basis_matrix, grid);
    return basis;
}

Eigen::MatrixXd second_derivatives(const Eigen::MatrixXd& basis_matrix, const Grid& grid) {
    const int d = grid.size();
    if (d < 3) {
        throw Error(errc::grid_too_small, "second derivatives need at least 3 grid points");
    }
    if (basis_matrix.cols() != d) {
        throw Error(errc::grid_mismatch, "basis matrix width does not match grid");
    }
    const int K = static_cast<int>(basis_matrix.rows());
    Eigen::MatrixXd dd(K, d);
    for (int j = 1; j + 1 < d; ++j) {
        const double hl = grid.points[j] - grid.points[j - 1];
        const double hr = grid.points[j + 1] - grid.points[j];
        const double hs = hl + hr;
        for (int k = 0; k < K; ++k) {
            dd(k, j) = 2.0 * (basis_matrix(k, j - 1) / (hl * hs) - basis_matrix(k, j) / (hl * hr) +
                              basis_matrix(k, j + 1) / (hr * hs));
        }
    }
    dd.col(0) = dd.col(1);
    dd.col(d - 1) = dd.col(d - 2);
    return dd;
}

BasisSystem make_basis(const FunctionalSequence& seq, double fve_threshold) {
    return fpca_basis(estimate_covariance(seq), seq.grid, fve_threshold);
}

}  // namespace gspf
