#include "gspf/pf_stage.hpp"

#include "gspf/core.hpp"
#include "gspf/stats.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gspf {

namespace {

constexpr double kConditionBound = 1e8;

std::vector<std::pair<int, int>> segments_from_representatives(int T, const ChangePointSet& reps) {
    std::vector<std::pair<int, int>> segments;
    int start = 1;
    for (int r : reps) {
        if (r < 2 || r > T) {
            throw Error(errc::index_out_of_range, "representative outside {2,...,T}");
        }
        segments.emplace_back(start, r - 1);
        start = r;
    }
    segments.emplace_back(start, T);
    return segments;
}

}  // namespace

NoiseCovariance estimate_noise_covariance(const FunctionalSequence& seq,
                                          const ChangePointSet& representatives) {
    const int T = seq.T();
    const int d = seq.d();

    // Merge segments shorter than 2 curves into their neighbor (estimation only).
    std::vector<std::pair<int, int>> segments = segments_from_representatives(T, representatives);
    for (std::size_t s = 0; s < segments.size();) {
        if (segments[s].second - segments[s].first + 1 >= 2 || segments.size() == 1) {
            ++s;
            continue;
        }
        if (s > 0) {
            segments[s - 1].second = segments[s].second;
            segments.erase(segments.begin() + s);
        } else {
            segments[s + 1].first = segments[s].first;
            segments.erase(segments.begin());
        }
    }
    const int n_segments = static_cast<int>(segments.size());
    if (T - n_segments < 2) {
        throw Error(errc::too_few_curves, "not enough curves to estimate the noise covariance");
    }

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [lo, hi] : segments) {
        const auto block = seq.values.middleRows(lo - 1, hi - lo + 1);
        Eigen::MatrixXd centered = block.rowwise() - block.colwise().mean();
        scatter.noalias() += centered.transpose() * centered;
    }
    Eigen::MatrixXd sigma = scatter / static_cast<double>(T - n_segments);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    NoiseCovariance out;
    const double trace = sigma.trace();
    if (!(trace > 0.0)) {
        out.sigma_hat = 1e-12 * Eigen::MatrixXd::Identity(d, d);
        out.shrinkage_weight = 1.0;
        return out;
    }

    const double ridge = trace / d;
    for (double w : {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        Eigen::MatrixXd candidate =
            (1.0 - w) * sigma + w * ridge * Eigen::MatrixXd::Identity(d, d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(candidate);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo > 0.0 && hi / lo <= kConditionBound) {
            out.sigma_hat = candidate;
            out.shrinkage_weight = w;
            return out;
        }
    }
    // w = 1 is ridge * I with condition number 1; unreachable for trace > 0
    throw Error(errc::singular_covariance, "noise covariance shrinkage failed");
}

SigmaXi::SigmaXi(Eigen::MatrixXd sigma, int T) : sigma_(std::move(sigma)), T_(T) {
    if (T_ < 1) {
        throw Error(errc::out_of_range, "SigmaXi needs T >= 1");
    }
    if (sigma_.rows() != sigma_.cols()) {
        throw Error(errc::grid_mismatch, "sigma must be square");
    }
    sigma_ = 0.5 * (sigma_ + sigma_.transpose()).eval();
    const int d = static_cast<int>(sigma_.rows());

    if (sigma_.trace() > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
        if (llt.info() == Eigen::Success) {
            chol_lower_ = llt.matrixL();
            return;
        }
        const double jitter = 1e-12 * sigma_.trace() / d;
        Eigen::LLT<Eigen::MatrixXd> retry(sigma_ + jitter * Eigen::MatrixXd::Identity(d, d));
        if (retry.info() == Eigen::Success) {
            chol_lower_ = retry.matrixL();
            return;
        }
    }

    // Generalized inverse path: truncate the eigendecomposition. A zero sigma
    // leaves rank 0; the operator itself stays usable (dense() is the zero
    // matrix) and only whitening reports the failure.
    truncated_ = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_);
    const double lambda_max = eig.eigenvalues().maxCoeff();
    const double cutoff = 1e-10 * std::max(lambda_max, 0.0);
    std::vector<int> keep;
    for (int i = 0; i < d; ++i) {
        if (eig.eigenvalues()[i] > cutoff && eig.eigenvalues()[i] > 0.0) keep.push_back(i);
    }
    white_.resize(static_cast<int>(keep.size()), d);
    for (std::size_t r = 0; r < keep.size(); ++r) {
        white_.row(static_cast<int>(r)) =
            eig.eigenvectors().col(keep[r]).transpose() / std::sqrt(eig.eigenvalues()[keep[r]]);
    }
}

Eigen::MatrixXd SigmaXi::whiten_stacked(const Eigen::MatrixXd& stacked) const {
    const int d = this->d();
    const int r = rank();
    if (r == 0) {
        throw Error(errc::singular_covariance, "noise covariance has rank zero after truncation");
    }
    if (stacked.rows() != static_cast<Eigen::Index>(T_) * d) {
        throw Error(errc::grid_mismatch, "stacked input rows must equal T*d");
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(T_) * r, stacked.cols());
    for (int t = 0; t < T_; ++t) {
        const auto block = stacked.middleRows(static_cast<Eigen::Index>(t) * d, d);
        if (truncated_) {
            out.middleRows(static_cast<Eigen::Index>(t) * r, r) = white_ * block;
        } else {
            out.middleRows(static_cast<Eigen::Index>(t) * r, r) =
                chol_lower_.triangularView<Eigen::Lower>().solve(block);
        }
        if (t > 0) {
            out.middleRows(static_cast<Eigen::Index>(t) * r, r) +=
                out.middleRows(static_cast<Eigen::Index>(t - 1) * r, r);
        }
    }
    return out;
}

Eigen::MatrixXd SigmaXi::dense() const {
    const int d = this->d();
    const Eigen::Index n = static_cast<Eigen::Index>(T_) * d;
    if (n > 4000) {
        throw Error(errc::out_of_range, "dense SigmaXi is only available for T*d <= 4000");
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < T_; ++t) {
        out.block(t * d, t * d, d, d) = (t == 0) ? sigma_ : 2.0 * sigma_;
        if (t > 0) {
            out.block(t * d, (t - 1) * d, d, d) = -sigma_;
            out.block((t - 1) * d, t * d, d, d) = -sigma_;
        }
    }
    return out;
}

SigmaXi build_sigma_xi_blocks(const Eigen::MatrixXd& sigma, int T) {
    return SigmaXi(sigma, T);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> whiten(const Eigen::VectorXd& y,
                                                   const Eigen::MatrixXd& design,
                                                   const SigmaXi& sigma_xi) {
    Eigen::VectorXd wy = sigma_xi.whiten_stacked(y);
    Eigen::MatrixXd wdesign = sigma_xi.whiten_stacked(design);
    return {std::move(wy), std::move(wdesign)};
}

namespace {

// Shared machinery for the F tests: one thin QR of the whitened full design
// (columns scaled to unit norm); reduced-model sums of squares come from
// small p x p refactorizations of the R factor with the tested block removed.
class WhitenedRegression {
  public:
    WhitenedRegression(const Eigen::VectorXd& wy, Eigen::MatrixXd wdesign)
        : n_w_(wy.size()), p_(wdesign.cols()) {
        if (n_w_ < p_) return;  // df2 <= 0, every test is skipped with a warning
        for (Eigen::Index j = 0; j < p_; ++j) {
            const double norm = wdesign.col(j).norm();
            if (norm <= 0.0) {
                throw Error(errc::rank_deficient_design, "whitened design has a zero column");
            }
            wdesign.col(j) /= norm;
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(wdesign);
        r_ = qr.matrixQR().topRows(p_).triangularView<Eigen::Upper>();
        const double diag_max = r_.diagonal().cwiseAbs().maxCoeff();
        if (r_.diagonal().cwiseAbs().minCoeff() <= 1e-10 * std::max(diag_max, 1.0)) {
            throw Error(errc::rank_deficient_design, "whitened design is rank deficient");
        }
        qty_ = (qr.householderQ().transpose() * wy).head(p_);
        rss_full_ = std::max(wy.squaredNorm() - qty_.squaredNorm(), 0.0);
    }

    double rss_full() const { return rss_full_; }
    Eigen::Index n() const { return n_w_; }
    Eigen::Index p() const { return p_; }

    double rss_without(int col_start, int col_count) const {
        const Eigen::Index p_red = p_ - col_count;
        Eigen::MatrixXd r_sub(p_, p_red);
        r_sub.leftCols(col_start) = r_.leftCols(col_start);
        r_sub.rightCols(p_red - col_start) = r_.rightCols(p_ - col_start - col_count);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(r_sub);
        const Eigen::VectorXd head = (qr.householderQ().transpose() * qty_).head(p_red);
        const double rss = rss_full_ + qty_.squaredNorm() - head.squaredNorm();
        return std::max(rss, 0.0);
    }

  private:
    Eigen::Index n_w_;
    Eigen::Index p_;
    Eigen::MatrixXd r_;     // p x p upper factor
    Eigen::VectorXd qty_;   // head of Q^T y
    double rss_full_ = 0.0;
};

TestResult f_test_from(const WhitenedRegression& reg, int col_start, int col_count) {
    TestResult res;
    res.df1 = col_count;
    res.df2 = static_cast<int>(reg.n() - reg.p());
    if (res.df2 <= 0) {
        res.df_warning = true;
        res.p_raw = 1.0;
        return res;
    }
    const double rss_full = reg.rss_full();
    const double rss_reduced = reg.rss_without(col_start, col_count);
    const double delta = rss_reduced - rss_full;
    const double mse = rss_full / res.df2;
    if (mse <= 0.0) {
        // zero-noise degenerate fits
        res.f_stat = (delta > 1e-12 * std::max(rss_reduced, 1.0))
                         ? std::numeric_limits<double>::infinity()
                         : 0.0;
        res.p_raw = (res.f_stat > 0.0) ? 0.0 : 1.0;
        return res;
    }
    double f = (delta / col_count) / mse;
    if (f < 0.0) f = 0.0;  // roundoff below 1e-10 magnitude
    res.f_stat = f;
    res.p_raw = f_upper_tail(f, res.df1, res.df2);
    return res;
}

}  // namespace

TestResult partial_f_test(const Eigen::VectorXd& y, const Eigen::MatrixXd& full_design,
                          int tested_col_start, int tested_col_count, const SigmaXi& sigma_xi) {
    if (tested_col_start < 0 || tested_col_count <= 0 ||
        tested_col_start + tested_col_count > full_design.cols()) {
        throw Error(errc::out_of_range, "tested columns outside the design");
    }
    auto [wy, wdesign] = whiten(y, full_design, sigma_xi);
    const WhitenedRegression reg(wy, std::move(wdesign));
    return f_test_from(reg, tested_col_start, tested_col_count);
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
    const int m = static_cast<int>(p_values.size());
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(errc::out_of_range, "p-values must lie in [0,1]");
        }
    }
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (int i = m - 1; i >= 0; --i) {
        const double scaled = p_values[order[i]] * m / static_cast<double>(i + 1);
        running = std::min(running, scaled);
        adjusted[order[i]] = std::min(running, 1.0);
    }
    return adjusted;
}

ChangePointSet pf_filter(const ChangePointSet& representatives, std::vector<TestResult>& results,
                         double alpha) {
    if (static_cast<int>(results.size()) != representatives.size()) {
        throw Error(errc::out_of_range, "one TestResult per representative required");
    }
    ChangePointSet retained;
    for (auto& res : results) {
        res.retained = (res.p_adjusted <= alpha);
        if (res.retained) retained.insert(res.representative);
    }
    return retained;
}

std::vector<TestResult> run_pf_stage(const FunctionalSequence& seq, const BasisSystem& basis,
                                     const ChangePointSet& representatives, double alpha) {
    if (representatives.empty()) return {};
    const int T = seq.T();
    const int d = seq.d();
    const int K = basis.K();
    const int m = representatives.size();

    const NoiseCovariance noise = estimate_noise_covariance(seq, representatives);
    const SigmaXi sigma_xi(noise.sigma_hat, T);

    // Response: differenced sequence after centering each grid point over
    // time. Centering shrinks the unmodeled part of the initial level; its
    // in-span part is carried by the explicit t=1 block below.
    Eigen::MatrixXd centered = seq.values.rowwise() - seq.values.colwise().mean();
    Eigen::VectorXd y(static_cast<Eigen::Index>(T) * d);
    for (int t = 0; t < T; ++t) {
        Eigen::RowVectorXd row = centered.row(t);
        if (t > 0) row -= centered.row(t - 1);
        y.segment(static_cast<Eigen::Index>(t) * d, d) = row.transpose();
    }

    // Design: intercept, initial-level block at t=1, one block per
    // representative, each block the basis evaluated in that time slot.
    const int p = 1 + K * (1 + m);
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T) * d, p);
    design.col(0).setOnes();
    design.block(0, 1, d, K) = basis.basis_matrix.transpose();
    {
        int i = 0;
        for (int rep : representatives) {
            design.block(static_cast<Eigen::Index>(rep - 1) * d, 1 + K * (1 + i), d, K) =
                basis.basis_matrix.transpose();
            ++i;
        }
    }

    auto [wy, wdesign] = whiten(y, design, sigma_xi);
    const WhitenedRegression reg(wy, std::move(wdesign));

    std::vector<TestResult> results;
    results.reserve(m);
    std::vector<double> p_raw;
    p_raw.reserve(m);
    {
        int i = 0;
        for (int rep : representatives) {
            TestResult res = f_test_from(reg, 1 + K * (1 + i), K);
            res.representative = rep;
            results.push_back(res);
            p_raw.push_back(res.p_raw);
            ++i;
        }
    }

    const std::vector<double> adjusted = bh_adjust(p_raw);
    for (int i = 0; i < m; ++i) {
        results[i].p_adjusted = adjusted[i];
        results[i].retained = (adjusted[i] <= alpha);
    }
    return results;
}

}  // namespace gspf
