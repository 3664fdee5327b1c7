#include "gspf/tuning.hpp"

#include "gspf/core.hpp"
#include "gspf/parallel.hpp"
#include "gspf/pf_stage.hpp"
#include "gspf/refine.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gspf {

namespace {

// Profiled least squares for the level model
//   f_t = c 1 + b^T h_0 + sum_{reps tau <= t} b^T g_tau + eps_t,
// every segment (including the first, which carries the initial level) owning
// a coefficient block in the basis span. Residuals are measured after
// per-curve whitening by a noise covariance estimated once from a pilot
// segmentation shared by every scored set: the Gaussian profile form
// n log(RSS/n) is only comparable across candidate sets under a common
// whitening, and raw sums of squares overcount the information in smooth
// functional noise. The blocks are eliminated through the projector onto the
// whitened basis span, leaving a scalar problem in the intercept.
class BicScorer {
  public:
    BicScorer(const FunctionalSequence& seq, const BasisSystem& basis,
              const ChangePointSet& pilot)
        : T_(seq.T()), d_(seq.d()), K_(basis.K()) {
        const NoiseCovariance noise = estimate_noise_covariance(seq, pilot);
        Eigen::LLT<Eigen::MatrixXd> llt(noise.sigma_hat);
        if (llt.info() != Eigen::Success) {
            throw Error(errc::cholesky_failure, "pilot noise covariance is not positive definite");
        }
        const auto lower = llt.matrixL();

        const Eigen::MatrixXd whitened =
            lower.solve(seq.values.transpose()).transpose();  // T x d, rows L^{-1} f_t
        prefix_rows_ = Eigen::MatrixXd::Zero(T_ + 1, d_);
        prefix_sq_.assign(T_ + 1, 0.0);
        for (int t = 0; t < T_; ++t) {
            prefix_rows_.row(t + 1) = prefix_rows_.row(t) + whitened.row(t);
            prefix_sq_[t + 1] = prefix_sq_[t] + whitened.row(t).squaredNorm();
        }

        const Eigen::MatrixXd wblock = lower.solve(basis.basis_matrix.transpose());  // d x K
        wones_ = lower.solve(Eigen::VectorXd::Ones(d_));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(wblock);
        qb_ = qr.householderQ() * Eigen::MatrixXd::Identity(d_, K_);
        qb_ones_ = qb_.transpose() * wones_;
    }

    double score(const ChangePointSet& reps) const {
        const double n = static_cast<double>(T_) * d_;
        const double df = 1.0 + static_cast<double>(K_) * reps.size();
        if (!(df < n)) {
            throw Error(errc::out_of_range, "bic refit has df >= n");
        }

        double quad = prefix_sq_[T_];
        double lin = 0.0;   // coefficient of -2c
        double curv = T_ * wones_.squaredNorm();

        auto close_segment = [&](int lo, int hi) {
            const double len = hi - lo + 1;
            const Eigen::VectorXd wmean =
                (prefix_rows_.row(hi) - prefix_rows_.row(lo - 1)).transpose() / len;
            const Eigen::VectorXd proj = qb_.transpose() * wmean;
            quad -= len * proj.squaredNorm();
            lin += len * (wmean.dot(wones_) - proj.dot(qb_ones_));
            curv -= len * qb_ones_.squaredNorm();
        };
        int seg_start = 1;
        for (int r : reps) {
            if (r < 2 || r > T_) {
                throw Error(errc::index_out_of_range, "representative outside {2,...,T}");
            }
            close_segment(seg_start, r - 1);
            seg_start = r;
        }
        close_segment(seg_start, T_);

        double rss = quad;
        if (curv > 1e-12 * T_ * std::max(wones_.squaredNorm(), 1.0)) {
            rss -= lin * lin / curv;
        }
        if (!(rss > n * 1e-300)) {
            return -std::numeric_limits<double>::infinity();  // degenerate exact refit
        }
        return n * std::log(rss / n) + df * std::log(n);
    }

  private:
    int T_, d_, K_;
    Eigen::MatrixXd prefix_rows_;   // prefix sums of whitened curves
    std::vector<double> prefix_sq_; // prefix sums of whitened squared norms
    Eigen::MatrixXd qb_;            // d x K orthonormal basis of the whitened block span
    Eigen::VectorXd wones_;         // whitened intercept direction
    Eigen::VectorXd qb_ones_;
};

bool better_record(const TuningRecord& a, const TuningRecord& b) {
    if (a.bic != b.bic) return a.bic < b.bic;
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.kappa != b.kappa) return a.kappa > b.kappa;
    return a.eta < b.eta;
}

}  // namespace

double bic_score(const FunctionalSequence& seq, const ChangePointSet& representatives,
                 const BasisSystem& basis, const ChangePointSet& pilot) {
    seq.validate();
    return BicScorer(seq, basis, pilot).score(representatives);
}

double bic_score(const FunctionalSequence& seq, const ChangePointSet& representatives,
                 const BasisSystem& basis) {
    return bic_score(seq, representatives, basis, representatives);
}

GridSearchResult grid_search(const FunctionalSequence& seq, const GsContext& ctx,
                             const BasisSystem& basis, const DetectorConfig& config) {
    config.validate();
    const int T = seq.T();

    std::vector<double> lambdas = config.lambda_grid;
    if (!config.lambda_grid_absolute) {
        double scale = ctx.median_group_norm();
        if (!(scale > 0.0)) scale = 1.0;
        for (double& l : lambdas) l *= scale;

        // Augment the geometric default grid with tail quantiles of the group
        // magnitudes: a lambda halfway between the k-th and (k+1)-th largest
        // norm keeps exactly the top k groups, so the BIC search enumerates
        // parsimony levels directly even when the feasible lambda window
        // between the weakest change and the noise bulk is narrow.
        std::vector<double> norms;
        norms.reserve(ctx.T() - 1);
        for (int t = 1; t < ctx.T(); ++t) norms.push_back(ctx.z().row(t).norm());
        std::sort(norms.begin(), norms.end(), std::greater<>());
        for (int k : {0, 1, 2, 3, 4, 5, 6, 8, 10, 13, 17, 22, 28, 35}) {
            if (k >= static_cast<int>(norms.size())) break;
            const double lambda =
                (k == 0) ? norms[0] * 1.05 : 0.5 * (norms[k - 1] + norms[k]);
            if (lambda > 0.0 && std::isfinite(lambda)) lambdas.push_back(lambda);
        }
    }
    // Pilot segmentation for the shared BIC whitening: boundaries at group
    // magnitudes clearly above the noise bulk (robust tail cut on the squared
    // norms), thinned to a minimum spacing of 3 so that no segment needs
    // merging inside the covariance estimator. A strong shift left inside a
    // pilot segment would fold into the noise estimate and flatten the score
    // differences it should drive; boundaries at noise peaks instead shave
    // real variance out of the estimate, so the cut errs toward few.
    ChangePointSet pilot;
    {
        std::vector<double> sq;
        sq.reserve(ctx.T() - 1);
        for (int t = 1; t < ctx.T(); ++t) sq.push_back(ctx.z().row(t).squaredNorm());
        std::vector<double> sorted_sq = sq;
        std::sort(sorted_sq.begin(), sorted_sq.end());
        const double median = sorted_sq[sorted_sq.size() / 2];
        const double q90 = sorted_sq[(sorted_sq.size() * 9) / 10];
        const double cut = median + 4.0 * (q90 - median);

        std::vector<std::pair<double, int>> ranked;
        for (int t = 1; t < ctx.T(); ++t) {
            if (sq[t - 1] > cut && sq[t - 1] > 0.0) ranked.emplace_back(sq[t - 1], t + 1);
        }
        std::sort(ranked.begin(), ranked.end(), std::greater<>());
        const int cap = std::max(10, T / 6);
        std::vector<char> blocked(T + 3, 0);
        for (const auto& [norm_sq, t] : ranked) {
            if (pilot.size() >= cap) break;
            if (t < 3 || t > T - 1 || blocked[t]) continue;
            pilot.insert(t);
            for (int u = std::max(2, t - 2); u <= std::min(T, t + 2); ++u) blocked[u] = 1;
        }
    }
    const BicScorer scorer(seq, basis, pilot);

    const std::size_t n_eta = config.eta_grid.size();
    const std::size_t n_kappa = config.kappa_grid.size();
    std::vector<TuningRecord> all(lambdas.size() * n_eta * n_kappa);

    parallel_for(lambdas.size(), config.threads, [&](std::size_t li) {
        for (std::size_t ei = 0; ei < n_eta; ++ei) {
            const GsResult fit = ctx.fit(lambdas[li], config.eta_grid[ei], config.gamma);
            for (std::size_t ki = 0; ki < n_kappa; ++ki) {
                const int kappa = config.kappa_grid[ki];
                const auto clusters = merge_candidates(fit.candidates, kappa, T);
                const ChangePointSet reps = elect_representatives(clusters, seq);
                TuningRecord rec;
                rec.lambda = lambdas[li];
                rec.eta = config.eta_grid[ei];
                rec.kappa = kappa;
                rec.bic = scorer.score(reps);
                rec.degenerate = std::isinf(rec.bic);
                rec.n_candidates = fit.candidates.size();
                rec.n_representatives = reps.size();
                all[(li * n_eta + ei) * n_kappa + ki] = rec;
            }
        }
    });

    GridSearchResult out;
    out.best = all.front();
    for (const auto& rec : all) {
        if (better_record(rec, out.best)) out.best = rec;
    }
    out.all = std::move(all);
    return out;
}

GridSearchResult grid_search(const FunctionalSequence& seq, const BasisSystem& basis,
                             const DetectorConfig& config) {
    const DifferencedSequence dseq = difference(seq);
    const GsContext ctx(dseq, basis);
    return grid_search(seq, ctx, basis, config);
}

}  // namespace gspf
