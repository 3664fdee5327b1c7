#include "gspf/refine.hpp"

#include <algorithm>
#include <cmath>

namespace gspf {

std::vector<CandidateCluster> merge_candidates(const ChangePointSet& candidates, int kappa, int T) {
    if (kappa < 0) {
        throw Error(errc::out_of_range, "kappa must be >= 0");
    }
    std::vector<CandidateCluster> clusters;
    for (int idx : candidates) {
        if (clusters.empty() || idx - clusters.back().members.back() > kappa) {
            clusters.push_back(CandidateCluster{});
        }
        clusters.back().members.push_back(idx);
    }
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (c == 0) {
            clusters[c].lo = 1;
        } else {
            clusters[c].lo = (clusters[c - 1].members.back() + clusters[c].members.front()) / 2;
        }
        if (c + 1 == clusters.size()) {
            clusters[c].hi = T;
        } else {
            clusters[c].hi = (clusters[c].members.back() + clusters[c + 1].members.front()) / 2;
        }
    }
    return clusters;
}

double cusum_statistic(const FunctionalSequence& seq, int lo, int hi, int k) {
    const int T = seq.T();
    if (lo < 1 || hi > T || hi - lo + 1 < 2) {
        throw Error(errc::window_too_small, "CUSUM window needs at least 2 curves inside the sequence");
    }
    if (k < lo || k >= hi) {
        throw Error(errc::out_of_range, "CUSUM split must satisfy lo <= k < hi");
    }
    const int n = hi - lo + 1;
    const Eigen::VectorXd w = trapezoid_weights(seq.grid);

    Eigen::RowVectorXd partial = Eigen::RowVectorXd::Zero(seq.d());
    Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(seq.d());
    for (int t = lo; t <= hi; ++t) {
        total += seq.values.row(t - 1);
        if (t <= k) partial += seq.values.row(t - 1);
    }
    const double frac = static_cast<double>(k - lo + 1) / static_cast<double>(n);
    const Eigen::RowVectorXd contrast = partial - frac * total;
    const double sq = (contrast.array().square() * w.transpose().array()).sum();
    return std::sqrt(std::max(sq, 0.0) / n);
}

int elect_representative(const CandidateCluster& cluster, const FunctionalSequence& seq) {
    if (cluster.members.empty()) {
        throw Error(errc::out_of_range, "cannot elect from an empty cluster");
    }
    if (cluster.members.size() == 1) {
        return cluster.members.front();
    }
    const int T = seq.T();
    const int lo = cluster.lo;
    const int hi = cluster.hi;
    if (hi - lo + 1 < 2) {
        throw Error(errc::window_too_small, "election window needs at least 2 curves");
    }
    const int k_lo = std::max(cluster.members.front() - 1, lo);
    const int k_hi = std::min(cluster.members.back(), hi - 1);
    const int n = hi - lo + 1;
    const Eigen::VectorXd w = trapezoid_weights(seq.grid);

    // Running partial sums give the same statistic as cusum_statistic in one
    // pass over the window.
    Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(seq.d());
    for (int t = lo; t <= hi; ++t) total += seq.values.row(t - 1);

    Eigen::RowVectorXd partial = Eigen::RowVectorXd::Zero(seq.d());
    int best_k = k_lo;
    double best_val = -1.0;
    for (int t = lo; t <= k_hi; ++t) {
        partial += seq.values.row(t - 1);
        const int k = t;
        if (k < k_lo) continue;
        const double frac = static_cast<double>(k - lo + 1) / static_cast<double>(n);
        const Eigen::RowVectorXd contrast = partial - frac * total;
        const double val = std::sqrt(
            std::max((contrast.array().square() * w.transpose().array()).sum(), 0.0) / n);
        if (val > best_val) {
            best_val = val;
            best_k = k;
        }
    }
    // k marks the last pre-change index; clamp into {2,...,T}
    return std::clamp(best_k + 1, 2, T);
}

ChangePointSet elect_representatives(const std::vector<CandidateCluster>& clusters,
                                     const FunctionalSequence& seq) {
    ChangePointSet reps;
    for (const auto& cluster : clusters) {
        reps.insert(elect_representative(cluster, seq));
    }
    return reps;
}

}  // namespace gspf
