#pragma once

#include "gspf/types.hpp"

#include <vector>

namespace gspf {

/// Maximal run of candidate change points with inter-member gaps <= kappa,
/// together with the window [lo, hi] used for CUSUM election. Windows extend
/// to the midpoints between adjacent clusters (sequence ends otherwise).
struct CandidateCluster {
    std::vector<int> members;  // sorted, 1-based time indices
    int lo = 0;
    int hi = 0;
};

/// Partition candidates into clusters linked by the parameter kappa.
/// T is the sequence length bounding the last window.
std::vector<CandidateCluster> merge_candidates(const ChangePointSet& candidates, int kappa, int T);

/// Functional CUSUM statistic of the window [lo, hi] split after curve k:
/// with n = hi-lo+1, C(k) = n^{-1/2} || sum_{t=lo}^{k} f_t - (k-lo+1)/n *
/// sum_t f_t ||_{L2(quadrature)}. Requires lo <= k < hi.
double cusum_statistic(const FunctionalSequence& seq, int lo, int hi, int k);

/// One representative per cluster: the member of a singleton, otherwise the
/// CUSUM argmax over k in [min(members)-1, max(members)] plus one (the first
/// index of the new regime), ties to the smallest k.
int elect_representative(const CandidateCluster& cluster, const FunctionalSequence& seq);

/// merge + elect over all clusters.
ChangePointSet elect_representatives(const std::vector<CandidateCluster>& clusters,
                                     const FunctionalSequence& seq);

}  // namespace gspf
