#include "gspf/detector.hpp"

#include "gspf/core.hpp"
#include "gspf/fpca.hpp"
#include "gspf/gs_stage.hpp"
#include "gspf/refine.hpp"
#include "gspf/tuning.hpp"

#include <chrono>

namespace gspf {

DetectionReport detect(const FunctionalSequence& seq, const DetectorConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    seq.validate();
    config.validate();

    const BasisSystem basis = make_basis(seq, config.fve_threshold);
    const DifferencedSequence dseq = difference(seq);
    const GsContext ctx(dseq, basis);

    const GridSearchResult search = grid_search(seq, ctx, basis, config);
    const GsResult fit = ctx.fit(search.best.lambda, search.best.eta, config.gamma);
    const auto clusters = merge_candidates(fit.candidates, search.best.kappa, seq.T());
    const ChangePointSet representatives = elect_representatives(clusters, seq);

    std::vector<TestResult> tests = run_pf_stage(seq, basis, representatives, config.fdr_alpha);

    DetectionReport report;
    report.candidates = fit.candidates.indices();
    report.representatives = representatives.indices();
    for (const TestResult& t : tests) {
        if (t.retained) report.change_points.push_back(t.representative);
    }
    report.tests = std::move(tests);
    report.lambda = search.best.lambda;
    report.eta = search.best.eta;
    report.kappa = search.best.kappa;
    report.gamma = config.gamma;
    report.alpha = config.fdr_alpha;
    report.K = basis.K();
    report.fve = basis.fve;
    report.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
    return report;
}

}  // namespace gspf
