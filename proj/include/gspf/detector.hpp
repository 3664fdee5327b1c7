#pragma once

#include "gspf/pf_stage.hpp"
#include "gspf/types.hpp"

#include <vector>

namespace gspf {

struct DetectionReport {
    std::vector<int> change_points;
    std::vector<int> candidates;
    std::vector<int> representatives;
    std::vector<TestResult> tests;  // one per representative
    // resolved configuration
    double lambda = 0.0;
    double eta = 0.0;
    int kappa = 0;
    double gamma = 0.0;
    double alpha = 0.0;
    int K = 0;
    double fve = 0.0;
    long long timing_ms = 0;
};

/// End-to-end GS-PF pipeline: FPCA basis, BIC grid search over
/// (lambda, eta, kappa), group-selection fit, cluster merge and CUSUM
/// election, then FDR-filtered partial F-tests.
DetectionReport detect(const FunctionalSequence& seq, const DetectorConfig& config);

}  // namespace gspf
