#pragma once

#include "gspf/detector.hpp"
#include "gspf/simlab.hpp"
#include "gspf/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gspf {

struct EvalMetrics {
    int annotation_error = 0;
    double hausdorff_error = 0.0;
    bool success = false;
};

/// |#estimated - #true| change points.
int annotation_error(const ChangePointSet& est, const ChangePointSet& truth);

/// Directed Hausdorff error max_{b in truth} min_{a in est} |b - a|, with the
/// convention d_H(A, empty) = d_H(empty, B) = 1 and d_H(empty, empty) = 0.
double hausdorff_error(const ChangePointSet& est, const ChangePointSet& truth);

EvalMetrics evaluate(const ChangePointSet& est, const ChangePointSet& truth);

struct BenchResult {
    Family family = Family::symmetric;
    int m = 0;
    std::vector<double> alphas;
    std::vector<double> success_rates;  // one per alpha
    int n_replications = 0;
    int n_errors = 0;
    std::vector<std::string> error_log;
};

/// Monte-Carlo benchmark: replication i uses seed spec.seed + i, the detector
/// runs once per replication, and the final filter is re-applied at each
/// alpha. Erroring replications count as failures for every alpha.
BenchResult run_bench(const SimulationSpec& spec_template, int n_replications,
                      const DetectorConfig& config, const std::vector<double>& alphas);

/// Variant with a pluggable detector (stubs in tests).
using DetectorFn = std::function<DetectionReport(const FunctionalSequence&, const DetectorConfig&)>;
BenchResult run_bench(const SimulationSpec& spec_template, int n_replications,
                      const DetectorConfig& config, const std::vector<double>& alphas,
                      const DetectorFn& detector);

}  // namespace gspf
