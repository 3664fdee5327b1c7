#pragma once

#include "gspf/detector.hpp"
#include "gspf/evalkit.hpp"
#include "gspf/simlab.hpp"
#include "gspf/types.hpp"

#include <optional>
#include <string>

namespace gspf {

struct CsvData {
    Eigen::MatrixXd values;
    std::optional<Eigen::VectorXd> grid;
};

/// Read a CSV of curves: rows = time points, columns = grid values. When
/// grid_header is set the first row holds the grid coordinates.
CsvData read_csv_matrix(const std::string& path, bool grid_header);

void write_sequence_csv(const std::string& path, const FunctionalSequence& seq, bool grid_header);

void write_truth_json(const std::string& path, const ChangePointSet& truth,
                      const SimulationSpec& spec);
ChangePointSet read_truth_json(const std::string& path);

void write_report_json(const std::string& path, const DetectionReport& report);
DetectionReport read_report_json(const std::string& path);

void write_metrics_json(const std::string& path, const EvalMetrics& metrics);

/// Segment-means table: one row per segment with start, end, then the d mean
/// values of the curves in [start, end].
void write_segments_csv(const std::string& path, const FunctionalSequence& seq,
                        const std::vector<int>& change_points);

void write_bench_csv(const std::string& path, const BenchResult& result);

}  // namespace gspf
