#pragma once

#include "gspf/types.hpp"

#include <optional>

namespace gspf {

/// Differencing reparameterization: y_1 = f_1, y_t = f_t - f_{t-1}.
DifferencedSequence difference(const FunctionalSequence& seq);

/// Inverse of difference(): cumulative row sums.
FunctionalSequence cumulative_sum(const DifferencedSequence& dseq);

/// Validate a raw matrix parsed from CSV and attach a grid (equispaced
/// interior points of [0,1] when none is given).
FunctionalSequence validate_csv_matrix(const Eigen::MatrixXd& raw,
                                       const std::optional<Eigen::VectorXd>& grid = std::nullopt);

}  // namespace gspf
