#include "gspf/core.hpp"

namespace gspf {

DifferencedSequence difference(const FunctionalSequence& seq) {
    seq.validate();
    DifferencedSequence out;
    out.grid = seq.grid;
    out.values = seq.values;
    for (Eigen::Index t = seq.values.rows() - 1; t >= 1; --t) {
        out.values.row(t) -= seq.values.row(t - 1);
    }
    return out;
}

FunctionalSequence cumulative_sum(const DifferencedSequence& dseq) {
    FunctionalSequence out;
    out.grid = dseq.grid;
    out.values = dseq.values;
    for (Eigen::Index t = 1; t < out.values.rows(); ++t) {
        out.values.row(t) += out.values.row(t - 1);
    }
    return out;
}

FunctionalSequence validate_csv_matrix(const Eigen::MatrixXd& raw,
                                       const std::optional<Eigen::VectorXd>& grid) {
    if (!raw.allFinite()) {
        throw Error(errc::non_finite_entry, "input matrix contains NaN or infinite entries");
    }
    const int d = static_cast<int>(raw.cols());
    FunctionalSequence seq;
    seq.values = raw;
    if (grid.has_value()) {
        if (grid->size() != d) {
            throw Error(errc::grid_mismatch,
                        "grid has " + std::to_string(grid->size()) + " entries but matrix has " +
                            std::to_string(d) + " columns");
        }
        seq.grid.points = *grid;
    } else {
        if (d < 3) {
            throw Error(errc::grid_too_small, "need at least 3 grid columns");
        }
        seq.grid = Grid::equispaced(d);
    }
    seq.validate();
    return seq;
}

}  // namespace gspf
