#include "gspf/io.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace gspf {

namespace {

using nlohmann::json;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(errc::io_error, "cannot open '" + path + "' for reading");
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(errc::io_error, "cannot open '" + path + "' for writing");
    }
    return out;
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& path, int lineno) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &pos);
        } catch (const std::exception&) {
            throw Error(errc::io_error, path + ":" + std::to_string(lineno) +
                                            ": cannot parse '" + cell + "' as a number");
        }
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) {
            throw Error(errc::io_error, path + ":" + std::to_string(lineno) +
                                            ": trailing characters in '" + cell + "'");
        }
        row.push_back(v);
    }
    return row;
}

json load_json(const std::string& path) {
    auto in = open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error(errc::io_error, path + ": " + e.what());
    }
    return j;
}

}  // namespace

CsvData read_csv_matrix(const std::string& path, bool grid_header) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_csv_row(line, path, lineno));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
            throw Error(errc::ragged_rows, path + ":" + std::to_string(lineno) +
                                               ": row has " + std::to_string(rows.back().size()) +
                                               " cells, expected " +
                                               std::to_string(rows.front().size()));
        }
    }
    if (rows.empty()) {
        throw Error(errc::io_error, path + ": no data rows");
    }

    CsvData data;
    std::size_t first_row = 0;
    if (grid_header) {
        Eigen::VectorXd g(rows[0].size());
        for (std::size_t j = 0; j < rows[0].size(); ++j) g[j] = rows[0][j];
        data.grid = g;
        first_row = 1;
        if (rows.size() == 1) {
            throw Error(errc::io_error, path + ": only a grid header, no curves");
        }
    }
    data.values.resize(rows.size() - first_row, rows[0].size());
    for (std::size_t i = first_row; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            data.values(i - first_row, j) = rows[i][j];
        }
    }
    return data;
}

void write_sequence_csv(const std::string& path, const FunctionalSequence& seq, bool grid_header) {
    auto out = open_output(path);
    if (grid_header) {
        for (int j = 0; j < seq.d(); ++j) {
            out << (j ? "," : "") << format_number(seq.grid.points[j]);
        }
        out << "\n";
    }
    for (int t = 0; t < seq.T(); ++t) {
        for (int j = 0; j < seq.d(); ++j) {
            out << (j ? "," : "") << format_number(seq.values(t, j));
        }
        out << "\n";
    }
}

void write_truth_json(const std::string& path, const ChangePointSet& truth,
                      const SimulationSpec& spec) {
    json j;
    j["change_points"] = truth.indices();
    j["spec"] = {
        {"family", family_name(spec.family)}, {"m", spec.m},   {"noise", noise_name(spec.noise)},
        {"df", spec.df},                      {"d", spec.d},   {"seed", spec.seed},
    };
    open_output(path) << j.dump(2) << "\n";
}

ChangePointSet read_truth_json(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("change_points")) {
        throw Error(errc::io_error, path + ": missing 'change_points'");
    }
    ChangePointSet set;
    for (const auto& v : j["change_points"]) set.insert(v.get<int>());
    return set;
}

void write_report_json(const std::string& path, const DetectionReport& report) {
    json tests = json::array();
    for (const TestResult& t : report.tests) {
        tests.push_back({
            {"representative", t.representative},
            {"f_stat", t.f_stat},
            {"df1", t.df1},
            {"df2", t.df2},
            {"p_raw", t.p_raw},
            {"p_adjusted", t.p_adjusted},
            {"retained", t.retained},
            {"df_warning", t.df_warning},
        });
    }
    json j = {
        {"schema_version", 1},
        {"change_points", report.change_points},
        {"candidates", report.candidates},
        {"representatives", report.representatives},
        {"tests", tests},
        {"params",
         {
             {"lambda", report.lambda},
             {"eta", report.eta},
             {"kappa", report.kappa},
             {"gamma", report.gamma},
             {"alpha", report.alpha},
             {"K", report.K},
             {"fve", report.fve},
         }},
        {"timing_ms", report.timing_ms},
    };
    open_output(path) << j.dump(2) << "\n";
}

DetectionReport read_report_json(const std::string& path) {
    const json j = load_json(path);
    DetectionReport report;
    try {
        report.change_points = j.at("change_points").get<std::vector<int>>();
        report.candidates = j.value("candidates", std::vector<int>{});
        report.representatives = j.value("representatives", std::vector<int>{});
        if (j.contains("tests")) {
            for (const auto& t : j["tests"]) {
                TestResult r;
                r.representative = t.at("representative").get<int>();
                r.f_stat = t.at("f_stat").get<double>();
                r.df1 = t.at("df1").get<int>();
                r.df2 = t.at("df2").get<int>();
                r.p_raw = t.at("p_raw").get<double>();
                r.p_adjusted = t.at("p_adjusted").get<double>();
                r.retained = t.at("retained").get<bool>();
                r.df_warning = t.value("df_warning", false);
                report.tests.push_back(r);
            }
        }
        if (j.contains("params")) {
            const auto& p = j["params"];
            report.lambda = p.value("lambda", 0.0);
            report.eta = p.value("eta", 0.0);
            report.kappa = p.value("kappa", 0);
            report.gamma = p.value("gamma", 0.0);
            report.alpha = p.value("alpha", 0.0);
            report.K = p.value("K", 0);
            report.fve = p.value("fve", 0.0);
        }
        report.timing_ms = j.value("timing_ms", 0LL);
    } catch (const json::exception& e) {
        throw Error(errc::io_error, path + ": " + e.what());
    }
    return report;
}

void write_metrics_json(const std::string& path, const EvalMetrics& metrics) {
    json j = {
        {"annotation_error", metrics.annotation_error},
        {"hausdorff_error", metrics.hausdorff_error},
        {"success", metrics.success},
    };
    open_output(path) << j.dump(2) << "\n";
}

void write_segments_csv(const std::string& path, const FunctionalSequence& seq,
                        const std::vector<int>& change_points) {
    const int T = seq.T();
    for (std::size_t i = 0; i < change_points.size(); ++i) {
        const int cp = change_points[i];
        if (cp < 2 || cp > T) {
            throw Error(errc::index_out_of_range,
                        "change point " + std::to_string(cp) + " outside [2, T]");
        }
        if (i > 0 && change_points[i] <= change_points[i - 1]) {
            throw Error(errc::index_out_of_range, "change points must be strictly increasing");
        }
    }
    auto out = open_output(path);
    int start = 1;
    for (std::size_t i = 0; i <= change_points.size(); ++i) {
        const int end = (i < change_points.size()) ? change_points[i] - 1 : T;
        const Eigen::RowVectorXd mean =
            seq.values.middleRows(start - 1, end - start + 1).colwise().mean();
        out << start << "," << end;
        for (int j = 0; j < seq.d(); ++j) {
            out << "," << format_number(mean[j]);
        }
        out << "\n";
        start = end + 1;
    }
}

void write_bench_csv(const std::string& path, const BenchResult& result) {
    auto out = open_output(path);
    out << "alpha," << family_name(result.family) << "\n";
    for (std::size_t a = 0; a < result.alphas.size(); ++a) {
        out << format_number(result.alphas[a]) << "," << format_number(result.success_rates[a])
            << "\n";
    }
}

}  // namespace gspf
