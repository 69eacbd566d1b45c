#pragma once

// CSV tables, SVG plots and the paired 6T/9T comparison report.

#include "sramlab/analysis.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sramlab::report {

/// Resolved run configuration, echoed as `# key=value` header lines.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// "%.{digits}g" rendering; nan and inf print as nan, inf, -inf.
[[nodiscard]] std::string format_sig(double v, int digits = 9);

struct CsvTable {
    ConfigEcho config;
    std::vector<std::string> annotations;  // extra `# ...` lines after the config
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

[[nodiscard]] std::string render_csv(const CsvTable& t);

/// Columns vin,vout1,vout2: vout1 is q from side 1 and vout2 is qb from
/// side 2, both against the shared swept input.
[[nodiscard]] CsvTable butterfly_table(const ButterflyResult& b, const ConfigEcho& config);
/// Columns vin,iin plus an `# A=... B=... C=...` line.
[[nodiscard]] CsvTable ncurve_table(const NCurveResult& r, const ConfigEcho& config);
/// Columns param,metric in row order; failed rows carry nan and an
/// `# error ...` annotation.
[[nodiscard]] CsvTable sweep_table(const SweepTable& t, const ConfigEcho& config);
/// Columns sample,<metrics...>,read_fail,write_fail,solver_fail.
[[nodiscard]] CsvTable mc_table(const McResult& r, const ConfigEcho& config);

struct Series {
    std::string name;
    std::vector<Point> points;
};

struct Marker {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

struct SvgPlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    std::optional<Square> square;
    std::optional<double> square_side;  // reported in the legend
    std::vector<Marker> markers;
    ConfigEcho config;                  // embedded as <metadata>
};

/// Self-contained SVG document. Throws std::invalid_argument without series.
[[nodiscard]] std::string render_svg(const SvgPlot& plot);

[[nodiscard]] SvgPlot butterfly_plot(const ButterflyResult& b, const SnmResult& snm,
                                     const ConfigEcho& config);
[[nodiscard]] SvgPlot ncurve_plot(const NCurveResult& r, const ConfigEcho& config);
[[nodiscard]] SvgPlot sweep_plot(const SweepTable& t, const ConfigEcho& config);

struct ComparisonRow {
    std::string label;
    std::string unit;   // display unit
    double scale = 1.0; // SI value * scale = display value
    std::optional<double> six_t;
    std::optional<double> nine_t;
    std::string error_six_t;
    std::string error_nine_t;
    std::string reference_six_t;  // reference value as display text, empty when none exists
    std::string reference_nine_t;
};

struct ComparisonReport {
    ConfigEcho config;
    std::vector<ComparisonRow> rows;
};

/// Runs both topologies with the core geometry of `geom` (its topology is
/// ignored). Rows: SVNM, SINM, WTV, WTI, I_CRIT_WR, read leakage, HSNM,
/// RSNM, WSNM.
[[nodiscard]] ComparisonReport build_comparison(const CellGeometry& geom, double vdd,
                                                double temperature, const ConfigEcho& config,
                                                const AnalysisOptions& opts = {});

[[nodiscard]] std::string render_comparison_text(const ComparisonReport& r);
[[nodiscard]] CsvTable comparison_table(const ComparisonReport& r);

/// Throws IoError.
void write_file(const std::string& path, const std::string& content);

}  // namespace sramlab::report
