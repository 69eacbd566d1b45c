#pragma once

// Leakage, scalar metrics, parameter sweeps and Monte Carlo mismatch runs.

#include "sramlab/ncurve.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sramlab {

/// Supply current of the standby cell (all control lines and bit lines at 0)
/// measured by the 0 V ammeter in the supply leg, cell storing q = 1.
[[nodiscard]] double leakage(const Circuit& cell, double vdd, double temperature,
                             const AnalysisOptions& opts = {});
[[nodiscard]] double leakage(const CellGeometry& geom, double vdd, double temperature,
                             const AnalysisOptions& opts = {});

enum class Metric { Hsnm, Rsnm, Wsnm, Svnm, Sinm, Wtv, Wti, Spnm, Wtp, Leakage };

[[nodiscard]] const char* to_string(Metric m);
[[nodiscard]] const char* unit_of(Metric m);
/// Throws std::invalid_argument.
[[nodiscard]] Metric parse_metric(std::string_view text);
[[nodiscard]] const std::vector<Metric>& all_metrics();

/// Lazily runs and caches the analyses that the requested metrics need for
/// one cell at one bias point. N-curve metrics come from the read N-curve.
class CellEvaluator {
public:
    CellEvaluator(Circuit cell, double vdd, double temperature, AnalysisOptions opts = {});

    [[nodiscard]] const SnmResult& snm(Mode mode);
    [[nodiscard]] const ButterflyResult& butterfly_curves(Mode mode);
    [[nodiscard]] const NCurveResult& ncurve(NCurveMode mode);
    [[nodiscard]] double leakage();

    /// Throws AnalysisError when the metric is undefined for this cell (for
    /// example svnm on a monostable N-curve); solver failures propagate.
    [[nodiscard]] double metric(Metric m);

    [[nodiscard]] const Circuit& cell() const { return cell_; }

private:
    Circuit cell_;
    double vdd_;
    double temperature_;
    AnalysisOptions opts_;
    std::map<Mode, ButterflyResult> butterflies_;
    std::map<Mode, SnmResult> snms_;
    std::map<NCurveMode, NCurveResult> ncurves_;
    std::optional<double> leakage_;
};

enum class SweepParam { CellRatio, PullupRatio, Vdd, Temperature };

[[nodiscard]] const char* to_string(SweepParam p);
/// Accepts cr, pr, vdd, temp. Throws std::invalid_argument.
[[nodiscard]] SweepParam parse_sweep_param(std::string_view text);

struct SweepRow {
    double param = 0.0;
    std::optional<double> value;
    std::string error;  // set when value is absent
};

struct SweepTable {
    SweepParam param = SweepParam::CellRatio;
    Metric metric = Metric::Hsnm;
    std::vector<SweepRow> rows;  // input order
};

/// One full analysis per value. Per-row failures land in the row. Throws
/// std::invalid_argument when values is empty or holds an invalid value.
[[nodiscard]] SweepTable parameter_sweep(const CellGeometry& geom, SweepParam param,
                                         const std::vector<double>& values, Metric metric,
                                         double vdd, double temperature,
                                         const AnalysisOptions& opts = {});

struct McSpec {
    CellGeometry geometry;
    std::size_t n_samples = 100;
    std::uint64_t seed = 1;
    double avt = 2.5e-9;  // V*m, Pelgrom coefficient (2.5 mV*um)
    double vdd = 1.0;
    double temperature = 27.0;
    std::vector<Metric> metrics{Metric::Rsnm, Metric::Wtp};
    unsigned threads = 1;  // 0 picks the hardware concurrency
    AnalysisOptions options;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct MetricStats {
    std::size_t count = 0;  // samples where the metric was defined
    double mean = 0.0;
    double stddev = 0.0;    // sample standard deviation (n - 1)
    double min = 0.0;
    double max = 0.0;
};

struct McSample {
    std::vector<std::optional<double>> values;  // parallel to McSpec::metrics
    bool read_fail = false;
    bool write_fail = false;
    bool solver_fail = false;
};

struct McResult {
    std::vector<Metric> metrics;
    std::vector<MetricStats> stats;  // parallel to metrics
    std::vector<McSample> samples;
    std::size_t read_failures = 0;
    std::size_t write_failures = 0;
    std::size_t solver_failures = 0;

    [[nodiscard]] double read_failure_rate() const;
    [[nodiscard]] double write_failure_rate() const;

    bool operator==(const McResult&) const;
};

/// Threshold shifts for every transistor of `cell` (circuit order) drawn for
/// one sample. Each sample has its own generator seeded from (seed, index),
/// so the draws do not depend on evaluation order.
[[nodiscard]] std::vector<double> draw_vto_shifts(const Circuit& cell, double avt,
                                                  std::uint64_t seed, std::uint64_t index);

/// Copy of `cell` where each transistor gets a private model card with its
/// vto moved by the matching shift.
[[nodiscard]] Circuit apply_vto_shifts(const Circuit& cell, const std::vector<double>& shifts);

/// A sample fails read when rsnm <= 0 or the read N-curve has fewer than
/// three crossings, and fails write when wtp >= 0 (or, with no wtp, when the
/// read N-curve never goes negative). A solver failure fails both.
[[nodiscard]] McResult monte_carlo(const McSpec& spec);

}  // namespace sramlab
