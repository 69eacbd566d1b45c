#pragma once

// N-curves: the current a source on qb must supply as it is swept across
// the supply range, and the stability metrics read off its zero crossings.

#include "sramlab/butterfly.hpp"

#include <optional>
#include <vector>

namespace sramlab {

enum class NCurveMode { Read, Write };

[[nodiscard]] const char* to_string(NCurveMode m);
/// Throws std::invalid_argument.
[[nodiscard]] NCurveMode parse_ncurve_mode(std::string_view text);

/// Fields stay empty when the curve lacks the crossings that define them.
struct NCurveMetrics {
    std::optional<double> svnm;      // V, b - a
    std::optional<double> sinm;      // A, positive peak on [a, b]
    std::optional<double> wtv;       // V, c - b
    std::optional<double> wti;       // A, negative peak on [b, c]
    std::optional<double> spnm;      // W, integral of I dV over [a, b]
    std::optional<double> wtp;       // W, integral of I dV over [b, c]
    std::optional<double> icrit_wr;  // A, write curves only
};

struct NCurveResult {
    Curve samples;                  // (vin, iin)
    std::vector<double> crossings;  // ascending
    std::optional<double> a, b, c;
    bool monostable = false;
    NCurveMetrics metrics;
    NCurveMode mode = NCurveMode::Read;
};

/// Zero crossings by sign change with linear interpolation. A sample that is
/// exactly zero counts once.
[[nodiscard]] std::vector<double> zero_crossings(const Curve& samples);

/// Requires at least 3 samples (std::invalid_argument otherwise).
/// With fewer than three crossings the voltage/current/power fields are
/// absent; icrit_wr is never filled here.
[[nodiscard]] NCurveMetrics ncurve_metrics(const Curve& samples);

/// Magnitude of the most negative current on the curve, or nullopt if the
/// curve never goes negative.
[[nodiscard]] std::optional<double> critical_write_current(const Curve& samples);

/// Sweeps a source on qb from 0 to vdd with the cell initialized to qb = 0.
/// Read mode uses the read clamps; write mode drives bl low and blb high so
/// the swept node is the one being written to 1.
[[nodiscard]] NCurveResult ncurve(const Circuit& cell, NCurveMode mode, double vdd,
                                  double temperature, const AnalysisOptions& opts = {});
[[nodiscard]] NCurveResult ncurve(const CellGeometry& geom, NCurveMode mode, double vdd,
                                  double temperature, const AnalysisOptions& opts = {});

}  // namespace sramlab
