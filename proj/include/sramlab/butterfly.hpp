#pragma once

// Voltage transfer curves, butterfly plots and static noise margins.

#include "sramlab/cell.hpp"
#include "sramlab/solver.hpp"

#include <optional>
#include <vector>

namespace sramlab {

struct AnalysisOptions {
    double vtc_step = 0.005;     // V
    double ncurve_step = 0.002;  // V
    SolverOptions solver;
};

/// Node-voltage guess for a cell biased at vdd, storing q high or low.
[[nodiscard]] Voltages storage_guess(double vdd, bool q_high);

/// Transfer curve of one inverter under the clamps of `mode`: side 1 sweeps
/// qb and records q, side 2 sweeps q and records qb.
[[nodiscard]] Curve extract_vtc(const Circuit& cell, Mode mode, int side, double vdd,
                                double temperature, const AnalysisOptions& opts = {});
[[nodiscard]] Curve extract_vtc(const CellGeometry& geom, Mode mode, int side, double vdd,
                                double temperature, const AnalysisOptions& opts = {});

/// vtc1 is (qb, q) from side 1 and vtc2 is (q, qb) from side 2, both as
/// swept. mirrored_vtc2() re-expresses vtc2 in the (qb, q) frame of vtc1.
struct ButterflyResult {
    Curve vtc1;
    Curve vtc2;
    Mode mode = Mode::Hold;
    double vdd = 1.0;

    [[nodiscard]] std::vector<Point> mirrored_vtc2() const;
};

[[nodiscard]] ButterflyResult butterfly(const Circuit& cell, Mode mode, double vdd,
                                        double temperature, const AnalysisOptions& opts = {});
[[nodiscard]] ButterflyResult butterfly(const CellGeometry& geom, Mode mode, double vdd,
                                        double temperature, const AnalysisOptions& opts = {});

/// Axis-aligned square in the (qb, q) frame; (x, y) is the lower-left corner.
struct Square {
    double x = 0.0;
    double y = 0.0;
    double side = 0.0;
};

struct SnmResult {
    double lobe_high = 0.0;  // lobe around the q-high state
    double lobe_low = 0.0;   // lobe around the q-low state
    double snm = 0.0;
    bool monostable = false;    // hold/read butterfly with a single intersection
    bool write_failed = false;  // write butterfly still bistable
    std::vector<Point> intersections;  // (qb, q), ordered from the q-high state
    std::optional<Square> square;      // the square that sets snm
};

/// Intersections of vtc1 with the mirrored vtc2, ordered from the q-high end.
[[nodiscard]] std::vector<Point> butterfly_intersections(const ButterflyResult& b);

/// 45-degree rotation method. Hold/read: per-lobe maximal inscribed square,
/// snm is the smaller lobe; a single intersection reports snm = 0 and sets
/// `monostable`. Write: side of the largest square that passes through the
/// narrowest part of the channel left where the overwritten state's lobe
/// was; 0 with `write_failed` if three intersections persist.
/// Throws AnalysisError for any other intersection count.
[[nodiscard]] SnmResult snm_from_butterfly(const ButterflyResult& b);

/// Exhaustive inscribed-square search with corners on the curves resampled
/// at `grid` volts (must be <= 2 mV). Hold/read butterflies only.
[[nodiscard]] SnmResult snm_bruteforce_oracle(const ButterflyResult& b, double grid = 0.001);

}  // namespace sramlab
