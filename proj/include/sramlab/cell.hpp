#pragma once

// Parameterized 6T/9T cell builders and the measurement harnesses that
// clamp a cell's external nets with ideal sources.

#include "sramlab/netlist.hpp"

#include <optional>
#include <string>

namespace sramlab {

enum class Topology { SixT, NineT };

[[nodiscard]] const char* to_string(Topology t);
[[nodiscard]] Topology parse_topology(std::string_view text);

/// Canonical net names used by the builders and harnesses.
namespace net {
inline constexpr const char* kQ = "q";
inline constexpr const char* kQB = "qb";
inline constexpr const char* kBL = "bl";
inline constexpr const char* kBLB = "blb";
inline constexpr const char* kWL = "wl";
inline constexpr const char* kRWL = "rwl";
inline constexpr const char* kVDD = "vdd";
inline constexpr const char* kX = "x";           // 9T read-branch tail
inline constexpr const char* kVIN = "vin";       // swept net of a VTC harness
inline constexpr const char* kRail = "vdd_rail"; // supply side of the leakage ammeter
}  // namespace net

/// Source names added by apply_harness.
namespace src {
inline constexpr const char* kVDD = "vdd";
inline constexpr const char* kBL = "vbl";
inline constexpr const char* kBLB = "vblb";
inline constexpr const char* kWL = "vwl";
inline constexpr const char* kRWL = "vrwl";
inline constexpr const char* kIN = "vin";
inline constexpr const char* kLeak = "vleak";
}  // namespace src

/// Cell sizing. cell_ratio and pullup_ratio are W/L ratios relative to the
/// access device; all devices share one channel length.
struct CellGeometry {
    Topology topology = Topology::SixT;
    double access_w = 90e-9;
    double length = 45e-9;
    double cell_ratio = 1.5;
    double pullup_ratio = 1.5;
    double read_branch_w = 90e-9;

    [[nodiscard]] double driver_w() const { return cell_ratio * access_w; }
    [[nodiscard]] double pullup_w() const { return pullup_ratio * access_w; }

    /// Throws InvalidGeometry.
    void validate() const;
};

struct ModelSet {
    DeviceParams nmos = default_nmos();
    DeviceParams pmos = default_pmos();
};

/// 6T: MP1/MN1 drive q, MP2/MN2 drive qb, MN3 (q-bl) and MN4 (qb-blb) are
/// gated by wl. 9T adds MN5 (q->x, gate qb), MN6 (qb->x, gate q) and the
/// footer MN7 (x->0, gate rwl).
[[nodiscard]] Circuit build_cell(const CellGeometry& geom, const ModelSet& models = {});

/// Topology inferred from the presence of the rwl net.
[[nodiscard]] Topology detect_topology(const Circuit& cell);

enum class Mode { Hold, Read, Write0, Write1 };

[[nodiscard]] const char* to_string(Mode m);
[[nodiscard]] Mode parse_mode(std::string_view text);

enum class HarnessKind { Hold, Read, Write0, Write1, Vtc, NCurveRead, NCurveWrite, Leakage };

struct Harness {
    HarnessKind kind = HarnessKind::Hold;
    Mode vtc_mode = Mode::Hold;   // Vtc only
    int vtc_side = 1;             // Vtc only: 1 sweeps qb->q, 2 sweeps q->qb
    double vdd = 1.0;
    double temperature = kReferenceTemperatureC;
    /// When set, apply_harness rejects a cell of a different topology.
    std::optional<Topology> topology;

    [[nodiscard]] static Harness operating(Mode mode, double vdd, double temperature = 27.0);
    [[nodiscard]] static Harness vtc(Mode mode, int side, double vdd, double temperature = 27.0);
};

/// Clamps per kind:
///  hold     bl = blb = vdd, wl = 0, rwl = 0
///  read     bl = blb = vdd, wl = vdd, rwl = vdd
///  write0   bl = 0, blb = vdd, wl = vdd, rwl = 0   (write1 mirrors the bit lines)
///  vtc      mode clamps; every gate on the input net of the inverter under
///           test moves to the swept net vin (side 1: input qb, side 2: input q)
///  ncurve   read (or write0) clamps plus source vin forcing qb
///  leakage  wl = rwl = bl = blb = 0, vdd fed through a 0 V ammeter vleak
/// Throws HarnessError for a missing external net or topology mismatch.
[[nodiscard]] Circuit apply_harness(const Circuit& cell, const Harness& harness);

}  // namespace sramlab
