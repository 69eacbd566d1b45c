#include "sramlab/cell.hpp"

#include <cmath>

namespace sramlab {

namespace {

constexpr const char* kNmos = "nmos";
constexpr const char* kPmos = "pmos";

struct Clamps {
    double bl;
    double blb;
    double wl;
    double rwl;
};

Clamps clamps_for(Mode mode, double vdd) {
    switch (mode) {
        case Mode::Hold: return {vdd, vdd, 0.0, 0.0};
        case Mode::Read: return {vdd, vdd, vdd, vdd};
        case Mode::Write0: return {0.0, vdd, vdd, 0.0};
        case Mode::Write1: return {vdd, 0.0, vdd, 0.0};
    }
    return {vdd, vdd, 0.0, 0.0};
}

void require_net(const Circuit& cell, const char* name) {
    if (!cell.has_net(name)) {
        throw HarnessError(std::string("cell has no external net '") + name + "'");
    }
}

void add_clamps(Circuit& c, const Clamps& k, bool nine_t) {
    c.vsources.push_back({src::kBL, net::kBL, kGround, k.bl});
    c.vsources.push_back({src::kBLB, net::kBLB, kGround, k.blb});
    c.vsources.push_back({src::kWL, net::kWL, kGround, k.wl});
    if (nine_t) c.vsources.push_back({src::kRWL, net::kRWL, kGround, k.rwl});
}

}  // namespace

const char* to_string(Topology t) {
    return t == Topology::SixT ? "6t" : "9t";
}

Topology parse_topology(std::string_view text) {
    if (text == "6t" || text == "6T") return Topology::SixT;
    if (text == "9t" || text == "9T") return Topology::NineT;
    throw std::invalid_argument("unknown topology: " + std::string(text));
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::Hold: return "hold";
        case Mode::Read: return "read";
        case Mode::Write0: return "write0";
        case Mode::Write1: return "write1";
    }
    return "hold";
}

Mode parse_mode(std::string_view text) {
    if (text == "hold") return Mode::Hold;
    if (text == "read") return Mode::Read;
    if (text == "write0") return Mode::Write0;
    if (text == "write1") return Mode::Write1;
    throw std::invalid_argument("unknown mode: " + std::string(text));
}

void CellGeometry::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(access_w) || !positive(length) || !positive(cell_ratio) ||
        !positive(pullup_ratio) || !positive(read_branch_w)) {
        throw InvalidGeometry("cell widths, length and ratios must be positive");
    }
}

Circuit build_cell(const CellGeometry& geom, const ModelSet& models) {
    geom.validate();
    Circuit c;
    c.models.emplace(kNmos, models.nmos);
    c.models.emplace(kPmos, models.pmos);

    const double l = geom.length;
    using namespace net;
    c.mosfets = {
        {"mp1", kQ, kQB, kVDD, kVDD, kPmos, geom.pullup_w(), l},
        {"mn1", kQ, kQB, kGround, kGround, kNmos, geom.driver_w(), l},
        {"mp2", kQB, kQ, kVDD, kVDD, kPmos, geom.pullup_w(), l},
        {"mn2", kQB, kQ, kGround, kGround, kNmos, geom.driver_w(), l},
        {"mn3", kQ, kWL, kBL, kGround, kNmos, geom.access_w, l},
        {"mn4", kQB, kWL, kBLB, kGround, kNmos, geom.access_w, l},
    };
    if (geom.topology == Topology::NineT) {
        c.mosfets.push_back({"mn5", kQ, kQB, kX, kGround, kNmos, geom.read_branch_w, l});
        c.mosfets.push_back({"mn6", kQB, kQ, kX, kGround, kNmos, geom.read_branch_w, l});
        c.mosfets.push_back({"mn7", kX, kRWL, kGround, kGround, kNmos, geom.read_branch_w, l});
    }
    return c;
}

Topology detect_topology(const Circuit& cell) {
    return cell.has_net(net::kRWL) ? Topology::NineT : Topology::SixT;
}

Harness Harness::operating(Mode mode, double vdd, double temperature) {
    Harness h;
    switch (mode) {
        case Mode::Hold: h.kind = HarnessKind::Hold; break;
        case Mode::Read: h.kind = HarnessKind::Read; break;
        case Mode::Write0: h.kind = HarnessKind::Write0; break;
        case Mode::Write1: h.kind = HarnessKind::Write1; break;
    }
    h.vdd = vdd;
    h.temperature = temperature;
    return h;
}

Harness Harness::vtc(Mode mode, int side, double vdd, double temperature) {
    Harness h;
    h.kind = HarnessKind::Vtc;
    h.vtc_mode = mode;
    h.vtc_side = side;
    h.vdd = vdd;
    h.temperature = temperature;
    return h;
}

Circuit apply_harness(const Circuit& cell, const Harness& harness) {
    for (const char* n : {net::kQ, net::kQB, net::kBL, net::kBLB, net::kWL, net::kVDD}) {
        require_net(cell, n);
    }
    const Topology topo = detect_topology(cell);
    if (harness.topology && *harness.topology != topo) {
        throw HarnessError(std::string("harness expects a ") + to_string(*harness.topology) +
                           " cell but got " + to_string(topo));
    }
    const bool nine_t = topo == Topology::NineT;
    if (!cell.vsources.empty()) {
        throw HarnessError("cell already carries sources; harnesses apply to bare cells");
    }

    Circuit c = cell;
    const double vdd = harness.vdd;

    switch (harness.kind) {
        case HarnessKind::Hold:
        case HarnessKind::Read:
        case HarnessKind::Write0:
        case HarnessKind::Write1: {
            const Mode mode = harness.kind == HarnessKind::Hold   ? Mode::Hold
                              : harness.kind == HarnessKind::Read ? Mode::Read
                              : harness.kind == HarnessKind::Write0 ? Mode::Write0
                                                                    : Mode::Write1;
            c.vsources.push_back({src::kVDD, net::kVDD, kGround, vdd});
            add_clamps(c, clamps_for(mode, vdd), nine_t);
            break;
        }
        case HarnessKind::Vtc: {
            if (harness.vtc_side != 1 && harness.vtc_side != 2) {
                throw HarnessError("vtc side must be 1 or 2");
            }
            c.vsources.push_back({src::kVDD, net::kVDD, kGround, vdd});
            add_clamps(c, clamps_for(harness.vtc_mode, vdd), nine_t);
            const std::string input = harness.vtc_side == 1 ? net::kQB : net::kQ;
            for (auto& m : c.mosfets) {
                if (m.gate == input) m.gate = net::kVIN;
            }
            c.vsources.push_back({src::kIN, net::kVIN, kGround, 0.0});
            break;
        }
        case HarnessKind::NCurveRead:
        case HarnessKind::NCurveWrite: {
            const Mode mode = harness.kind == HarnessKind::NCurveRead ? Mode::Read : Mode::Write0;
            c.vsources.push_back({src::kVDD, net::kVDD, kGround, vdd});
            add_clamps(c, clamps_for(mode, vdd), nine_t);
            c.vsources.push_back({src::kIN, net::kQB, kGround, 0.0});
            break;
        }
        case HarnessKind::Leakage: {
            c.vsources.push_back({src::kVDD, net::kRail, kGround, vdd});
            c.vsources.push_back({src::kLeak, net::kVDD, net::kRail, 0.0});
            add_clamps(c, {0.0, 0.0, 0.0, 0.0}, nine_t);
            break;
        }
    }
    return c;
}

}  // namespace sramlab
