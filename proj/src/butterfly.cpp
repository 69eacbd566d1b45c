#include "sramlab/butterfly.hpp"

#include "sramlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sramlab {

namespace {

struct Rotated {
    double u;
    double v;
};

// The 45-degree frame is left unnormalized: u = x - y and v = x + y. A square
// whose diagonal lies along v then has side dv / 2, which keeps exact inputs
// exact (no factor of sqrt(2) to round).
Rotated rotate(const Point& p) {
    return {p.x - p.y, p.x + p.y};
}

Point unrotate(double u, double v) {
    return {0.5 * (u + v), 0.5 * (v - u)};
}

class RotatedCurve {
public:
    explicit RotatedCurve(const std::vector<Point>& pts) {
        r_.reserve(pts.size());
        for (const auto& p : pts) r_.push_back(rotate(p));
        std::stable_sort(r_.begin(), r_.end(), [](const Rotated& a, const Rotated& b) { return a.u < b.u; });
        r_.erase(std::unique(r_.begin(), r_.end(),
                             [](const Rotated& a, const Rotated& b) { return a.u == b.u; }),
                 r_.end());
        if (r_.size() < 2) throw AnalysisError("transfer curve too short");
    }

    [[nodiscard]] double umin() const { return r_.front().u; }
    [[nodiscard]] double umax() const { return r_.back().u; }
    [[nodiscard]] const std::vector<Rotated>& samples() const { return r_; }

    [[nodiscard]] double v(double u) const {
        if (u <= r_.front().u) return r_.front().v;
        if (u >= r_.back().u) return r_.back().v;
        const auto it = std::upper_bound(r_.begin(), r_.end(), u,
                                         [](double x, const Rotated& r) { return x < r.u; });
        const Rotated& b = *it;
        const Rotated& a = *(it - 1);
        return a.v + (u - a.u) / (b.u - a.u) * (b.v - a.v);
    }

private:
    std::vector<Rotated> r_;
};

struct Separation {
    std::vector<double> u;
    std::vector<double> d;  // v1 - v2
};

// Sampled at every breakpoint of either curve, so extrema of the
// piecewise-linear difference are exact.
Separation separation(const RotatedCurve& a, const RotatedCurve& b) {
    const double lo = std::max(a.umin(), b.umin());
    const double hi = std::min(a.umax(), b.umax());
    if (!(hi > lo)) throw AnalysisError("butterfly curves do not overlap");
    std::vector<double> us{lo, hi};
    for (const auto* c : {&a, &b}) {
        for (const auto& r : c->samples()) {
            if (r.u > lo && r.u < hi) us.push_back(r.u);
        }
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());
    Separation s;
    s.u = us;
    s.d.reserve(us.size());
    for (double u : us) s.d.push_back(a.v(u) - b.v(u));
    return s;
}

std::vector<double> crossings(const Separation& s) {
    std::vector<double> out;
    bool in_zero = false;
    for (std::size_t k = 0; k < s.d.size(); ++k) {
        if (s.d[k] == 0.0) {
            if (!in_zero) out.push_back(s.u[k]);
            in_zero = true;
            continue;
        }
        in_zero = false;
        if (k + 1 < s.d.size() && s.d[k + 1] != 0.0 && (s.d[k] < 0.0) != (s.d[k + 1] < 0.0)) {
            const double t = s.d[k] / (s.d[k] - s.d[k + 1]);
            out.push_back(s.u[k] + t * (s.u[k + 1] - s.u[k]));
        }
    }
    return out;
}

struct LobeSquare {
    double side = 0.0;
    double u = 0.0;
};

LobeSquare largest_in(const Separation& s, double lo, double hi) {
    LobeSquare best;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        if (s.u[k] < lo || s.u[k] > hi) continue;
        const double side = 0.5 * std::abs(s.d[k]);
        if (side > best.side) best = {side, s.u[k]};
    }
    return best;
}

Square square_at(const RotatedCurve& a, const RotatedCurve& b, double u) {
    const Point p = unrotate(u, a.v(u));
    const Point q = unrotate(u, b.v(u));
    return {std::min(p.x, q.x), std::min(p.y, q.y), std::abs(p.x - q.x)};
}

std::vector<Point> vtc1_points(const ButterflyResult& b) {
    return b.vtc1.points;
}

}  // namespace

Voltages storage_guess(double vdd, bool q_high) {
    return {
        {net::kQ, q_high ? vdd : 0.0}, {net::kQB, q_high ? 0.0 : vdd}, {net::kVDD, vdd},
        {net::kRail, vdd},             {net::kX, 0.0},
    };
}

Curve extract_vtc(const Circuit& cell, Mode mode, int side, double vdd, double temperature,
                  const AnalysisOptions& opts) {
    const Circuit c = apply_harness(cell, Harness::vtc(mode, side, vdd, temperature));
    SweepSpec spec;
    spec.source = src::kIN;
    spec.start = 0.0;
    spec.stop = vdd;
    spec.step = opts.vtc_step;
    spec.observable = Observable::voltage(side == 1 ? net::kQ : net::kQB);
    Voltages guess = storage_guess(vdd, side == 1);
    guess[net::kVIN] = 0.0;
    spec.guess = guess;
    return dc_sweep(c, spec, opts.solver, temperature).curve;
}

Curve extract_vtc(const CellGeometry& geom, Mode mode, int side, double vdd, double temperature,
                  const AnalysisOptions& opts) {
    return extract_vtc(build_cell(geom), mode, side, vdd, temperature, opts);
}

std::vector<Point> ButterflyResult::mirrored_vtc2() const {
    std::vector<Point> out;
    out.reserve(vtc2.points.size());
    for (const auto& p : vtc2.points) out.push_back({p.y, p.x});
    return out;
}

ButterflyResult butterfly(const Circuit& cell, Mode mode, double vdd, double temperature,
                          const AnalysisOptions& opts) {
    ButterflyResult b;
    b.vtc1 = extract_vtc(cell, mode, 1, vdd, temperature, opts);
    b.vtc2 = extract_vtc(cell, mode, 2, vdd, temperature, opts);
    b.mode = mode;
    b.vdd = vdd;
    return b;
}

ButterflyResult butterfly(const CellGeometry& geom, Mode mode, double vdd, double temperature,
                          const AnalysisOptions& opts) {
    return butterfly(build_cell(geom), mode, vdd, temperature, opts);
}

std::vector<Point> butterfly_intersections(const ButterflyResult& b) {
    const RotatedCurve a(vtc1_points(b));
    const RotatedCurve m(b.mirrored_vtc2());
    std::vector<Point> out;
    for (double u : crossings(separation(a, m))) out.push_back(unrotate(u, a.v(u)));
    return out;
}

SnmResult snm_from_butterfly(const ButterflyResult& b) {
    const RotatedCurve a(vtc1_points(b));
    const RotatedCurve m(b.mirrored_vtc2());
    const Separation s = separation(a, m);
    const std::vector<double> cross = crossings(s);

    SnmResult r;
    for (double u : cross) r.intersections.push_back(unrotate(u, a.v(u)));

    const bool write = b.mode == Mode::Write0 || b.mode == Mode::Write1;
    if (cross.size() == 3) {
        if (write) {
            r.write_failed = true;
            return r;
        }
        const LobeSquare high = largest_in(s, cross[0], cross[1]);
        const LobeSquare low = largest_in(s, cross[1], cross[2]);
        r.lobe_high = high.side;
        r.lobe_low = low.side;
        const LobeSquare& worst = high.side <= low.side ? high : low;
        r.snm = worst.side;
        r.square = square_at(a, m, worst.u);
        return r;
    }
    if (cross.size() != 1) {
        throw AnalysisError("butterfly has " + std::to_string(cross.size()) +
                            " intersections; expected 1 or 3");
    }
    if (!write) {
        r.monostable = true;
        return r;
    }

    // The overwritten state lived at u < 0 for write0 (q high) and u > 0
    // for write1 (q low). The channel there must stay open.
    const bool left = b.mode == Mode::Write0;
    if (left ? cross[0] <= 0.0 : cross[0] >= 0.0) {
        r.write_failed = true;
        return r;
    }
    double best = std::numeric_limits<double>::infinity();
    double best_u = 0.0;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        if (left ? s.u[k] > 0.0 : s.u[k] < 0.0) continue;
        const double side = 0.5 * std::abs(s.d[k]);
        if (side < best) {
            best = side;
            best_u = s.u[k];
        }
    }
    if (!std::isfinite(best)) throw AnalysisError("write butterfly has no channel region");
    r.snm = best;
    (left ? r.lobe_high : r.lobe_low) = best;
    r.square = square_at(a, m, best_u);
    return r;
}

}  // namespace sramlab
