#include "sramlab/ncurve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sramlab {

namespace {

struct Extremum {
    double x = 0.0;
    double y = 0.0;
};

// Vertex of the parabola through three samples; falls back to the middle
// sample when the fit is degenerate or the vertex leaves the bracket.
Extremum refine(const Point& p0, const Point& p1, const Point& p2) {
    const double d01 = (p1.y - p0.y) / (p1.x - p0.x);
    const double d12 = (p2.y - p1.y) / (p2.x - p1.x);
    const double a = (d12 - d01) / (p2.x - p0.x);
    if (a == 0.0 || !std::isfinite(a)) return {p1.x, p1.y};
    const double b = d01 - a * (p0.x + p1.x);
    const double xv = -b / (2.0 * a);
    if (xv < p0.x || xv > p2.x) return {p1.x, p1.y};
    const double yv = p1.y + (xv - p1.x) * (d01 + a * (xv - p0.x));
    return {xv, yv};
}

// Extremum of the samples strictly inside (lo, hi); sign +1 for a maximum.
std::optional<Extremum> peak(const std::vector<Point>& pts, double lo, double hi, int sign) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (pts[k].x <= lo || pts[k].x >= hi) continue;
        if (!best || sign * pts[k].y > sign * pts[*best].y) best = k;
    }
    if (!best) return std::nullopt;
    const std::size_t k = *best;
    if (k == 0 || k + 1 >= pts.size()) return Extremum{pts[k].x, pts[k].y};
    const Extremum e = refine(pts[k - 1], pts[k], pts[k + 1]);
    // The refined vertex must not be less extreme than the sample itself.
    if (sign * e.y < sign * pts[k].y) return Extremum{pts[k].x, pts[k].y};
    return e;
}

// Trapezoidal integral over [lo, hi], with the integrand at the bounds taken
// from linear interpolation of the samples.
double integrate(const Curve& c, double lo, double hi) {
    std::vector<Point> seg;
    seg.push_back({lo, c.at(lo)});
    for (const auto& p : c.points) {
        if (p.x > lo && p.x < hi) seg.push_back(p);
    }
    seg.push_back({hi, c.at(hi)});
    double sum = 0.0;
    for (std::size_t k = 1; k < seg.size(); ++k) {
        sum += 0.5 * (seg[k].y + seg[k - 1].y) * (seg[k].x - seg[k - 1].x);
    }
    return sum;
}

}  // namespace

const char* to_string(NCurveMode m) {
    return m == NCurveMode::Read ? "read" : "write";
}

NCurveMode parse_ncurve_mode(std::string_view text) {
    if (text == "read") return NCurveMode::Read;
    if (text == "write") return NCurveMode::Write;
    throw std::invalid_argument("unknown n-curve mode: " + std::string(text));
}

std::vector<double> zero_crossings(const Curve& samples) {
    const auto& p = samples.points;
    std::vector<double> out;
    bool in_zero = false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].y == 0.0) {
            if (!in_zero) out.push_back(p[k].x);
            in_zero = true;
            continue;
        }
        in_zero = false;
        if (k + 1 < p.size() && p[k + 1].y != 0.0 && (p[k].y < 0.0) != (p[k + 1].y < 0.0)) {
            const double t = p[k].y / (p[k].y - p[k + 1].y);
            out.push_back(p[k].x + t * (p[k + 1].x - p[k].x));
        }
    }
    return out;
}

NCurveMetrics ncurve_metrics(const Curve& samples) {
    if (samples.size() < 3) throw std::invalid_argument("n-curve needs at least 3 samples");
    NCurveMetrics m;
    const auto cross = zero_crossings(samples);
    if (cross.size() != 3) return m;
    const double a = cross[0];
    const double b = cross[1];
    const double c = cross[2];
    m.svnm = b - a;
    m.wtv = c - b;
    if (auto e = peak(samples.points, a, b, +1)) m.sinm = e->y;
    if (auto e = peak(samples.points, b, c, -1)) m.wti = e->y;
    m.spnm = integrate(samples, a, b);
    m.wtp = integrate(samples, b, c);
    return m;
}

std::optional<double> critical_write_current(const Curve& samples) {
    const auto& p = samples.points;
    if (p.empty()) return std::nullopt;
    const double lo = p.front().x - 1.0;
    const double hi = p.back().x + 1.0;
    const auto e = peak(p, lo, hi, -1);
    if (!e || e->y >= 0.0) return std::nullopt;
    return -e->y;
}

NCurveResult ncurve(const Circuit& cell, NCurveMode mode, double vdd, double temperature,
                    const AnalysisOptions& opts) {
    Harness h;
    h.kind = mode == NCurveMode::Read ? HarnessKind::NCurveRead : HarnessKind::NCurveWrite;
    h.vdd = vdd;
    h.temperature = temperature;
    const Circuit c = apply_harness(cell, h);

    SweepSpec spec;
    spec.source = src::kIN;
    spec.start = 0.0;
    spec.stop = vdd;
    spec.step = opts.ncurve_step;
    spec.observable = Observable::current(src::kIN);
    spec.guess = storage_guess(vdd, true);

    NCurveResult r;
    r.mode = mode;
    r.samples = dc_sweep(c, spec, opts.solver, temperature).curve;
    r.crossings = zero_crossings(r.samples);
    if (r.crossings.size() == 3) {
        r.a = r.crossings[0];
        r.b = r.crossings[1];
        r.c = r.crossings[2];
    } else {
        r.monostable = true;
    }
    r.metrics = ncurve_metrics(r.samples);
    if (mode == NCurveMode::Write) r.metrics.icrit_wr = critical_write_current(r.samples);
    return r;
}

NCurveResult ncurve(const CellGeometry& geom, NCurveMode mode, double vdd, double temperature,
                    const AnalysisOptions& opts) {
    return ncurve(build_cell(geom), mode, vdd, temperature, opts);
}

}  // namespace sramlab
