// Brute-force inscribed-square search, kept free of the rotation machinery
// in butterfly.cpp so the two can check each other.

#include "sramlab/butterfly.hpp"

#include "sramlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace sramlab {

namespace {

// Resample a polyline so consecutive points are at most `grid` apart,
// keeping every original vertex.
std::vector<Point> resample(const std::vector<Point>& pts, double grid) {
    std::vector<Point> out;
    if (pts.empty()) return out;
    out.push_back(pts.front());
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const Point a = pts[k - 1];
        const Point b = pts[k];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / grid)));
        for (int j = 1; j <= pieces; ++j) {
            const double t = static_cast<double>(j) / pieces;
            out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    return out;
}

struct Best {
    double side = 0.0;
    Square square;
};

// Squares with the lower-left corner on `lower` and the upper-right corner
// on `upper`. For monotonically falling curves every such pair bounds a
// square that lies inside the lobe.
Best search(const std::vector<Point>& lower, const std::vector<Point>& upper) {
    Best best;
    for (const Point& p : lower) {
        for (const Point& q : upper) {
            const double dx = q.x - p.x;
            const double dy = q.y - p.y;
            if (dx <= 0.0 || dy <= 0.0) continue;
            const double side = std::min(dx, dy);
            if (side > best.side) best = {side, {p.x, p.y, side}};
        }
    }
    return best;
}

}  // namespace

SnmResult snm_bruteforce_oracle(const ButterflyResult& b, double grid) {
    if (!(grid > 0.0) || grid > 0.002 + 1e-15) {
        throw AnalysisError("oracle grid must be in (0, 2 mV]");
    }
    if (b.mode == Mode::Write0 || b.mode == Mode::Write1) {
        throw AnalysisError("oracle covers hold and read butterflies only");
    }
    const std::vector<Point> c1 = resample(b.vtc1.points, grid);
    const std::vector<Point> c2 = resample(b.mirrored_vtc2(), grid);

    // q-high lobe: below vtc1 and right of the mirrored vtc2.
    const Best high = search(c2, c1);
    // q-low lobe: above vtc1 and left of the mirrored vtc2.
    const Best low = search(c1, c2);

    SnmResult r;
    r.lobe_high = high.side;
    r.lobe_low = low.side;
    const Best& worst = high.side <= low.side ? high : low;
    r.snm = worst.side;
    r.square = worst.square;
    return r;
}

}  // namespace sramlab
