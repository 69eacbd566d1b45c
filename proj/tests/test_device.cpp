#include "sramlab/device.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sramlab;

namespace {

DeviceParams hand_card() {
    DeviceParams p = default_nmos();
    p.lambda = 0.0;
    return p;
}

// Two-point central difference of id along one bias coordinate.
double fd(const DeviceParams& p, double w, double l, BiasPoint b, double BiasPoint::*field,
          double h = 1e-6) {
    BiasPoint hi = b;
    BiasPoint lo = b;
    hi.*field += h;
    lo.*field -= h;
    return (drain_current(p, w, l, hi).id - drain_current(p, w, l, lo).id) / (2.0 * h);
}

bool close(double analytic, double numeric) {
    return std::abs(analytic - numeric) <= std::max(1e-6 * std::abs(numeric), 1e-12);
}

// Distance from the places where the model switches branch; finite
// differences straddling one of these measure a one-sided slope.
double kink_distance(const DeviceParams& p, const BiasPoint& b) {
    const bool pmos = p.polarity == Polarity::PMOS;
    const double s = pmos ? -1.0 : 1.0;
    double vgs = s * b.vgs;
    double vds = s * b.vds;
    double vbs = s * b.vbs;
    DeviceParams n = p;
    n.polarity = Polarity::NMOS;
    n.vto = std::abs(p.vto);
    if (vds < 0.0) {
        vgs -= vds;
        vbs -= vds;
        vds = -vds;
    }
    const double vov = vgs - threshold_voltage(n, vbs, b.temperature);
    double d = std::min(std::abs(vov), std::abs(s * b.vds));
    d = std::min(d, std::abs(vds - vov));
    d = std::min(d, std::abs(n.phi - vbs - 1e-6));
    return d;
}

}  // namespace

TEST_CASE("thermal voltage") {
    // exact SI values of the Boltzmann constant and the elementary charge
    const double kt_q = 1.380649e-23 * 300.15 / 1.602176634e-19;
    CHECK(std::abs(thermal_voltage(27.0) - kt_q) <= 1e-9);
    CHECK(std::abs(thermal_voltage(27.0) - 0.025865) <= 1e-6);
    CHECK(thermal_voltage(127.0) / thermal_voltage(27.0) == doctest::Approx(400.15 / 300.15));
}

TEST_CASE("threshold voltage: identity, temperature and body effect") {
    const DeviceParams p = default_nmos();
    CHECK(threshold_voltage(p, 0.0, 27.0) == p.vto);
    CHECK(threshold_voltage(p, 0.0, 127.0) == doctest::Approx(0.300).epsilon(1e-12));
    const double expected = 0.4 + 0.2 * (1.0 - std::sqrt(0.7));
    CHECK(std::abs(threshold_voltage(p, -0.3, 27.0) - expected) <= 1e-12);
    CHECK(std::abs(threshold_voltage(p, -0.3, 27.0) - 0.4327) <= 1e-4);
    // beyond phi the square-root argument is frozen
    CHECK(threshold_voltage(p, 0.9, 27.0) == threshold_voltage(p, 1.2, 27.0));
    CHECK(threshold_voltage(default_pmos(), 0.0, 27.0) == default_pmos().vto);
}

TEST_CASE("hand-evaluated strong-inversion points") {
    const DeviceParams p = hand_card();
    const double w = 90e-9;
    const double l = 45e-9;
    const double sat = drain_current(p, w, l, {1.0, 1.0, 0.0, 27.0}).id;
    const double lin = drain_current(p, w, l, {1.0, 0.2, 0.0, 27.0}).id;
    CHECK(std::abs(sat - 72.0e-6) / 72.0e-6 <= 1e-12);
    CHECK(std::abs(lin - 40.0e-6) / 40.0e-6 <= 1e-12);
}

TEST_CASE("subthreshold point matches the exponential branch") {
    DeviceParams p = hand_card();
    p.i0 = 150e-9;
    const double vt = thermal_voltage(27.0);
    const double expected = 150e-9 * 2.0 * std::exp(-0.4 / (1.5 * vt)) * (1.0 - std::exp(-1.0 / vt));
    const double id = drain_current(p, 90e-9, 45e-9, {0.0, 1.0, 0.0, 27.0}).id;
    CHECK(id == doctest::Approx(expected).epsilon(1e-12));
    CHECK(id > 1e-12);
    CHECK(id < 1e-10);
}

TEST_CASE("zero drain-source voltage carries no current") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int k = 0; k < 200; ++k) {
        const BiasPoint b{u(rng), 0.0, u(rng), 27.0};
        CHECK(drain_current(default_nmos(), 90e-9, 45e-9, b).id == 0.0);
        CHECK(drain_current(default_pmos(), 90e-9, 45e-9, b).id == 0.0);
    }
}

TEST_CASE("analytic partials match central finite differences") {
    std::mt19937_64 rng(20241015);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    std::uniform_real_distribution<double> size(0.5, 3.0);
    const double temps[] = {-40.0, 27.0, 125.0};
    int checked = 0;
    int attempts = 0;
    while (checked < 1200 && attempts < 5000) {
        ++attempts;
        const DeviceParams p = (attempts % 2) ? default_nmos() : default_pmos();
        const double w = 90e-9 * size(rng);
        const double l = 45e-9;
        const BiasPoint b{u(rng), u(rng), u(rng), temps[attempts % 3]};
        if (kink_distance(p, b) < 1e-4) continue;
        const DeviceEval e = drain_current(p, w, l, b);
        const double g = fd(p, w, l, b, &BiasPoint::vgs);
        const double d = fd(p, w, l, b, &BiasPoint::vds);
        const double s = fd(p, w, l, b, &BiasPoint::vbs);
        INFO("vgs=" << b.vgs << " vds=" << b.vds << " vbs=" << b.vbs << " T=" << b.temperature);
        CHECK(close(e.d_id_dvgs, g));
        CHECK(close(e.d_id_dvds, d));
        CHECK(close(e.d_id_dvbs, s));
        ++checked;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("no jump across region boundaries") {
    // Each side is extrapolated to the boundary with its own analytic slope,
    // so only a genuine discontinuity survives the comparison.
    const DeviceParams p = default_nmos();
    const double w = 135e-9;
    const double l = 45e-9;
    const double eps = 1e-9;
    auto limits = [&](BiasPoint lo, BiasPoint hi, double DeviceEval::*slope) {
        const DeviceEval a = drain_current(p, w, l, lo);
        const DeviceEval b = drain_current(p, w, l, hi);
        const double left = a.id + eps * (a.*slope);
        const double right = b.id - eps * (b.*slope);
        return std::abs(left - right) / std::max(std::abs(0.5 * (left + right)), 1e-12);
    };
    for (double vgs : {0.5, 0.7, 1.0, 1.2}) {
        for (double t : {-40.0, 27.0, 125.0}) {
            const double vov = vgs - threshold_voltage(p, 0.0, t);
            CHECK(limits({vgs, vov - eps, 0.0, t}, {vgs, vov + eps, 0.0, t},
                         &DeviceEval::d_id_dvds) <= 1e-12);
        }
    }
    for (double vds : {0.05, 0.3, 1.0}) {
        for (double t : {-40.0, 27.0, 125.0}) {
            const double vth = threshold_voltage(p, 0.0, t);
            CHECK(limits({vth - eps, vds, 0.0, t}, {vth + eps, vds, 0.0, t},
                         &DeviceEval::d_id_dvgs) <= 1e-12);
        }
    }
}

TEST_CASE("monotone in vgs and vds for NMOS with vds >= 0") {
    const DeviceParams p = default_nmos();
    for (double t : {-40.0, 27.0, 125.0}) {
        for (double vds = 0.0; vds <= 1.2; vds += 0.05) {
            double prev = -1.0;
            for (double vgs = -0.5; vgs <= 1.2; vgs += 0.001) {
                const double id = drain_current(p, 90e-9, 45e-9, {vgs, vds, 0.0, t}).id;
                CHECK(id >= prev);
                prev = id;
            }
        }
        for (double vgs = -0.2; vgs <= 1.2; vgs += 0.05) {
            double prev = -1.0;
            for (double vds = 0.0; vds <= 1.2; vds += 0.001) {
                const double id = drain_current(p, 90e-9, 45e-9, {vgs, vds, 0.0, t}).id;
                CHECK(id >= prev);
                prev = id;
            }
        }
    }
}

TEST_CASE("PMOS equals the reflected NMOS evaluation") {
    const DeviceParams pm = default_pmos();
    DeviceParams nm = pm;
    nm.polarity = Polarity::NMOS;
    nm.vto = -pm.vto;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int k = 0; k < 500; ++k) {
        const BiasPoint b{u(rng), u(rng), u(rng), 27.0};
        const DeviceEval ep = drain_current(pm, 135e-9, 45e-9, b);
        const DeviceEval en = drain_current(nm, 135e-9, 45e-9, {-b.vgs, -b.vds, -b.vbs, 27.0});
        CHECK(ep.id == -en.id);
        CHECK(ep.d_id_dvgs == en.d_id_dvgs);
        CHECK(ep.d_id_dvds == en.d_id_dvds);
        CHECK(ep.d_id_dvbs == en.d_id_dvbs);
    }
}

TEST_CASE("subthreshold current rises with temperature") {
    const DeviceParams p = default_nmos();
    for (double vgs : {0.0, 0.1, 0.2, 0.3}) {
        double prev = 0.0;
        for (double t : {-40.0, 0.0, 27.0, 85.0, 125.0}) {
            const double id = drain_current(p, 90e-9, 45e-9, {vgs, 1.0, 0.0, t}).id;
            CHECK(id > prev);
            prev = id;
        }
    }
}

TEST_CASE("model card validation") {
    CHECK_NOTHROW(default_nmos().validate());
    CHECK_NOTHROW(default_pmos().validate());
    DeviceParams bad = default_nmos();
    bad.kp = 0.0;
    CHECK_THROWS(bad.validate());
    bad = default_nmos();
    bad.n_sub = 0.5;
    CHECK_THROWS(bad.validate());
}
