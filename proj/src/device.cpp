#include "sramlab/device.hpp"

#include "sramlab/error.hpp"

#include <cmath>
#include <utility>

namespace sramlab {

namespace {

constexpr double kBoltzmannOverQ = 8.617333262e-5;  // V/K
constexpr double kZeroCelsius = 273.15;
constexpr double kBodyClamp = 1e-6;

// NMOS-frame card: positive vto regardless of the original polarity.
DeviceParams nmos_frame(const DeviceParams& p) {
    DeviceParams q = p;
    if (p.polarity == Polarity::PMOS) {
        q.vto = -p.vto;
        q.polarity = Polarity::NMOS;
    }
    return q;
}

struct Threshold {
    double vth;
    double dvth_dvbs;
};

Threshold nmos_threshold(const DeviceParams& p, double vbs, double temperature_c) {
    double arg = p.phi - vbs;
    double dsqrt = 0.0;
    if (arg <= kBodyClamp) {
        arg = kBodyClamp;
    } else {
        dsqrt = -0.5 / std::sqrt(arg);
    }
    const double vth = p.vto + p.gamma * (std::sqrt(arg) - std::sqrt(p.phi)) -
                       p.tcv * (temperature_c - kReferenceTemperatureC);
    return {vth, p.gamma * dsqrt};
}

// Forward conduction (vds >= 0) in the NMOS frame.
DeviceEval forward(const DeviceParams& p, double aspect, double vgs, double vds, double vbs,
                   double temperature_c) {
    const double vt = thermal_voltage(temperature_c);
    const auto [vth, dvth_dvbs] = nmos_threshold(p, vbs, temperature_c);
    const double vov = vgs - vth;

    // Subthreshold drain factor; it is also the current at vov = 0. Strong
    // inversion carries it as an offset faded by exp(-c vov^2), which joins
    // the regions and is nil well above threshold. c = kp / (4 i0) keeps the
    // fade slower than the square law grows, so id stays monotone in vgs.
    const double i_thr = p.i0 * aspect;
    const double edrain = std::exp(-vds / vt);
    const double s = i_thr * (1.0 - edrain);
    const double ds_dvds = i_thr * edrain / vt;

    DeviceEval e;
    if (vov <= 0.0) {
        const double nvt = p.n_sub * vt;
        const double egate = std::exp(vov / nvt);
        e.id = s * egate;
        e.d_id_dvgs = e.id / nvt;
        e.d_id_dvds = ds_dvds * egate;
        e.d_id_dvbs = -e.d_id_dvgs * dvth_dvbs;
        return e;
    }

    const double beta = p.kp * aspect;
    const double clm = 1.0 + p.lambda * vds;
    double core = 0.0;
    double dcore_dvov = 0.0;
    double dcore_dvds = 0.0;
    if (vds < vov) {
        const double q = vov * vds - 0.5 * vds * vds;
        core = beta * q * clm;
        dcore_dvov = beta * vds * clm;
        dcore_dvds = beta * (vov - vds) * clm + beta * q * p.lambda;
    } else {
        core = 0.5 * beta * vov * vov * clm;
        dcore_dvov = beta * vov * clm;
        dcore_dvds = 0.5 * beta * vov * vov * p.lambda;
    }
    const double c = p.kp / (4.0 * p.i0);
    const double fade = std::exp(-c * vov * vov);
    const double did_dvov = dcore_dvov - 2.0 * c * vov * s * fade;
    e.id = core + s * fade;
    e.d_id_dvgs = did_dvov;
    e.d_id_dvds = dcore_dvds + ds_dvds * fade;
    e.d_id_dvbs = -did_dvov * dvth_dvbs;
    return e;
}

// Symmetric device: for vds < 0 the terminals exchange roles.
DeviceEval nmos_eval(const DeviceParams& p, double aspect, double vgs, double vds, double vbs,
                     double temperature_c) {
    if (vds >= 0.0) {
        return forward(p, aspect, vgs, vds, vbs, temperature_c);
    }
    const DeviceEval r = forward(p, aspect, vgs - vds, -vds, vbs - vds, temperature_c);
    DeviceEval e;
    e.id = -r.id;
    e.d_id_dvgs = -r.d_id_dvgs;
    e.d_id_dvds = r.d_id_dvgs + r.d_id_dvds + r.d_id_dvbs;
    e.d_id_dvbs = -r.d_id_dvbs;
    return e;
}

}  // namespace

void DeviceParams::validate() const {
    const bool ok = kp > 0.0 && i0 > 0.0 && phi > 0.0 && lambda >= 0.0 && n_sub >= 1.0 &&
                    gamma >= 0.0 && tcv >= 0.0;
    if (!ok) {
        throw CircuitError("model card violates parameter constraints");
    }
    if (polarity == Polarity::NMOS ? vto < 0.0 : vto > 0.0) {
        throw CircuitError("vto sign does not match the card polarity");
    }
}

DeviceParams default_nmos() {
    return DeviceParams{};
}

DeviceParams default_pmos() {
    DeviceParams p;
    p.polarity = Polarity::PMOS;
    p.vto = -0.40;
    p.kp = 80e-6;
    return p;
}

double thermal_voltage(double temperature_c) {
    return kBoltzmannOverQ * (temperature_c + kZeroCelsius);
}

double threshold_voltage(const DeviceParams& params, double vbs, double temperature_c) {
    if (params.polarity == Polarity::NMOS) {
        return nmos_threshold(params, vbs, temperature_c).vth;
    }
    return -nmos_threshold(nmos_frame(params), -vbs, temperature_c).vth;
}

DeviceEval drain_current(const DeviceParams& params, double w, double l, const BiasPoint& bias) {
    const double aspect = w / l;
    if (params.polarity == Polarity::NMOS) {
        return nmos_eval(params, aspect, bias.vgs, bias.vds, bias.vbs, bias.temperature);
    }
    const DeviceEval r = nmos_eval(nmos_frame(params), aspect, -bias.vgs, -bias.vds, -bias.vbs,
                                   bias.temperature);
    return {-r.id, r.d_id_dvgs, r.d_id_dvds, r.d_id_dvbs};
}

}  // namespace sramlab
