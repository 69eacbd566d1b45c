#pragma once

// Level-1 square-law MOSFET with an exponential subthreshold branch,
// body effect and a linear threshold temperature coefficient.

namespace sramlab {

enum class Polarity { NMOS, PMOS };

inline constexpr double kReferenceTemperatureC = 27.0;

/// Model card. Values are for the device's own polarity: a PMOS card
/// carries a negative vto.
struct DeviceParams {
    Polarity polarity = Polarity::NMOS;
    double vto = 0.40;      // V, at vbs = 0 and 27 C
    double kp = 200e-6;     // A/V^2
    double lambda = 0.1;    // 1/V
    double n_sub = 1.5;     // subthreshold slope factor
    double i0 = 50e-9;      // A, subthreshold current at vov = 0 per unit W/L
    double gamma = 0.2;     // V^0.5
    double phi = 0.7;       // V
    double tcv = 1.0e-3;    // V/K

    bool operator==(const DeviceParams&) const = default;

    /// Throws CircuitError when a sign constraint is violated.
    void validate() const;
};

/// Default cards. i0 was calibrated once against the 6T leakage harness
/// (1 V, 27 C) and is frozen here.
[[nodiscard]] DeviceParams default_nmos();
[[nodiscard]] DeviceParams default_pmos();

struct BiasPoint {
    double vgs = 0.0;
    double vds = 0.0;
    double vbs = 0.0;
    double temperature = kReferenceTemperatureC;  // C
};

/// Drain current (drain to source, conventional) and its partials.
struct DeviceEval {
    double id = 0.0;
    double d_id_dvgs = 0.0;
    double d_id_dvds = 0.0;
    double d_id_dvbs = 0.0;
};

/// kT/q in volts; temperature in Celsius.
[[nodiscard]] double thermal_voltage(double temperature_c);

/// Threshold in the device's own polarity (negative for PMOS).
[[nodiscard]] double threshold_voltage(const DeviceParams& params, double vbs,
                                       double temperature_c);

[[nodiscard]] DeviceEval drain_current(const DeviceParams& params, double w, double l,
                                       const BiasPoint& bias);

}  // namespace sramlab
