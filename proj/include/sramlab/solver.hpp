#pragma once

// Modified nodal analysis with damped Newton-Raphson. Convergence escalates
// plain Newton -> gmin stepping -> source stepping.

#include "sramlab/netlist.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sramlab {

using Voltages = std::map<std::string, double>;

struct SolverOptions {
    double abstol = 1e-9;       // A, KCL residual bound
    double vtol = 1e-6;         // V, Newton step bound
    int max_iterations = 200;   // per Newton run
    double damping = 0.3;       // V, largest node update per iteration
    std::vector<double> gmin_schedule = default_gmin_schedule();
    int source_steps = 10;

    [[nodiscard]] static std::vector<double> default_gmin_schedule();
    /// Throws std::invalid_argument.
    void validate() const;
};

struct DcSolution {
    Voltages voltages;
    std::map<std::string, double> source_currents;  // A, delivered out of the + terminal
    int iterations = 0;
    double residual = 0.0;                          // A, with gmin removed
    std::string strategy;                           // "newton", "gmin", "source"

    [[nodiscard]] double v(const std::string& net) const;
    [[nodiscard]] double i(const std::string& source) const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

/// Ordered (x, y) series. Sweep outputs have strictly increasing x;
/// validate() checks that.
struct Curve {
    std::vector<Point> points;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] bool empty() const { return points.empty(); }
    void validate() const;
    /// Piecewise-linear interpolation, clamped at the ends.
    [[nodiscard]] double at(double x) const;
};

/// Unknown layout: non-ground nets (sorted by name) then source branch
/// currents (circuit order).
class MnaSystem {
public:
    MnaSystem(const Circuit& circuit, double temperature_c);

    [[nodiscard]] std::size_t dimension() const { return nets_.size() + sources_.size(); }
    [[nodiscard]] std::size_t node_count() const { return nets_.size(); }
    [[nodiscard]] const std::vector<std::string>& nets() const { return nets_; }
    [[nodiscard]] bool is_linear() const { return circuit_.mosfets.empty(); }

    [[nodiscard]] Eigen::VectorXd pack(const Voltages& voltages,
                                       const std::map<std::string, double>& source_currents = {}) const;

    /// Residual F(x) and Jacobian dF/dx. Node rows hold the net current
    /// leaving each node; source rows hold the branch-voltage error.
    /// source_scale multiplies every source value (source stepping).
    void assemble(const Eigen::VectorXd& x, double gmin, double source_scale,
                  Eigen::MatrixXd& jacobian, Eigen::VectorXd& residual) const;

    /// Largest absolute KCL imbalance over node rows.
    [[nodiscard]] double kcl_residual(const Eigen::VectorXd& x, double gmin = 0.0) const;

    [[nodiscard]] DcSolution unpack(const Eigen::VectorXd& x) const;

private:
    [[nodiscard]] int index_of(const std::string& net) const;

    const Circuit& circuit_;
    double temperature_;
    std::vector<std::string> nets_;
    std::map<std::string, int> index_;
    std::vector<const VoltageSource*> sources_;
    std::vector<const DeviceParams*> mos_params_;
};

struct AssembledSystem {
    Eigen::MatrixXd jacobian;
    Eigen::VectorXd residual;
};

/// Jacobian and residual at a candidate point. Source branch currents not
/// given in source_currents are taken as zero.
[[nodiscard]] AssembledSystem assemble_system(
    const Circuit& circuit, const Voltages& candidate, double gmin, double temperature_c = 27.0,
    const std::map<std::string, double>& source_currents = {});

[[nodiscard]] DcSolution solve_op(const Circuit& circuit, const SolverOptions& options = {},
                                  const std::optional<Voltages>& guess = std::nullopt,
                                  double temperature_c = 27.0);

/// What a sweep records at each point.
struct Observable {
    enum class Kind { Voltage, Current };
    Kind kind = Kind::Voltage;
    std::string name;

    [[nodiscard]] static Observable voltage(std::string net) { return {Kind::Voltage, std::move(net)}; }
    [[nodiscard]] static Observable current(std::string src) { return {Kind::Current, std::move(src)}; }
};

struct SweepSpec {
    std::string source;
    double start = 0.0;
    double stop = 1.0;
    double step = 0.005;
    Observable observable;
    bool continuation = true;          // false: every point starts from `guess`
    std::optional<Voltages> guess;     // for the first point (or all when cold)
};

struct DcSweepResult {
    Curve curve;
    int total_iterations = 0;
};

/// Throws ConvergenceError annotated with the failing sweep value.
[[nodiscard]] DcSweepResult dc_sweep(const Circuit& circuit, const SweepSpec& spec,
                                     const SolverOptions& options = {},
                                     double temperature_c = 27.0);

}  // namespace sramlab
