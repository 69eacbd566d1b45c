#include "sramlab/solver.hpp"

#include "sramlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sramlab {

std::vector<double> SolverOptions::default_gmin_schedule() {
    std::vector<double> s;
    for (int e = -3; e >= -12; --e) s.push_back(std::pow(10.0, e));
    return s;
}

void SolverOptions::validate() const {
    if (!(abstol > 0.0) || !(vtol > 0.0) || max_iterations <= 0 || !(damping > 0.0) ||
        source_steps <= 0) {
        throw std::invalid_argument("solver options must be positive");
    }
    for (std::size_t k = 0; k < gmin_schedule.size(); ++k) {
        if (!(gmin_schedule[k] > 0.0) || (k > 0 && gmin_schedule[k] >= gmin_schedule[k - 1])) {
            throw std::invalid_argument("gmin schedule must be positive and strictly decreasing");
        }
    }
}

double DcSolution::v(const std::string& net) const {
    const auto it = voltages.find(net);
    if (it == voltages.end()) throw std::out_of_range("no net '" + net + "' in solution");
    return it->second;
}

double DcSolution::i(const std::string& source) const {
    const auto it = source_currents.find(source);
    if (it == source_currents.end()) throw std::out_of_range("no source '" + source + "' in solution");
    return it->second;
}

void Curve::validate() const {
    if (points.size() < 2) throw AnalysisError("curve needs at least two points");
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (!(points[k].x > points[k - 1].x)) throw AnalysisError("curve x must be strictly increasing");
    }
}

double Curve::at(double x) const {
    if (points.empty()) throw AnalysisError("empty curve");
    if (x <= points.front().x) return points.front().y;
    if (x >= points.back().x) return points.back().y;
    const auto it = std::upper_bound(points.begin(), points.end(), x,
                                     [](double v, const Point& p) { return v < p.x; });
    const Point& b = *it;
    const Point& a = *(it - 1);
    const double t = (x - a.x) / (b.x - a.x);
    return a.y + t * (b.y - a.y);
}

MnaSystem::MnaSystem(const Circuit& circuit, double temperature_c)
    : circuit_(circuit), temperature_(temperature_c) {
    circuit.validate();
    for (const auto& n : circuit.nets()) {
        if (n == kGround) continue;
        index_[n] = static_cast<int>(nets_.size());
        nets_.push_back(n);
    }
    for (const auto& v : circuit.vsources) sources_.push_back(&v);
    for (const auto& m : circuit.mosfets) mos_params_.push_back(&circuit.models.at(m.model));
}

int MnaSystem::index_of(const std::string& net) const {
    if (net == kGround) return -1;
    return index_.at(net);
}

Eigen::VectorXd MnaSystem::pack(const Voltages& voltages,
                                const std::map<std::string, double>& source_currents) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
    for (std::size_t k = 0; k < nets_.size(); ++k) {
        const auto it = voltages.find(nets_[k]);
        if (it != voltages.end()) x[static_cast<Eigen::Index>(k)] = it->second;
    }
    for (std::size_t k = 0; k < sources_.size(); ++k) {
        const auto it = source_currents.find(sources_[k]->name);
        if (it != source_currents.end()) x[static_cast<Eigen::Index>(nets_.size() + k)] = it->second;
    }
    return x;
}

void MnaSystem::assemble(const Eigen::VectorXd& x, double gmin, double source_scale,
                         Eigen::MatrixXd& jac, Eigen::VectorXd& res) const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    jac.setZero(dim, dim);
    res.setZero(dim);
    auto volt = [&](int i) { return i < 0 ? 0.0 : x[i]; };
    auto add_j = [&](int r, int c, double g) {
        if (r >= 0 && c >= 0) jac(r, c) += g;
    };
    auto add_f = [&](int r, double i) {
        if (r >= 0) res[r] += i;
    };

    for (const auto& r : circuit_.resistors) {
        const int a = index_of(r.pos);
        const int b = index_of(r.neg);
        const double g = 1.0 / r.ohms;
        const double i = g * (volt(a) - volt(b));
        add_f(a, i);
        add_f(b, -i);
        add_j(a, a, g);
        add_j(a, b, -g);
        add_j(b, a, -g);
        add_j(b, b, g);
    }

    for (std::size_t k = 0; k < circuit_.mosfets.size(); ++k) {
        const auto& m = circuit_.mosfets[k];
        const int d = index_of(m.drain);
        const int g = index_of(m.gate);
        const int s = index_of(m.source);
        const int b = index_of(m.bulk);
        const double vs = volt(s);
        const BiasPoint bias{volt(g) - vs, volt(d) - vs, volt(b) - vs, temperature_};
        const DeviceEval e = drain_current(*mos_params_[k], m.w, m.l, bias);
        const double gs = -(e.d_id_dvgs + e.d_id_dvds + e.d_id_dvbs);
        add_f(d, e.id);
        add_f(s, -e.id);
        add_j(d, d, e.d_id_dvds);
        add_j(d, g, e.d_id_dvgs);
        add_j(d, b, e.d_id_dvbs);
        add_j(d, s, gs);
        add_j(s, d, -e.d_id_dvds);
        add_j(s, g, -e.d_id_dvgs);
        add_j(s, b, -e.d_id_dvbs);
        add_j(s, s, -gs);
    }

    const auto n = static_cast<int>(nets_.size());
    for (std::size_t k = 0; k < sources_.size(); ++k) {
        const VoltageSource& v = *sources_[k];
        const int row = n + static_cast<int>(k);
        const int p = index_of(v.pos);
        const int q = index_of(v.neg);
        const double j = x[row];
        // j leaves the + terminal into the circuit.
        add_f(p, -j);
        add_f(q, j);
        add_j(p, row, -1.0);
        add_j(q, row, 1.0);
        res[row] = volt(p) - volt(q) - source_scale * v.volts;
        add_j(row, p, 1.0);
        add_j(row, q, -1.0);
    }

    if (gmin > 0.0) {
        for (int i = 0; i < n; ++i) {
            res[i] += gmin * x[i];
            jac(i, i) += gmin;
        }
    }
}

double MnaSystem::kcl_residual(const Eigen::VectorXd& x, double gmin) const {
    Eigen::MatrixXd jac;
    Eigen::VectorXd res;
    assemble(x, gmin, 1.0, jac, res);
    const auto n = static_cast<Eigen::Index>(nets_.size());
    return n == 0 ? 0.0 : res.head(n).cwiseAbs().maxCoeff();
}

DcSolution MnaSystem::unpack(const Eigen::VectorXd& x) const {
    DcSolution sol;
    sol.voltages[kGround] = 0.0;
    for (std::size_t k = 0; k < nets_.size(); ++k) {
        sol.voltages[nets_[k]] = x[static_cast<Eigen::Index>(k)];
    }
    for (std::size_t k = 0; k < sources_.size(); ++k) {
        sol.source_currents[sources_[k]->name] = x[static_cast<Eigen::Index>(nets_.size() + k)];
    }
    return sol;
}

AssembledSystem assemble_system(const Circuit& circuit, const Voltages& candidate, double gmin,
                                double temperature_c,
                                const std::map<std::string, double>& source_currents) {
    const MnaSystem sys(circuit, temperature_c);
    const Eigen::VectorXd x = sys.pack(candidate, source_currents);
    AssembledSystem out;
    sys.assemble(x, gmin, 1.0, out.jacobian, out.residual);
    return out;
}

namespace {

struct NewtonRun {
    bool converged = false;
    Eigen::VectorXd x;
    int iterations = 0;
    double residual = 0.0;
};

NewtonRun newton(const MnaSystem& sys, Eigen::VectorXd x, double gmin, double scale,
                 const SolverOptions& opt) {
    const auto n = static_cast<Eigen::Index>(sys.node_count());
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    Eigen::MatrixXd jac;
    Eigen::VectorXd res;
    sys.assemble(x, gmin, scale, jac, res);

    NewtonRun run;
    run.x = x;
    run.residual = n == 0 ? 0.0 : res.head(n).cwiseAbs().maxCoeff();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        Eigen::VectorXd dx = jac.partialPivLu().solve(-res);
        if (!dx.allFinite()) break;
        double step = n == 0 ? 0.0 : dx.head(n).cwiseAbs().maxCoeff();
        if (!sys.is_linear() && step > opt.damping) {
            dx *= opt.damping / step;
            step = opt.damping;
        }
        x += dx;
        sys.assemble(x, gmin, scale, jac, res);
        const double kcl = n == 0 ? 0.0 : res.head(n).cwiseAbs().maxCoeff();
        const double src = dim > n ? res.tail(dim - n).cwiseAbs().maxCoeff() : 0.0;
        run.iterations = it;
        if (!std::isfinite(kcl)) break;
        if (kcl < run.residual || it == 1) {
            run.residual = kcl;
        }
        run.x = x;
        if (kcl <= opt.abstol && src <= opt.vtol && (step <= opt.vtol || sys.is_linear())) {
            run.converged = true;
            run.residual = kcl;
            return run;
        }
    }
    return run;
}

std::string describe(const char* stage, double param, const NewtonRun& r) {
    std::ostringstream s;
    s << stage << '(' << param << "): " << (r.converged ? "converged" : "failed") << " after "
      << r.iterations << " iterations, residual " << r.residual;
    return s.str();
}

}  // namespace

DcSolution solve_op(const Circuit& circuit, const SolverOptions& options,
                    const std::optional<Voltages>& guess, double temperature_c) {
    options.validate();
    const MnaSystem sys(circuit, temperature_c);
    const Eigen::VectorXd x0 = guess ? sys.pack(*guess)
                                     : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dimension()));
    std::vector<std::string> trace;
    int total = 0;
    double best = std::numeric_limits<double>::infinity();

    auto finish = [&](const NewtonRun& r, const char* strategy) {
        DcSolution sol = sys.unpack(r.x);
        sol.iterations = total;
        sol.residual = sys.kcl_residual(r.x, 0.0);
        sol.strategy = strategy;
        return sol;
    };
    auto record = [&](const char* stage, double param, const NewtonRun& r) {
        total += r.iterations;
        best = std::min(best, r.residual);
        trace.push_back(describe(stage, param, r));
    };

    // 1. plain Newton
    NewtonRun r = newton(sys, x0, 0.0, 1.0, options);
    record("newton", 0.0, r);
    if (r.converged) return finish(r, "newton");

    // 2. gmin stepping, then a final pass with gmin removed
    auto gmin_ramp = [&](Eigen::VectorXd x, double scale) -> std::optional<NewtonRun> {
        for (double g : options.gmin_schedule) {
            NewtonRun step = newton(sys, x, g, scale, options);
            record("gmin", g, step);
            if (!step.converged) return std::nullopt;
            x = step.x;
        }
        NewtonRun last = newton(sys, x, 0.0, scale, options);
        record("gmin", 0.0, last);
        if (!last.converged) return std::nullopt;
        return last;
    };
    if (auto g = gmin_ramp(x0, 1.0)) return finish(*g, "gmin");

    // 3. source stepping from an all-zero state
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.dimension()));
    bool ok = true;
    for (int k = 1; k <= options.source_steps && ok; ++k) {
        const double scale = static_cast<double>(k) / options.source_steps;
        NewtonRun step = newton(sys, x, 0.0, scale, options);
        record("source", scale, step);
        if (!step.converged) {
            auto g = gmin_ramp(x, scale);
            if (!g) {
                ok = false;
                break;
            }
            step = *g;
        }
        x = step.x;
        if (k == options.source_steps) return finish(step, "source");
    }

    throw ConvergenceError("DC operating point did not converge", best, std::move(trace));
}

DcSweepResult dc_sweep(const Circuit& circuit, const SweepSpec& spec, const SolverOptions& options,
                       double temperature_c) {
    if (!(spec.step > 0.0)) throw std::invalid_argument("sweep step must be positive");
    const double span = spec.stop - spec.start;
    const double steps = std::round(span / spec.step);
    if (steps < 1.0 || std::abs(steps * spec.step - span) > 1e-12 * std::max(1.0, std::abs(span))) {
        throw std::invalid_argument("sweep step must divide the range");
    }
    if (!circuit.find_source(spec.source)) {
        throw std::invalid_argument("no source named '" + spec.source + "'");
    }
    const bool is_voltage = spec.observable.kind == Observable::Kind::Voltage;
    if (is_voltage ? !circuit.has_net(spec.observable.name)
                   : circuit.find_source(spec.observable.name) == nullptr) {
        throw std::invalid_argument("unknown observable '" + spec.observable.name + "'");
    }

    Circuit c = circuit;
    VoltageSource* swept = c.find_source(spec.source);
    const auto count = static_cast<std::size_t>(steps);

    DcSweepResult out;
    out.curve.points.reserve(count + 1);
    std::optional<Voltages> guess = spec.guess;
    for (std::size_t k = 0; k <= count; ++k) {
        const double value = k == count ? spec.stop : spec.start + static_cast<double>(k) * spec.step;
        swept->volts = value;
        DcSolution sol;
        try {
            sol = solve_op(c, options, spec.continuation ? guess : spec.guess, temperature_c);
        } catch (const ConvergenceError& e) {
            std::ostringstream msg;
            msg << "sweep failed at " << spec.source << " = " << value << ": " << e.what();
            throw ConvergenceError(msg.str(), e.best_residual(), e.trace());
        }
        out.total_iterations += sol.iterations;
        const double y = is_voltage ? sol.v(spec.observable.name) : sol.i(spec.observable.name);
        out.curve.points.push_back({value, y});
        guess = std::move(sol.voltages);
    }
    return out;
}

}  // namespace sramlab
