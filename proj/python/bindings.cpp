#include "sramlab/analysis.hpp"
#include "sramlab/cli.hpp"
#include "sramlab/error.hpp"
#include "sramlab/netlist.hpp"
#include "sramlab/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace sramlab;

namespace {

CellGeometry geometry(const std::string& topology, double cr, double pr) {
    CellGeometry g;
    g.topology = parse_topology(topology);
    g.cell_ratio = cr;
    g.pullup_ratio = pr;
    return g;
}

py::list points(const Curve& c) {
    py::list out;
    for (const auto& p : c.points) out.append(py::make_tuple(p.x, p.y));
    return out;
}

py::dict metrics_dict(const NCurveMetrics& m) {
    py::dict d;
    d["svnm"] = m.svnm;
    d["sinm"] = m.sinm;
    d["wtv"] = m.wtv;
    d["wti"] = m.wti;
    d["spnm"] = m.spnm;
    d["wtp"] = m.wtp;
    d["icrit_wr"] = m.icrit_wr;
    return d;
}

py::dict snm_dict(const SnmResult& s) {
    py::dict d;
    d["snm"] = s.snm;
    d["lobe_high"] = s.lobe_high;
    d["lobe_low"] = s.lobe_low;
    d["monostable"] = s.monostable;
    d["write_failed"] = s.write_failed;
    py::list pts;
    for (const auto& p : s.intersections) pts.append(py::make_tuple(p.x, p.y));
    d["intersections"] = pts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SRAM cell stability laboratory (C++ core)";

    static py::exception<Error> base(m, "SramlabError");
    py::register_exception<ParseError>(m, "NetlistParseError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<AnalysisError>(m, "AnalysisError", base.ptr());
    py::register_exception<InvalidGeometry>(m, "InvalidGeometry", base.ptr());
    py::register_exception<HarnessError>(m, "HarnessError", base.ptr());

    m.def(
        "drain_current",
        [](const std::string& polarity, double vgs, double vds, double vbs, double w, double l,
           double temperature) {
            if (polarity != "pmos" && polarity != "nmos") {
                throw py::value_error("polarity must be 'nmos' or 'pmos'");
            }
            const DeviceParams p = polarity == "pmos" ? default_pmos() : default_nmos();
            const DeviceEval e = drain_current(p, w, l, {vgs, vds, vbs, temperature});
            return py::make_tuple(e.id, e.d_id_dvgs, e.d_id_dvds, e.d_id_dvbs);
        },
        py::arg("polarity"), py::arg("vgs"), py::arg("vds"), py::arg("vbs") = 0.0,
        py::arg("w") = 90e-9, py::arg("l") = 45e-9, py::arg("temperature") = 27.0,
        "Default-card drain current and its (vgs, vds, vbs) derivatives.");

    m.def(
        "cell_netlist",
        [](const std::string& topology, double cr, double pr) {
            return serialize_netlist(build_cell(geometry(topology, cr, pr)));
        },
        py::arg("topology") = "6t", py::arg("cr") = 1.5, py::arg("pr") = 1.5);

    m.def(
        "normalize_netlist", [](const std::string& text) { return serialize_netlist(parse_netlist(text)); },
        py::arg("text"), "Parse then serialize a netlist.");

    m.def(
        "operating_point",
        [](const std::string& text, double temperature) {
            const DcSolution s = solve_op(parse_netlist(text), {}, std::nullopt, temperature);
            py::dict d;
            d["voltages"] = s.voltages;
            d["currents"] = s.source_currents;
            d["iterations"] = s.iterations;
            d["residual"] = s.residual;
            d["strategy"] = s.strategy;
            return d;
        },
        py::arg("netlist"), py::arg("temperature") = 27.0,
        "Solve a netlist that already carries its sources.");

    m.def(
        "butterfly",
        [](const std::string& topology, const std::string& mode, double vdd, double temperature,
           double cr, double pr) {
            const ButterflyResult b =
                butterfly(geometry(topology, cr, pr), parse_mode(mode), vdd, temperature);
            py::dict d = snm_dict(snm_from_butterfly(b));
            d["vtc1"] = points(b.vtc1);
            d["vtc2"] = points(b.vtc2);
            return d;
        },
        py::arg("topology") = "6t", py::arg("mode") = "hold", py::arg("vdd") = 1.0,
        py::arg("temperature") = 27.0, py::arg("cr") = 1.5, py::arg("pr") = 1.5);

    m.def(
        "snm",
        [](const std::string& topology, const std::string& mode, double vdd, double temperature,
           double cr, double pr) {
            return snm_dict(snm_from_butterfly(
                butterfly(geometry(topology, cr, pr), parse_mode(mode), vdd, temperature)));
        },
        py::arg("topology") = "6t", py::arg("mode") = "hold", py::arg("vdd") = 1.0,
        py::arg("temperature") = 27.0, py::arg("cr") = 1.5, py::arg("pr") = 1.5);

    m.def(
        "ncurve",
        [](const std::string& topology, const std::string& mode, double vdd, double temperature,
           double cr, double pr) {
            const NCurveResult r =
                ncurve(geometry(topology, cr, pr), parse_ncurve_mode(mode), vdd, temperature);
            py::dict d;
            d["samples"] = points(r.samples);
            d["crossings"] = r.crossings;
            d["monostable"] = r.monostable;
            d["metrics"] = metrics_dict(r.metrics);
            return d;
        },
        py::arg("topology") = "6t", py::arg("mode") = "read", py::arg("vdd") = 1.0,
        py::arg("temperature") = 27.0, py::arg("cr") = 1.5, py::arg("pr") = 1.5);

    m.def(
        "ncurve_metrics",
        [](const std::vector<std::pair<double, double>>& samples) {
            Curve c;
            for (const auto& [x, y] : samples) c.points.push_back({x, y});
            return metrics_dict(ncurve_metrics(c));
        },
        py::arg("samples"));

    m.def(
        "leakage",
        [](const std::string& topology, double vdd, double temperature, double cr, double pr) {
            return leakage(geometry(topology, cr, pr), vdd, temperature);
        },
        py::arg("topology") = "6t", py::arg("vdd") = 1.0, py::arg("temperature") = 27.0,
        py::arg("cr") = 1.5, py::arg("pr") = 1.5);

    m.def(
        "sweep",
        [](const std::string& topology, const std::string& param, const std::vector<double>& values,
           const std::string& metric, double vdd, double temperature) {
            const SweepTable t = parameter_sweep(geometry(topology, 1.5, 1.5),
                                                 parse_sweep_param(param), values,
                                                 parse_metric(metric), vdd, temperature);
            py::list rows;
            for (const auto& r : t.rows) rows.append(py::make_tuple(r.param, r.value, r.error));
            return rows;
        },
        py::arg("topology"), py::arg("param"), py::arg("values"), py::arg("metric"),
        py::arg("vdd") = 1.0, py::arg("temperature") = 27.0,
        "Rows of (value, metric or None, error text).");

    m.def(
        "monte_carlo",
        [](const std::string& topology, std::size_t n, std::uint64_t seed, double avt_mvum,
           unsigned threads, const std::vector<std::string>& metrics) {
            McSpec s;
            s.geometry.topology = parse_topology(topology);
            s.n_samples = n;
            s.seed = seed;
            s.avt = avt_mvum * 1e-9;
            s.threads = threads;
            s.metrics.clear();
            for (const auto& name : metrics) s.metrics.push_back(parse_metric(name));
            McResult r;
            {
                py::gil_scoped_release release;
                r = monte_carlo(s);
            }
            py::dict d;
            py::dict stats;
            for (std::size_t k = 0; k < r.metrics.size(); ++k) {
                const auto& st = r.stats[k];
                py::dict e;
                e["count"] = st.count;
                e["mean"] = st.mean;
                e["std"] = st.stddev;
                e["min"] = st.min;
                e["max"] = st.max;
                stats[to_string(r.metrics[k])] = e;
            }
            py::list values;
            for (const auto& smp : r.samples) values.append(py::cast(smp.values));
            d["stats"] = stats;
            d["samples"] = values;
            d["read_failures"] = r.read_failures;
            d["write_failures"] = r.write_failures;
            d["solver_failures"] = r.solver_failures;
            return d;
        },
        py::arg("topology") = "6t", py::arg("n") = 20, py::arg("seed") = 1,
        py::arg("avt_mvum") = 2.5, py::arg("threads") = 1,
        py::arg("metrics") = std::vector<std::string>{"rsnm", "wtp"});

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the sramlab command line in-process: (exit code, stdout, stderr).");
}
