#include "sramlab/cli.hpp"

#include "sramlab/analysis.hpp"
#include "sramlab/error.hpp"
#include "sramlab/netlist.hpp"
#include "sramlab/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace sramlab::cli {

namespace {

using report::ConfigEcho;
using report::format_sig;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed argument value that CLI11 itself cannot see (e.g. a range).
class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string topology = "6t";
    std::optional<std::string> mode;
    double vdd = 1.0;
    double temp = 27.0;
    double cr = 1.5;
    double pr = 1.5;
    std::optional<std::string> param;
    std::optional<std::string> range;
    std::optional<std::string> metric;
    std::size_t n = 100;
    std::uint64_t seed = 1;
    double avt_mvum = 2.5;
    std::optional<std::string> csv;
    std::optional<std::string> svg;
    std::optional<std::string> netlist;
    unsigned threads = 1;
    bool mc_requested = false;
};

const std::vector<std::string> kCommands{"cell", "op",    "vtc", "snm",   "ncurve",
                                         "leakage", "sweep", "mc", "report"};

CellGeometry geometry_of(const Config& c) {
    CellGeometry g;
    g.topology = parse_topology(c.topology);
    g.cell_ratio = c.cr;
    g.pullup_ratio = c.pr;
    return g;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Cell under analysis: the netlist file when given, otherwise the builder.
Circuit load_cell(const Config& c) {
    if (c.netlist) return parse_netlist(read_file(*c.netlist));
    return build_cell(geometry_of(c));
}

std::string card_text(const DeviceParams& p) {
    return "vto=" + format_sig(p.vto) + " kp=" + format_sig(p.kp) + " lambda=" +
           format_sig(p.lambda) + " n=" + format_sig(p.n_sub) + " i0=" + format_sig(p.i0) +
           " gamma=" + format_sig(p.gamma) + " phi=" + format_sig(p.phi) + " tcv=" +
           format_sig(p.tcv);
}

Mode resolved_mode(const Config& c, Mode fallback) {
    return c.mode ? parse_mode(*c.mode) : fallback;
}

NCurveMode ncurve_mode(const Config& c) {
    if (!c.mode || *c.mode == "read") return NCurveMode::Read;
    if (*c.mode == "write" || *c.mode == "write0" || *c.mode == "write1") return NCurveMode::Write;
    throw ConfigError("ncurve supports --mode read or write, not " + *c.mode);
}

ConfigEcho echo(const Config& c, const std::string& mode_text) {
    const AnalysisOptions opts;
    ConfigEcho e{{"generator", "sramlab"}, {"command", c.command}};
    if (c.netlist && c.command != "cell") {
        e.push_back({"netlist", *c.netlist});
    } else {
        const CellGeometry g = geometry_of(c);
        e.push_back({"topology", to_string(g.topology)});
        e.push_back({"cr", format_sig(g.cell_ratio)});
        e.push_back({"pr", format_sig(g.pullup_ratio)});
        e.push_back({"access_w", format_sig(g.access_w)});
        e.push_back({"length", format_sig(g.length)});
        if (g.topology == Topology::NineT) e.push_back({"read_branch_w", format_sig(g.read_branch_w)});
        e.push_back({"nmos", card_text(default_nmos())});
        e.push_back({"pmos", card_text(default_pmos())});
    }
    if (!mode_text.empty()) e.push_back({"mode", mode_text});
    e.push_back({"vdd", format_sig(c.vdd)});
    e.push_back({"temp", format_sig(c.temp)});
    e.push_back({"vtc_step", format_sig(opts.vtc_step)});
    e.push_back({"ncurve_step", format_sig(opts.ncurve_step)});
    return e;
}

void maybe_write(const std::optional<std::string>& path, const std::string& content) {
    if (path) report::write_file(*path, content);
}

std::vector<double> parse_range(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
        throw ArgumentError("range must be start:stop:step, got '" + text + "'");
    }
    double start = 0.0, stop = 0.0, step = 0.0;
    try {
        start = parse_number(text.substr(0, a));
        stop = parse_number(text.substr(a + 1, b - a - 1));
        step = parse_number(text.substr(b + 1));
    } catch (const std::invalid_argument&) {
        throw ArgumentError("range must be start:stop:step, got '" + text + "'");
    }
    if (step == 0.0 || (stop - start) * step < 0.0) {
        throw ConfigError("range step must be nonzero and point from start toward stop");
    }
    const double span = (stop - start) / step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("range has too many points");
    std::vector<double> values;
    values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) values.push_back(start + static_cast<double>(k) * step);
    return values;
}

const char* snm_label(Mode m) {
    switch (m) {
        case Mode::Hold: return "HSNM";
        case Mode::Read: return "RSNM";
        default: return "WSNM";
    }
}

void print_metric(std::ostream& out, const std::string& name, const std::optional<double>& v,
                  const char* unit) {
    out << name << " = " << (v ? format_sig(*v) : std::string("undefined")) << ' ' << unit << '\n';
}

int cmd_cell(const Config& c, std::ostream& out) {
    const Circuit cell = build_cell(geometry_of(c));
    const std::string text = serialize_netlist(cell);
    if (c.netlist) {
        report::write_file(*c.netlist, text);
        out << "CELL = " << to_string(detect_topology(cell)) << " with " << cell.mosfets.size()
            << " transistors written to " << *c.netlist << '\n';
    } else {
        out << text;
    }
    return kOk;
}

int cmd_op(const Config& c, std::ostream& out) {
    const Mode mode = resolved_mode(c, Mode::Hold);
    const Circuit cell = load_cell(c);
    const Circuit circuit = apply_harness(cell, Harness::operating(mode, c.vdd, c.temp));
    const DcSolution sol = solve_op(circuit, {}, storage_guess(c.vdd, true), c.temp);

    report::CsvTable t;
    t.config = echo(c, to_string(mode));
    t.columns = {"quantity", "value"};
    for (const auto& [net, v] : sol.voltages) {
        out << "V(" << net << ") = " << format_sig(v) << " V\n";
        t.rows.push_back({"V(" + net + ")", format_sig(v)});
    }
    for (const auto& [name, i] : sol.source_currents) {
        out << "I(" << name << ") = " << format_sig(i) << " A\n";
        t.rows.push_back({"I(" + name + ")", format_sig(i)});
    }
    maybe_write(c.csv, report::render_csv(t));
    return kOk;
}

int cmd_vtc_snm(const Config& c, std::ostream& out, bool with_snm) {
    const Mode mode = resolved_mode(c, Mode::Hold);
    const ButterflyResult b = butterfly(load_cell(c), mode, c.vdd, c.temp);
    const ConfigEcho cfg = echo(c, to_string(mode));
    maybe_write(c.csv, report::render_csv(report::butterfly_table(b, cfg)));
    if (!with_snm) {
        out << "VTC1 points = " << b.vtc1.size() << '\n';
        out << "VTC2 points = " << b.vtc2.size() << '\n';
        if (c.svg) {
            report::SvgPlot p = report::butterfly_plot(b, SnmResult{}, cfg);
            report::write_file(*c.svg, report::render_svg(p));
        }
        return kOk;
    }
    const SnmResult s = snm_from_butterfly(b);
    out << snm_label(mode) << " = " << format_sig(s.snm) << " V\n";
    if (mode == Mode::Hold || mode == Mode::Read) {
        out << "LOBE_HIGH = " << format_sig(s.lobe_high) << " V\n";
        out << "LOBE_LOW = " << format_sig(s.lobe_low) << " V\n";
        if (s.monostable) out << "MONOSTABLE = 1\n";
    } else if (s.write_failed) {
        out << "WRITE_FAILED = 1\n";
    }
    if (c.svg) report::write_file(*c.svg, report::render_svg(report::butterfly_plot(b, s, cfg)));
    return kOk;
}

int cmd_ncurve(const Config& c, std::ostream& out) {
    const NCurveMode mode = ncurve_mode(c);
    const NCurveResult r = ncurve(load_cell(c), mode, c.vdd, c.temp);
    const ConfigEcho cfg = echo(c, to_string(mode));
    print_metric(out, "A", r.a, "V");
    print_metric(out, "B", r.b, "V");
    print_metric(out, "C", r.c, "V");
    print_metric(out, "SVNM", r.metrics.svnm, "V");
    print_metric(out, "SINM", r.metrics.sinm, "A");
    print_metric(out, "WTV", r.metrics.wtv, "V");
    print_metric(out, "WTI", r.metrics.wti, "A");
    print_metric(out, "SPNM", r.metrics.spnm, "W");
    print_metric(out, "WTP", r.metrics.wtp, "W");
    if (mode == NCurveMode::Write) print_metric(out, "I_CRIT_WR", r.metrics.icrit_wr, "A");
    if (r.monostable) out << "MONOSTABLE = 1\n";
    maybe_write(c.csv, report::render_csv(report::ncurve_table(r, cfg)));
    if (c.svg) report::write_file(*c.svg, report::render_svg(report::ncurve_plot(r, cfg)));
    return kOk;
}

int cmd_leakage(const Config& c, std::ostream& out) {
    const double i = leakage(load_cell(c), c.vdd, c.temp);
    out << "LEAKAGE = " << format_sig(i) << " A\n";
    if (c.csv) {
        report::CsvTable t;
        t.config = echo(c, "");
        t.columns = {"quantity", "value"};
        t.rows.push_back({"leakage", format_sig(i)});
        report::write_file(*c.csv, report::render_csv(t));
    }
    return kOk;
}

Metric default_metric(SweepParam p) {
    switch (p) {
        case SweepParam::CellRatio: return Metric::Rsnm;
        case SweepParam::PullupRatio: return Metric::Wsnm;
        default: return Metric::Hsnm;
    }
}

int cmd_sweep(const Config& c, std::ostream& out) {
    if (!c.param || !c.range) throw ConfigError("sweep needs --param and --range");
    if (c.netlist) throw ConfigError("sweep rebuilds the cell per point; --netlist is not accepted");
    const SweepParam param = parse_sweep_param(*c.param);
    const Metric metric = c.metric ? parse_metric(*c.metric) : default_metric(param);
    const std::vector<double> values = parse_range(*c.range);
    const SweepTable t = parameter_sweep(geometry_of(c), param, values, metric, c.vdd, c.temp);

    ConfigEcho cfg = echo(c, "");
    cfg.push_back({"param", to_string(param)});
    cfg.push_back({"range", *c.range});
    cfg.push_back({"metric", to_string(metric)});
    for (const auto& row : t.rows) {
        out << to_string(metric) << '(' << to_string(param) << '=' << format_sig(row.param)
            << ") = " << (row.value ? format_sig(*row.value) : "failed: " + row.error) << ' '
            << (row.value ? unit_of(metric) : "") << '\n';
    }
    maybe_write(c.csv, report::render_csv(report::sweep_table(t, cfg)));
    if (c.svg) report::write_file(*c.svg, report::render_svg(report::sweep_plot(t, cfg)));
    const bool any_failed =
        std::any_of(t.rows.begin(), t.rows.end(), [](const SweepRow& r) { return !r.value; });
    return any_failed ? kFailure : kOk;
}

McSpec mc_spec(const Config& c, Topology topo) {
    McSpec s;
    s.geometry = geometry_of(c);
    s.geometry.topology = topo;
    s.n_samples = c.n;
    s.seed = c.seed;
    s.avt = c.avt_mvum * 1e-9;
    s.vdd = c.vdd;
    s.temperature = c.temp;
    s.threads = c.threads;
    if (c.metric) s.metrics = {parse_metric(*c.metric)};
    return s;
}

void mc_echo(ConfigEcho& cfg, const McSpec& s) {
    cfg.push_back({"n", std::to_string(s.n_samples)});
    cfg.push_back({"seed", std::to_string(s.seed)});
    cfg.push_back({"avt_mvum", format_sig(s.avt * 1e9)});
    std::string names;
    for (Metric m : s.metrics) names += (names.empty() ? "" : " ") + std::string(to_string(m));
    cfg.push_back({"metrics", names});
}

void print_mc(std::ostream& out, const McResult& r, const std::string& prefix) {
    for (std::size_t k = 0; k < r.metrics.size(); ++k) {
        const auto& s = r.stats[k];
        out << prefix << to_string(r.metrics[k]) << " mean = " << format_sig(s.mean) << ' '
            << unit_of(r.metrics[k]) << " std = " << format_sig(s.stddev) << " min = "
            << format_sig(s.min) << " max = " << format_sig(s.max) << " count = " << s.count
            << '\n';
    }
    out << prefix << "READ_FAILURE_RATE = " << format_sig(r.read_failure_rate()) << '\n';
    out << prefix << "WRITE_FAILURE_RATE = " << format_sig(r.write_failure_rate()) << '\n';
    out << prefix << "SOLVER_FAILURES = " << r.solver_failures << '\n';
}

int cmd_mc(const Config& c, std::ostream& out) {
    if (c.netlist) throw ConfigError("mc draws mismatch on the built cell; --netlist is not accepted");
    const McSpec spec = mc_spec(c, parse_topology(c.topology));
    const McResult r = monte_carlo(spec);
    ConfigEcho cfg = echo(c, "");
    mc_echo(cfg, spec);
    print_mc(out, r, "");
    maybe_write(c.csv, report::render_csv(report::mc_table(r, cfg)));
    return kOk;
}

int cmd_report(const Config& c, std::ostream& out) {
    if (c.netlist) throw ConfigError("report compares the built 6T and 9T cells; --netlist is not accepted");
    ConfigEcho cfg = echo(c, "");
    cfg.erase(std::remove_if(cfg.begin(), cfg.end(),
                             [](const auto& kv) { return kv.first == "topology" ||
                                                         kv.first == "read_branch_w"; }),
              cfg.end());
    cfg.push_back({"read_branch_w", format_sig(CellGeometry{}.read_branch_w)});
    std::optional<std::pair<McResult, McResult>> mc;
    if (c.mc_requested) {
        const McSpec s6 = mc_spec(c, Topology::SixT);
        mc_echo(cfg, s6);
        mc.emplace(monte_carlo(s6), monte_carlo(mc_spec(c, Topology::NineT)));
    }
    const auto rep = report::build_comparison(geometry_of(c), c.vdd, c.temp, cfg);
    std::string text = report::render_comparison_text(rep);
    if (mc) {
        std::ostringstream os;
        print_mc(os, mc->first, "6T ");
        print_mc(os, mc->second, "9T ");
        text += os.str();
    }
    out << text;
    if (c.csv) report::write_file(*c.csv, report::render_csv(report::comparison_table(rep)));
    if (c.svg) {
        const Topology topo = parse_topology(c.topology);
        CellGeometry g = geometry_of(c);
        g.topology = topo;
        const ButterflyResult b = butterfly(g, Mode::Read, c.vdd, c.temp);
        report::write_file(*c.svg, report::render_svg(report::butterfly_plot(
                                       b, snm_from_butterfly(b), cfg)));
    }
    const bool failed = std::any_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) {
        return !r.six_t || !r.nine_t;
    });
    return failed ? kFailure : kOk;
}

void validate(const Config& c) {
    (void)parse_topology(c.topology);
    if (!(c.vdd > 0.0) || !std::isfinite(c.vdd)) throw ConfigError("--vdd must be positive");
    if (!(c.temp > -273.15) || !std::isfinite(c.temp)) throw ConfigError("--temp must be above absolute zero");
    if (!(c.cr > 0.0) || !(c.pr > 0.0)) throw ConfigError("--cr and --pr must be positive");
    if (c.n < 1) throw ConfigError("--n must be at least 1");
    if (!(c.avt_mvum >= 0.0)) throw ConfigError("--avt must be >= 0");
    if (c.mode) (void)parse_mode(*c.mode == "write" ? "write0" : *c.mode);
    if (c.metric) (void)parse_metric(*c.metric);
    if (c.param) (void)parse_sweep_param(*c.param);
}

int dispatch(const Config& c, std::ostream& out) {
    if (c.command == "cell") return cmd_cell(c, out);
    if (c.command == "op") return cmd_op(c, out);
    if (c.command == "vtc") return cmd_vtc_snm(c, out, false);
    if (c.command == "snm") return cmd_vtc_snm(c, out, true);
    if (c.command == "ncurve") return cmd_ncurve(c, out);
    if (c.command == "leakage") return cmd_leakage(c, out);
    if (c.command == "sweep") return cmd_sweep(c, out);
    if (c.command == "mc") return cmd_mc(c, out);
    return cmd_report(c, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SRAM cell stability laboratory", "sramlab"};
    Config c;
    app.add_option("command", c.command, "cell|op|vtc|snm|ncurve|leakage|sweep|mc|report")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--topology", c.topology, "6t or 9t");
    app.add_option("--mode", c.mode, "hold|read|write0|write1 (ncurve: read|write)");
    app.add_option("--vdd", c.vdd, "supply voltage [V]");
    app.add_option("--temp", c.temp, "temperature [C]");
    app.add_option("--cr", c.cr, "cell ratio");
    app.add_option("--pr", c.pr, "pull-up ratio");
    app.add_option("--param", c.param, "sweep parameter: cr|pr|vdd|temp");
    app.add_option("--range", c.range, "sweep values start:stop:step");
    app.add_option("--metric", c.metric, "metric for sweep/mc");
    auto* n_opt = app.add_option("--n", c.n, "Monte Carlo samples");
    auto* seed_opt = app.add_option("--seed", c.seed, "Monte Carlo seed");
    app.add_option("--avt", c.avt_mvum, "Pelgrom coefficient [mV*um]");
    app.add_option("--csv", c.csv, "CSV output path");
    app.add_option("--svg", c.svg, "SVG output path");
    app.add_option("--netlist", c.netlist, "netlist path (cell: output, others: input)");
    app.add_option("--threads", c.threads, "Monte Carlo worker threads (0 = all cores)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ConversionError& e) {
        err << "sramlab: " << e.what() << '\n';
        return kParseError;
    } catch (const CLI::ArgumentMismatch& e) {
        err << "sramlab: " << e.what() << '\n';
        return kParseError;
    } catch (const CLI::ParseError& e) {
        err << "sramlab: " << e.what() << '\n' << app.help();
        return kInvalidConfig;
    }
    c.mc_requested = n_opt->count() > 0 || seed_opt->count() > 0;

    try {
        validate(c);
        return dispatch(c, out);
    } catch (const ParseError& e) {
        err << "sramlab: netlist " << e.what() << '\n';
        return kParseError;
    } catch (const ConvergenceError& e) {
        err << "sramlab: " << e.what() << " (best residual " << format_sig(e.best_residual())
            << " A)\n";
        for (const auto& line : e.trace()) err << "  " << line << '\n';
        return kFailure;
    } catch (const IoError& e) {
        err << "sramlab: " << e.what() << '\n';
        return kFailure;
    } catch (const AnalysisError& e) {
        err << "sramlab: " << e.what() << '\n';
        return kFailure;
    } catch (const ArgumentError& e) {
        err << "sramlab: " << e.what() << '\n';
        return kParseError;
    } catch (const ConfigError& e) {
        err << "sramlab: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const Error& e) {
        err << "sramlab: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const std::invalid_argument& e) {
        err << "sramlab: " << e.what() << '\n';
        return kInvalidConfig;
    }
}

int run(const std::vector<std::string>& args) {
    return run(args, std::cout, std::cerr);
}

}  // namespace sramlab::cli
