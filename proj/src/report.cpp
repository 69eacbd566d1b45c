#include "sramlab/report.hpp"

#include "sramlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace sramlab::report {

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_sig(*v) : std::string("nan");
}

// Axis with "nice" 1/2/5 tick spacing covering [lo, hi].
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;

    static Axis fit(double lo, double hi) {
        if (!(hi > lo)) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double f : {1.0, 2.0, 5.0, 10.0}) {
            step = f * mag;
            if (raw <= step) break;
        }
        return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
    }

    [[nodiscard]] std::vector<double> ticks() const {
        std::vector<double> t;
        const int n = static_cast<int>(std::lround((hi - lo) / step));
        for (int k = 0; k <= n; ++k) t.push_back(lo + k * step);
        return t;
    }
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

}  // namespace

std::string format_sig(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string render_csv(const CsvTable& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.config) os << "# " << k << '=' << v << '\n';
    for (const auto& a : t.annotations) os << "# " << a << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

CsvTable butterfly_table(const ButterflyResult& b, const ConfigEcho& config) {
    if (b.vtc1.size() != b.vtc2.size()) {
        throw AnalysisError("butterfly curves were swept on different grids");
    }
    CsvTable t;
    t.config = config;
    t.columns = {"vin", "vout1", "vout2"};
    for (std::size_t k = 0; k < b.vtc1.size(); ++k) {
        t.rows.push_back({format_sig(b.vtc1.points[k].x), format_sig(b.vtc1.points[k].y),
                          format_sig(b.vtc2.points[k].y)});
    }
    return t;
}

CsvTable ncurve_table(const NCurveResult& r, const ConfigEcho& config) {
    CsvTable t;
    t.config = config;
    t.annotations.push_back("A=" + opt_cell(r.a) + " B=" + opt_cell(r.b) + " C=" + opt_cell(r.c));
    t.columns = {"vin", "iin"};
    for (const auto& p : r.samples.points) t.rows.push_back({format_sig(p.x), format_sig(p.y)});
    return t;
}

CsvTable sweep_table(const SweepTable& s, const ConfigEcho& config) {
    CsvTable t;
    t.config = config;
    t.annotations.push_back(std::string("param=") + to_string(s.param) +
                            " metric=" + to_string(s.metric) + " unit=" + unit_of(s.metric));
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        if (!s.rows[k].value) {
            t.annotations.push_back("error row " + std::to_string(k) + ": " + s.rows[k].error);
        }
    }
    t.columns = {"param", "metric"};
    for (const auto& row : s.rows) t.rows.push_back({format_sig(row.param), opt_cell(row.value)});
    return t;
}

CsvTable mc_table(const McResult& r, const ConfigEcho& config) {
    if (r.stats.size() != r.metrics.size()) {
        throw std::invalid_argument("monte carlo result needs one stats entry per metric");
    }
    CsvTable t;
    t.config = config;
    for (std::size_t k = 0; k < r.metrics.size(); ++k) {
        const auto& s = r.stats[k];
        t.annotations.push_back(std::string(to_string(r.metrics[k])) + " count=" +
                                std::to_string(s.count) + " mean=" + format_sig(s.mean) +
                                " std=" + format_sig(s.stddev) + " min=" + format_sig(s.min) +
                                " max=" + format_sig(s.max));
    }
    t.annotations.push_back("read_failures=" + std::to_string(r.read_failures) +
                            " write_failures=" + std::to_string(r.write_failures) +
                            " solver_failures=" + std::to_string(r.solver_failures));
    t.columns.push_back("sample");
    for (Metric m : r.metrics) t.columns.push_back(to_string(m));
    for (const char* c : {"read_fail", "write_fail", "solver_fail"}) t.columns.push_back(c);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        const auto& s = r.samples[i];
        std::vector<std::string> row{std::to_string(i)};
        for (const auto& v : s.values) row.push_back(opt_cell(v));
        row.push_back(s.read_fail ? "1" : "0");
        row.push_back(s.write_fail ? "1" : "0");
        row.push_back(s.solver_fail ? "1" : "0");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string render_svg(const SvgPlot& plot) {
    if (plot.series.empty()) throw std::invalid_argument("plot needs at least one curve");

    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : plot.series) {
        for (const auto& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }
    if (!std::isfinite(xlo)) xlo = xhi = ylo = yhi = 0.0;
    const Axis ax = Axis::fit(xlo, xhi);
    const Axis ay = Axis::fit(ylo, yhi);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto sy = [&](double y) { return kTop + (ay.hi - y) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    if (!plot.config.empty()) {
        os << "<metadata>\n";
        for (const auto& [k, v] : plot.config) os << xml_escape(k) << '=' << xml_escape(v) << '\n';
        os << "</metadata>\n";
    }
    os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"16\">"
       << xml_escape(plot.title) << "</text>\n";

    // axes and ticks
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
       << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
       << "\"/>\n</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (double t : ax.ticks()) {
        const std::string x = fixed(sx(t), 2);
        os << "<line x1=\"" << x << "\" y1=\"" << fixed(kTop + ph, 2) << "\" x2=\"" << x
           << "\" y2=\"" << fixed(kTop + ph + 5, 2) << "\" stroke=\"black\"/>"
           << "<text x=\"" << x << "\" y=\"" << fixed(kTop + ph + 18, 2)
           << "\" text-anchor=\"middle\">" << format_sig(t, 4) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const std::string y = fixed(sy(t), 2);
        os << "<line x1=\"" << fixed(kLeft - 5, 2) << "\" y1=\"" << y << "\" x2=\"" << fixed(kLeft, 2)
           << "\" y2=\"" << y << "\" stroke=\"black\"/>"
           << "<text x=\"" << fixed(kLeft - 8, 2) << "\" y=\"" << fixed(sy(t) + 4, 2)
           << "\" text-anchor=\"end\">" << format_sig(t, 4) << "</text>\n";
    }
    os << "<text x=\"" << fixed(kLeft + pw / 2, 2) << "\" y=\"" << fixed(kHeight - 15, 2)
       << "\" text-anchor=\"middle\">" << xml_escape(plot.xlabel) << "</text>\n";
    os << "<text x=\"15\" y=\"" << fixed(kTop + ph / 2, 2)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << fixed(kTop + ph / 2, 2)
       << ")\">" << xml_escape(plot.ylabel) << "</text>\n";
    os << "</g>\n";

    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[i % std::size(kPalette)]
           << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& p : s.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
            os << (first ? "" : " ") << fixed(sx(p.x), 2) << ',' << fixed(sy(p.y), 2);
            first = false;
        }
        os << "\"/>\n";
    }

    if (plot.square) {
        const auto& q = *plot.square;
        os << "<rect class=\"snm-square\" x=\"" << fixed(sx(q.x), 2) << "\" y=\""
           << fixed(sy(q.y + q.side), 2) << "\" width=\"" << fixed(sx(q.x + q.side) - sx(q.x), 2)
           << "\" height=\"" << fixed(sy(q.y) - sy(q.y + q.side), 2)
           << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 2\"/>\n";
    }

    for (const auto& m : plot.markers) {
        os << "<g class=\"marker\"><circle cx=\"" << fixed(sx(m.x), 2) << "\" cy=\""
           << fixed(sy(m.y), 2) << "\" r=\"4\" fill=\"black\"/><text x=\"" << fixed(sx(m.x) + 6, 2)
           << "\" y=\"" << fixed(sy(m.y) - 6, 2)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(m.label)
           << "</text></g>\n";
    }

    // legend
    os << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    double ly = kTop + 14;
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        os << "<line x1=\"" << fixed(kWidth - kRight - 150, 2) << "\" y1=\"" << fixed(ly - 4, 2)
           << "\" x2=\"" << fixed(kWidth - kRight - 130, 2) << "\" y2=\"" << fixed(ly - 4, 2)
           << "\" stroke=\"" << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"2\"/>"
           << "<text x=\"" << fixed(kWidth - kRight - 125, 2) << "\" y=\"" << fixed(ly, 2) << "\">"
           << xml_escape(plot.series[i].name) << "</text>\n";
        ly += 14;
    }
    if (plot.square_side) {
        os << "<text class=\"snm-side\" x=\"" << fixed(kWidth - kRight - 150, 2) << "\" y=\""
           << fixed(ly, 2) << "\">SNM square side = " << format_sig(*plot.square_side)
           << " V</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

SvgPlot butterfly_plot(const ButterflyResult& b, const SnmResult& snm, const ConfigEcho& config) {
    SvgPlot p;
    p.title = std::string("Butterfly (") + to_string(b.mode) + ")";
    p.xlabel = "V(qb) [V]";
    p.ylabel = "V(q) [V]";
    p.series.push_back({"inverter 1: q(qb)", b.vtc1.points});
    p.series.push_back({"inverter 2 mirrored: qb(q)", b.mirrored_vtc2()});
    p.square = snm.square;
    if (snm.square) p.square_side = snm.square->side;
    p.config = config;
    return p;
}

SvgPlot ncurve_plot(const NCurveResult& r, const ConfigEcho& config) {
    SvgPlot p;
    p.title = std::string("N-curve (") + to_string(r.mode) + ")";
    p.xlabel = "V(qb) [V]";
    p.ylabel = "I_in [A]";
    p.series.push_back({"I_in", r.samples.points});
    const char* names[] = {"A", "B", "C"};
    if (r.crossings.size() == 3) {
        for (std::size_t k = 0; k < 3; ++k) {
            p.markers.push_back({std::string(names[k]) + " = " + format_sig(r.crossings[k], 4) + " V",
                                 r.crossings[k], 0.0});
        }
    } else {
        for (double c : r.crossings) p.markers.push_back({format_sig(c, 4) + " V", c, 0.0});
    }
    p.config = config;
    return p;
}

SvgPlot sweep_plot(const SweepTable& t, const ConfigEcho& config) {
    SvgPlot p;
    p.title = std::string(to_string(t.metric)) + " vs " + to_string(t.param);
    p.xlabel = to_string(t.param);
    p.ylabel = std::string(to_string(t.metric)) + " [" + unit_of(t.metric) + "]";
    Series s{to_string(t.metric), {}};
    for (const auto& row : t.rows) {
        if (row.value) s.points.push_back({row.param, *row.value});
    }
    p.series.push_back(std::move(s));
    p.config = config;
    return p;
}

ComparisonReport build_comparison(const CellGeometry& geom, double vdd, double temperature,
                                  const ConfigEcho& config, const AnalysisOptions& opts) {
    ComparisonReport rep;
    rep.config = config;
    rep.rows = {
        {"SVNM", "mV", 1e3, {}, {}, {}, {}, "320.9 mV", "321.67 mV"},
        {"SINM", "uA", 1e6, {}, {}, {}, {}, "181.2 uA", "382.6 uA"},
        {"WTV", "mV", 1e3, {}, {}, {}, {}, "547.5 mV", "594.5 mV"},
        {"WTI", "uA", 1e6, {}, {}, {}, {}, "-78.96 uA", "-122.4 uA"},
        {"I_CRIT_WR", "uA", 1e6, {}, {}, {}, {}, "205 uA", "205 uA"},
        {"Read leakage", "pA", 1e12, {}, {}, {}, {}, "13.84 pA", "11.1 pA"},
        {"HSNM", "mV", 1e3, {}, {}, {}, {}, "", ""},
        {"RSNM", "mV", 1e3, {}, {}, {}, {}, "", ""},
        {"WSNM", "mV", 1e3, {}, {}, {}, {}, "", ""},
    };

    for (Topology topo : {Topology::SixT, Topology::NineT}) {
        CellGeometry g = geom;
        g.topology = topo;
        CellEvaluator ev(build_cell(g), vdd, temperature, opts);
        const std::vector<std::function<double()>> getters{
            [&] { return ev.metric(Metric::Svnm); },
            [&] { return ev.metric(Metric::Sinm); },
            [&] { return ev.metric(Metric::Wtv); },
            [&] { return ev.metric(Metric::Wti); },
            [&] {
                const auto& v = ev.ncurve(NCurveMode::Write).metrics.icrit_wr;
                if (!v) throw AnalysisError("write n-curve never goes negative");
                return *v;
            },
            [&] { return ev.metric(Metric::Leakage); },
            [&] { return ev.metric(Metric::Hsnm); },
            [&] { return ev.metric(Metric::Rsnm); },
            [&] { return ev.metric(Metric::Wsnm); },
        };
        for (std::size_t k = 0; k < rep.rows.size(); ++k) {
            auto& row = rep.rows[k];
            auto& slot = topo == Topology::SixT ? row.six_t : row.nine_t;
            auto& err = topo == Topology::SixT ? row.error_six_t : row.error_nine_t;
            try {
                slot = getters[k]();
            } catch (const Error& e) {
                err = e.what();
            }
        }
    }
    return rep;
}

std::string render_comparison_text(const ComparisonReport& r) {
    auto cell = [](const std::optional<double>& v, const ComparisonRow& row) {
        return v ? format_sig(*v * row.scale, 5) + " " + row.unit : std::string("failed");
    };
    std::vector<std::vector<std::string>> grid;
    grid.push_back({"Metric", "6T (this model)", "9T (this model)", "6T reference (45nm PDK)",
                    "9T reference (45nm PDK)"});
    for (const auto& row : r.rows) {
        grid.push_back({row.label, cell(row.six_t, row), cell(row.nine_t, row),
                        row.reference_six_t.empty() ? "-" : row.reference_six_t,
                        row.reference_nine_t.empty() ? "-" : row.reference_nine_t});
    }
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (const auto& g : grid) {
        for (std::size_t i = 0; i < g.size(); ++i) width[i] = std::max(width[i], g[i].size());
    }
    std::ostringstream os;
    for (const auto& [k, v] : r.config) os << "# " << k << '=' << v << '\n';
    for (std::size_t j = 0; j < grid.size(); ++j) {
        for (std::size_t i = 0; i < grid[j].size(); ++i) {
            os << grid[j][i];
            if (i + 1 < grid[j].size()) os << std::string(width[i] - grid[j][i].size() + 2, ' ');
        }
        os << '\n';
        if (j == 0) {
            std::size_t total = 0;
            for (std::size_t w : width) total += w + 2;
            os << std::string(total - 2, '-') << '\n';
        }
    }
    for (const auto& row : r.rows) {
        if (!row.error_six_t.empty()) os << "! 6T " << row.label << ": " << row.error_six_t << '\n';
        if (!row.error_nine_t.empty()) os << "! 9T " << row.label << ": " << row.error_nine_t << '\n';
    }
    return os.str();
}

CsvTable comparison_table(const ComparisonReport& r) {
    CsvTable t;
    t.config = r.config;
    t.columns = {"metric", "unit", "value_6t", "value_9t", "reference_6t", "reference_9t"};
    for (const auto& row : r.rows) {
        auto v = [&](const std::optional<double>& x) {
            return x ? format_sig(*x * row.scale) : std::string("nan");
        };
        t.rows.push_back({row.label, row.unit, v(row.six_t), v(row.nine_t), row.reference_six_t,
                          row.reference_nine_t});
    }
    return t;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("failed writing " + path);
}

}  // namespace sramlab::report
