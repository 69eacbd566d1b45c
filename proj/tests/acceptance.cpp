// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any criterion fails.

#include "sramlab/analysis.hpp"
#include "sramlab/cli.hpp"
#include "sramlab/report.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sramlab;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double v, int digits = 6) { return report::format_sig(v, digits); }

CellGeometry geom(Topology t) {
    CellGeometry g;
    g.topology = t;
    return g;
}

double snm(Topology t, Mode m, double vdd = 1.0, double temp = 27.0) {
    return snm_from_butterfly(butterfly(geom(t), m, vdd, temp)).snm;
}

double kcl(const Circuit& c, const DcSolution& s, double temp = 27.0) {
    const MnaSystem sys(c, temp);
    return sys.kcl_residual(sys.pack(s.voltages, s.source_currents));
}

// ---------------------------------------------------------------------------

Verdict device_oracle() {
    Verdict v;
    DeviceParams hand = default_nmos();
    hand.lambda = 0.0;
    const double sat = drain_current(hand, 90e-9, 45e-9, {1.0, 1.0, 0.0, 27.0}).id;
    const double lin = drain_current(hand, 90e-9, 45e-9, {1.0, 0.2, 0.0, 27.0}).id;
    v.require(std::abs(sat / 72e-6 - 1.0) <= 1e-12, "saturation point " + num(sat, 15));
    v.require(std::abs(lin / 40e-6 - 1.0) <= 1e-12, "linear point " + num(lin, 15));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    int checked = 0;
    int bad = 0;
    int resolved = 0;  // partials large enough for a relative comparison
    double worst = 0.0;
    const double h = 1e-6;
    while (checked < 1000) {
        const DeviceParams p = checked % 2 ? default_pmos() : default_nmos();
        BiasPoint b{u(rng), u(rng), u(rng), 27.0};
        // keep the stencil away from branch switches, where a central
        // difference sees two different one-sided slopes
        const double s = checked % 2 ? -1.0 : 1.0;
        double vgs = s * b.vgs, vds = s * b.vds, vbs = s * b.vbs;
        if (vds < 0) { vgs -= vds; vbs -= vds; vds = -vds; }
        DeviceParams n = p;
        n.polarity = Polarity::NMOS;
        n.vto = std::abs(p.vto);
        const double vov = vgs - threshold_voltage(n, vbs, 27.0);
        if (std::min({std::abs(vov), std::abs(vds), std::abs(vds - vov), std::abs(n.phi - vbs)}) < 1e-4) {
            continue;
        }
        const DeviceEval e = drain_current(p, 90e-9, 45e-9, b);
        // Central difference plus the round-off it suffers from cancelling
        // two nearly equal currents.
        struct Fd {
            double slope;
            double noise;
        };
        auto fd = [&](double BiasPoint::*f) {
            BiasPoint hi = b, lo = b;
            hi.*f += h;
            lo.*f -= h;
            const double a = drain_current(p, 90e-9, 45e-9, hi).id;
            const double c = drain_current(p, 90e-9, 45e-9, lo).id;
            return Fd{(a - c) / (2 * h), 8 * DBL_EPSILON * std::max(std::abs(a), std::abs(c)) / (2 * h)};
        };
        const double an[] = {e.d_id_dvgs, e.d_id_dvds, e.d_id_dvbs};
        const Fd nu[] = {fd(&BiasPoint::vgs), fd(&BiasPoint::vds), fd(&BiasPoint::vbs)};
        for (int k = 0; k < 3; ++k) {
            const double err = std::abs(an[k] - nu[k].slope);
            const double scale = std::abs(nu[k].slope);
            if (err > std::max(1e-6 * scale, nu[k].noise)) ++bad;
            if (nu[k].noise < 1e-6 * scale) {
                worst = std::max(worst, err / scale);
                ++resolved;
            }
        }
        ++checked;
    }
    v.require(bad == 0, std::to_string(bad) + " derivative mismatches");
    if (v.pass) {
        v.detail = "1000 biases, worst relative FD error " + num(worst, 3) + " over " +
                   std::to_string(resolved) + " partials above the round-off floor";
    }
    return v;
}

Verdict solver() {
    Verdict v;
    Circuit d;
    d.vsources.push_back({"v1", "in", "0", 1.0});
    d.resistors.push_back({"r1", "in", "mid", 1e3});
    d.resistors.push_back({"r2", "mid", "0", 1e3});
    const DcSolution ds = solve_op(d);
    v.require(std::abs(ds.v("mid") - 0.5) <= 1e-9, "divider " + num(ds.v("mid"), 12));

    double worst = kcl(d, ds);
    for (Topology t : {Topology::SixT, Topology::NineT}) {
        for (Mode m : {Mode::Hold, Mode::Read, Mode::Write0, Mode::Write1}) {
            const Circuit c = apply_harness(build_cell(geom(t)), Harness::operating(m, 1.0));
            for (bool hi : {true, false}) worst = std::max(worst, kcl(c, solve_op(c, {}, storage_guess(1.0, hi))));
        }
    }
    v.require(worst <= 1e-9, "KCL residual " + num(worst));

    const Circuit hold = apply_harness(build_cell({}), Harness::operating(Mode::Hold, 1.0));
    const DcSolution one = solve_op(hold, {}, storage_guess(1.0, true));
    const DcSolution zero = solve_op(hold, {}, storage_guess(1.0, false));
    const double asym = std::max(std::abs(one.v("q") - zero.v("qb")), std::abs(one.v("qb") - zero.v("q")));
    v.require(one.v("q") > 0.5 && zero.v("q") < 0.5, "hold states not distinct");
    v.require(asym <= 1e-6, "hold asymmetry " + num(asym));
    if (v.pass) {
        v.detail = "divider " + num(ds.v("mid"), 10) + " V, max KCL " + num(worst, 3) +
                   " A, hold asymmetry " + num(asym, 3) + " V";
    }
    return v;
}

Verdict snm_oracle() {
    Verdict v;
    int count = 0;
    double worst = 0.0;
    for (Topology t : {Topology::SixT, Topology::NineT}) {
        for (Mode m : {Mode::Hold, Mode::Read}) {
            const ButterflyResult b = butterfly(geom(t), m, 1.0, 27.0);
            const double diff = std::abs(snm_from_butterfly(b).snm - snm_bruteforce_oracle(b).snm);
            worst = std::max(worst, diff);
            ++count;
        }
    }
    ButterflyResult step;
    step.vtc1.points = {{0.0, 1.0}, {0.5, 1.0}, {0.5, 0.0}, {1.0, 0.0}};
    step.vtc2 = step.vtc1;
    const double ideal = snm_from_butterfly(step).snm;
    const double ideal_oracle = snm_bruteforce_oracle(step).snm;
    worst = std::max(worst, std::abs(ideal - ideal_oracle));
    ++count;
    v.require(worst <= 2e-3, "rotation vs oracle " + num(worst));
    v.require(ideal == 0.5, "ideal step SNM " + num(ideal, 15));
    if (v.pass) {
        v.detail = std::to_string(count) + " butterflies, worst difference " + num(worst, 3) +
                   " V, ideal step " + num(ideal) + " V";
    }
    return v;
}

Verdict orderings() {
    Verdict v;
    const double h6 = snm(Topology::SixT, Mode::Hold), h9 = snm(Topology::NineT, Mode::Hold);
    const double r6 = snm(Topology::SixT, Mode::Read), r9 = snm(Topology::NineT, Mode::Read);
    const double w6 = snm(Topology::SixT, Mode::Write0), w9 = snm(Topology::NineT, Mode::Write0);
    const NCurveMetrics n6 = ncurve(geom(Topology::SixT), NCurveMode::Read, 1.0, 27.0).metrics;
    const NCurveMetrics n9 = ncurve(geom(Topology::NineT), NCurveMode::Read, 1.0, 27.0).metrics;
    const double l6 = leakage(geom(Topology::SixT), 1.0, 27.0);
    const double l9 = leakage(geom(Topology::NineT), 1.0, 27.0);

    v.require(std::abs(h6 - h9) <= 1e-3, "HSNM 6T " + num(h6, 4) + " vs 9T " + num(h9, 4) + " V");
    v.require(r6 < h6, "RSNM(6T) " + num(r6, 4) + " not below HSNM(6T) " + num(h6, 4));
    v.require(r9 > r6, "RSNM(9T) " + num(r9, 4) + " not above RSNM(6T) " + num(r6, 4));
    v.require(std::abs(w6 - w9) <= 1e-3, "WSNM 6T " + num(w6, 4) + " vs 9T " + num(w9, 4));
    v.require(n6.sinm && n9.sinm && *n9.sinm > *n6.sinm, "SINM ordering");
    v.require(n6.wti && n9.wti && std::abs(*n9.wti) > std::abs(*n6.wti), "|WTI| ordering");
    v.require(l9 <= l6, "leakage 9T " + num(l9 * 1e12, 4) + " pA above 6T " + num(l6 * 1e12, 4) + " pA");
    if (v.pass) v.detail = "all seven orderings hold";
    return v;
}

Verdict ncurve_math() {
    Verdict v;
    Curve cubic;
    for (int k = 0; k <= 500; ++k) {
        const double x = k / 500.0;
        cubic.points.push_back({x, 1e-6 * (x - 0.1) * (x - 0.45) * (x - 0.8)});
    }
    // extrema of (x-0.1)(x-0.45)(x-0.8) from the roots of its derivative
    const double disc = std::sqrt(4 * 1.35 * 1.35 - 12 * 0.485);
    auto f = [](double x) { return 1e-6 * (x - 0.1) * (x - 0.45) * (x - 0.8); };
    const double peak = f((2 * 1.35 - disc) / 6), trough = f((2 * 1.35 + disc) / 6);
    const NCurveMetrics m = ncurve_metrics(cubic);
    v.require(m.svnm && std::abs(*m.svnm - 0.35) <= 1e-3, "cubic SVNM");
    v.require(m.wtv && std::abs(*m.wtv - 0.35) <= 1e-3, "cubic WTV");
    v.require(m.sinm && std::abs(*m.sinm / peak - 1.0) <= 0.01, "cubic SINM");
    v.require(m.wti && std::abs(*m.wti / trough - 1.0) <= 0.01, "cubic WTI");

    double worst = 0.0;
    for (Topology t : {Topology::SixT, Topology::NineT}) {
        const NCurveResult r = ncurve(geom(t), NCurveMode::Read, 1.0, 27.0);
        const std::string name = to_string(t);
        v.require(r.crossings.size() == 3, name + " has " + std::to_string(r.crossings.size()) + " crossings");
        v.require(r.metrics.spnm && *r.metrics.spnm > 0.0, name + " SPNM not positive");
        v.require(r.metrics.wtp && *r.metrics.wtp < 0.0, name + " WTP not negative");
        const auto pts = butterfly_intersections(butterfly(geom(t), Mode::Read, 1.0, 27.0));
        if (pts.size() == 3 && r.crossings.size() == 3) {
            for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(r.crossings[k] - pts[k].x));
        } else {
            v.require(false, name + " butterfly intersection count");
        }
    }
    v.require(worst <= 5e-3, "crossing vs butterfly " + num(worst));
    if (v.pass) v.detail = "cubic margins exact, crossings within " + num(worst * 1e3, 3) + " mV of butterfly";
    return v;
}

Verdict trends() {
    Verdict v;
    auto series = [](const CellGeometry& g, SweepParam p, const std::vector<double>& xs, Metric m) {
        std::vector<double> out;
        for (const auto& row : parameter_sweep(g, p, xs, m, 1.0, 27.0).rows) {
            out.push_back(row.value ? *row.value : NAN);
        }
        return out;
    };
    auto monotone = [](const std::vector<double>& ys, bool increasing, bool strict) {
        for (std::size_t k = 1; k < ys.size(); ++k) {
            const double d = increasing ? ys[k] - ys[k - 1] : ys[k - 1] - ys[k];
            if (!(strict ? d > 0.0 : d >= 0.0)) return false;
        }
        return true;
    };
    const std::vector<double> cr{0.5, 1.0, 1.5, 2.0, 2.5};
    const std::vector<double> pr{0.5, 1.0, 1.5, 2.0};
    const std::vector<double> vdd{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
    const std::vector<double> temp{-40.0, 0.0, 27.0, 85.0, 125.0};
    for (Topology t : {Topology::SixT, Topology::NineT}) {
        const std::string name = to_string(t);
        const CellGeometry g = geom(t);
        v.require(monotone(series(g, SweepParam::CellRatio, cr, Metric::Rsnm), true, true), name + " RSNM vs CR");
        v.require(monotone(series(g, SweepParam::PullupRatio, pr, Metric::Wsnm), false, true), name + " WSNM vs PR");
        v.require(monotone(series(g, SweepParam::Vdd, vdd, Metric::Hsnm), false, false), name + " HSNM vs vdd");
        v.require(monotone(series(g, SweepParam::Vdd, vdd, Metric::Rsnm), false, false), name + " RSNM vs vdd");
        for (Metric m : {Metric::Hsnm, Metric::Rsnm}) {
            v.require(monotone(series(g, SweepParam::Temperature, temp, m), false, false),
                      name + " " + to_string(m) + " vs T");
        }
        v.require(monotone(series(g, SweepParam::Temperature, temp, Metric::Leakage), true, true),
                  name + " leakage vs T");
    }
    if (v.pass) v.detail = "CR, PR, vdd and temperature trends hold for 6T and 9T";
    return v;
}

Verdict leakage_calibration() {
    Verdict v;
    const double i = leakage(geom(Topology::SixT), 1.0, 27.0);
    v.require(i >= 5e-12 && i <= 50e-12, "6T leakage " + num(i * 1e12, 4) + " pA");
    if (v.pass) v.detail = "6T leakage " + num(i * 1e12, 4) + " pA";
    return v;
}

Verdict monte_carlo_checks() {
    Verdict v;
    McSpec s;
    s.n_samples = 16;
    s.seed = 7;
    s.threads = 1;
    const McResult one = monte_carlo(s);
    s.threads = 4;
    const McResult many = monte_carlo(s);
    v.require(one == many, "1-thread and 4-thread runs differ");

    McSpec z;
    z.n_samples = 2;
    z.avt = 0.0;
    z.metrics = {Metric::Rsnm};
    const McResult zr = monte_carlo(z);
    const double nominal = snm(Topology::SixT, Mode::Read);
    for (const auto& smp : zr.samples) {
        v.require(smp.values[0] && *smp.values[0] == nominal, "avt=0 sample differs from nominal");
    }

    auto sigma = [](const Circuit& c) {
        std::vector<double> xs;
        for (std::uint64_t k = 0; k < 10000; ++k) xs.push_back(draw_vto_shifts(c, 2.5e-9, 3, k)[1]);
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / (xs.size() - 1));
    };
    CellGeometry big;
    big.access_w *= 2;
    big.length *= 2;
    const double ratio = sigma(build_cell(big)) / sigma(build_cell({}));
    v.require(std::abs(ratio / 0.5 - 1.0) <= 0.05, "sigma ratio " + num(ratio, 4));
    if (v.pass) v.detail = "thread-invariant, avt=0 exact, area x4 sigma ratio " + num(ratio, 4);
    return v;
}

Verdict round_trip() {
    Verdict v;
    int circuits = 0;
    for (Topology t : {Topology::SixT, Topology::NineT}) {
        for (double cr : {0.7, 1.5, 2.3}) {
            CellGeometry g = geom(t);
            g.cell_ratio = cr;
            const Circuit c = build_cell(g);
            v.require(equivalent(parse_netlist(serialize_netlist(c)), c), "builder round trip");
            ++circuits;
        }
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        Circuit c;
        DeviceParams p = k % 2 ? default_pmos() : default_nmos();
        p.kp *= 0.5 + u(rng);
        p.i0 *= 0.5 + u(rng);
        c.models.emplace("dev", p);
        const int n = 1 + k % 5;
        for (int j = 0; j < n; ++j) {
            const std::string a = "n" + std::to_string(j), b = "n" + std::to_string(j + 1);
            c.mosfets.push_back({"m" + std::to_string(j), a, b, "0", "0", "dev", 1e-7 * (1 + u(rng)), 4.5e-8});
            c.resistors.push_back({"r" + std::to_string(j), a, b, 1e3 * (1 + 100 * u(rng))});
        }
        c.vsources.push_back({"vs", "n0", "0", u(rng)});
        v.require(equivalent(parse_netlist(serialize_netlist(c)), c), "fuzzed round trip " + std::to_string(k));
        ++circuits;
    }

    // frozen CSV schemas: header line of each table kind
    auto header = [](const report::CsvTable& t) {
        std::string h;
        for (std::size_t k = 0; k < t.columns.size(); ++k) h += (k ? "," : "") + t.columns[k];
        return h;
    };
    ButterflyResult b;
    b.vtc1.points = {{0, 1}, {1, 0}};
    b.vtc2 = b.vtc1;
    McResult mr;
    mr.metrics = {Metric::Rsnm, Metric::Wtp};
    mr.stats.resize(2);
    v.require(header(report::butterfly_table(b, {})) == "vin,vout1,vout2", "butterfly schema");
    v.require(header(report::ncurve_table(NCurveResult{}, {})) == "vin,iin", "ncurve schema");
    v.require(header(report::sweep_table(SweepTable{}, {})) == "param,metric", "sweep schema");
    v.require(header(report::mc_table(mr, {})) == "sample,rsnm,wtp,read_fail,write_fail,solver_fail",
              "mc schema");
    v.require(header(report::comparison_table(report::ComparisonReport{})) ==
                  "metric,unit,value_6t,value_9t,reference_6t,reference_9t",
              "comparison schema");

    std::string first_out, first_csv;
    for (int k = 0; k < 2; ++k) {
        std::ostringstream out, err;
        const std::string path = "acceptance_report_" + std::to_string(k) + ".csv";
        const int code = cli::run({"report", "--csv", path}, out, err);
        v.require(code == 0, "report exit " + std::to_string(code));
        std::ifstream in(path, std::ios::binary);
        std::ostringstream csv;
        csv << in.rdbuf();
        std::remove(path.c_str());
        if (k == 0) {
            first_out = out.str();
            first_csv = csv.str();
        } else {
            v.require(out.str() == first_out && csv.str() == first_csv, "report output differs between runs");
        }
    }
    if (v.pass) v.detail = std::to_string(circuits) + " circuits round-trip, 5 schemas frozen, report byte-stable";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"device oracle", device_oracle},
        {"solver", solver},
        {"SNM oracle equivalence", snm_oracle},
        {"ordering suite", orderings},
        {"N-curve math", ncurve_math},
        {"trend suite", trends},
        {"leakage calibration", leakage_calibration},
        {"Monte Carlo", monte_carlo_checks},
        {"round-trip and golden files", round_trip},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first
                  << "): " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
