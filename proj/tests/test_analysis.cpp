#include "sramlab/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace sramlab;

namespace {

CellGeometry nine_t() {
    CellGeometry g;
    g.topology = Topology::NineT;
    return g;
}

double sample_stddev(const std::vector<double>& xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (xs.size() - 1));
}

}  // namespace

TEST_CASE("standby leakage of the default cells") {
    const double six = leakage(CellGeometry{}, 1.0, 27.0);
    CHECK(six >= 5e-12);
    CHECK(six <= 50e-12);
    CHECK(leakage(nine_t(), 1.0, 27.0) > 0.0);
}

TEST_CASE("leakage rises with temperature") {
    double prev = 0.0;
    for (double t : {-40.0, 0.0, 27.0, 85.0, 125.0}) {
        const double i = leakage(CellGeometry{}, 1.0, t);
        CHECK(i > prev);
        prev = i;
    }
}

TEST_CASE("evaluator metrics agree with the direct analyses") {
    CellEvaluator ev(build_cell({}), 1.0, 27.0);
    CHECK(ev.metric(Metric::Hsnm) == snm_from_butterfly(butterfly(CellGeometry{}, Mode::Hold, 1.0, 27.0)).snm);
    const NCurveResult r = ncurve(CellGeometry{}, NCurveMode::Read, 1.0, 27.0);
    CHECK(ev.metric(Metric::Svnm) == *r.metrics.svnm);
    CHECK(ev.metric(Metric::Wtp) == *r.metrics.wtp);
    CHECK(ev.metric(Metric::Leakage) == leakage(CellGeometry{}, 1.0, 27.0));
    // cached results are returned by reference and stay put
    CHECK(&ev.snm(Mode::Read) == &ev.snm(Mode::Read));
}

TEST_CASE("metric names") {
    for (Metric m : all_metrics()) CHECK(parse_metric(to_string(m)) == m);
    CHECK(std::string(unit_of(Metric::Sinm)) == "A");
    CHECK(std::string(unit_of(Metric::Rsnm)) == "V");
    CHECK_THROWS((void)parse_metric("snr"));
    CHECK(parse_sweep_param("cr") == SweepParam::CellRatio);
    CHECK_THROWS((void)parse_sweep_param("width"));
}

TEST_CASE("read margin grows with the cell ratio") {
    const std::vector<double> crs{0.5, 1.0, 1.5, 2.0, 2.5};
    for (const CellGeometry& g : {CellGeometry{}, nine_t()}) {
        const SweepTable t = parameter_sweep(g, SweepParam::CellRatio, crs, Metric::Rsnm, 1.0, 27.0);
        REQUIRE(t.rows.size() == crs.size());
        for (std::size_t k = 1; k < t.rows.size(); ++k) {
            REQUIRE(t.rows[k].value);
            CHECK(*t.rows[k].value > *t.rows[k - 1].value);
        }
    }
}

TEST_CASE("write margin shrinks with the pull-up ratio") {
    const SweepTable t = parameter_sweep(CellGeometry{}, SweepParam::PullupRatio, {0.5, 1.0, 1.5, 2.0},
                                         Metric::Wsnm, 1.0, 27.0);
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
        CHECK(*t.rows[k].value < *t.rows[k - 1].value);
    }
}

TEST_CASE("margins do not grow as the supply drops") {
    const std::vector<double> vdds{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
    for (Metric m : {Metric::Hsnm, Metric::Rsnm}) {
        const SweepTable t = parameter_sweep(CellGeometry{}, SweepParam::Vdd, vdds, m, 1.0, 27.0);
        for (std::size_t k = 1; k < t.rows.size(); ++k) {
            CHECK(*t.rows[k].value <= *t.rows[k - 1].value);
        }
    }
}

TEST_CASE("sweep failures are recorded per row") {
    // the voltage margin is undefined once a starved cell loses bistability
    const SweepTable t = parameter_sweep(CellGeometry{}, SweepParam::Vdd, {1.0, 0.05},
                                         Metric::Svnm, 1.0, 27.0);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].value);
    CHECK_FALSE(t.rows[1].value);
    CHECK_FALSE(t.rows[1].error.empty());
    CHECK_THROWS_AS((void)parameter_sweep(CellGeometry{}, SweepParam::CellRatio, {-1.0}, Metric::Hsnm,
                                          1.0, 27.0),
                    std::invalid_argument);
}

TEST_CASE("mismatch draws follow the area law") {
    const Circuit small = build_cell({});
    CellGeometry big_geom;
    big_geom.access_w *= 2.0;
    big_geom.length *= 2.0;
    big_geom.read_branch_w *= 2.0;
    const Circuit big = build_cell(big_geom);

    std::vector<double> a;
    std::vector<double> b;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        a.push_back(draw_vto_shifts(small, 2.5e-9, 99, k)[0]);
        b.push_back(draw_vto_shifts(big, 2.5e-9, 99, k)[0]);
    }
    const double expected = 2.5e-9 / std::sqrt(small.mosfets[0].w * small.mosfets[0].l);
    CHECK(std::abs(sample_stddev(a) / expected - 1.0) <= 0.05);
    CHECK(std::abs(sample_stddev(b) / sample_stddev(a) - 0.5) <= 0.05 * 0.5);
}

TEST_CASE("mismatch draws are reproducible and independent per index") {
    const Circuit c = build_cell({});
    CHECK(draw_vto_shifts(c, 2.5e-9, 5, 17) == draw_vto_shifts(c, 2.5e-9, 5, 17));
    CHECK(draw_vto_shifts(c, 2.5e-9, 5, 17) != draw_vto_shifts(c, 2.5e-9, 5, 18));
    CHECK(draw_vto_shifts(c, 2.5e-9, 5, 17) != draw_vto_shifts(c, 2.5e-9, 6, 17));
    for (double s : draw_vto_shifts(c, 0.0, 5, 17)) CHECK(s == 0.0);

    const Circuit shifted = apply_vto_shifts(c, std::vector<double>(c.mosfets.size(), 0.01));
    CHECK(shifted.models.size() == c.models.size() + c.mosfets.size());
    CHECK_NOTHROW(shifted.validate());
}

TEST_CASE("Monte Carlo is bit-reproducible across thread counts") {
    McSpec s;
    s.n_samples = 12;
    s.seed = 2024;
    s.threads = 1;
    const McResult one = monte_carlo(s);
    s.threads = 4;
    const McResult four = monte_carlo(s);
    CHECK(one == four);
    CHECK(one.samples.size() == 12);
    CHECK(one.stats[0].count <= 12);
}

TEST_CASE("zero mismatch reproduces the nominal cell exactly") {
    McSpec s;
    s.n_samples = 3;
    s.avt = 0.0;
    s.metrics = {Metric::Rsnm, Metric::Svnm};
    const McResult r = monte_carlo(s);
    CellEvaluator nominal(build_cell({}), 1.0, 27.0);
    for (const McSample& smp : r.samples) {
        CHECK(*smp.values[0] == nominal.metric(Metric::Rsnm));
        CHECK(*smp.values[1] == nominal.metric(Metric::Svnm));
        CHECK_FALSE(smp.read_fail);
        CHECK_FALSE(smp.write_fail);
    }
    CHECK(r.stats[0].stddev == 0.0);
    CHECK(r.read_failure_rate() == 0.0);
}

TEST_CASE("Monte Carlo settings validation") {
    McSpec s;
    s.n_samples = 0;
    CHECK_THROWS(s.validate());
    s = {};
    s.avt = -1.0;
    CHECK_THROWS(s.validate());
    s = {};
    s.metrics.clear();
    CHECK_THROWS(s.validate());
}
