#include "sramlab/analysis.hpp"

#include "sramlab/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace sramlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double require(const std::optional<double>& v, const char* name, const NCurveResult& r) {
    if (!v) {
        throw AnalysisError(std::string(name) + " undefined: read n-curve has " +
                            std::to_string(r.crossings.size()) + " crossings");
    }
    return *v;
}

// Accumulates deviations from the first defined value, so a constant metric
// has an exact mean and zero spread.
MetricStats summarize(const std::vector<McSample>& samples, std::size_t k) {
    MetricStats s;
    double ref = 0.0;
    double shifted = 0.0;
    for (const auto& smp : samples) {
        if (!smp.values[k]) continue;
        const double v = *smp.values[k];
        if (s.count == 0) {
            ref = v;
            s.min = s.max = v;
        } else {
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
        }
        ++s.count;
        shifted += v - ref;
    }
    if (s.count == 0) return s;
    s.mean = ref + shifted / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (const auto& smp : samples) {
            if (smp.values[k]) ss += (*smp.values[k] - s.mean) * (*smp.values[k] - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

McSample evaluate_sample(const McSpec& spec, const Circuit& nominal, std::size_t index) {
    const auto shifts = draw_vto_shifts(nominal, spec.avt, spec.seed, index);
    CellEvaluator ev(apply_vto_shifts(nominal, shifts), spec.vdd, spec.temperature, spec.options);

    McSample s;
    s.values.resize(spec.metrics.size());
    for (std::size_t k = 0; k < spec.metrics.size(); ++k) {
        try {
            s.values[k] = ev.metric(spec.metrics[k]);
        } catch (const ConvergenceError&) {
            s.solver_fail = true;
        } catch (const AnalysisError&) {
            // undefined for this sample; the failure criteria below decide
        }
    }

    try {
        const SnmResult& rs = ev.snm(Mode::Read);
        const NCurveResult& nc = ev.ncurve(NCurveMode::Read);
        s.read_fail = rs.snm <= 0.0 || nc.crossings.size() < 3;
        if (nc.metrics.wtp) {
            s.write_fail = *nc.metrics.wtp >= 0.0;
        } else {
            const bool goes_negative =
                std::any_of(nc.samples.points.begin(), nc.samples.points.end(),
                            [](const Point& p) { return p.y < 0.0; });
            s.write_fail = !goes_negative;
        }
    } catch (const ConvergenceError&) {
        s.solver_fail = true;
    } catch (const AnalysisError&) {
        s.read_fail = true;
    }
    if (s.solver_fail) {
        s.read_fail = true;
        s.write_fail = true;
    }
    return s;
}

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    // bitwise comparison so that NaN payloads and signed zeros count
    return std::memcmp(&*a, &*b, sizeof(double)) == 0;
}

}  // namespace

double leakage(const Circuit& cell, double vdd, double temperature, const AnalysisOptions& opts) {
    Harness h;
    h.kind = HarnessKind::Leakage;
    h.vdd = vdd;
    h.temperature = temperature;
    const Circuit c = apply_harness(cell, h);
    return solve_op(c, opts.solver, storage_guess(vdd, true), temperature).i(src::kLeak);
}

double leakage(const CellGeometry& geom, double vdd, double temperature,
               const AnalysisOptions& opts) {
    return leakage(build_cell(geom), vdd, temperature, opts);
}

const char* to_string(Metric m) {
    switch (m) {
        case Metric::Hsnm: return "hsnm";
        case Metric::Rsnm: return "rsnm";
        case Metric::Wsnm: return "wsnm";
        case Metric::Svnm: return "svnm";
        case Metric::Sinm: return "sinm";
        case Metric::Wtv: return "wtv";
        case Metric::Wti: return "wti";
        case Metric::Spnm: return "spnm";
        case Metric::Wtp: return "wtp";
        case Metric::Leakage: return "leakage";
    }
    return "?";
}

const char* unit_of(Metric m) {
    switch (m) {
        case Metric::Hsnm:
        case Metric::Rsnm:
        case Metric::Wsnm:
        case Metric::Svnm:
        case Metric::Wtv: return "V";
        case Metric::Sinm:
        case Metric::Wti:
        case Metric::Leakage: return "A";
        case Metric::Spnm:
        case Metric::Wtp: return "W";
    }
    return "";
}

const std::vector<Metric>& all_metrics() {
    static const std::vector<Metric> all{Metric::Hsnm, Metric::Rsnm, Metric::Wsnm, Metric::Svnm,
                                         Metric::Sinm, Metric::Wtv,  Metric::Wti,  Metric::Spnm,
                                         Metric::Wtp,  Metric::Leakage};
    return all;
}

Metric parse_metric(std::string_view text) {
    for (Metric m : all_metrics()) {
        if (text == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown metric: " + std::string(text));
}

CellEvaluator::CellEvaluator(Circuit cell, double vdd, double temperature, AnalysisOptions opts)
    : cell_(std::move(cell)), vdd_(vdd), temperature_(temperature), opts_(std::move(opts)) {}

const ButterflyResult& CellEvaluator::butterfly_curves(Mode mode) {
    auto it = butterflies_.find(mode);
    if (it == butterflies_.end()) {
        it = butterflies_.emplace(mode, butterfly(cell_, mode, vdd_, temperature_, opts_)).first;
    }
    return it->second;
}

const SnmResult& CellEvaluator::snm(Mode mode) {
    auto it = snms_.find(mode);
    if (it == snms_.end()) {
        it = snms_.emplace(mode, snm_from_butterfly(butterfly_curves(mode))).first;
    }
    return it->second;
}

const NCurveResult& CellEvaluator::ncurve(NCurveMode mode) {
    auto it = ncurves_.find(mode);
    if (it == ncurves_.end()) {
        it = ncurves_.emplace(mode, sramlab::ncurve(cell_, mode, vdd_, temperature_, opts_)).first;
    }
    return it->second;
}

double CellEvaluator::leakage() {
    if (!leakage_) leakage_ = sramlab::leakage(cell_, vdd_, temperature_, opts_);
    return *leakage_;
}

double CellEvaluator::metric(Metric m) {
    switch (m) {
        case Metric::Hsnm: return snm(Mode::Hold).snm;
        case Metric::Rsnm: return snm(Mode::Read).snm;
        case Metric::Wsnm: return snm(Mode::Write0).snm;
        case Metric::Leakage: return leakage();
        default: break;
    }
    const NCurveResult& r = ncurve(NCurveMode::Read);
    switch (m) {
        case Metric::Svnm: return require(r.metrics.svnm, "svnm", r);
        case Metric::Sinm: return require(r.metrics.sinm, "sinm", r);
        case Metric::Wtv: return require(r.metrics.wtv, "wtv", r);
        case Metric::Wti: return require(r.metrics.wti, "wti", r);
        case Metric::Spnm: return require(r.metrics.spnm, "spnm", r);
        case Metric::Wtp: return require(r.metrics.wtp, "wtp", r);
        default: break;
    }
    throw AnalysisError("unhandled metric");
}

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::CellRatio: return "cr";
        case SweepParam::PullupRatio: return "pr";
        case SweepParam::Vdd: return "vdd";
        case SweepParam::Temperature: return "temp";
    }
    return "?";
}

SweepParam parse_sweep_param(std::string_view text) {
    if (text == "cr") return SweepParam::CellRatio;
    if (text == "pr") return SweepParam::PullupRatio;
    if (text == "vdd") return SweepParam::Vdd;
    if (text == "temp") return SweepParam::Temperature;
    throw std::invalid_argument("unknown sweep parameter: " + std::string(text));
}

SweepTable parameter_sweep(const CellGeometry& geom, SweepParam param,
                           const std::vector<double>& values, Metric metric, double vdd,
                           double temperature, const AnalysisOptions& opts) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    for (double v : values) {
        const bool ok = param == SweepParam::Temperature ? std::isfinite(v) && v > -273.15
                                                         : std::isfinite(v) && v > 0.0;
        if (!ok) {
            throw std::invalid_argument(std::string("invalid ") + to_string(param) +
                                        " value " + std::to_string(v));
        }
    }
    geom.validate();

    SweepTable t;
    t.param = param;
    t.metric = metric;
    for (double v : values) {
        CellGeometry g = geom;
        double row_vdd = vdd;
        double row_temp = temperature;
        switch (param) {
            case SweepParam::CellRatio: g.cell_ratio = v; break;
            case SweepParam::PullupRatio: g.pullup_ratio = v; break;
            case SweepParam::Vdd: row_vdd = v; break;
            case SweepParam::Temperature: row_temp = v; break;
        }
        SweepRow row;
        row.param = v;
        try {
            CellEvaluator ev(build_cell(g), row_vdd, row_temp, opts);
            row.value = ev.metric(metric);
        } catch (const Error& e) {
            row.error = e.what();
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void McSpec::validate() const {
    geometry.validate();
    if (n_samples < 1) throw std::invalid_argument("monte carlo needs at least one sample");
    if (!(avt >= 0.0) || !std::isfinite(avt)) throw std::invalid_argument("avt must be >= 0");
    if (!(vdd > 0.0)) throw std::invalid_argument("vdd must be positive");
    if (metrics.empty()) throw std::invalid_argument("monte carlo needs at least one metric");
    options.solver.validate();
}

double McResult::read_failure_rate() const {
    return samples.empty() ? 0.0
                           : static_cast<double>(read_failures) / static_cast<double>(samples.size());
}

double McResult::write_failure_rate() const {
    return samples.empty() ? 0.0
                           : static_cast<double>(write_failures) / static_cast<double>(samples.size());
}

bool McResult::operator==(const McResult& o) const {
    if (metrics != o.metrics || samples.size() != o.samples.size()) return false;
    if (read_failures != o.read_failures || write_failures != o.write_failures ||
        solver_failures != o.solver_failures) {
        return false;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = o.samples[i];
        if (a.read_fail != b.read_fail || a.write_fail != b.write_fail ||
            a.solver_fail != b.solver_fail || a.values.size() != b.values.size()) {
            return false;
        }
        for (std::size_t k = 0; k < a.values.size(); ++k) {
            if (!same_optional(a.values[k], b.values[k])) return false;
        }
    }
    for (std::size_t k = 0; k < stats.size(); ++k) {
        const auto& a = stats[k];
        const auto& b = o.stats[k];
        if (a.count != b.count || std::memcmp(&a.mean, &b.mean, sizeof(double)) != 0 ||
            std::memcmp(&a.stddev, &b.stddev, sizeof(double)) != 0 ||
            std::memcmp(&a.min, &b.min, sizeof(double)) != 0 ||
            std::memcmp(&a.max, &b.max, sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

std::vector<double> draw_vto_shifts(const Circuit& cell, double avt, std::uint64_t seed,
                                    std::uint64_t index) {
    std::mt19937_64 rng(substream_seed(seed, index));
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out;
    out.reserve(cell.mosfets.size());
    for (const auto& m : cell.mosfets) {
        // Always consume a draw so the stream layout does not depend on avt.
        const double z = unit(rng);
        out.push_back(avt == 0.0 ? 0.0 : z * avt / std::sqrt(m.w * m.l));
    }
    return out;
}

Circuit apply_vto_shifts(const Circuit& cell, const std::vector<double>& shifts) {
    if (shifts.size() != cell.mosfets.size()) {
        throw std::invalid_argument("one threshold shift per transistor required");
    }
    Circuit c = cell;
    for (std::size_t k = 0; k < c.mosfets.size(); ++k) {
        auto& m = c.mosfets[k];
        const auto it = cell.models.find(m.model);
        if (it == cell.models.end()) throw CircuitError("unknown model " + m.model);
        DeviceParams p = it->second;
        p.vto += shifts[k];
        const std::string name = m.model + "_" + m.name;
        c.models[name] = p;
        m.model = name;
    }
    return c;
}

McResult monte_carlo(const McSpec& spec) {
    spec.validate();
    const Circuit nominal = build_cell(spec.geometry);

    McResult r;
    r.metrics = spec.metrics;
    r.samples.resize(spec.n_samples);

    unsigned threads = spec.threads == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                         : spec.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.n_samples));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::size_t i = next.fetch_add(1); i < spec.n_samples; i = next.fetch_add(1)) {
                r.samples[i] = evaluate_sample(spec, nominal, i);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(spec.n_samples);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& s : r.samples) {
        r.read_failures += s.read_fail ? 1 : 0;
        r.write_failures += s.write_fail ? 1 : 0;
        r.solver_failures += s.solver_fail ? 1 : 0;
    }
    for (std::size_t k = 0; k < spec.metrics.size(); ++k) r.stats.push_back(summarize(r.samples, k));
    return r;
}

}  // namespace sramlab
