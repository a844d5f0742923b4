#include "cvgauss/tomography.hpp"

#include "cvgauss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace cvgauss {
namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct KernelStat {
    double mean = 0.0;
    double error = 0.0;  // standard error of the mean
};

// Two-pass mean and standard error of K kernels evaluated per sample.
template <std::size_t K, class Kernel>
std::array<KernelStat, K> kernel_statistics(const std::vector<HomodyneSample>& samples, Kernel&& kernel) {
    std::array<CompensatedSum, K> sums{};
    for (const auto& s : samples) {
        const std::array<double, K> k = kernel(s);
        for (std::size_t j = 0; j < K; ++j) sums[j].add(k[j]);
    }
    const double n = static_cast<double>(samples.size());
    std::array<double, K> means{};
    for (std::size_t j = 0; j < K; ++j) means[j] = sums[j].value() / n;

    std::array<CompensatedSum, K> squares{};
    for (const auto& s : samples) {
        const std::array<double, K> k = kernel(s);
        for (std::size_t j = 0; j < K; ++j) {
            const double d = k[j] - means[j];
            squares[j].add(d * d);
        }
    }
    std::array<KernelStat, K> out{};
    for (std::size_t j = 0; j < K; ++j) {
        const double var = n > 1.0 ? squares[j].value() / (n - 1.0) : 0.0;
        out[j] = {means[j], std::sqrt(var / n)};
    }
    return out;
}

void check_eta(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw InvalidArgument("detection efficiency must lie in (0, 1], got " + std::to_string(eta));
    }
}

void check_uniform_phase(const HomodyneTrace& trace) {
    if (trace.samples.empty()) throw InvalidArgument("empty homodyne trace");
    const double limit = 3.0 / std::sqrt(static_cast<double>(trace.size()));
    const double nonuniformity = phase_nonuniformity(trace);
    if (nonuniformity >= limit) {
        throw InvalidArgument("LO phase not uniform over a period: |<exp(2i theta)>| = " +
                              std::to_string(nonuniformity) + " >= " + std::to_string(limit));
    }
}

Estimate compensate_second(const KernelStat& raw, double eta, double v_el) {
    return {(raw.mean - 0.5 * (1.0 - eta) - v_el) / eta, raw.error / eta, ErrorSource::statistical};
}

Estimate compensate_mean(const KernelStat& raw, double eta) {
    const double g = std::sqrt(eta);
    return {raw.mean / g, raw.error / g, ErrorSource::statistical};
}

// sqrt of (d(p q))^2 for independent p, q.
double product_error(const Estimate& p, const Estimate& q) {
    return std::hypot(q.value * p.error, p.value * q.error);
}

struct Term {
    ModeLabel mode;
    bool y;  // <y^2> rather than <x^2>
    double coef;
};

const ModeMoments& lookup(const std::map<ModeLabel, ModeMoments>& modes, ModeLabel mode) {
    const auto it = modes.find(mode);
    if (it == modes.end()) {
        throw InvalidArgument("missing moments for mode " + std::string(to_string(mode)));
    }
    return it->second;
}

}  // namespace

std::string_view to_string(ErrorSource source) {
    switch (source) {
        case ErrorSource::statistical: return "statistical";
        case ErrorSource::phase_jitter: return "phase-jitter";
        case ErrorSource::combined: return "combined";
    }
    return "?";
}

double calibration_scale(const HomodyneTrace& vacuum_trace) {
    if (vacuum_trace.samples.empty()) throw InvalidArgument("empty vacuum trace");
    const auto stat = kernel_statistics<2>(vacuum_trace.samples, [](const HomodyneSample& s) {
        return std::array<double, 2>{s.x, s.x * s.x};
    });
    const double variance = stat[1].mean - stat[0].mean * stat[0].mean;
    const double v_el = vacuum_trace.meta.v_el;
    if (!(variance > v_el)) {
        throw InvalidArgument("degenerate calibration: vacuum variance " + std::to_string(variance) +
                              " does not exceed the electronic noise " + std::to_string(v_el));
    }
    return std::sqrt((kVacuumVariance + v_el) / variance);
}

HomodyneTrace calibrate(const HomodyneTrace& trace, const HomodyneTrace& vacuum_trace) {
    if (std::abs(trace.meta.eta - vacuum_trace.meta.eta) > 1e-12 ||
        std::abs(trace.meta.v_el - vacuum_trace.meta.v_el) > 1e-12) {
        throw InvalidArgument("signal and vacuum traces were taken with different noise models");
    }
    const double scale = calibration_scale(vacuum_trace);
    HomodyneTrace out = trace;
    for (auto& s : out.samples) s.x *= scale;
    out.meta.calibration_scale = trace.meta.calibration_scale * scale;
    return out;
}

GaussianityReport kurtosis_check(const HomodyneTrace& trace, int n_phase_bins) {
    if (n_phase_bins < 1) throw InvalidArgument("kurtosis_check needs at least one phase bin");
    const double two_pi = 2.0 * std::numbers::pi;
    auto bin_of = [&](double theta) {
        double t = std::fmod(theta, two_pi);
        if (t < 0.0) t += two_pi;
        return std::min(n_phase_bins - 1, static_cast<int>(t / two_pi * n_phase_bins));
    };
    std::vector<CompensatedSum> sum(n_phase_bins);
    std::vector<std::size_t> count(n_phase_bins, 0);
    for (const auto& s : trace.samples) {
        const int b = bin_of(s.theta);
        sum[b].add(s.x);
        ++count[b];
    }
    std::vector<double> mean(n_phase_bins);
    for (int b = 0; b < n_phase_bins; ++b) {
        if (count[b] == 0) throw InvalidArgument("phase bin " + std::to_string(b) + " is empty");
        mean[b] = sum[b].value() / static_cast<double>(count[b]);
    }
    std::vector<CompensatedSum> m2(n_phase_bins), m4(n_phase_bins);
    for (const auto& s : trace.samples) {
        const int b = bin_of(s.theta);
        const double d2 = (s.x - mean[b]) * (s.x - mean[b]);
        m2[b].add(d2);
        m4[b].add(d2 * d2);
    }
    GaussianityReport report;
    for (int b = 0; b < n_phase_bins; ++b) {
        const double n = static_cast<double>(count[b]);
        const double v2 = m2[b].value() / n;
        const double v4 = m4[b].value() / n;
        BinKurtosis k;
        k.bin = b;
        k.count = count[b];
        k.excess_kurtosis = v2 > 0.0 ? v4 / (v2 * v2) - 3.0 : 0.0;
        k.threshold = 5.0 * std::sqrt(24.0 / n);
        k.pass = std::abs(k.excess_kurtosis) < k.threshold;
        report.pass = report.pass && k.pass;
        report.worst_ratio = std::max(report.worst_ratio, std::abs(k.excess_kurtosis) / k.threshold);
        report.bins.push_back(k);
    }
    return report;
}

double phase_nonuniformity(const HomodyneTrace& trace) {
    if (trace.samples.empty()) return 0.0;
    CompensatedSum re, im;
    for (const auto& s : trace.samples) {
        re.add(std::cos(2.0 * s.theta));
        im.add(std::sin(2.0 * s.theta));
    }
    const double n = static_cast<double>(trace.size());
    return std::hypot(re.value(), im.value()) / n;
}

QuadratureMoments estimate_moments(const HomodyneTrace& trace, double phi, double eta) {
    check_eta(eta);
    check_uniform_phase(trace);
    const auto stat = kernel_statistics<2>(trace.samples, [phi](const HomodyneSample& s) {
        const double d = s.theta - phi;
        return std::array<double, 2>{2.0 * s.x * std::cos(d), s.x * s.x * (1.0 + 2.0 * std::cos(2.0 * d))};
    });
    return {compensate_mean(stat[0], eta), compensate_second(stat[1], eta, trace.meta.v_el)};
}

Estimate ModeMoments::var_x() const {
    return {second_x.value - mean_x.value * mean_x.value,
            std::hypot(second_x.error, 2.0 * mean_x.value * mean_x.error), ErrorSource::statistical};
}

Estimate ModeMoments::var_y() const {
    return {second_y.value - mean_y.value * mean_y.value,
            std::hypot(second_y.error, 2.0 * mean_y.value * mean_y.error), ErrorSource::statistical};
}

SingleModeCM ModeMoments::cm() const {
    return {var_x().value, var_y().value, cov_xy.value, mean_x.value, mean_y.value};
}

ModeMoments reconstruct_single_mode(const HomodyneTrace& trace, double eta) {
    check_eta(eta);
    check_uniform_phase(trace);
    // Kernels: <x>, <y>, <x^2>, <y^2>, (<z^2> - <t^2>)/2.
    const auto stat = kernel_statistics<5>(trace.samples, [](const HomodyneSample& s) {
        const double c = std::cos(s.theta);
        const double sn = std::sin(s.theta);
        const double c2 = c * c - sn * sn;
        const double s2 = 2.0 * sn * c;
        const double xx = s.x * s.x;
        return std::array<double, 5>{2.0 * s.x * c, 2.0 * s.x * sn, xx * (1.0 + 2.0 * c2),
                                     xx * (1.0 - 2.0 * c2), 2.0 * xx * s2};
    });
    ModeMoments m;
    m.n_samples = trace.size();
    m.mean_x = compensate_mean(stat[0], eta);
    m.mean_y = compensate_mean(stat[1], eta);
    m.second_x = compensate_second(stat[2], eta, trace.meta.v_el);
    m.second_y = compensate_second(stat[3], eta, trace.meta.v_el);
    // Noise offsets cancel in the z/t difference.
    const Estimate zt{stat[4].mean / eta, stat[4].error / eta, ErrorSource::statistical};
    m.cov_xy = {zt.value - m.mean_x.value * m.mean_y.value,
                std::hypot(zt.error, product_error(m.mean_x, m.mean_y)), ErrorSource::statistical};
    return m;
}

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::six_mode: return "six";
        case Scheme::five_mode_drop_f: return "five-drop-f";
        case Scheme::five_mode_drop_e: return "five-drop-e";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
    for (Scheme s : {Scheme::six_mode, Scheme::five_mode_drop_f, Scheme::five_mode_drop_e}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::vector<ModeLabel> required_modes(Scheme scheme) {
    using enum ModeLabel;
    switch (scheme) {
        case Scheme::six_mode: return {a, b, c, d, e, f};
        case Scheme::five_mode_drop_f: return {a, b, c, d, e};
        case Scheme::five_mode_drop_e: return {a, b, c, d, f};
    }
    return {};
}

ReconstructedCM assemble_cm(const std::map<ModeLabel, ModeMoments>& modes, Scheme scheme, double phase_jitter) {
    if (!(phase_jitter >= 0.0)) throw InvalidArgument("phase jitter must be non-negative");
    for (ModeLabel m : required_modes(scheme)) lookup(modes, m);

    const ModeMoments& ma = lookup(modes, ModeLabel::a);
    const ModeMoments& mb = lookup(modes, ModeLabel::b);

    struct Entry {
        double value = 0.0;
        double stat = 0.0;
        double phase = 0.0;
    };
    // sum_k coef_k <q_k^2> - mean_p mean_q
    auto combine = [&](const std::vector<Term>& terms, const Estimate& mean_p, const Estimate& mean_q,
                       bool phase_sensitive) {
        Entry e;
        double stat_sq = 0.0;
        double phase_sq = 0.0;
        for (const Term& t : terms) {
            const ModeMoments& mm = lookup(modes, t.mode);
            const Estimate& q = t.y ? mm.second_y : mm.second_x;
            e.value += t.coef * q.value;
            stat_sq += t.coef * t.coef * q.error * q.error;
            const double dv = mm.phase_sensitivity() * phase_jitter;
            phase_sq += t.coef * t.coef * dv * dv;
        }
        e.value -= mean_p.value * mean_q.value;
        const double pe = product_error(mean_p, mean_q);
        e.stat = std::sqrt(stat_sq + pe * pe);
        e.phase = phase_sensitive ? std::sqrt(phase_sq) : 0.0;
        return e;
    };

    using enum ModeLabel;
    constexpr bool X = false, Y = true;
    std::vector<Term> t14, t23;
    switch (scheme) {
        case Scheme::six_mode:
            t14 = {{e, Y, 0.5}, {f, Y, -0.5}};
            t23 = {{f, X, 0.5}, {e, X, -0.5}};
            break;
        case Scheme::five_mode_drop_f:
            // <y_f^2> = <x_a^2> + <y_b^2> - <y_e^2>, <x_f^2> = <y_a^2> + <x_b^2> - <x_e^2>
            t14 = {{e, Y, 1.0}, {a, X, -0.5}, {b, Y, -0.5}};
            t23 = {{a, Y, 0.5}, {b, X, 0.5}, {e, X, -1.0}};
            break;
        case Scheme::five_mode_drop_e:
            // <y_e^2> = <x_a^2> + <y_b^2> - <y_f^2>, <x_e^2> = <y_a^2> + <x_b^2> - <x_f^2>
            t14 = {{a, X, 0.5}, {b, Y, 0.5}, {f, Y, -1.0}};
            t23 = {{f, X, 1.0}, {a, Y, -0.5}, {b, X, -0.5}};
            break;
    }

    const Estimate va_x = ma.var_x(), va_y = ma.var_y(), vb_x = mb.var_x(), vb_y = mb.var_y();
    const Entry s13 = combine({{c, X, 0.5}, {d, X, -0.5}}, ma.mean_x, mb.mean_x, false);
    const Entry s24 = combine({{c, Y, 0.5}, {d, Y, -0.5}}, ma.mean_y, mb.mean_y, false);
    const Entry s14 = combine(t14, ma.mean_x, mb.mean_y, true);
    const Entry s23 = combine(t23, ma.mean_y, mb.mean_x, true);

    Matrix4 value = Matrix4::Zero();
    Matrix4 stat = Matrix4::Zero();
    Matrix4 phase = Matrix4::Zero();
    auto put = [&](int i, int j, double v, double st, double ph) {
        value(i, j) = value(j, i) = v;
        stat(i, j) = stat(j, i) = st;
        phase(i, j) = phase(j, i) = ph;
    };
    put(0, 0, va_x.value, va_x.error, 0.0);
    put(1, 1, va_y.value, va_y.error, 0.0);
    put(0, 1, ma.cov_xy.value, ma.cov_xy.error, 0.0);
    put(2, 2, vb_x.value, vb_x.error, 0.0);
    put(3, 3, vb_y.value, vb_y.error, 0.0);
    put(2, 3, mb.cov_xy.value, mb.cov_xy.error, 0.0);
    put(0, 2, s13.value, s13.stat, s13.phase);
    put(1, 3, s24.value, s24.stat, s24.phase);
    put(0, 3, s14.value, s14.stat, s14.phase);
    put(1, 2, s23.value, s23.stat, s23.phase);

    ReconstructedCM out;
    out.cm = CovarianceMatrix::from_matrix(value);
    out.statistical_errors = stat;
    out.entry_errors = (stat.array().square() + phase.array().square()).sqrt().matrix();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            out.error_sources[i][j] = phase(i, j) > 0.0 ? ErrorSource::combined : ErrorSource::statistical;
        }
    }
    for (ModeLabel m : required_modes(scheme)) {
        out.mode_inventory.insert(m);
        out.moments[m] = lookup(modes, m);
    }
    out.scheme = scheme;
    out.phase_jitter = phase_jitter;
    out.physical = is_physical(out.cm);
    return out;
}

ReconstructedCM reconstruct(const std::map<ModeLabel, HomodyneTrace>& traces, const HomodyneTrace& vacuum,
                            const ReconstructionOptions& options) {
    for (ModeLabel m : required_modes(options.scheme)) {
        if (!traces.contains(m)) {
            throw InvalidArgument("scheme " + std::string(to_string(options.scheme)) +
                                  " needs a trace for mode " + std::string(to_string(m)));
        }
    }
    const double scale = calibration_scale(vacuum);
    std::map<ModeLabel, ModeMoments> moments;
    std::map<ModeLabel, GaussianityReport> gaussianity;
    for (ModeLabel m : required_modes(options.scheme)) {
        const HomodyneTrace calibrated = calibrate(traces.at(m), vacuum);
        gaussianity[m] = kurtosis_check(calibrated, options.kurtosis_bins);
        moments[m] = reconstruct_single_mode(calibrated, options.eta);
    }
    ReconstructedCM out = assemble_cm(moments, options.scheme, options.phase_jitter);
    out.gaussianity = std::move(gaussianity);
    out.calibration_scale = scale;
    return out;
}

CovarianceMatrix nearest_physical(const CovarianceMatrix& sigma) {
    if (is_physical(sigma)) return sigma;
    auto shifted = [&](double t) {
        return CovarianceMatrix::from_matrix(sigma.matrix() + t * Matrix4::Identity());
    };
    double hi = 0.5;
    while (!is_physical(shifted(hi), 0.0)) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (is_physical(shifted(mid), 0.0) ? hi : lo) = mid;
    }
    return shifted(hi);
}

}  // namespace cvgauss
