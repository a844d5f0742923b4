#include "cvgauss/homodyne.hpp"

#include "cvgauss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace cvgauss {
namespace {

constexpr std::size_t kChunkSize = 1u << 16;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based substream for one chunk: output does not depend on how
// chunks are scheduled across threads.
std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(chunk + 1)));
}

template <class Fn>
void for_each_chunk(std::size_t n_samples, Fn&& fn) {
    const std::size_t n_chunks = (n_samples + kChunkSize - 1) / kChunkSize;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min<std::size_t>(hw, n_chunks);
    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t] {
            for (std::size_t c = t; c < n_chunks; c += n_threads) fn(c);
        });
    }
}

HomodyneTrace sample_trace(const SingleModeCM& m, const NoiseModel& noise, std::size_t n_samples,
                           std::uint64_t seed) {
    noise.validate();
    if (n_samples == 0) throw InvalidArgument("a homodyne trace needs at least one sample");
    if (!m.is_physical()) throw UnphysicalState("cannot simulate homodyne data of an unphysical state");

    HomodyneTrace trace;
    trace.samples.resize(n_samples);
    const double gain = std::sqrt(noise.eta);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n_samples);
    for_each_chunk(n_samples, [&](std::size_t chunk) {
        auto engine = chunk_engine(seed, chunk);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t begin = chunk * kChunkSize;
        const std::size_t end = std::min(n_samples, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            const double theta = step * static_cast<double>(i);
            const double mean = gain * (m.mean_x * std::cos(theta) + m.mean_y * std::sin(theta));
            const double sd = std::sqrt(measured_variance(m, noise, theta));
            trace.samples[i] = {theta, mean + sd * normal(engine)};
        }
    });
    trace.meta.n_samples = n_samples;
    trace.meta.eta = noise.eta;
    trace.meta.v_el = noise.v_el;
    trace.meta.electronic_noise_db =
        noise.v_el > 0.0 ? -10.0 * std::log10(noise.v_el / kVacuumVariance)
                         : std::numeric_limits<double>::infinity();
    trace.meta.seed = seed;
    return trace;
}

HomodyneTrace perturb_phases(const HomodyneTrace& trace, double rms, std::uint64_t seed, bool common) {
    if (!(rms >= 0.0)) throw InvalidArgument("phase jitter rms must be non-negative");
    HomodyneTrace out = trace;
    if (rms == 0.0) return out;
    const double two_pi = 2.0 * std::numbers::pi;
    if (common) {
        auto engine = chunk_engine(seed, 0);
        std::normal_distribution<double> normal(0.0, rms);
        const double offset = normal(engine);
        for (auto& s : out.samples) s.theta = std::fmod(s.theta + offset + two_pi, two_pi);
    } else {
        for_each_chunk(out.samples.size(), [&](std::size_t chunk) {
            auto engine = chunk_engine(seed, chunk);
            std::normal_distribution<double> normal(0.0, rms);
            const std::size_t begin = chunk * kChunkSize;
            const std::size_t end = std::min(out.samples.size(), begin + kChunkSize);
            for (std::size_t i = begin; i < end; ++i) {
                out.samples[i].theta = std::fmod(out.samples[i].theta + normal(engine) + two_pi, two_pi);
            }
        });
    }
    out.meta.phase_jitter = std::hypot(trace.meta.phase_jitter, rms);
    return out;
}

}  // namespace

double electronic_variance_from_db(double db_below_shot) {
    if (std::isnan(db_below_shot) || db_below_shot < 0.0) {
        throw InvalidArgument("electronic noise must be given in dB below shot noise (>= 0)");
    }
    if (std::isinf(db_below_shot)) return 0.0;
    return kVacuumVariance * std::pow(10.0, -db_below_shot / 10.0);
}

NoiseModel NoiseModel::from_db(double eta, double db_below_shot) {
    NoiseModel n{eta, electronic_variance_from_db(db_below_shot)};
    n.validate();
    return n;
}

void NoiseModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw InvalidArgument("detection efficiency must lie in (0, 1], got " + std::to_string(eta));
    }
    if (!(v_el >= 0.0)) throw InvalidArgument("electronic noise variance must be non-negative");
}

std::string TraceMeta::mode_name() const { return mode ? std::string(to_string(*mode)) : "vacuum"; }

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : stream) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ splitmix64(h));
}

double measured_variance(const SingleModeCM& m, const NoiseModel& noise, double theta) {
    return noise.eta * quadrature_variance(m, theta) + 0.5 * (1.0 - noise.eta) + noise.v_el;
}

HomodyneTrace simulate_trace(const CovarianceMatrix& sigma, ModeLabel mode, const NoiseModel& noise,
                             std::size_t n_samples, std::uint64_t seed) {
    if (!is_physical(sigma)) throw UnphysicalState("cannot simulate homodyne data of an unphysical state");
    HomodyneTrace trace = sample_trace(mode_cm(sigma, mode), noise, n_samples, seed);
    trace.meta.mode = mode;
    return trace;
}

HomodyneTrace simulate_single_mode_trace(const SingleModeCM& m, const NoiseModel& noise,
                                         std::size_t n_samples, std::uint64_t seed) {
    return sample_trace(m, noise, n_samples, seed);
}

HomodyneTrace simulate_vacuum_trace(const NoiseModel& noise, std::size_t n_samples, std::uint64_t seed) {
    return sample_trace(SingleModeCM{}, noise, n_samples, seed);
}

HomodyneTrace inject_phase_jitter(const HomodyneTrace& trace, double rms, std::uint64_t seed) {
    return perturb_phases(trace, rms, seed, false);
}

HomodyneTrace inject_phase_offset(const HomodyneTrace& trace, double rms, std::uint64_t seed) {
    return perturb_phases(trace, rms, seed, true);
}

}  // namespace cvgauss
