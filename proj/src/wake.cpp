#include "latentflow/wake.hpp"

#include <cmath>
#include <stdexcept>

#include "latentflow/rng.hpp"

namespace lf::wake {

void WakeConfig::validate() const {
    if (grid_h < 8 || grid_w < 8)
        throw std::invalid_argument("WakeConfig: grid_h and grid_w must be >= 8");
    if (!(f0 > 0.0)) throw std::invalid_argument("WakeConfig: f0 must be > 0");
    if (!(r_c > 0.0)) throw std::invalid_argument("WakeConfig: r_c must be > 0");
    if (n_taps < 2) throw std::invalid_argument("WakeConfig: n_taps must be >= 2");
    if (!std::isfinite(x0) || !std::isfinite(x1) || !std::isfinite(y0) || !std::isfinite(y1) ||
        x1 <= x0 || y1 <= y0)
        throw std::invalid_argument("WakeConfig: invalid domain extents");
    if (!(wavelength > 0.0)) throw std::invalid_argument("WakeConfig: wavelength must be > 0");
    if (noise_std < 0.0) throw std::invalid_argument("WakeConfig: noise_std must be >= 0");
    if (!tap_weights.empty() && tap_weights.size() != n_taps)
        throw std::invalid_argument("WakeConfig: tap_weights length does not match n_taps");
    if (!tap_normals_y.empty() && tap_normals_y.size() != n_taps)
        throw std::invalid_argument("WakeConfig: tap_normals_y length does not match n_taps");
}

double WakeConfig::tap_angle(std::size_t i) const {
    return 2.0 * M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(n_taps);
}

void WakeConfig::ensure_tap_layout() {
    if (tap_weights.empty()) {
        tap_weights.assign(n_taps, 2.0 / static_cast<double>(n_taps));
    }
    if (tap_normals_y.empty()) {
        tap_normals_y.resize(n_taps);
        for (std::size_t i = 0; i < n_taps; ++i) tap_normals_y[i] = std::sin(tap_angle(i));
    }
}

namespace {

// Lamb-Oseen-style azimuthal profile: u_theta = gamma/(2 pi r) (1 - exp(-r^2/rc^2)).
inline void add_vortex(double dx, double dy, double gamma, double rc2, double& u, double& v) {
    const double r2 = dx * dx + dy * dy;
    if (r2 < 1e-30) return;
    const double factor = gamma / (2.0 * M_PI) * (1.0 - std::exp(-r2 / rc2)) / r2;
    u += -factor * dy;
    v += factor * dx;
}

}  // namespace

void velocity_at(const WakeConfig& cfg, double x, double y, double t, double& u, double& v) {
    const double lam = cfg.wavelength;
    // Phase in [0, 1): the street advects one spacing per shedding period, so
    // the vortex set is exactly periodic in t with period 1/f0.
    const double phase = cfg.f0 * t + cfg.phase0 / (2.0 * M_PI);
    const double shift = (phase - std::floor(phase)) * lam;
    const double rc2 = cfg.r_c * cfg.r_c;
    const double hh = 0.5 * cfg.row_offset;

    u = cfg.u_inf;
    v = 0.0;
    // Fixed index window relative to the domain; the wrap in `shift` keeps the
    // vortex set identical across periods.
    const long long m_lo = static_cast<long long>(std::floor((cfg.x0 - 5.0 * lam) / lam)) - 1;
    const long long m_hi = static_cast<long long>(std::ceil((cfg.x1 + 5.0 * lam) / lam)) + 1;
    for (long long m = m_lo; m <= m_hi; ++m) {
        const double xu = static_cast<double>(m) * lam + shift;          // upper row, +gamma
        const double xl = xu + 0.5 * lam;                                // lower row, -gamma
        add_vortex(x - xu, y - hh, cfg.gamma, rc2, u, v);
        add_vortex(x - xl, y + hh, -cfg.gamma, rc2, u, v);
    }
}

FlowSnapshot generate_field(const WakeConfig& cfg, double t) {
    cfg.validate();
    if (t < 0.0) throw std::invalid_argument("generate_field: t must be >= 0");
    FlowSnapshot snap;
    snap.t = t;
    snap.h = cfg.grid_h;
    snap.w = cfg.grid_w;
    snap.u.resize(cfg.grid_h * cfg.grid_w);
    snap.v.resize(cfg.grid_h * cfg.grid_w);
    const double dy = (cfg.y1 - cfg.y0) / static_cast<double>(cfg.grid_h - 1);
    const double dx = (cfg.x1 - cfg.x0) / static_cast<double>(cfg.grid_w - 1);
    for (std::size_t r = 0; r < cfg.grid_h; ++r) {
        const double y = cfg.y0 + static_cast<double>(r) * dy;
        for (std::size_t c = 0; c < cfg.grid_w; ++c) {
            const double x = cfg.x0 + static_cast<double>(c) * dx;
            double u, v;
            velocity_at(cfg, x, y, t, u, v);
            snap.u[r * cfg.grid_w + c] = static_cast<float>(u);
            snap.v[r * cfg.grid_w + c] = static_cast<float>(v);
        }
    }
    return snap;
}

double pressure_mean(const WakeConfig& cfg, std::size_t tap) {
    return -0.5 - 0.4 * std::cos(cfg.tap_angle(tap));
}

double pressure_amp1(const WakeConfig& cfg, std::size_t tap) {
    return 0.6 + 0.2 * std::cos(cfg.tap_angle(tap));
}

double pressure_amp2(const WakeConfig& cfg, std::size_t) {
    return 0.15;  // tap-independent so the lift series stays a pure f0 tone
}

double pressure_phase(const WakeConfig& cfg, std::size_t tap) {
    return cfg.tap_angle(tap) + cfg.phase0;
}

PressureSample sample_pressure(const WakeConfig& cfg, double t, std::uint64_t sample_index,
                               const std::string& stream) {
    cfg.validate();
    if (t < 0.0) throw std::invalid_argument("sample_pressure: t must be >= 0");
    const CounterRng noise(cfg.seed, stream);
    PressureSample s;
    s.t = t;
    s.cp.resize(cfg.n_taps);
    const double w1 = 2.0 * M_PI * cfg.f0 * t;
    for (std::size_t i = 0; i < cfg.n_taps; ++i) {
        const double phi = pressure_phase(cfg, i);
        double cp = pressure_mean(cfg, i) + pressure_amp1(cfg, i) * std::sin(w1 + phi) +
                    pressure_amp2(cfg, i) * std::sin(2.0 * w1 + 2.0 * phi);
        if (cfg.noise_std > 0.0)
            cp += cfg.noise_std *
                  noise.normal(sample_index * static_cast<std::uint64_t>(cfg.n_taps) + i);
        s.cp[i] = cp;
    }
    return s;
}

std::pair<SampledSeries, SampledSeries> build_dataset(const WakeConfig& cfg, double low_rate,
                                                      double high_rate, std::size_t n_low,
                                                      std::size_t n_high) {
    cfg.validate();
    if (!(low_rate > 0.0) || !(high_rate > 0.0))
        throw std::invalid_argument("build_dataset: rates must be > 0");
    if (!(low_rate < high_rate))
        throw std::invalid_argument("build_dataset: low_rate must be < high_rate");

    SampledSeries low, high;
    low.rate = low_rate;
    high.rate = high_rate;
    low.snapshots.resize(n_low);
    low.pressures.resize(n_low);
    high.pressures.resize(n_high);

#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(n_low); ++k) {
        const double t = static_cast<double>(k) / low_rate;
        low.snapshots[static_cast<std::size_t>(k)] = generate_field(cfg, t);
        low.pressures[static_cast<std::size_t>(k)] =
            sample_pressure(cfg, t, static_cast<std::uint64_t>(k), "pressure-low");
    }
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(n_high); ++k) {
        const double t = static_cast<double>(k) / high_rate;
        high.pressures[static_cast<std::size_t>(k)] =
            sample_pressure(cfg, t, static_cast<std::uint64_t>(k), "pressure-high");
    }
    return {std::move(low), std::move(high)};
}

}  // namespace lf::wake
