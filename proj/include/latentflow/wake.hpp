#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lf::wake {

/// One time-stamped velocity field on the H x W grid. Row r maps to
/// y = y0 + r*(y1-y0)/(H-1), column c to x = x0 + c*(x1-x0)/(W-1).
struct FlowSnapshot {
    double t = 0.0;
    std::size_t h = 0, w = 0;
    std::vector<float> u;  // row-major H x W, m/s
    std::vector<float> v;
};

/// One time-stamped vector of tap pressure coefficients.
struct PressureSample {
    double t = 0.0;
    std::vector<double> cp;
};

/// Uniformly sampled series; pressures always present, snapshots optional.
struct SampledSeries {
    double rate = 0.0;  // Hz
    std::vector<FlowSnapshot> snapshots;
    std::vector<PressureSample> pressures;

    double dt() const { return 1.0 / rate; }
};

/// Analytic von Karman street: uniform flow plus two staggered rows of
/// Gaussian-core vortices of alternating sign, advecting with period 1/f0.
struct WakeConfig {
    std::size_t grid_h = 64;
    std::size_t grid_w = 64;
    double x0 = 0.5, x1 = 6.5;   // body-width units
    double y0 = -3.0, y1 = 3.0;
    double u_inf = 10.0;         // m/s
    double f0 = 4.0;             // shedding frequency, Hz
    double gamma = 6.0;          // vortex strength, m^2/s
    double r_c = 0.35;           // core radius
    double row_offset = 0.56;    // vertical separation between rows
    double wavelength = 2.0;     // streamwise vortex spacing
    double phase0 = 0.0;         // street phase offset at t = 0, radians
    std::size_t n_taps = 30;
    double noise_std = 0.0;      // pressure noise, dimensionless
    std::uint64_t seed = 0;

    // Tap layout: taps are parameterized by an angle around the body surface.
    // Weights and y-normals define the lift quadrature; filled by
    // default_tap_layout() when left empty.
    std::vector<double> tap_weights;
    std::vector<double> tap_normals_y;

    void validate() const;
    void ensure_tap_layout();

    double tap_angle(std::size_t i) const;
};

/// Point evaluation of the analytic velocity field.
void velocity_at(const WakeConfig& cfg, double x, double y, double t, double& u, double& v);

/// Analytic field at time t; deterministic, noise-free.
FlowSnapshot generate_field(const WakeConfig& cfg, double t);

/// Tap pressure at time t. `sample_index` keys the per-timestamp noise
/// counter so parallel and serial generation agree bit-for-bit; `stream`
/// names the noise substream ("pressure-low" / "pressure-high").
PressureSample sample_pressure(const WakeConfig& cfg, double t, std::uint64_t sample_index,
                               const std::string& stream = "pressure-low");

/// Noise-free mean/amplitude model behind sample_pressure.
double pressure_mean(const WakeConfig& cfg, std::size_t tap);
double pressure_amp1(const WakeConfig& cfg, std::size_t tap);
double pressure_amp2(const WakeConfig& cfg, std::size_t tap);
double pressure_phase(const WakeConfig& cfg, std::size_t tap);

/// Low-rate flow+pressure pairs and a high-rate pressure-only series, both
/// driven by the same street phase.
std::pair<SampledSeries, SampledSeries> build_dataset(const WakeConfig& cfg, double low_rate,
                                                      double high_rate, std::size_t n_low,
                                                      std::size_t n_high);

}  // namespace lf::wake
