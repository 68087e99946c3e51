#pragma once

#include <cstddef>
#include <vector>

#include "latentflow/wake.hpp"

namespace lf::eval {

struct NormalizationStats {
    double u_mean = 0.0, u_std = 1.0;
    double v_mean = 0.0, v_std = 1.0;
    double rho = 1.225;    // kg/m^3
    double u_ref = 10.0;   // m/s

    void validate() const;
};

/// Per-channel standardization stats over a training series.
NormalizationStats compute_stats(const std::vector<wake::FlowSnapshot>& series);

/// Cp = p / (0.5 rho u_ref^2)
double pressure_to_cp(double p_pa, const NormalizationStats& stats);
double cp_to_pressure(double cp, const NormalizationStats& stats);

/// Discrete surface quadrature: C_l = -sum_i Cp_i w_i n_{y,i}.
double lift_coefficient(const wake::PressureSample& p, const std::vector<double>& tap_weights,
                        const std::vector<double>& tap_normals_y);

std::vector<double> lift_series(const wake::SampledSeries& series,
                                const std::vector<double>& tap_weights,
                                const std::vector<double>& tap_normals_y);

struct MatchReport {
    std::size_t high_index = 0;
    std::size_t low_index = 0;
    double cl_high = 0.0;
    double cl_low = 0.0;
    double delta_cl = 0.0;
};

/// Appendix-B style matching: find the high-rate C_l argmax, then every
/// low-rate sample within `tol` of it, sorted by |delta Cl|. An empty result
/// is not an error.
std::vector<MatchReport> match_by_lift(const std::vector<double>& cl_high,
                                       const std::vector<double>& cl_low, double tol);

struct FieldMetrics {
    double mean_u_rel_l2 = 0.0;
    double mean_v_rel_l2 = 0.0;
    double var_u_rel_l2 = 0.0;
    double var_v_rel_l2 = 0.0;
    std::vector<double> per_snapshot_rmse;  // filled when lengths match
    bool absolute_fallback = false;  // set when a ground-truth norm was zero
};

/// Relative L2 errors of time-means and per-point temporal variance maps
/// of `a` against ground truth `b`; unbiased (t-1) variance estimator.
FieldMetrics field_metrics(const std::vector<wake::FlowSnapshot>& a,
                           const std::vector<wake::FlowSnapshot>& b);

}  // namespace lf::eval
