#include "latentflow/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lf::eval {

void NormalizationStats::validate() const {
    if (!(u_std > 0.0) || !(v_std > 0.0))
        throw std::invalid_argument("NormalizationStats: std must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("NormalizationStats: rho must be > 0");
    if (!(u_ref > 0.0)) throw std::invalid_argument("NormalizationStats: u_ref must be > 0");
}

NormalizationStats compute_stats(const std::vector<wake::FlowSnapshot>& series) {
    if (series.empty()) throw std::invalid_argument("compute_stats: empty series");
    NormalizationStats s;
    double su = 0.0, sv = 0.0, su2 = 0.0, sv2 = 0.0;
    std::size_t n = 0;
    for (const auto& snap : series) {
        for (float x : snap.u) {
            su += x;
            su2 += static_cast<double>(x) * x;
        }
        for (float x : snap.v) {
            sv += x;
            sv2 += static_cast<double>(x) * x;
        }
        n += snap.u.size();
    }
    const double nn = static_cast<double>(n);
    s.u_mean = su / nn;
    s.v_mean = sv / nn;
    s.u_std = std::sqrt(std::max(su2 / nn - s.u_mean * s.u_mean, 1e-12));
    s.v_std = std::sqrt(std::max(sv2 / nn - s.v_mean * s.v_mean, 1e-12));
    return s;
}

double pressure_to_cp(double p_pa, const NormalizationStats& stats) {
    stats.validate();
    return p_pa / (0.5 * stats.rho * stats.u_ref * stats.u_ref);
}

double cp_to_pressure(double cp, const NormalizationStats& stats) {
    stats.validate();
    return cp * 0.5 * stats.rho * stats.u_ref * stats.u_ref;
}

double lift_coefficient(const wake::PressureSample& p, const std::vector<double>& tap_weights,
                        const std::vector<double>& tap_normals_y) {
    if (p.cp.size() != tap_weights.size() || p.cp.size() != tap_normals_y.size())
        throw std::invalid_argument("lift_coefficient: tap count mismatch (" +
                                    std::to_string(p.cp.size()) + " taps vs " +
                                    std::to_string(tap_weights.size()) + " weights, " +
                                    std::to_string(tap_normals_y.size()) + " normals)");
    double cl = 0.0;
    for (std::size_t i = 0; i < p.cp.size(); ++i)
        cl -= p.cp[i] * tap_weights[i] * tap_normals_y[i];
    return cl;
}

std::vector<double> lift_series(const wake::SampledSeries& series,
                                const std::vector<double>& tap_weights,
                                const std::vector<double>& tap_normals_y) {
    std::vector<double> cl;
    cl.reserve(series.pressures.size());
    for (const auto& p : series.pressures)
        cl.push_back(lift_coefficient(p, tap_weights, tap_normals_y));
    return cl;
}

std::vector<MatchReport> match_by_lift(const std::vector<double>& cl_high,
                                       const std::vector<double>& cl_low, double tol) {
    if (cl_high.empty() || cl_low.empty())
        throw std::invalid_argument("match_by_lift: empty series");
    const std::size_t hi =
        static_cast<std::size_t>(std::max_element(cl_high.begin(), cl_high.end()) -
                                 cl_high.begin());
    const double target = cl_high[hi];
    std::vector<MatchReport> out;
    for (std::size_t j = 0; j < cl_low.size(); ++j) {
        const double d = std::abs(cl_low[j] - target);
        if (d <= tol) out.push_back({hi, j, target, cl_low[j], d});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const MatchReport& a, const MatchReport& b) {
                         return a.delta_cl < b.delta_cl;
                     });
    return out;
}

namespace {

struct MeanVar {
    std::vector<double> mean, var;
};

MeanVar mean_and_var(const std::vector<wake::FlowSnapshot>& s, bool u_channel) {
    const std::size_t m = s[0].u.size();
    const std::size_t t = s.size();
    MeanVar mv;
    mv.mean.assign(m, 0.0);
    mv.var.assign(m, 0.0);
    for (const auto& snap : s) {
        const auto& ch = u_channel ? snap.u : snap.v;
        for (std::size_t i = 0; i < m; ++i) mv.mean[i] += ch[i];
    }
    for (std::size_t i = 0; i < m; ++i) mv.mean[i] /= static_cast<double>(t);
    if (t > 1) {
        for (const auto& snap : s) {
            const auto& ch = u_channel ? snap.u : snap.v;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = ch[i] - mv.mean[i];
                mv.var[i] += d * d;
            }
        }
        for (std::size_t i = 0; i < m; ++i) mv.var[i] /= static_cast<double>(t - 1);
    }
    return mv;
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b, bool& fallback) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += d * d;
        den += b[i] * b[i];
    }
    if (den == 0.0) {
        // zero ground truth: report the absolute error norm instead
        if (num > 0.0) fallback = true;
        return std::sqrt(num);
    }
    return std::sqrt(num / den);
}

}  // namespace

FieldMetrics field_metrics(const std::vector<wake::FlowSnapshot>& a,
                           const std::vector<wake::FlowSnapshot>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("field_metrics: empty series");
    if (a[0].h != b[0].h || a[0].w != b[0].w)
        throw std::invalid_argument("field_metrics: grid mismatch " + std::to_string(a[0].h) +
                                    "x" + std::to_string(a[0].w) + " vs " +
                                    std::to_string(b[0].h) + "x" + std::to_string(b[0].w));
    FieldMetrics fm;
    const MeanVar au = mean_and_var(a, true), av = mean_and_var(a, false);
    const MeanVar bu = mean_and_var(b, true), bv = mean_and_var(b, false);
    fm.mean_u_rel_l2 = rel_l2(au.mean, bu.mean, fm.absolute_fallback);
    fm.mean_v_rel_l2 = rel_l2(av.mean, bv.mean, fm.absolute_fallback);
    fm.var_u_rel_l2 = rel_l2(au.var, bu.var, fm.absolute_fallback);
    fm.var_v_rel_l2 = rel_l2(av.var, bv.var, fm.absolute_fallback);
    if (a.size() == b.size()) {
        const std::size_t m = a[0].u.size();
        fm.per_snapshot_rmse.reserve(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double du = a[j].u[i] - b[j].u[i];
                const double dv = a[j].v[i] - b[j].v[i];
                acc += du * du + dv * dv;
            }
            fm.per_snapshot_rmse.push_back(std::sqrt(acc / static_cast<double>(2 * m)));
        }
    }
    return fm;
}

}  // namespace lf::eval
