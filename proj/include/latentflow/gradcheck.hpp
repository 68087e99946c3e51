#pragma once

#include <functional>
#include <string>

#include "latentflow/adam.hpp"

namespace lf::nn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    std::size_t checked = 0;

    bool passes(double tol) const { return max_rel_err < tol; }
};

/// Central finite differences against analytic gradients, at double precision.
///
/// `compute_grads` must zero the gradient buffers and run a full forward +
/// backward pass; `loss` must run a fresh forward pass and return the scalar.
/// Tensors to differentiate against (parameters or inputs) are whatever was
/// registered in `ps`. Failures are reported, never thrown.
inline GradCheckReport grad_check(ParamStore<double>& ps,
                                  const std::function<double()>& loss,
                                  const std::function<void()>& compute_grads,
                                  double h = 1e-4) {
    compute_grads();
    GradCheckReport report;
    for (auto& e : ps.entries()) {
        for (std::size_t i = 0; i < e.value->numel(); ++i) {
            const double saved = (*e.value)[i];
            (*e.value)[i] = saved + h;
            const double lp = loss();
            (*e.value)[i] = saved - h;
            const double lm = loss();
            (*e.value)[i] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double analytic = (*e.grad)[i];
            const double denom = std::max({1e-6, std::abs(numeric), std::abs(analytic)});
            const double rel = std::abs(numeric - analytic) / denom;
            ++report.checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_param = e.name;
                report.worst_index = i;
            }
        }
    }
    return report;
}

}  // namespace lf::nn
