#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentflow/tensor.hpp"

namespace lf::nn {

/// Ordered registry of named parameters with their gradient buffers and Adam
/// moment state. Layers own the tensors; the store only references them.
template <typename T>
class ParamStore {
public:
    struct Entry {
        std::string name;
        Tensor<T>* value = nullptr;
        Tensor<T>* grad = nullptr;
        Tensor<T> m;  // first moment
        Tensor<T> v;  // second moment
    };

    void add(const std::string& name, Tensor<T>* value, Tensor<T>* grad) {
        Entry e;
        e.name = name;
        e.value = value;
        e.grad = grad;
        e.m = Tensor<T>(value->shape);
        e.v = Tensor<T>(value->shape);
        entries_.push_back(std::move(e));
    }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::uint64_t step_count() const { return step_; }
    void set_step_count(std::uint64_t s) { step_ = s; }

    std::size_t numel() const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += e.value->numel();
        return n;
    }

    void zero_grad() {
        for (auto& e : entries_) e.grad->zero();
    }

    /// Standard Adam with bias correction. Aborts on the first non-finite
    /// gradient, naming the offending parameter.
    void adam_step(T lr, T beta1 = T(0.9), T beta2 = T(0.999), T eps = T(1e-8)) {
        ++step_;
        const T bc1 = T(1) - std::pow(beta1, T(step_));
        const T bc2 = T(1) - std::pow(beta2, T(step_));
        for (auto& e : entries_) {
            Tensor<T>& g = *e.grad;
            Tensor<T>& p = *e.value;
            for (std::size_t i = 0; i < p.numel(); ++i) {
                if (!std::isfinite(static_cast<double>(g[i])))
                    throw std::runtime_error("adam_step: non-finite gradient in parameter '" +
                                             e.name + "'");
                e.m[i] = beta1 * e.m[i] + (T(1) - beta1) * g[i];
                e.v[i] = beta2 * e.v[i] + (T(1) - beta2) * g[i] * g[i];
                const T mhat = e.m[i] / bc1;
                const T vhat = e.v[i] / bc2;
                p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }

    /// FNV-1a over the raw parameter bytes; used for frozen-parameter audits.
    std::uint64_t checksum() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const auto& e : entries_) {
            for (std::size_t i = 0; i < e.value->numel(); ++i) {
                T v = (*e.value)[i];
                const auto* b = reinterpret_cast<const unsigned char*>(&v);
                for (std::size_t k = 0; k < sizeof(T); ++k) {
                    h ^= b[k];
                    h *= 0x100000001b3ull;
                }
            }
        }
        return h;
    }

private:
    std::vector<Entry> entries_;
    std::uint64_t step_ = 0;
};

}  // namespace lf::nn
