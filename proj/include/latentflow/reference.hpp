#pragma once

#include "latentflow/tensor.hpp"

namespace lf::nn::ref {

// Naive serial kernels. These are the reference implementations the tests and
// the kernel benchmark compare the OpenMP paths against; they stay deliberately
// close to the textbook definitions.

/// y[b,o] = sum_i W[o,i] x[b,i] + bias[o]
template <typename T>
Tensor<T> dense(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& bias) {
    const std::size_t B = x.shape[0], in = x.shape[1], out = W.shape[0];
    Tensor<T> y({B, out});
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t o = 0; o < out; ++o) {
            T acc = bias[o];
            for (std::size_t i = 0; i < in; ++i) acc += W.data[o * in + i] * x.data[b * in + i];
            y.data[b * out + o] = acc;
        }
    return y;
}

/// Cross-correlation, definition form: one accumulator per output element.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& bias,
                 std::size_t stride, std::size_t pad) {
    const std::size_t B = x.shape[0], cin = x.shape[1], H = x.shape[2], Wd = x.shape[3];
    const std::size_t cout = W.shape[0], k = W.shape[2];
    const std::size_t Ho = (H + 2 * pad - k) / stride + 1;
    const std::size_t Wo = (Wd + 2 * pad - k) / stride + 1;
    Tensor<T> y({B, cout, Ho, Wo});
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t oh = 0; oh < Ho; ++oh)
                for (std::size_t ow = 0; ow < Wo; ++ow) {
                    T acc = bias[co];
                    for (std::size_t ci = 0; ci < cin; ++ci)
                        for (std::size_t kh = 0; kh < k; ++kh)
                            for (std::size_t kw = 0; kw < k; ++kw) {
                                const long long ih =
                                    static_cast<long long>(oh * stride + kh) -
                                    static_cast<long long>(pad);
                                const long long iw =
                                    static_cast<long long>(ow * stride + kw) -
                                    static_cast<long long>(pad);
                                if (ih < 0 || ih >= static_cast<long long>(H) || iw < 0 ||
                                    iw >= static_cast<long long>(Wd))
                                    continue;
                                acc += W.data[((co * cin + ci) * k + kh) * k + kw] *
                                       x.data[((b * cin + ci) * H +
                                               static_cast<std::size_t>(ih)) *
                                                  Wd +
                                              static_cast<std::size_t>(iw)];
                            }
                    y.data[((b * cout + co) * Ho + oh) * Wo + ow] = acc;
                }
    return y;
}

/// Transposed convolution by scattering each input pixel through the kernel.
/// W: [Cin, Cout, K, K].
template <typename T>
Tensor<T> deconv2d(const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& bias,
                   std::size_t stride, std::size_t pad) {
    const std::size_t B = x.shape[0], cin = x.shape[1], Hi = x.shape[2], Wi = x.shape[3];
    const std::size_t cout = W.shape[1], k = W.shape[2];
    const std::size_t Ho = (Hi - 1) * stride + k - 2 * pad;
    const std::size_t Wo = (Wi - 1) * stride + k - 2 * pad;
    Tensor<T> y({B, cout, Ho, Wo});
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t co = 0; co < cout; ++co)
            for (std::size_t i = 0; i < Ho * Wo; ++i)
                y.data[(b * cout + co) * Ho * Wo + i] = bias[co];
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t ci = 0; ci < cin; ++ci)
            for (std::size_t ih = 0; ih < Hi; ++ih)
                for (std::size_t iw = 0; iw < Wi; ++iw) {
                    const T xv = x.data[((b * cin + ci) * Hi + ih) * Wi + iw];
                    for (std::size_t co = 0; co < cout; ++co)
                        for (std::size_t kh = 0; kh < k; ++kh)
                            for (std::size_t kw = 0; kw < k; ++kw) {
                                const long long oh =
                                    static_cast<long long>(ih * stride + kh) -
                                    static_cast<long long>(pad);
                                const long long ow =
                                    static_cast<long long>(iw * stride + kw) -
                                    static_cast<long long>(pad);
                                if (oh < 0 || oh >= static_cast<long long>(Ho) || ow < 0 ||
                                    ow >= static_cast<long long>(Wo))
                                    continue;
                                y.data[((b * cout + co) * Ho + static_cast<std::size_t>(oh)) *
                                           Wo +
                                       static_cast<std::size_t>(ow)] +=
                                    W.data[((ci * cout + co) * k + kh) * k + kw] * xv;
                            }
                }
    return y;
}

}  // namespace lf::nn::ref
