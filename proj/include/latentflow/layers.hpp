#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "latentflow/adam.hpp"
#include "latentflow/rng.hpp"
#include "latentflow/tensor.hpp"

namespace lf::nn {

enum class Mode { Train, Eval };

inline double kaiming_bound(std::size_t fan_in) {
    // uniform bound for ReLU stacks: gain sqrt(2), U(-b, b) with b = sqrt(6/fan_in)
    return std::sqrt(6.0 / static_cast<double>(fan_in));
}

/// y = x W^T + b, batched over rows. x: [B, in], W: [out, in].
template <typename T>
struct Dense {
    std::size_t in = 0, out = 0;
    Tensor<T> W, b, dW, db;
    Tensor<T> x_cache;

    Dense() = default;
    Dense(std::size_t in_, std::size_t out_) { configure(in_, out_); }

    void configure(std::size_t in_, std::size_t out_) {
        in = in_;
        out = out_;
        W = Tensor<T>({out, in});
        b = Tensor<T>({out});
        dW = Tensor<T>({out, in});
        db = Tensor<T>({out});
    }

    void init(StreamRng& rng) {
        const double bound = kaiming_bound(in);
        for (auto& w : W.data) w = static_cast<T>(rng.uniform(-bound, bound));
        b.zero();
    }

    void collect(ParamStore<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".W", &W, &dW);
        ps.add(prefix + ".b", &b, &db);
    }

    Tensor<T> forward(const Tensor<T>& x) {
        if (x.shape.size() != 2 || x.shape[1] != in)
            throw std::invalid_argument("dense: input shape " + x.shape_str() +
                                        " does not match in=" + std::to_string(in));
        x_cache = x;
        const std::size_t B = x.shape[0];
        Tensor<T> y({B, out});
        for (std::size_t bi = 0; bi < B; ++bi) {
            const T* xr = &x.data[bi * in];
            T* yr = &y.data[bi * out];
            for (std::size_t o = 0; o < out; ++o) {
                const T* wr = &W.data[o * in];
                T acc = b[o];
                for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
                yr[o] = acc;
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t B = x_cache.shape[0];
        Tensor<T> dx({B, in});
        for (std::size_t bi = 0; bi < B; ++bi) {
            const T* dyr = &dy.data[bi * out];
            const T* xr = &x_cache.data[bi * in];
            T* dxr = &dx.data[bi * in];
            for (std::size_t o = 0; o < out; ++o) {
                const T g = dyr[o];
                db[o] += g;
                T* dwr = &dW.data[o * in];
                const T* wr = &W.data[o * in];
                for (std::size_t i = 0; i < in; ++i) {
                    dwr[i] += g * xr[i];
                    dxr[i] += g * wr[i];
                }
            }
        }
        return dx;
    }
};

/// Cross-correlation. x: [B, Cin, H, W], W: [Cout, Cin, K, K].
template <typename T>
struct Conv2d {
    std::size_t cin = 0, cout = 0, k = 1, stride = 1, pad = 0;
    Tensor<T> W, b, dW, db;
    Tensor<T> x_cache;

    Conv2d() = default;
    Conv2d(std::size_t cin_, std::size_t cout_, std::size_t k_, std::size_t s_, std::size_t p_) {
        configure(cin_, cout_, k_, s_, p_);
    }

    void configure(std::size_t cin_, std::size_t cout_, std::size_t k_, std::size_t s_,
                   std::size_t p_) {
        cin = cin_;
        cout = cout_;
        k = k_;
        stride = s_;
        pad = p_;
        if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
        W = Tensor<T>({cout, cin, k, k});
        b = Tensor<T>({cout});
        dW = Tensor<T>({cout, cin, k, k});
        db = Tensor<T>({cout});
    }

    void init(StreamRng& rng) {
        const double bound = kaiming_bound(cin * k * k);
        for (auto& w : W.data) w = static_cast<T>(rng.uniform(-bound, bound));
        b.zero();
    }

    void collect(ParamStore<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".W", &W, &dW);
        ps.add(prefix + ".b", &b, &db);
    }

    std::size_t out_size(std::size_t n) const {
        if (n + 2 * pad < k)
            throw std::invalid_argument("conv2d: kernel " + std::to_string(k) +
                                        " does not fit padded input " + std::to_string(n));
        return (n + 2 * pad - k) / stride + 1;
    }

    Tensor<T> forward(const Tensor<T>& x) {
        if (x.shape.size() != 4 || x.shape[1] != cin)
            throw std::invalid_argument("conv2d: input shape " + x.shape_str() +
                                        " does not match cin=" + std::to_string(cin));
        x_cache = x;
        const std::size_t B = x.shape[0], H = x.shape[2], Wd = x.shape[3];
        const std::size_t Ho = out_size(H), Wo = out_size(Wd);
        Tensor<T> y({B, cout, Ho, Wo});
        const long long BC = static_cast<long long>(B * cout);
#pragma omp parallel for schedule(static)
        for (long long bc = 0; bc < BC; ++bc) {
            const std::size_t bi = static_cast<std::size_t>(bc) / cout;
            const std::size_t co = static_cast<std::size_t>(bc) % cout;
            T* yp = &y.data[(bi * cout + co) * Ho * Wo];
            for (std::size_t i = 0; i < Ho * Wo; ++i) yp[i] = b[co];
            for (std::size_t ci = 0; ci < cin; ++ci) {
                const T* xp = &x.data[(bi * cin + ci) * H * Wd];
                for (std::size_t kh = 0; kh < k; ++kh)
                    for (std::size_t kw = 0; kw < k; ++kw) {
                        const T w = W.data[((co * cin + ci) * k + kh) * k + kw];
                        for (std::size_t oh = 0; oh < Ho; ++oh) {
                            const long long ih = static_cast<long long>(oh * stride + kh) -
                                                 static_cast<long long>(pad);
                            if (ih < 0 || ih >= static_cast<long long>(H)) continue;
                            T* yrow = yp + oh * Wo;
                            const T* xrow = xp + static_cast<std::size_t>(ih) * Wd;
                            for (std::size_t ow = 0; ow < Wo; ++ow) {
                                const long long iw = static_cast<long long>(ow * stride + kw) -
                                                     static_cast<long long>(pad);
                                if (iw < 0 || iw >= static_cast<long long>(Wd)) continue;
                                yrow[ow] += w * xrow[static_cast<std::size_t>(iw)];
                            }
                        }
                    }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t B = x_cache.shape[0], H = x_cache.shape[2], Wd = x_cache.shape[3];
        const std::size_t Ho = dy.shape[2], Wo = dy.shape[3];
        Tensor<T> dx({B, cin, H, Wd});
        // weight/bias grads: one thread owns one output channel
#pragma omp parallel for schedule(static)
        for (long long co = 0; co < static_cast<long long>(cout); ++co) {
            for (std::size_t bi = 0; bi < B; ++bi) {
                const T* dyp = &dy.data[(bi * cout + co) * Ho * Wo];
                for (std::size_t i = 0; i < Ho * Wo; ++i) db[co] += dyp[i];
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const T* xp = &x_cache.data[(bi * cin + ci) * H * Wd];
                    for (std::size_t kh = 0; kh < k; ++kh)
                        for (std::size_t kw = 0; kw < k; ++kw) {
                            T acc = 0;
                            for (std::size_t oh = 0; oh < Ho; ++oh) {
                                const long long ih = static_cast<long long>(oh * stride + kh) -
                                                     static_cast<long long>(pad);
                                if (ih < 0 || ih >= static_cast<long long>(H)) continue;
                                const T* xrow = xp + static_cast<std::size_t>(ih) * Wd;
                                const T* dyrow = dyp + oh * Wo;
                                for (std::size_t ow = 0; ow < Wo; ++ow) {
                                    const long long iw = static_cast<long long>(ow * stride + kw) -
                                                         static_cast<long long>(pad);
                                    if (iw < 0 || iw >= static_cast<long long>(Wd)) continue;
                                    acc += dyrow[ow] * xrow[static_cast<std::size_t>(iw)];
                                }
                            }
                            dW.data[((static_cast<std::size_t>(co) * cin + ci) * k + kh) * k + kw] +=
                                acc;
                        }
                }
            }
        }
        // input grads: one thread owns one batch item
#pragma omp parallel for schedule(static)
        for (long long bi = 0; bi < static_cast<long long>(B); ++bi) {
            for (std::size_t co = 0; co < cout; ++co) {
                const T* dyp = &dy.data[(static_cast<std::size_t>(bi) * cout + co) * Ho * Wo];
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    T* dxp = &dx.data[(static_cast<std::size_t>(bi) * cin + ci) * H * Wd];
                    for (std::size_t kh = 0; kh < k; ++kh)
                        for (std::size_t kw = 0; kw < k; ++kw) {
                            const T w = W.data[((co * cin + ci) * k + kh) * k + kw];
                            for (std::size_t oh = 0; oh < Ho; ++oh) {
                                const long long ih = static_cast<long long>(oh * stride + kh) -
                                                     static_cast<long long>(pad);
                                if (ih < 0 || ih >= static_cast<long long>(H)) continue;
                                T* dxrow = dxp + static_cast<std::size_t>(ih) * Wd;
                                const T* dyrow = dyp + oh * Wo;
                                for (std::size_t ow = 0; ow < Wo; ++ow) {
                                    const long long iw = static_cast<long long>(ow * stride + kw) -
                                                         static_cast<long long>(pad);
                                    if (iw < 0 || iw >= static_cast<long long>(Wd)) continue;
                                    dxrow[static_cast<std::size_t>(iw)] += w * dyrow[ow];
                                }
                            }
                        }
                }
            }
        }
        return dx;
    }
};

/// Transposed convolution. x: [B, Cin, Hin, Win], W: [Cin, Cout, K, K].
/// Output spatial size: (Hin - 1) * stride - 2 * pad + K.
template <typename T>
struct Deconv2d {
    std::size_t cin = 0, cout = 0, k = 1, stride = 1, pad = 0;
    Tensor<T> W, b, dW, db;
    Tensor<T> x_cache;

    Deconv2d() = default;
    Deconv2d(std::size_t cin_, std::size_t cout_, std::size_t k_, std::size_t s_, std::size_t p_) {
        configure(cin_, cout_, k_, s_, p_);
    }

    void configure(std::size_t cin_, std::size_t cout_, std::size_t k_, std::size_t s_,
                   std::size_t p_) {
        cin = cin_;
        cout = cout_;
        k = k_;
        stride = s_;
        pad = p_;
        W = Tensor<T>({cin, cout, k, k});
        b = Tensor<T>({cout});
        dW = Tensor<T>({cin, cout, k, k});
        db = Tensor<T>({cout});
    }

    void init(StreamRng& rng) {
        const double bound = kaiming_bound(cin * k * k);
        for (auto& w : W.data) w = static_cast<T>(rng.uniform(-bound, bound));
        b.zero();
    }

    void collect(ParamStore<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".W", &W, &dW);
        ps.add(prefix + ".b", &b, &db);
    }

    std::size_t out_size(std::size_t n) const {
        const long long v = static_cast<long long>((n - 1) * stride + k) -
                            2 * static_cast<long long>(pad);
        if (n == 0 || v <= 0) throw std::invalid_argument("deconv2d: degenerate output size");
        return static_cast<std::size_t>(v);
    }

    Tensor<T> forward(const Tensor<T>& x) {
        if (x.shape.size() != 4 || x.shape[1] != cin)
            throw std::invalid_argument("deconv2d: input shape " + x.shape_str() +
                                        " does not match cin=" + std::to_string(cin));
        x_cache = x;
        const std::size_t B = x.shape[0], Hi = x.shape[2], Wi = x.shape[3];
        const std::size_t Ho = out_size(Hi), Wo = out_size(Wi);
        Tensor<T> y({B, cout, Ho, Wo});
        const long long BC = static_cast<long long>(B * cout);
#pragma omp parallel for schedule(static)
        for (long long bc = 0; bc < BC; ++bc) {
            const std::size_t bi = static_cast<std::size_t>(bc) / cout;
            const std::size_t co = static_cast<std::size_t>(bc) % cout;
            T* yp = &y.data[(bi * cout + co) * Ho * Wo];
            for (std::size_t i = 0; i < Ho * Wo; ++i) yp[i] = b[co];
            for (std::size_t ci = 0; ci < cin; ++ci) {
                const T* xp = &x.data[(bi * cin + ci) * Hi * Wi];
                for (std::size_t kh = 0; kh < k; ++kh)
                    for (std::size_t kw = 0; kw < k; ++kw) {
                        const T w = W.data[((ci * cout + co) * k + kh) * k + kw];
                        for (std::size_t ih = 0; ih < Hi; ++ih) {
                            const long long oh = static_cast<long long>(ih * stride + kh) -
                                                 static_cast<long long>(pad);
                            if (oh < 0 || oh >= static_cast<long long>(Ho)) continue;
                            T* yrow = yp + static_cast<std::size_t>(oh) * Wo;
                            const T* xrow = xp + ih * Wi;
                            for (std::size_t iw = 0; iw < Wi; ++iw) {
                                const long long ow = static_cast<long long>(iw * stride + kw) -
                                                     static_cast<long long>(pad);
                                if (ow < 0 || ow >= static_cast<long long>(Wo)) continue;
                                yrow[static_cast<std::size_t>(ow)] += w * xrow[iw];
                            }
                        }
                    }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t B = x_cache.shape[0], Hi = x_cache.shape[2], Wi = x_cache.shape[3];
        const std::size_t Ho = dy.shape[2], Wo = dy.shape[3];
        Tensor<T> dx({B, cin, Hi, Wi});
#pragma omp parallel for schedule(static)
        for (long long ci = 0; ci < static_cast<long long>(cin); ++ci) {
            for (std::size_t bi = 0; bi < B; ++bi) {
                const T* xp = &x_cache.data[(bi * cin + static_cast<std::size_t>(ci)) * Hi * Wi];
                for (std::size_t co = 0; co < cout; ++co) {
                    const T* dyp = &dy.data[(bi * cout + co) * Ho * Wo];
                    for (std::size_t kh = 0; kh < k; ++kh)
                        for (std::size_t kw = 0; kw < k; ++kw) {
                            T acc = 0;
                            for (std::size_t ih = 0; ih < Hi; ++ih) {
                                const long long oh = static_cast<long long>(ih * stride + kh) -
                                                     static_cast<long long>(pad);
                                if (oh < 0 || oh >= static_cast<long long>(Ho)) continue;
                                const T* dyrow = dyp + static_cast<std::size_t>(oh) * Wo;
                                const T* xrow = xp + ih * Wi;
                                for (std::size_t iw = 0; iw < Wi; ++iw) {
                                    const long long ow = static_cast<long long>(iw * stride + kw) -
                                                         static_cast<long long>(pad);
                                    if (ow < 0 || ow >= static_cast<long long>(Wo)) continue;
                                    acc += dyrow[static_cast<std::size_t>(ow)] * xrow[iw];
                                }
                            }
                            dW.data[((static_cast<std::size_t>(ci) * cout + co) * k + kh) * k +
                                    kw] += acc;
                        }
                }
            }
        }
#pragma omp parallel for schedule(static)
        for (long long bi = 0; bi < static_cast<long long>(B); ++bi) {
            for (std::size_t co = 0; co < cout; ++co) {
                const T* dyp = &dy.data[(static_cast<std::size_t>(bi) * cout + co) * Ho * Wo];
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    T* dxp =
                        &dx.data[(static_cast<std::size_t>(bi) * cin + ci) * Hi * Wi];
                    for (std::size_t kh = 0; kh < k; ++kh)
                        for (std::size_t kw = 0; kw < k; ++kw) {
                            const T w = W.data[((ci * cout + co) * k + kh) * k + kw];
                            for (std::size_t ih = 0; ih < Hi; ++ih) {
                                const long long oh = static_cast<long long>(ih * stride + kh) -
                                                     static_cast<long long>(pad);
                                if (oh < 0 || oh >= static_cast<long long>(Ho)) continue;
                                const T* dyrow = dyp + static_cast<std::size_t>(oh) * Wo;
                                T* dxrow = dxp + ih * Wi;
                                for (std::size_t iw = 0; iw < Wi; ++iw) {
                                    const long long ow = static_cast<long long>(iw * stride + kw) -
                                                         static_cast<long long>(pad);
                                    if (ow < 0 || ow >= static_cast<long long>(Wo)) continue;
                                    dxrow[iw] += w * dyrow[static_cast<std::size_t>(ow)];
                                }
                            }
                        }
                }
            }
        }
        // bias grad accumulated serially; trivial cost
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t co = 0; co < cout; ++co) {
                const T* dyp = &dy.data[(bi * cout + co) * Ho * Wo];
                for (std::size_t i = 0; i < Ho * Wo; ++i) db[co] += dyp[i];
            }
        return dx;
    }
};

template <typename T>
struct Relu {
    Tensor<T> x_cache;

    Tensor<T> forward(const Tensor<T>& x) {
        x_cache = x;
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.numel(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.shape);
        for (std::size_t i = 0; i < dy.numel(); ++i)
            dx[i] = x_cache[i] > T(0) ? dy[i] : T(0);
        return dx;
    }
};

/// Inverted dropout: train mode zeroes with probability `rate` and scales
/// survivors by 1/(1-rate); eval mode is the identity.
template <typename T>
struct Dropout {
    double rate = 0.0;
    Tensor<T> mask_cache;

    explicit Dropout(double rate_ = 0.0) : rate(rate_) {
        if (rate < 0.0 || rate >= 1.0)
            throw std::invalid_argument("dropout: rate must be in [0, 1), got " +
                                        std::to_string(rate));
    }

    Tensor<T> forward(const Tensor<T>& x, Mode mode, StreamRng& rng) {
        if (mode == Mode::Eval || rate == 0.0) {
            mask_cache = Tensor<T>(x.shape);
            mask_cache.fill(T(1));
            return x;
        }
        const T scale = T(1.0 / (1.0 - rate));
        mask_cache = Tensor<T>(x.shape);
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.numel(); ++i) {
            const T m = rng.uniform() < rate ? T(0) : scale;
            mask_cache[i] = m;
            y[i] = m * x[i];
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        Tensor<T> dx(dy.shape);
        for (std::size_t i = 0; i < dy.numel(); ++i) dx[i] = dy[i] * mask_cache[i];
        return dx;
    }
};

/// Batch normalization over feature columns of a [B, F] input.
template <typename T>
struct BatchNorm1d {
    std::size_t features = 0;
    double momentum = 0.1;
    double eps = 1e-5;
    Tensor<T> gamma, beta, dgamma, dbeta;
    Tensor<T> running_mean, running_var;
    // caches
    Tensor<T> xhat_cache, x_cache;
    std::vector<T> mean_cache, var_cache;

    BatchNorm1d() = default;
    explicit BatchNorm1d(std::size_t f) { configure(f); }

    void configure(std::size_t f) {
        features = f;
        gamma = Tensor<T>({f});
        gamma.fill(T(1));
        beta = Tensor<T>({f});
        dgamma = Tensor<T>({f});
        dbeta = Tensor<T>({f});
        running_mean = Tensor<T>({f});
        running_var = Tensor<T>({f});
        running_var.fill(T(1));
    }

    void collect(ParamStore<T>& ps, const std::string& prefix) {
        ps.add(prefix + ".gamma", &gamma, &dgamma);
        ps.add(prefix + ".beta", &beta, &dbeta);
    }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) {
        if (x.shape.size() != 2 || x.shape[1] != features)
            throw std::invalid_argument("batchnorm: input shape " + x.shape_str() +
                                        " does not match features=" + std::to_string(features));
        const std::size_t B = x.shape[0];
        Tensor<T> y(x.shape);
        if (mode == Mode::Train) {
            if (B < 2)
                throw std::invalid_argument("batchnorm: train mode needs batch >= 2, got " +
                                            std::to_string(B));
            x_cache = x;
            xhat_cache = Tensor<T>(x.shape);
            mean_cache.assign(features, T(0));
            var_cache.assign(features, T(0));
            for (std::size_t f = 0; f < features; ++f) {
                T mu = 0;
                for (std::size_t bi = 0; bi < B; ++bi) mu += x.data[bi * features + f];
                mu /= static_cast<T>(B);
                T var = 0;
                for (std::size_t bi = 0; bi < B; ++bi) {
                    const T d = x.data[bi * features + f] - mu;
                    var += d * d;
                }
                var /= static_cast<T>(B);  // biased, used for normalization
                mean_cache[f] = mu;
                var_cache[f] = var;
                const T inv = T(1) / std::sqrt(var + static_cast<T>(eps));
                for (std::size_t bi = 0; bi < B; ++bi) {
                    const T xh = (x.data[bi * features + f] - mu) * inv;
                    xhat_cache.data[bi * features + f] = xh;
                    y.data[bi * features + f] = gamma[f] * xh + beta[f];
                }
                const T unbiased = var * static_cast<T>(B) / static_cast<T>(B - 1);
                running_mean[f] = static_cast<T>((1.0 - momentum)) * running_mean[f] +
                                  static_cast<T>(momentum) * mu;
                running_var[f] = static_cast<T>((1.0 - momentum)) * running_var[f] +
                                 static_cast<T>(momentum) * unbiased;
            }
        } else {
            for (std::size_t f = 0; f < features; ++f) {
                const T inv = T(1) / std::sqrt(running_var[f] + static_cast<T>(eps));
                for (std::size_t bi = 0; bi < B; ++bi)
                    y.data[bi * features + f] =
                        gamma[f] * (x.data[bi * features + f] - running_mean[f]) * inv + beta[f];
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t B = dy.shape[0];
        Tensor<T> dx(dy.shape);
        for (std::size_t f = 0; f < features; ++f) {
            const T inv = T(1) / std::sqrt(var_cache[f] + static_cast<T>(eps));
            T sum_dy = 0, sum_dy_xhat = 0;
            for (std::size_t bi = 0; bi < B; ++bi) {
                const T g = dy.data[bi * features + f];
                sum_dy += g;
                sum_dy_xhat += g * xhat_cache.data[bi * features + f];
            }
            dbeta[f] += sum_dy;
            dgamma[f] += sum_dy_xhat;
            const T nb = static_cast<T>(B);
            for (std::size_t bi = 0; bi < B; ++bi) {
                const T g = dy.data[bi * features + f];
                const T xh = xhat_cache.data[bi * features + f];
                dx.data[bi * features + f] =
                    gamma[f] * inv / nb * (nb * g - sum_dy - xh * sum_dy_xhat);
            }
        }
        return dx;
    }
};

/// Bilinear resize of [B, C, Hin, Win] to a fixed (Hout, Wout), align_corners
/// convention. Backward is the exact transpose of the interpolation weights.
template <typename T>
struct BilinearResize {
    std::size_t hout = 0, wout = 0;
    std::vector<std::size_t> in_shape;

    BilinearResize() = default;
    BilinearResize(std::size_t h, std::size_t w) : hout(h), wout(w) {}

    static void coords(std::size_t n_out, std::size_t n_in, std::size_t i, std::size_t& lo,
                       std::size_t& hi, T& frac) {
        if (n_out == 1 || n_in == 1) {
            lo = hi = 0;
            frac = 0;
            return;
        }
        const double pos = static_cast<double>(i) * static_cast<double>(n_in - 1) /
                           static_cast<double>(n_out - 1);
        lo = static_cast<std::size_t>(pos);
        if (lo >= n_in - 1) lo = n_in - 2;
        hi = lo + 1;
        frac = static_cast<T>(pos - static_cast<double>(lo));
    }

    Tensor<T> forward(const Tensor<T>& x) {
        in_shape = x.shape;
        const std::size_t B = x.shape[0], C = x.shape[1], Hi = x.shape[2], Wi = x.shape[3];
        Tensor<T> y({B, C, hout, wout});
        for (std::size_t bc = 0; bc < B * C; ++bc) {
            const T* xp = &x.data[bc * Hi * Wi];
            T* yp = &y.data[bc * hout * wout];
            for (std::size_t oh = 0; oh < hout; ++oh) {
                std::size_t h0, h1;
                T fh;
                coords(hout, Hi, oh, h0, h1, fh);
                for (std::size_t ow = 0; ow < wout; ++ow) {
                    std::size_t w0, w1;
                    T fw;
                    coords(wout, Wi, ow, w0, w1, fw);
                    yp[oh * wout + ow] =
                        (T(1) - fh) * ((T(1) - fw) * xp[h0 * Wi + w0] + fw * xp[h0 * Wi + w1]) +
                        fh * ((T(1) - fw) * xp[h1 * Wi + w0] + fw * xp[h1 * Wi + w1]);
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
        const std::size_t B = in_shape[0], C = in_shape[1], Hi = in_shape[2], Wi = in_shape[3];
        Tensor<T> dx(in_shape);
        for (std::size_t bc = 0; bc < B * C; ++bc) {
            T* dxp = &dx.data[bc * Hi * Wi];
            const T* dyp = &dy.data[bc * hout * wout];
            for (std::size_t oh = 0; oh < hout; ++oh) {
                std::size_t h0, h1;
                T fh;
                coords(hout, Hi, oh, h0, h1, fh);
                for (std::size_t ow = 0; ow < wout; ++ow) {
                    std::size_t w0, w1;
                    T fw;
                    coords(wout, Wi, ow, w0, w1, fw);
                    const T g = dyp[oh * wout + ow];
                    dxp[h0 * Wi + w0] += (T(1) - fh) * (T(1) - fw) * g;
                    dxp[h0 * Wi + w1] += (T(1) - fh) * fw * g;
                    dxp[h1 * Wi + w0] += fh * (T(1) - fw) * g;
                    dxp[h1 * Wi + w1] += fh * fw * g;
                }
            }
        }
        return dx;
    }
};

/// logvar is clamped to [-10, 10] before exponentiation; gradient is zero
/// outside the clamp range.
template <typename T>
struct Reparameterize {
    Tensor<T> eps_cache, logvar_cache;

    Tensor<T> forward(const Tensor<T>& mu, const Tensor<T>& logvar, const Tensor<T>& eps) {
        check_same_shape(mu, logvar, "reparameterize");
        check_same_shape(mu, eps, "reparameterize");
        eps_cache = eps;
        logvar_cache = logvar;
        Tensor<T> z(mu.shape);
        for (std::size_t i = 0; i < mu.numel(); ++i) {
            const T lv = std::clamp(logvar[i], T(-10), T(10));
            z[i] = mu[i] + std::exp(T(0.5) * lv) * eps[i];
        }
        return z;
    }

    void backward(const Tensor<T>& dz, Tensor<T>& dmu, Tensor<T>& dlogvar) {
        dmu = Tensor<T>(dz.shape);
        dlogvar = Tensor<T>(dz.shape);
        for (std::size_t i = 0; i < dz.numel(); ++i) {
            dmu[i] = dz[i];
            const T lv = logvar_cache[i];
            if (lv > T(-10) && lv < T(10))
                dlogvar[i] = dz[i] * eps_cache[i] * T(0.5) * std::exp(T(0.5) * lv);
            else
                dlogvar[i] = T(0);
        }
    }
};

}  // namespace lf::nn
