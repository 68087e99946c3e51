#include "latentflow/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lf::spectral {

wake::FlowSnapshot time_average(const std::vector<wake::FlowSnapshot>& series) {
    if (series.empty()) throw std::invalid_argument("time_average: empty series");
    wake::FlowSnapshot mean;
    mean.t = 0.0;
    mean.h = series[0].h;
    mean.w = series[0].w;
    const std::size_t m = mean.h * mean.w;
    std::vector<double> su(m, 0.0), sv(m, 0.0);
    for (const auto& s : series) {
        if (s.h != mean.h || s.w != mean.w)
            throw std::invalid_argument("time_average: grid mismatch in series");
        for (std::size_t i = 0; i < m; ++i) {
            su[i] += s.u[i];
            sv[i] += s.v[i];
        }
    }
    mean.u.resize(m);
    mean.v.resize(m);
    const double inv = 1.0 / static_cast<double>(series.size());
    for (std::size_t i = 0; i < m; ++i) {
        mean.u[i] = static_cast<float>(su[i] * inv);
        mean.v[i] = static_cast<float>(sv[i] * inv);
    }
    return mean;
}

SnapshotMatrix build_snapshot_matrix(const std::vector<wake::FlowSnapshot>& series, int channel,
                                     double dt) {
    if (series.empty()) throw std::invalid_argument("build_snapshot_matrix: empty series");
    const std::size_t t = series.size();
    const std::size_t m = series[0].h * series[0].w;
    Eigen::MatrixXd rows(t, m);
    for (std::size_t j = 0; j < t; ++j) {
        const std::vector<float>& ch = channel == 0 ? series[j].u : series[j].v;
        if (ch.size() != m) throw std::invalid_argument("build_snapshot_matrix: grid mismatch");
        for (std::size_t i = 0; i < m; ++i) rows(j, i) = ch[i];
    }
    return build_snapshot_matrix(rows, dt);
}

SnapshotMatrix build_snapshot_matrix(const Eigen::MatrixXd& rows, double dt) {
    SnapshotMatrix out;
    out.dt = dt;
    out.mean = rows.colwise().mean();
    out.fluct = rows.rowwise() - out.mean.transpose();
    return out;
}

namespace {

void sort_descending(Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
    std::vector<Eigen::Index> idx(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return vals(a) > vals(b); });
    Eigen::VectorXd sv(vals.size());
    Eigen::MatrixXd sm(vecs.rows(), vecs.cols());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        sv(i) = vals(idx[static_cast<std::size_t>(i)]);
        sm.col(i) = vecs.col(idx[static_cast<std::size_t>(i)]);
    }
    vals = sv;
    vecs = sm;
}

void fix_mode_signs(Eigen::MatrixXd& modes) {
    // canonical form: the largest-magnitude entry of each mode is positive
    for (Eigen::Index c = 0; c < modes.cols(); ++c) {
        Eigen::Index imax = 0;
        modes.col(c).cwiseAbs().maxCoeff(&imax);
        if (modes(imax, c) < 0.0) modes.col(c) = -modes.col(c);
    }
}

std::vector<double> make_window(const std::string& name, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (name == "rect" || name == "rectangular") return w;
    if (name == "hamming") {
        for (std::size_t j = 0; j < n; ++j)
            w[j] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(j) /
                                          static_cast<double>(n - 1));
        return w;
    }
    throw std::invalid_argument("unknown window '" + name + "'");
}

}  // namespace

PodResult pod_decompose(const SnapshotMatrix& data, std::size_t r, PodMethod method) {
    const std::size_t t = data.snapshots();
    const std::size_t m = data.spatial_size();
    if (t < 2) throw std::invalid_argument("pod_decompose: need at least 2 snapshots");
    if (r > std::min(t - 1, m))
        throw std::out_of_range("pod_decompose: r = " + std::to_string(r) +
                                " exceeds min(t-1, M) = " +
                                std::to_string(std::min(t - 1, m)));
    if (method == PodMethod::Auto) method = t < m ? PodMethod::Snapshots : PodMethod::Direct;

    const double total_variance = data.fluct.squaredNorm() / static_cast<double>(t - 1);

    PodResult out;
    if (method == PodMethod::Direct) {
        Eigen::MatrixXd cov = data.fluct.transpose() * data.fluct / static_cast<double>(t - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        Eigen::VectorXd vals = es.eigenvalues();
        Eigen::MatrixXd vecs = es.eigenvectors();
        sort_descending(vals, vecs);
        out.eigenvalues = vals.head(static_cast<Eigen::Index>(r)).cwiseMax(0.0);
        out.modes = vecs.leftCols(static_cast<Eigen::Index>(r));
    } else {
        Eigen::MatrixXd gram = data.fluct * data.fluct.transpose() / static_cast<double>(t - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        Eigen::VectorXd vals = es.eigenvalues();
        Eigen::MatrixXd vecs = es.eigenvectors();
        sort_descending(vals, vecs);
        out.eigenvalues = vals.head(static_cast<Eigen::Index>(r)).cwiseMax(0.0);
        out.modes = Eigen::MatrixXd(m, r);
        for (std::size_t i = 0; i < r; ++i) {
            const double lam = out.eigenvalues(static_cast<Eigen::Index>(i));
            if (lam > 1e-300) {
                out.modes.col(static_cast<Eigen::Index>(i)) =
                    data.fluct.transpose() * vecs.col(static_cast<Eigen::Index>(i)) /
                    std::sqrt(static_cast<double>(t - 1) * lam);
            } else {
                out.modes.col(static_cast<Eigen::Index>(i)).setZero();
            }
        }
    }
    fix_mode_signs(out.modes);
    out.coefficients = data.fluct * out.modes;
    out.cumulative_energy = Eigen::VectorXd(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        acc += out.eigenvalues(static_cast<Eigen::Index>(i));
        out.cumulative_energy(static_cast<Eigen::Index>(i)) =
            total_variance > 0.0 ? acc / total_variance : 0.0;
    }
    return out;
}

std::size_t welch_block_count(std::size_t t, std::size_t n_dft, std::size_t overlap) {
    if (t < n_dft)
        throw std::invalid_argument("welch: series length " + std::to_string(t) +
                                    " shorter than n_dft " + std::to_string(n_dft));
    if (overlap >= n_dft) throw std::invalid_argument("welch: overlap must be < n_dft");
    return (t - n_dft) / (n_dft - overlap) + 1;
}

std::vector<Eigen::MatrixXcd> welch_blocks(const SnapshotMatrix& data, std::size_t n_dft,
                                           std::size_t overlap, const std::string& window) {
    const std::size_t t = data.snapshots();
    const std::size_t m = data.spatial_size();
    const std::size_t nb = welch_block_count(t, n_dft, overlap);
    const std::size_t hop = n_dft - overlap;
    const std::size_t nf = n_dft / 2 + 1;
    const std::vector<double> w = make_window(window, n_dft);
    double w2 = 0.0;
    for (double wi : w) w2 += wi * wi;

    std::vector<double> in(n_dft * m);
    std::vector<fftw_complex> fout(nf * m);
    int sizes[1] = {static_cast<int>(n_dft)};
    fftw_plan plan = fftw_plan_many_dft_r2c(1, sizes, static_cast<int>(m), in.data(), nullptr, 1,
                                            static_cast<int>(n_dft), fout.data(), nullptr, 1,
                                            static_cast<int>(nf), FFTW_ESTIMATE);

    std::vector<Eigen::MatrixXcd> blocks;
    blocks.reserve(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t start = b * hop;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t j = 0; j < n_dft; ++j)
                in[p * n_dft + j] =
                    w[j] * data.fluct(static_cast<Eigen::Index>(start + j),
                                      static_cast<Eigen::Index>(p));
        fftw_execute(plan);
        Eigen::MatrixXcd blk(nf, m);
        for (std::size_t k = 0; k < nf; ++k) {
            const bool interior = k != 0 && !(n_dft % 2 == 0 && k == nf - 1);
            const double scale =
                std::sqrt((interior ? 2.0 : 1.0) / (static_cast<double>(n_dft) * w2));
            for (std::size_t p = 0; p < m; ++p) {
                const fftw_complex& c = fout[p * nf + k];
                blk(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) =
                    std::complex<double>(c[0], c[1]) * scale;
            }
        }
        blocks.push_back(std::move(blk));
    }
    fftw_destroy_plan(plan);
    return blocks;
}

SpodResult spod_decompose(const SnapshotMatrix& data, std::size_t n_dft, std::size_t overlap,
                          std::size_t n_modes, const std::string& window) {
    const auto blocks = welch_blocks(data, n_dft, overlap, window);
    const std::size_t nb = blocks.size();
    const std::size_t m = data.spatial_size();
    const std::size_t nf = n_dft / 2 + 1;
    if (n_modes > nb)
        throw std::out_of_range("spod_decompose: n_modes = " + std::to_string(n_modes) +
                                " exceeds block count " + std::to_string(nb));
    if (data.dt <= 0.0) throw std::invalid_argument("spod_decompose: dt must be > 0");

    SpodResult out;
    out.n_blocks = nb;
    out.n_dft = n_dft;
    out.overlap = overlap;
    out.window = window;
    out.frequencies = Eigen::VectorXd(nf);
    const double fs = 1.0 / data.dt;
    for (std::size_t k = 0; k < nf; ++k)
        out.frequencies(static_cast<Eigen::Index>(k)) =
            fs * static_cast<double>(k) / static_cast<double>(n_dft);
    out.eigenvalues = Eigen::MatrixXd(nf, n_modes);
    out.modes.assign(nf, Eigen::MatrixXcd(m, n_modes));

    // per-frequency eigenproblems are independent
#pragma omp parallel for schedule(static)
    for (long long kk = 0; kk < static_cast<long long>(nf); ++kk) {
        const auto k = static_cast<Eigen::Index>(kk);
        Eigen::MatrixXcd y(m, nb);  // columns: scaled block Fourier coefficients
        for (std::size_t b = 0; b < nb; ++b)
            y.col(static_cast<Eigen::Index>(b)) =
                blocks[b].row(k).transpose() / std::sqrt(static_cast<double>(nb));
        Eigen::MatrixXcd gram = y.adjoint() * y;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
        // ascending from Eigen; take the top n_modes in descending order
        for (std::size_t i = 0; i < n_modes; ++i) {
            const Eigen::Index src = static_cast<Eigen::Index>(nb - 1 - i);
            const double lam = es.eigenvalues()(src);
            out.eigenvalues(k, static_cast<Eigen::Index>(i)) = lam;
            Eigen::VectorXcd psi;
            if (lam > 1e-300) {
                psi = y * es.eigenvectors().col(src) / std::sqrt(lam);
                // canonical phase: first entry real and non-negative; fall back
                // to the largest-magnitude entry when the first is ~0
                Eigen::Index ref = 0;
                if (std::abs(psi(0)) < 1e-12 * psi.norm()) psi.cwiseAbs().maxCoeff(&ref);
                const std::complex<double> pv = psi(ref);
                if (std::abs(pv) > 0.0) psi *= std::conj(pv) / std::abs(pv);
            } else {
                psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
            }
            out.modes[static_cast<std::size_t>(k)].col(static_cast<Eigen::Index>(i)) = psi;
        }
    }
    return out;
}

std::vector<std::pair<double, double>> peak_frequencies(const SpodResult& result, std::size_t k) {
    if (k < 1) throw std::invalid_argument("peak_frequencies: k must be >= 1");
    const Eigen::Index nf = result.frequencies.size();
    std::vector<std::pair<double, double>> peaks;  // (frequency, lambda_1)
    for (Eigen::Index i = 1; i < nf; ++i) {
        const double v = result.eigenvalues(i, 0);
        const double prev = result.eigenvalues(i - 1, 0);
        const double next =
            i + 1 < nf ? result.eigenvalues(i + 1, 0) : -std::numeric_limits<double>::infinity();
        if (v > prev && v > next) peaks.emplace_back(result.frequencies(i), v);
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (peaks.size() > k) peaks.resize(k);
    return peaks;
}

double strouhal(double f, double d, double u) {
    if (!(u > 0.0)) throw std::domain_error("strouhal: U must be > 0");
    return f * d / u;
}

}  // namespace lf::spectral
