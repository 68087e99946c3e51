#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "latentflow/wake.hpp"

namespace lf::spectral {

/// Mean-removed snapshot data: row j of `fluct` is snapshot j minus the mean.
struct SnapshotMatrix {
    Eigen::VectorXd mean;    // length M
    Eigen::MatrixXd fluct;   // t x M
    double dt = 0.0;

    std::size_t snapshots() const { return static_cast<std::size_t>(fluct.rows()); }
    std::size_t spatial_size() const { return static_cast<std::size_t>(fluct.cols()); }
};

struct PodResult {
    Eigen::MatrixXd modes;            // M x r, orthonormal columns
    Eigen::VectorXd eigenvalues;      // length r, descending, >= 0
    Eigen::MatrixXd coefficients;     // t x r
    Eigen::VectorXd cumulative_energy;  // length r, relative to total variance
};

enum class PodMethod { Auto, Direct, Snapshots };

struct SpodResult {
    Eigen::VectorXd frequencies;              // length n_f = n_dft/2 + 1, Hz
    Eigen::MatrixXd eigenvalues;              // n_f x n_modes, descending per row
    std::vector<Eigen::MatrixXcd> modes;      // per frequency: M x n_modes
    std::size_t n_blocks = 0;
    std::size_t n_dft = 0;
    std::size_t overlap = 0;
    std::string window;
};

/// Pointwise arithmetic mean per channel; timestamp of the result is 0.
wake::FlowSnapshot time_average(const std::vector<wake::FlowSnapshot>& series);

/// Build the mean-removed matrix from one velocity channel (0 = u, 1 = v).
SnapshotMatrix build_snapshot_matrix(const std::vector<wake::FlowSnapshot>& series,
                                     int channel, double dt);
SnapshotMatrix build_snapshot_matrix(const Eigen::MatrixXd& rows_are_snapshots, double dt);

/// Leading r eigenpairs of the spatial covariance C = Q^T Q / (t-1).
/// The snapshot path solves the t x t Gram problem instead; results agree.
PodResult pod_decompose(const SnapshotMatrix& data, std::size_t r,
                        PodMethod method = PodMethod::Auto);

std::size_t welch_block_count(std::size_t t, std::size_t n_dft, std::size_t overlap);

/// Windowed, DFT'd, energy-scaled blocks. Each entry is n_f x M; the scaling
/// is chosen so that summing |coeff|^2 over one-sided bins gives the windowed
/// mean square of the block (rectangular window: exactly the block mean square).
std::vector<Eigen::MatrixXcd> welch_blocks(const SnapshotMatrix& data, std::size_t n_dft,
                                           std::size_t overlap,
                                           const std::string& window = "hamming");

/// Welch-blocked SPOD via the n_b x n_b snapshot formulation per frequency.
SpodResult spod_decompose(const SnapshotMatrix& data, std::size_t n_dft, std::size_t overlap,
                          std::size_t n_modes, const std::string& window = "hamming");

/// k largest local maxima of the leading eigenvalue spectrum, DC excluded,
/// sorted by magnitude.
std::vector<std::pair<double, double>> peak_frequencies(const SpodResult& result, std::size_t k);

/// St = f D / U.
double strouhal(double f, double d, double u);

}  // namespace lf::spectral
