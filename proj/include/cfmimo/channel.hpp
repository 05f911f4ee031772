#pragma once

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

enum class AngularDistribution { Gaussian, Uniform };

/// Local scattering model around a nominal azimuth.
struct CorrelationSpec {
    double nominal_angle_rad = 0.0;
    double angular_spread_std_rad = 0.0;
    double antenna_spacing = 0.5; // wavelengths
    int n_antennas = 1;
    AngularDistribution angular_distribution = AngularDistribution::Gaussian;
};

/// Spatial correlation of a uniform linear array under the local scattering
/// model. Gaussian deviations use 64-node Gauss-Hermite quadrature, uniform
/// ones composite Simpson over the support. Output is exactly Hermitian and
/// Toeplitz with unit diagonal.
CMat correlation_matrix(const CorrelationSpec& spec);

struct KlFactors {
    CMat eigvecs; // N x r, orthonormal columns
    RVec eigvals; // r, positive, descending
    int rank = 0;
};

/// Truncated eigendecomposition of a Hermitian PSD matrix. Eigenvalues are
/// clamped at zero and only those above rank_tol * lambda_max are kept.
KlFactors kl_factors(const CMat& r, double rank_tol = 1e-12);

/// Covariance of one (AP, user) channel: Sigma = beta * R with its
/// Karhunen-Loeve factors. Immutable after construction.
class CovarianceModel {
public:
    CovarianceModel() = default;
    CovarianceModel(CMat corr, double beta, double rank_tol = 1e-12);

    const CMat& sigma() const { return sigma_; }
    const CMat& corr() const { return corr_; }
    const CMat& eigvecs() const { return factors_.eigvecs; }
    const RVec& eigvals() const { return factors_.eigvals; }
    int rank() const { return factors_.rank; }
    double beta() const { return beta_; }
    int dim() const { return static_cast<int>(corr_.rows()); }

    /// sqrt(beta) * U * Lambda^{1/2}, N x r.
    const CMat& coloring() const { return coloring_; }

private:
    CMat corr_;
    CMat sigma_;
    KlFactors factors_;
    CMat coloring_;
    double beta_ = 0.0;
};

/// One realization g = sqrt(beta) U Lambda^{1/2} h. Always consumes N complex
/// normals from the stream (only the first r are used) so that streams stay
/// aligned when the rank changes with the angular spread.
CVec sample_channel(const CovarianceModel& model, Rng& rng);

/// Global channel G (M x K, M = L N) with per-AP blocks stacked per column.
struct ChannelRealization {
    CMat g;
    int n_aps = 0;
    int n_antennas = 0;
    int n_users = 0;

    CVec block(int ap, int user) const { return g.col(user).segment(ap * n_antennas, n_antennas); }
    /// N x K block of AP `ap`.
    CMat ap_rows(int ap) const { return g.middleRows(ap * n_antennas, n_antennas); }
};

/// blocks[l][k] is the length-N channel between AP l and user k.
ChannelRealization assemble_global(const std::vector<std::vector<CVec>>& blocks);

} // namespace cfmimo
