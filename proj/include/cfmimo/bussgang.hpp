#pragma once

#include <functional>

#include "cfmimo/common.hpp"

namespace cfmimo {

/// Linearization x_q = F x + d with d uncorrelated with x.
struct BussgangModel {
    CMat gain;           // F, N x N
    CMat distortion_cov; // C_dd, N x N Hermitian PSD
    std::size_t n_samples = 0;
};

using ComplexQuantizer = std::function<CVec(const CVec&)>;

/// (1/Nt) sum_n a[n] b[n]^H with samples stored as columns.
CMat sample_covariance(const CMat& samples_a, const CMat& samples_b);

/// F = C_{xq x} C_xx^{-1} and C_dd = C_{xq xq} - C_{xq x} C_xx^{-1} C_{x xq}
/// from paired input/output samples (one per column). C_dd is projected onto
/// the PSD cone.
BussgangModel bussgang_from_pairs(const CMat& inputs, const CMat& outputs);

/// Runs `quantizer` on every input column and fits the Bussgang model.
BussgangModel estimate_bussgang(const CMat& inputs, const ComplexQuantizer& quantizer);

/// Per-antenna fit: each row is treated as an independent scalar channel,
/// giving diagonal F and C_dd.
BussgangModel bussgang_diagonal_from_pairs(const CMat& inputs, const CMat& outputs);

/// Hermitian part with negative eigenvalues set to zero.
CMat clamp_psd(const CMat& m);

} // namespace cfmimo
