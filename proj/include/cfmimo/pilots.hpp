#pragma once

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

/// tau x K matrix of orthonormal pilot sequences, one user per column.
struct PilotBook {
    CMat sequences;

    int tau() const { return static_cast<int>(sequences.rows()); }
    int n_users() const { return static_cast<int>(sequences.cols()); }
    CVec phi(int user) const { return sequences.col(user); }
    /// Phi = sqrt(tau rho_p) [phi_1 ... phi_K].
    CMat scaled(double rho_p) const { return std::sqrt(tau() * rho_p) * sequences; }
};

/// Received pilot block Y_{p,l} (N x tau) at one AP.
struct ReceivedPilots {
    CMat y;
    double rho_p = 0.0;
};

/// Orthonormalized columns of a tau x K complex Gaussian matrix (modified
/// Gram-Schmidt with one re-orthogonalization pass).
PilotBook generate_pilots(int tau, int n_users, Rng& rng);

/// First K columns of the unitary tau-point DFT matrix.
PilotBook dft_pilots(int tau, int n_users);

/// Y = sqrt(tau rho_p) G_l Phi^H + W with W ~ CN(0, 1) i.i.d. `noise_enabled`
/// false skips W entirely (and consumes no randomness).
ReceivedPilots receive_pilots(const CMat& g_l, const PilotBook& pilots, double rho_p, bool noise_enabled, Rng& rng);

/// r = Y phi_k / sqrt(tau rho_p).
CVec project_pilot(const CMat& y, const CVec& phi_k, double tau_rho);

} // namespace cfmimo
