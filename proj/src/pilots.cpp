#include "cfmimo/pilots.hpp"

#include <numbers>

namespace cfmimo {

PilotBook generate_pilots(int tau, int n_users, Rng& rng)
{
    if (n_users < 1 || tau < 1)
        throw std::invalid_argument("generate_pilots: tau and K must be >= 1");
    if (n_users > tau)
        throw std::invalid_argument("generate_pilots: K > tau, orthogonal pilots impossible");

    CMat q = rng.complex_normal_matrix(tau, n_users);
    for (int k = 0; k < n_users; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < k; ++j) {
                const Complex proj = q.col(j).dot(q.col(k)); // q_j^H q_k
                q.col(k) -= proj * q.col(j);
            }
        }
        const double norm = q.col(k).norm();
        if (!(norm > 1e-12))
            throw NumericalError("generate_pilots: degenerate Gaussian draw");
        q.col(k) /= norm;
    }
    return PilotBook{std::move(q)};
}

PilotBook dft_pilots(int tau, int n_users)
{
    if (n_users < 1 || n_users > tau)
        throw std::invalid_argument("dft_pilots: need 1 <= K <= tau");
    CMat q(tau, n_users);
    const double norm = 1.0 / std::sqrt(static_cast<double>(tau));
    for (int t = 0; t < tau; ++t)
        for (int k = 0; k < n_users; ++k)
            q(t, k) = norm * std::polar(1.0, -2.0 * std::numbers::pi * t * k / tau);
    return PilotBook{std::move(q)};
}

ReceivedPilots receive_pilots(const CMat& g_l, const PilotBook& pilots, double rho_p, bool noise_enabled, Rng& rng)
{
    if (g_l.cols() != pilots.n_users())
        throw std::invalid_argument("receive_pilots: user count mismatch");
    if (!(rho_p > 0.0))
        throw std::invalid_argument("receive_pilots: rho_p must be positive");

    ReceivedPilots out;
    out.rho_p = rho_p;
    out.y = std::sqrt(pilots.tau() * rho_p) * g_l * pilots.sequences.adjoint();
    if (noise_enabled)
        out.y += rng.complex_normal_matrix(out.y.rows(), out.y.cols());
    return out;
}

CVec project_pilot(const CMat& y, const CVec& phi_k, double tau_rho)
{
    if (y.cols() != phi_k.size())
        throw std::invalid_argument("project_pilot: pilot length mismatch");
    return (y * phi_k) / std::sqrt(tau_rho);
}

} // namespace cfmimo
