#include "cfmimo/channel.hpp"

#include <algorithm>
#include <numbers>

namespace cfmimo {

namespace {

struct QuadratureRule {
    RVec nodes;
    RVec weights;
};

// Golub-Welsch for the physicists' Hermite weight exp(-t^2).
QuadratureRule gauss_hermite(int n)
{
    RMat jacobi = RMat::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double off = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<RMat> solver(jacobi);
    QuadratureRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights.resize(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = sqrt_pi * v0 * v0;
    }
    return rule;
}

const QuadratureRule& gauss_hermite_64()
{
    static const QuadratureRule rule = gauss_hermite(64);
    return rule;
}

constexpr int kMinSimpsonIntervals = 1024;

Complex steering_phase(double spacing, int lag, double angle)
{
    return std::polar(1.0, 2.0 * std::numbers::pi * spacing * lag * std::sin(angle));
}

// Even interval count keeping the composite Simpson error of an integrand
// oscillating at `omega` rad per unit below ~1e-10 over `width`.
int simpson_intervals(double width, double omega)
{
    const double h = std::pow(1e-10 * 180.0 / width, 0.25) / std::max(omega, 1e-300);
    const double needed = std::ceil(width / h);
    int n = kMinSimpsonIntervals;
    if (needed > n)
        n = static_cast<int>(std::min(needed, 1e8));
    return n + (n % 2);
}

template <class Density>
Complex simpson(const CorrelationSpec& spec, int lag, double a, double b, const Density& density)
{
    const double omega = 2.0 * std::numbers::pi * spec.antenna_spacing * lag;
    const int intervals = simpson_intervals(b - a, omega);
    const double h = (b - a) / intervals;
    auto f = [&](double angle) { return density(angle) * steering_phase(spec.antenna_spacing, lag, angle); };
    Complex acc = f(a) + f(b);
    for (int i = 1; i < intervals; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
    return acc * (h / 3.0);
}

// E[exp(j 2 pi d m sin(theta + delta))] over the angular deviation.
Complex correlation_lag(const CorrelationSpec& spec, int lag)
{
    const double theta = spec.nominal_angle_rad;
    const double sd = spec.angular_spread_std_rad;
    const double dh = spec.antenna_spacing;

    if (sd == 0.0)
        return steering_phase(dh, lag, theta);

    if (spec.angular_distribution == AngularDistribution::Gaussian) {
        // delta = sqrt(2) sd t, density exp(-t^2)/sqrt(pi). The 64-node rule
        // integrates the phase exactly enough only while it oscillates slowly
        // in t; past that, fall back to Simpson over +-10 sd.
        const double omega_t = 2.0 * std::numbers::pi * dh * lag * std::numbers::sqrt2 * sd;
        if (omega_t * omega_t <= 64.0) {
            const auto& rule = gauss_hermite_64();
            Complex acc{0.0, 0.0};
            for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
                acc += rule.weights[i] * steering_phase(dh, lag, theta + std::numbers::sqrt2 * sd * rule.nodes[i]);
            return acc / std::sqrt(std::numbers::pi);
        }
        const double norm = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
        return simpson(spec, lag, theta - 10.0 * sd, theta + 10.0 * sd, [&](double angle) {
            const double z = (angle - theta) / sd;
            return norm * std::exp(-0.5 * z * z);
        });
    }

    // Uniform on [theta - sqrt(3) sd, theta + sqrt(3) sd], density 1/width.
    const double half = std::sqrt(3.0) * sd;
    return simpson(spec, lag, theta - half, theta + half, [&](double) { return 1.0 / (2.0 * half); });
}

} // namespace

CMat correlation_matrix(const CorrelationSpec& spec)
{
    if (spec.angular_spread_std_rad < 0.0)
        throw std::invalid_argument("correlation_matrix: angular spread must be non-negative");
    if (!(spec.antenna_spacing > 0.0))
        throw std::invalid_argument("correlation_matrix: antenna spacing must be positive");
    if (spec.n_antennas < 1)
        throw std::invalid_argument("correlation_matrix: need at least one antenna");

    const int n = spec.n_antennas;
    std::vector<Complex> lags(static_cast<std::size_t>(n));
    lags[0] = Complex{1.0, 0.0}; // the density integrates to one
    for (int m = 1; m < n; ++m)
        lags[static_cast<std::size_t>(m)] = correlation_lag(spec, m);

    CMat r(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Complex c = lags[static_cast<std::size_t>(std::abs(a - b))];
            r(a, b) = a >= b ? c : std::conj(c);
        }
    }
    return r;
}

KlFactors kl_factors(const CMat& r, double rank_tol)
{
    if (r.rows() != r.cols() || r.rows() == 0)
        throw std::invalid_argument("kl_factors: matrix must be square and non-empty");
    const double scale = std::max(1.0, r.norm());
    if ((r - r.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument("kl_factors: matrix is not Hermitian");

    const CMat herm = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(herm);
    if (solver.info() != Eigen::Success)
        throw NumericalError("kl_factors: eigendecomposition failed");

    const Eigen::Index n = herm.rows();
    const RVec& ascending = solver.eigenvalues();
    const double lambda_max = std::max(0.0, ascending[n - 1]);

    int rank = 0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (std::max(0.0, ascending[i]) > rank_tol * lambda_max && lambda_max > 0.0)
            ++rank;
        else
            break;
    }

    KlFactors out;
    out.rank = rank;
    out.eigvals.resize(rank);
    out.eigvecs.resize(n, rank);
    for (int j = 0; j < rank; ++j) {
        out.eigvals[j] = ascending[n - 1 - j];
        out.eigvecs.col(j) = solver.eigenvectors().col(n - 1 - j);
    }
    return out;
}

CovarianceModel::CovarianceModel(CMat corr, double beta, double rank_tol)
    : corr_(std::move(corr)), factors_(kl_factors(corr_, rank_tol)), beta_(beta)
{
    if (!(beta > 0.0))
        throw std::invalid_argument("CovarianceModel: beta must be positive");
    sigma_ = beta_ * corr_;
    coloring_ = std::sqrt(beta_) * factors_.eigvecs * factors_.eigvals.cwiseSqrt().asDiagonal();
}

CVec sample_channel(const CovarianceModel& model, Rng& rng)
{
    const CVec h = rng.complex_normal_vector(model.dim());
    return model.coloring() * h.head(model.rank());
}

ChannelRealization assemble_global(const std::vector<std::vector<CVec>>& blocks)
{
    if (blocks.empty() || blocks.front().empty())
        throw std::invalid_argument("assemble_global: empty block grid");
    const auto n_aps = static_cast<int>(blocks.size());
    const auto n_users = static_cast<int>(blocks.front().size());
    const auto n = static_cast<int>(blocks.front().front().size());
    if (n == 0)
        throw std::invalid_argument("assemble_global: empty channel block");

    ChannelRealization out;
    out.n_aps = n_aps;
    out.n_users = n_users;
    out.n_antennas = n;
    out.g.resize(static_cast<Eigen::Index>(n_aps) * n, n_users);
    for (int l = 0; l < n_aps; ++l) {
        if (static_cast<int>(blocks[static_cast<std::size_t>(l)].size()) != n_users)
            throw std::invalid_argument("assemble_global: ragged user dimension");
        for (int k = 0; k < n_users; ++k) {
            const CVec& b = blocks[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
            if (b.size() != n)
                throw std::invalid_argument("assemble_global: ragged antenna dimension");
            out.g.col(k).segment(static_cast<Eigen::Index>(l) * n, n) = b;
        }
    }
    return out;
}

} // namespace cfmimo
