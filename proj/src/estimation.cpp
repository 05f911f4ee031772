#include "cfmimo/estimation.hpp"

namespace cfmimo {

std::string_view scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::VqEq:
        return "VQ_EQ";
    case Scheme::VqQe:
        return "VQ_QE";
    case Scheme::SqEq:
        return "SQ_EQ";
    case Scheme::SqQe:
        return "SQ_QE";
    case Scheme::Unquantized:
        return "UNQUANTIZED";
    }
    return "UNKNOWN";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (Scheme s : kAllSchemes)
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

EqGain eq_gain(const CMat& sigma, double tau_rho)
{
    if (!(tau_rho > 0.0))
        throw std::invalid_argument("eq_gain: tau * rho_p must be positive");
    const Eigen::Index n = sigma.rows();
    const CMat omega = sigma + (1.0 / tau_rho) * CMat::Identity(n, n);
    // Gamma^H = Omega^{-1} Sigma since both are Hermitian
    Eigen::LLT<CMat> llt(omega);
    if (llt.info() != Eigen::Success)
        throw NumericalError("eq_gain: Omega is not positive definite");
    return EqGain{llt.solve(sigma).adjoint()};
}

CMat estimate_eq(const ReceivedPilots& y, const PilotBook& pilots, const std::vector<EqGain>& gains)
{
    if (static_cast<int>(gains.size()) != pilots.n_users())
        throw std::invalid_argument("estimate_eq: one gain per user required");
    const double tau_rho = pilots.tau() * y.rho_p;
    CMat out(y.y.rows(), pilots.n_users());
    for (int k = 0; k < pilots.n_users(); ++k)
        out.col(k) = gains[static_cast<std::size_t>(k)].gamma * project_pilot(y.y, pilots.sequences.col(k), tau_rho);
    return out;
}

CsiEstimate eq_quantize(const std::vector<CMat>& local, const std::vector<FronthaulQuantizer>& quantizers,
                        const RMat& beta, Scheme scheme)
{
    if (local.empty() || local.size() != quantizers.size() || beta.rows() != static_cast<Eigen::Index>(local.size()))
        throw std::invalid_argument("eq_quantize: inconsistent AP count");
    const Eigen::Index n = local.front().rows();
    const Eigen::Index k_users = local.front().cols();

    CsiEstimate out;
    out.scheme = scheme;
    out.g_hat.resize(n * static_cast<Eigen::Index>(local.size()), k_users);
    for (std::size_t l = 0; l < local.size(); ++l) {
        for (Eigen::Index k = 0; k < k_users; ++k) {
            const double s = std::sqrt(beta(static_cast<Eigen::Index>(l), k));
            const CVec scaled = local[l].col(k) / s;
            out.g_hat.col(k).segment(static_cast<Eigen::Index>(l) * n, n) = s * quantizers[l](scaled);
        }
    }
    return out;
}

CMat qe_quantize_pilots(const ReceivedPilots& y, const FronthaulQuantizer& quantizer)
{
    CMat out(y.y.rows(), y.y.cols());
    for (Eigen::Index t = 0; t < y.y.cols(); ++t)
        out.col(t) = quantizer(y.y.col(t));
    return out;
}

CMat QeGain::global() const
{
    Eigen::Index m = 0;
    for (const auto& g : gamma)
        m += g.rows();
    CMat out = CMat::Zero(m, m);
    Eigen::Index offset = 0;
    for (const auto& g : gamma) {
        out.block(offset, offset, g.rows(), g.cols()) = g;
        offset += g.rows();
    }
    return out;
}

QeGain qe_gain(const std::vector<CMat>& sigma_blocks, const std::vector<BussgangModel>& bussgang, double tau_rho)
{
    if (sigma_blocks.size() != bussgang.size())
        throw std::invalid_argument("qe_gain: one Bussgang model per AP required");
    if (!(tau_rho > 0.0))
        throw std::invalid_argument("qe_gain: tau * rho_p must be positive");

    QeGain out;
    out.gamma.reserve(sigma_blocks.size());
    for (std::size_t l = 0; l < sigma_blocks.size(); ++l) {
        const CMat& sigma = sigma_blocks[l];
        const CMat& f = bussgang[l].gain;
        const CMat& cdd = bussgang[l].distortion_cov;
        const Eigen::Index n = sigma.rows();

        CMat omega = f * sigma * f.adjoint() + (f * f.adjoint() + cdd) / tau_rho;
        omega = 0.5 * (omega + omega.adjoint());
        Eigen::LLT<CMat> llt(omega);
        if (llt.info() != Eigen::Success) {
            const double reg = 1e-12 * omega.trace().real();
            llt.compute(omega + reg * CMat::Identity(n, n));
            if (llt.info() != Eigen::Success)
                throw NumericalError("qe_gain: Omega block of AP " + std::to_string(l) + " is singular");
        }
        // Gamma^H = Omega^{-1} F Sigma
        CMat gamma = llt.solve(f * sigma).adjoint();
        if (!gamma.allFinite())
            throw NumericalError("qe_gain: non-finite gain at AP " + std::to_string(l));
        out.gamma.push_back(std::move(gamma));
        out.f_tilde.push_back(f);
        out.dist_cov.push_back(cdd);
    }
    return out;
}

CsiEstimate estimate_qe(const CMat& yq_all, const PilotBook& pilots, double tau_rho, const std::vector<QeGain>& gains,
                        Scheme scheme)
{
    if (yq_all.cols() != pilots.tau())
        throw std::invalid_argument("estimate_qe: pilot length mismatch");
    if (static_cast<int>(gains.size()) != pilots.n_users())
        throw std::invalid_argument("estimate_qe: one gain per user required");

    CsiEstimate out;
    out.scheme = scheme;
    out.g_hat.resize(yq_all.rows(), pilots.n_users());
    for (int k = 0; k < pilots.n_users(); ++k) {
        const CVec r = project_pilot(yq_all, pilots.sequences.col(k), tau_rho);
        const QeGain& gain = gains[static_cast<std::size_t>(k)];
        Eigen::Index offset = 0;
        for (const CMat& block : gain.gamma) {
            out.g_hat.col(k).segment(offset, block.rows()) = block * r.segment(offset, block.cols());
            offset += block.rows();
        }
        if (offset != yq_all.rows())
            throw std::invalid_argument("estimate_qe: gain blocks do not cover M rows");
    }
    return out;
}

CsiEstimate run_qe_pipeline(const std::vector<ReceivedPilots>& received, const std::vector<FronthaulQuantizer>& quantizers,
                            const PilotBook& pilots, const std::vector<QeGain>& gains, Scheme scheme)
{
    if (received.empty() || received.size() != quantizers.size())
        throw std::invalid_argument("run_qe_pipeline: inconsistent AP count");
    const Eigen::Index n = received.front().y.rows();
    CMat stacked(n * static_cast<Eigen::Index>(received.size()), pilots.tau());
    for (std::size_t l = 0; l < received.size(); ++l)
        stacked.middleRows(static_cast<Eigen::Index>(l) * n, n) = qe_quantize_pilots(received[l], quantizers[l]);
    return estimate_qe(stacked, pilots, pilots.tau() * received.front().rho_p, gains, scheme);
}

CsiEstimate assemble_unquantized(const std::vector<CMat>& local)
{
    if (local.empty())
        throw std::invalid_argument("assemble_unquantized: no APs");
    const Eigen::Index n = local.front().rows();
    CsiEstimate out;
    out.scheme = Scheme::Unquantized;
    out.g_hat.resize(n * static_cast<Eigen::Index>(local.size()), local.front().cols());
    for (std::size_t l = 0; l < local.size(); ++l)
        out.g_hat.middleRows(static_cast<Eigen::Index>(l) * n, n) = local[l];
    return out;
}

} // namespace cfmimo
