#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cfmimo/bussgang.hpp"
#include "cfmimo/common.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/quantizer.hpp"

namespace cfmimo {

enum class Scheme { VqEq, VqQe, SqEq, SqQe, Unquantized };

inline constexpr Scheme kAllSchemes[] = {Scheme::VqEq, Scheme::VqQe, Scheme::SqEq, Scheme::SqQe, Scheme::Unquantized};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Per-(AP, user) LMMSE gain Gamma = Sigma (Sigma + I / (tau rho_p))^{-1}.
struct EqGain {
    CMat gamma;
};

EqGain eq_gain(const CMat& sigma, double tau_rho);

/// AP-local LMMSE estimates; returns N x K with column k = Gamma_lk r_lk.
/// `gains` holds one entry per user.
CMat estimate_eq(const ReceivedPilots& y, const PilotBook& pilots, const std::vector<EqGain>& gains);

struct CsiEstimate {
    CMat g_hat; // M x K
    Scheme scheme = Scheme::Unquantized;
};

/// Quantizes every local estimate after scaling by 1/sqrt(beta_lk), rescales
/// and stacks the result. `local` and `quantizers` are indexed by AP.
CsiEstimate eq_quantize(const std::vector<CMat>& local, const std::vector<FronthaulQuantizer>& quantizers,
                        const RMat& beta, Scheme scheme = Scheme::VqEq);

/// Column-wise quantization of Y_{p,l}.
CMat qe_quantize_pilots(const ReceivedPilots& y, const FronthaulQuantizer& quantizer);

/// Bussgang-LMMSE gain of one user. The global M x M gain is block-diagonal
/// over APs; only the per-AP blocks are stored.
struct QeGain {
    std::vector<CMat> gamma;    // per AP, N x N
    std::vector<CMat> f_tilde;  // per AP Bussgang gain
    std::vector<CMat> dist_cov; // per AP distortion covariance

    /// Dense block-diagonal assembly (M x M).
    CMat global() const;
};

/// Gamma_l = Sigma_lk F_l^H (F_l Sigma_lk F_l^H + (F_l F_l^H + C_dd,l) / (tau rho_p))^{-1}.
/// `sigma_blocks` and `bussgang` are indexed by AP.
QeGain qe_gain(const std::vector<CMat>& sigma_blocks, const std::vector<BussgangModel>& bussgang, double tau_rho);

/// Projects the stacked quantized pilots (M x tau) on each pilot and applies
/// the per-user QE gain. `gains` is indexed by user.
CsiEstimate estimate_qe(const CMat& yq_all, const PilotBook& pilots, double tau_rho, const std::vector<QeGain>& gains,
                        Scheme scheme = Scheme::VqQe);

/// Stacks the quantized pilots of every AP and runs estimate_qe.
CsiEstimate run_qe_pipeline(const std::vector<ReceivedPilots>& received, const std::vector<FronthaulQuantizer>& quantizers,
                            const PilotBook& pilots, const std::vector<QeGain>& gains, Scheme scheme);

/// Stacks AP-local estimates without quantization.
CsiEstimate assemble_unquantized(const std::vector<CMat>& local);

} // namespace cfmimo
