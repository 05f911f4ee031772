#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfmimo/channel.hpp"
#include "cfmimo/estimation.hpp"

namespace cfmimo {

enum class PowerUnit { dBW, dBm };
enum class PilotKind { Random, Dft };

/// One simulation point. JSON keys are the field names; unknown keys are
/// rejected. Defaults follow the reference scenario (M = 120, N = 4,
/// K = tau = 20, 2 bits/dim, 1 km^2 area, 1.9 GHz).
struct ExperimentConfig {
    int total_antennas = 120; // M
    int antennas_per_ap = 4;  // N, L = M / N
    int users = 20;           // K
    int tau = 20;
    double bits_per_dim = 2.0;
    double sigma_delta_deg = 10.0;
    AngularDistribution angular_distribution = AngularDistribution::Gaussian;
    double antenna_spacing = 0.5;
    double tx_power = -20.0;
    PowerUnit power_unit = PowerUnit::dBW;
    double bandwidth_hz = 20e6;
    double noise_figure_db = 9.0;
    double noise_temp_k = 290.0;
    double sigma_sh_db = 8.0;
    bool shadow_inside_d1 = true;
    double area_side_km = 1.0;
    bool wrap_around = true;
    double d0_km = 0.01;
    double d1_km = 0.05;
    double carrier_freq_mhz = 1900.0;
    double h_ap_m = 15.0;
    double h_ue_m = 1.65;
    int n_training = 100;  // small-scale realizations used for codebook training
    int bussgang_nt = 0;   // 0: reuse the training realizations
    int trials = 20;
    int large_scale_realizations = 50;
    std::uint64_t master_seed = 1;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    PilotKind pilot_kind = PilotKind::Random;
    double sq_loading_factor = 0.0; // 0: Gaussian-optimal for the bit count
    double lbg_split_epsilon = 0.01;
    double lbg_rel_tol = 1e-6;
    int lbg_max_iters = 100;

    int n_aps() const { return antennas_per_ap > 0 ? total_antennas / antennas_per_ap : 0; }
    /// Fronthaul bits per real N-vector, C = b N.
    int bits_per_vector() const;
    int codebook_size() const { return 1 << bits_per_vector(); }
    bool has_scheme(Scheme s) const;
    double tx_power_dbw() const { return power_unit == PowerUnit::dBm ? tx_power - 30.0 : tx_power; }
};

/// Every violated invariant, empty when the config is valid.
std::vector<std::string> validation_errors(const ExperimentConfig& config);

/// Throws ConfigError listing all violations.
void validate_config(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults. Throws ConfigError on unknown keys or
/// wrongly typed values (not on invariant violations).
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// 16 hex digits, FNV-1a over the canonical JSON dump.
std::string config_digest(const ExperimentConfig& config);

} // namespace cfmimo
