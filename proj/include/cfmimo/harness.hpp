#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cfmimo/bussgang.hpp"
#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/estimation.hpp"
#include "cfmimo/quantizer.hpp"
#include "cfmimo/topology.hpp"

namespace cfmimo {

inline constexpr double kBoltzmann = 1.381e-23;

/// B k_b T0 10^(NF/10), in watts.
double noise_power_w(double bandwidth_hz, double noise_figure_db, double noise_temp_k);

/// Normalized transmit SNR: 10^(tx/10) / noise power.
double rho_p(double tx_power_dbw, double noise_power_w);

/// ||G - G_hat||_F^2 / (M K).
double mse(const CMat& g, const CMat& g_hat);

struct ContextOptions {
    /// Replace every quantizer by the identity and every Bussgang model by
    /// F = I, C_dd = 0. Test hook for pipeline-equivalence checks.
    bool passthrough_quantizers = false;
};

/// Everything that depends only on the large-scale realization and the
/// operating point: geometry, covariances, trained codebooks, Bussgang fits
/// and estimator gains. Built once, then shared read-only by all trials.
struct LargeScaleContext {
    NetworkLayout layout;
    LargeScaleFading fading;
    RMat angles;                                  // L x K nominal azimuths
    std::vector<std::vector<CovarianceModel>> cov; // [l][k]
    double rho_p = 0.0;
    double tau_rho = 0.0;
    std::vector<std::vector<EqGain>> eq_gains; // [l][k]

    // per AP, empty when the scheme is disabled
    std::vector<FronthaulQuantizer> vq_eq;
    std::vector<FronthaulQuantizer> sq_eq;
    std::vector<FronthaulQuantizer> vq_qe;
    std::vector<FronthaulQuantizer> sq_qe;
    std::vector<BussgangModel> vq_qe_bussgang;
    std::vector<BussgangModel> sq_qe_bussgang;

    // per user
    std::vector<QeGain> vq_qe_gains;
    std::vector<QeGain> sq_qe_gains;

    int n_aps() const { return static_cast<int>(layout.n_aps()); }
    int n_users() const { return static_cast<int>(layout.n_users()); }
};

LargeScaleContext build_context(const ExperimentConfig& config, std::uint64_t realization_seed,
                                const ContextOptions& options = {});

struct TrialResult {
    std::map<Scheme, double> squared_error; // ||G - G_hat||_F^2
    std::map<Scheme, double> mse;
    std::uint64_t seed = 0;
    std::string config_digest;
};

/// True channel and every enabled scheme's estimate for one trial.
struct TrialOutput {
    ChannelRealization channel;
    PilotBook pilots;
    std::vector<ReceivedPilots> received;
    std::map<Scheme, CsiEstimate> estimates;
};

TrialOutput simulate_trial(const ExperimentConfig& config, const LargeScaleContext& context, std::uint64_t trial_seed);

TrialResult run_trial(const ExperimentConfig& config, const LargeScaleContext& context, std::uint64_t trial_seed);

std::uint64_t realization_seed(std::uint64_t master_seed, int realization);
std::uint64_t trial_seed(std::uint64_t realization_seed, int trial);

struct SchemeStats {
    Scheme scheme = Scheme::Unquantized;
    /// Per-trial MSE, index = realization * trials + trial.
    std::vector<double> samples;
    double mean = 0.0;
    double stderr_mean = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string digest;
    std::vector<SchemeStats> schemes; // in config.schemes order

    const SchemeStats& stats(Scheme s) const;
};

struct RunOptions {
    unsigned threads = 1;
    ContextOptions context;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Mean and standard error of a - b over paired samples.
struct PairedDifference {
    double mean = 0.0;
    double stderr_mean = 0.0;
};
PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b);

enum class SweepAxis { TxPower, SigmaDelta, AntennasPerAp };

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

/// Copy of `config` with the axis parameter set to `value`; throws
/// ConfigError if the value is invalid for the axis.
ExperimentConfig apply_axis(const ExperimentConfig& config, SweepAxis axis, double value);

struct SweepRow {
    std::string axis;
    double axis_value = 0.0;
    Scheme scheme = Scheme::Unquantized;
    double mse_mean = 0.0;
    double mse_stderr = 0.0;
    int trials = 0;
    int large_scale_realizations = 0;
    double bits_per_dim = 0.0;
    int n_antennas = 0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::TxPower;
    std::vector<double> values;
    std::vector<ExperimentResult> points;
    std::vector<SweepRow> rows;
};

/// Runs one experiment per axis value. Every point uses the config's master
/// seed (common random numbers), so points are paired.
SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options = {});

std::vector<SweepRow> rows_for(const ExperimentResult& result, SweepAxis axis, double axis_value);

inline constexpr const char* kCsvHeader
    = "axis,axis_value,scheme,mse_mean,mse_stderr,trials,large_scale_realizations,bits_per_dim,n_antennas,seed,"
      "config_digest";

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double deviation = 0.0;
    double threshold = 0.0;
};

struct ValidationOptions {
    /// Multiplies the estimated one-bit Bussgang gain by (1 + x). Negative
    /// control for the report.
    double bussgang_gain_corruption = 0.0;
    std::uint64_t seed = 20240601;
};

std::vector<ValidationCheck> validate(const ValidationOptions& options = {});

/// One line per check: name,status,deviation,threshold.
void write_validation_report(std::ostream& out, const std::vector<ValidationCheck>& checks);

} // namespace cfmimo
