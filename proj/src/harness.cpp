#include "cfmimo/harness.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "cfmimo/pilots.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

double noise_power_w(double bandwidth_hz, double noise_figure_db, double noise_temp_k)
{
    return bandwidth_hz * kBoltzmann * noise_temp_k * db_to_linear(noise_figure_db);
}

double rho_p(double tx_power_dbw, double noise_power_w)
{
    if (!(noise_power_w > 0.0))
        throw std::invalid_argument("rho_p: noise power must be positive");
    return db_to_linear(tx_power_dbw) / noise_power_w;
}

double mse(const CMat& g, const CMat& g_hat)
{
    if (g.rows() != g_hat.rows() || g.cols() != g_hat.cols())
        throw std::invalid_argument("mse: dimension mismatch");
    if (g.size() == 0)
        throw std::invalid_argument("mse: empty matrices");
    return (g - g_hat).squaredNorm() / static_cast<double>(g.size());
}

std::uint64_t realization_seed(std::uint64_t master_seed, int realization)
{
    return derive_seed(master_seed, Stream::Realization, static_cast<std::uint64_t>(realization));
}

std::uint64_t trial_seed(std::uint64_t realization_seed, int trial)
{
    return derive_seed(realization_seed, Stream::Trial, static_cast<std::uint64_t>(trial));
}

namespace {

PilotBook make_pilots(const ExperimentConfig& config, Rng& rng)
{
    return config.pilot_kind == PilotKind::Dft ? dft_pilots(config.tau, config.users)
                                               : generate_pilots(config.tau, config.users, rng);
}

ChannelRealization draw_channel(const std::vector<std::vector<CovarianceModel>>& cov, Rng& rng)
{
    std::vector<std::vector<CVec>> blocks(cov.size());
    for (std::size_t l = 0; l < cov.size(); ++l) {
        blocks[l].reserve(cov[l].size());
        for (const auto& model : cov[l])
            blocks[l].push_back(sample_channel(model, rng));
    }
    return assemble_global(blocks);
}

double rms(const RMat& m)
{
    const double v = std::sqrt(m.squaredNorm() / static_cast<double>(m.size()));
    if (!(v > 0.0) || !std::isfinite(v))
        throw NumericalError("training samples have zero or non-finite power");
    return v;
}

RMat split_real(const CMat& m)
{
    RMat out(m.rows(), 2 * m.cols());
    out.leftCols(m.cols()) = m.real();
    out.rightCols(m.cols()) = m.imag();
    return out;
}

CMat apply_quantizer(const FronthaulQuantizer& q, const CMat& inputs)
{
    CMat out(inputs.rows(), inputs.cols());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i)
        out.col(i) = q(inputs.col(i));
    return out;
}

struct TrainingData {
    std::vector<CMat> eq_estimates; // per AP, beta-normalized local estimates (N x K n_training)
    std::vector<CMat> qe_pilots;    // per AP, received pilot columns (N x tau n_training)
};

TrainingData draw_training(const ExperimentConfig& config, const LargeScaleContext& ctx, int realizations, Rng& rng)
{
    const int n_aps = ctx.n_aps();
    const int k_users = ctx.n_users();
    const int n = config.antennas_per_ap;
    TrainingData data;
    data.eq_estimates.assign(static_cast<std::size_t>(n_aps), CMat(n, static_cast<Eigen::Index>(k_users) * realizations));
    data.qe_pilots.assign(static_cast<std::size_t>(n_aps), CMat(n, static_cast<Eigen::Index>(config.tau) * realizations));

    for (int r = 0; r < realizations; ++r) {
        const ChannelRealization ch = draw_channel(ctx.cov, rng);
        const PilotBook pilots = make_pilots(config, rng);
        for (int l = 0; l < n_aps; ++l) {
            const ReceivedPilots y = receive_pilots(ch.ap_rows(l), pilots, ctx.rho_p, true, rng);
            const CMat local = estimate_eq(y, pilots, ctx.eq_gains[static_cast<std::size_t>(l)]);
            for (int k = 0; k < k_users; ++k)
                data.eq_estimates[static_cast<std::size_t>(l)].col(static_cast<Eigen::Index>(r) * k_users + k)
                    = local.col(k) / std::sqrt(ctx.fading.beta(l, k));
            data.qe_pilots[static_cast<std::size_t>(l)].middleCols(static_cast<Eigen::Index>(r) * config.tau, config.tau)
                = y.y;
        }
    }
    return data;
}

} // namespace

LargeScaleContext build_context(const ExperimentConfig& config, std::uint64_t seed, const ContextOptions& options)
{
    validate_config(config);
    const int n_aps = config.n_aps();
    const int k_users = config.users;
    const int n = config.antennas_per_ap;

    LargeScaleContext ctx;
    ctx.layout.area_side_km = config.area_side_km;
    ctx.layout.wrap_around = config.wrap_around;
    {
        Rng rng(derive_seed(seed, Stream::Placement));
        ctx.layout.ap_positions = place_uniform(static_cast<std::size_t>(n_aps), config.area_side_km, rng);
        ctx.layout.ue_positions = place_uniform(static_cast<std::size_t>(k_users), config.area_side_km, rng);
    }
    const PathLossParams params
        = make_path_loss_params(config.d0_km, config.d1_km, config.carrier_freq_mhz, config.h_ap_m, config.h_ue_m);
    {
        Rng rng(derive_seed(seed, Stream::Shadowing));
        ctx.fading = large_scale_fading(ctx.layout, params, config.sigma_sh_db, rng, config.shadow_inside_d1);
    }
    {
        Rng rng(derive_seed(seed, Stream::Angles));
        ctx.angles.resize(n_aps, k_users);
        for (int l = 0; l < n_aps; ++l)
            for (int k = 0; k < k_users; ++k)
                ctx.angles(l, k) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }

    ctx.rho_p = rho_p(config.tx_power_dbw(), noise_power_w(config.bandwidth_hz, config.noise_figure_db, config.noise_temp_k));
    ctx.tau_rho = config.tau * ctx.rho_p;

    ctx.cov.resize(static_cast<std::size_t>(n_aps));
    ctx.eq_gains.resize(static_cast<std::size_t>(n_aps));
    for (int l = 0; l < n_aps; ++l) {
        for (int k = 0; k < k_users; ++k) {
            CorrelationSpec spec;
            spec.nominal_angle_rad = ctx.angles(l, k);
            spec.angular_spread_std_rad = config.sigma_delta_deg * std::numbers::pi / 180.0;
            spec.antenna_spacing = config.antenna_spacing;
            spec.n_antennas = n;
            spec.angular_distribution = config.angular_distribution;
            auto& model = ctx.cov[static_cast<std::size_t>(l)].emplace_back(correlation_matrix(spec), ctx.fading.beta(l, k));
            ctx.eq_gains[static_cast<std::size_t>(l)].push_back(eq_gain(model.sigma(), ctx.tau_rho));
        }
    }

    const bool vq_eq = config.has_scheme(Scheme::VqEq);
    const bool sq_eq = config.has_scheme(Scheme::SqEq);
    const bool vq_qe = config.has_scheme(Scheme::VqQe);
    const bool sq_qe = config.has_scheme(Scheme::SqQe);
    if (!(vq_eq || sq_eq || vq_qe || sq_qe))
        return ctx;

    const auto n_aps_sz = static_cast<std::size_t>(n_aps);
    if (options.passthrough_quantizers) {
        const BussgangModel identity{CMat::Identity(n, n), CMat::Zero(n, n), 0};
        const std::vector<FronthaulQuantizer> pass(n_aps_sz, FronthaulQuantizer::passthrough());
        if (vq_eq)
            ctx.vq_eq = pass;
        if (sq_eq)
            ctx.sq_eq = pass;
        if (vq_qe) {
            ctx.vq_qe = pass;
            ctx.vq_qe_bussgang.assign(n_aps_sz, identity);
        }
        if (sq_qe) {
            ctx.sq_qe = pass;
            ctx.sq_qe_bussgang.assign(n_aps_sz, identity);
        }
    } else {
        Rng train_rng(derive_seed(seed, Stream::Training));
        const TrainingData training = draw_training(config, ctx, config.n_training, train_rng);
        TrainingData bussgang_data;
        if (config.bussgang_nt > 0 && (vq_qe || sq_qe)) {
            Rng rng(derive_seed(seed, Stream::Bussgang));
            bussgang_data = draw_training(config, ctx, config.bussgang_nt, rng);
        }
        const std::vector<CMat>& bussgang_inputs
            = config.bussgang_nt > 0 ? bussgang_data.qe_pilots : training.qe_pilots;

        const int size = config.codebook_size();
        const int sq_bits = static_cast<int>(std::lround(config.bits_per_dim));
        const double gamma = config.sq_loading_factor > 0.0 || !(sq_eq || sq_qe)
                                 ? config.sq_loading_factor
                                 : default_loading_factor(sq_bits);
        LbgOptions lbg;
        lbg.split_epsilon = config.lbg_split_epsilon;
        lbg.rel_tol = config.lbg_rel_tol;
        lbg.max_iters = config.lbg_max_iters;

        for (std::size_t l = 0; l < n_aps_sz; ++l) {
            if (vq_eq || sq_eq) {
                const RMat eq_real = split_real(training.eq_estimates[l]);
                if (vq_eq)
                    ctx.vq_eq.push_back(FronthaulQuantizer::vector(lbg_train(eq_real, size, lbg)));
                // After beta scaling every antenna has at most unit variance; the
                // pooled rms is pulled down by weak links and clips strong ones.
                if (sq_eq)
                    ctx.sq_eq.push_back(
                        FronthaulQuantizer::scalar(uniform_scalar_codebook(sq_bits, std::sqrt(0.5), gamma)));
            }
            if (vq_qe || sq_qe) {
                const RMat qe_real = split_real(training.qe_pilots[l]);
                const double sigma = rms(qe_real);
                if (vq_qe) {
                    LbgOptions scaled = lbg;
                    scaled.input_scale = 1.0 / sigma;
                    ctx.vq_qe.push_back(FronthaulQuantizer::vector(lbg_train(qe_real, size, scaled)));
                    const CMat& x = bussgang_inputs[l];
                    ctx.vq_qe_bussgang.push_back(bussgang_from_pairs(x, apply_quantizer(ctx.vq_qe.back(), x)));
                }
                if (sq_qe) {
                    ctx.sq_qe.push_back(FronthaulQuantizer::scalar(uniform_scalar_codebook(sq_bits, sigma, gamma)));
                    const CMat& x = bussgang_inputs[l];
                    ctx.sq_qe_bussgang.push_back(bussgang_diagonal_from_pairs(x, apply_quantizer(ctx.sq_qe.back(), x)));
                }
            }
        }
    }

    if (vq_qe || sq_qe) {
        for (int k = 0; k < k_users; ++k) {
            std::vector<CMat> sigma_blocks;
            for (int l = 0; l < n_aps; ++l)
                sigma_blocks.push_back(ctx.cov[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)].sigma());
            if (vq_qe)
                ctx.vq_qe_gains.push_back(qe_gain(sigma_blocks, ctx.vq_qe_bussgang, ctx.tau_rho));
            if (sq_qe)
                ctx.sq_qe_gains.push_back(qe_gain(sigma_blocks, ctx.sq_qe_bussgang, ctx.tau_rho));
        }
    }
    return ctx;
}

TrialOutput simulate_trial(const ExperimentConfig& config, const LargeScaleContext& ctx, std::uint64_t seed)
{
    Rng fading_rng(derive_seed(seed, Stream::Fading));
    Rng pilot_rng(derive_seed(seed, Stream::Pilots));
    Rng noise_rng(derive_seed(seed, Stream::Noise));

    TrialOutput out;
    out.channel = draw_channel(ctx.cov, fading_rng);
    out.pilots = make_pilots(config, pilot_rng);
    for (int l = 0; l < ctx.n_aps(); ++l)
        out.received.push_back(receive_pilots(out.channel.ap_rows(l), out.pilots, ctx.rho_p, true, noise_rng));

    const bool need_local = config.has_scheme(Scheme::Unquantized) || config.has_scheme(Scheme::VqEq)
                            || config.has_scheme(Scheme::SqEq);
    std::vector<CMat> local;
    if (need_local) {
        for (int l = 0; l < ctx.n_aps(); ++l)
            local.push_back(estimate_eq(out.received[static_cast<std::size_t>(l)], out.pilots,
                                        ctx.eq_gains[static_cast<std::size_t>(l)]));
    }

    for (Scheme s : config.schemes) {
        switch (s) {
        case Scheme::Unquantized:
            out.estimates[s] = assemble_unquantized(local);
            break;
        case Scheme::VqEq:
            out.estimates[s] = eq_quantize(local, ctx.vq_eq, ctx.fading.beta, s);
            break;
        case Scheme::SqEq:
            out.estimates[s] = eq_quantize(local, ctx.sq_eq, ctx.fading.beta, s);
            break;
        case Scheme::VqQe:
            out.estimates[s] = run_qe_pipeline(out.received, ctx.vq_qe, out.pilots, ctx.vq_qe_gains, s);
            break;
        case Scheme::SqQe:
            out.estimates[s] = run_qe_pipeline(out.received, ctx.sq_qe, out.pilots, ctx.sq_qe_gains, s);
            break;
        }
    }
    return out;
}

TrialResult run_trial(const ExperimentConfig& config, const LargeScaleContext& ctx, std::uint64_t seed)
{
    TrialResult result;
    result.seed = seed;
    result.config_digest = config_digest(config);
    try {
        const TrialOutput out = simulate_trial(config, ctx, seed);
        const double entries = static_cast<double>(out.channel.g.size());
        for (const auto& [scheme, estimate] : out.estimates) {
            const double se = (out.channel.g - estimate.g_hat).squaredNorm();
            if (!std::isfinite(se))
                throw NumericalError(std::string("non-finite squared error for ") + std::string(scheme_name(scheme)));
            result.squared_error[scheme] = se;
            result.mse[scheme] = se / entries;
        }
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (trial seed " + std::to_string(seed) + ")");
    }
    return result;
}

const SchemeStats& ExperimentResult::stats(Scheme s) const
{
    for (const auto& st : schemes)
        if (st.scheme == s)
            return st;
    throw std::out_of_range("scheme not part of this experiment: " + std::string(scheme_name(s)));
}

namespace {

std::pair<double, double> mean_and_stderr(const std::vector<double>& v)
{
    const auto n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v)
        sum += x;
    const double mean = sum / n;
    if (v.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

} // namespace

PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("paired_difference: need equally sized, non-empty samples");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        d[i] = a[i] - b[i];
    const auto [mean, se] = mean_and_stderr(d);
    return {mean, se};
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options)
{
    validate_config(config);
    const int n_real = config.large_scale_realizations;
    const int n_trials = config.trials;
    std::vector<std::vector<TrialResult>> results(static_cast<std::size_t>(n_real));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int r = next++; r < n_real; r = next++) {
            try {
                const std::uint64_t rseed = realization_seed(config.master_seed, r);
                const LargeScaleContext ctx = build_context(config, rseed, options.context);
                auto& slot = results[static_cast<std::size_t>(r)];
                for (int t = 0; t < n_trials; ++t)
                    slot.push_back(run_trial(config, ctx, trial_seed(rseed, t)));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n_real;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_real)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    ExperimentResult out;
    out.config = config;
    out.digest = config_digest(config);
    for (Scheme s : config.schemes) {
        SchemeStats st;
        st.scheme = s;
        st.samples.reserve(static_cast<std::size_t>(n_real) * static_cast<std::size_t>(n_trials));
        for (const auto& realization : results)
            for (const auto& trial : realization)
                st.samples.push_back(trial.mse.at(s));
        std::tie(st.mean, st.stderr_mean) = mean_and_stderr(st.samples);
        out.schemes.push_back(std::move(st));
    }
    return out;
}

std::string_view axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::TxPower:
        return "tx_power";
    case SweepAxis::SigmaDelta:
        return "sigma_delta";
    case SweepAxis::AntennasPerAp:
        return "antennas_per_ap";
    }
    return "unknown";
}

std::optional<SweepAxis> parse_axis(std::string_view name)
{
    for (SweepAxis a : {SweepAxis::TxPower, SweepAxis::SigmaDelta, SweepAxis::AntennasPerAp})
        if (axis_name(a) == name)
            return a;
    return std::nullopt;
}

ExperimentConfig apply_axis(const ExperimentConfig& config, SweepAxis axis, double value)
{
    ExperimentConfig c = config;
    const std::string where = std::string(axis_name(axis)) + " value " + std::to_string(value);
    if (!std::isfinite(value))
        throw ConfigError("invalid " + where + ": not finite");
    switch (axis) {
    case SweepAxis::TxPower:
        c.tx_power = value;
        break;
    case SweepAxis::SigmaDelta:
        if (value < 0.0)
            throw ConfigError("invalid " + where + ": angular spread must be >= 0");
        c.sigma_delta_deg = value;
        break;
    case SweepAxis::AntennasPerAp:
        if (value < 1.0 || value != std::floor(value))
            throw ConfigError("invalid " + where + ": antennas per AP must be a positive integer");
        c.antennas_per_ap = static_cast<int>(value);
        if (c.total_antennas % c.antennas_per_ap != 0)
            throw ConfigError("invalid " + where + ": does not divide total_antennas "
                              + std::to_string(c.total_antennas));
        break;
    }
    const auto errs = validation_errors(c);
    if (!errs.empty()) {
        std::string msg = "invalid " + where + ":";
        for (const auto& e : errs)
            msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return c;
}

std::vector<SweepRow> rows_for(const ExperimentResult& result, SweepAxis axis, double axis_value)
{
    std::vector<SweepRow> rows;
    for (const auto& st : result.schemes) {
        SweepRow row;
        row.axis = axis_name(axis);
        row.axis_value = axis_value;
        row.scheme = st.scheme;
        row.mse_mean = st.mean;
        row.mse_stderr = st.stderr_mean;
        row.trials = result.config.trials;
        row.large_scale_realizations = result.config.large_scale_realizations;
        row.bits_per_dim = result.config.bits_per_dim;
        row.n_antennas = result.config.antennas_per_ap;
        row.seed = result.config.master_seed;
        row.config_digest = result.digest;
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options)
{
    if (values.empty())
        throw ConfigError("sweep needs at least one axis value");
    SweepResult out;
    out.axis = axis;
    out.values = values;
    std::vector<ExperimentConfig> points;
    for (double v : values)
        points.push_back(apply_axis(config, axis, v));
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.points.push_back(run_experiment(points[i], options));
        auto rows = rows_for(out.points.back(), axis, values[i]);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    return out;
}

namespace {

std::string sci(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

} // namespace

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.axis << ',' << sci(r.axis_value) << ',' << scheme_name(r.scheme) << ',' << sci(r.mse_mean) << ','
            << sci(r.mse_stderr) << ',' << r.trials << ',' << r.large_scale_realizations << ',' << sci(r.bits_per_dim)
            << ',' << r.n_antennas << ',' << r.seed << ',' << r.config_digest << '\n';
    }
}

std::vector<ValidationCheck> validate(const ValidationOptions& options)
{
    std::vector<ValidationCheck> checks;

    {
        // One-bit sign quantizer on N(0, 1): F = E|x| = sqrt(2/pi).
        Rng rng(derive_seed(options.seed, Stream::Bussgang));
        constexpr int nt = 100000;
        CMat x(1, nt);
        for (int i = 0; i < nt; ++i)
            x(0, i) = Complex{rng.normal(), 0.0};
        const BussgangModel model = estimate_bussgang(x, [](const CVec& v) {
            CVec q(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i)
                q[i] = v[i].real() >= 0.0 ? 1.0 : -1.0;
            return q;
        });
        const double expected = std::sqrt(2.0 / std::numbers::pi);
        const double f = model.gain(0, 0).real() * (1.0 + options.bussgang_gain_corruption);
        const double dev = std::abs(f / expected - 1.0);
        checks.push_back({"bussgang_one_bit_gain", dev <= 0.02, dev, 0.02});
    }

    for (double tau_rho : {1.0, 10.0}) {
        // N = 1, beta = 1: MSE = beta - beta^2 / (beta + 1 / (tau rho)).
        Rng rng(derive_seed(options.seed, Stream::Noise, static_cast<std::uint64_t>(tau_rho)));
        constexpr int trials = 100000;
        const CovarianceModel model(CMat::Identity(1, 1), 1.0);
        const EqGain gain = eq_gain(model.sigma(), tau_rho);
        const PilotBook pilots = generate_pilots(1, 1, rng);
        double acc = 0.0;
        for (int t = 0; t < trials; ++t) {
            CMat g(1, 1);
            g(0, 0) = sample_channel(model, rng)[0];
            const ReceivedPilots y = receive_pilots(g, pilots, tau_rho, true, rng);
            const CMat est = estimate_eq(y, pilots, {gain});
            acc += std::norm(g(0, 0) - est(0, 0));
        }
        const double expected = 1.0 - 1.0 / (1.0 + 1.0 / tau_rho);
        const double dev = std::abs(acc / trials / expected - 1.0);
        char name[64];
        std::snprintf(name, sizeof name, "scalar_lmmse_tau_rho_%g", tau_rho);
        checks.push_back({name, dev <= 0.03, dev, 0.03});
    }

    {
        Rng rng(derive_seed(options.seed, Stream::Training));
        constexpr int n = 4000;
        RMat samples(2, n);
        for (int i = 0; i < n; ++i) {
            const double a = rng.normal();
            const double b = rng.normal();
            samples(0, i) = a;
            samples(1, i) = 0.9 * a + std::sqrt(1.0 - 0.81) * b;
        }
        const Codebook cb = lbg_train(samples, 16);
        double worst = 0.0;
        const auto& log = cb.meta().distortion_log;
        for (std::size_t i = 1; i < log.size(); ++i)
            worst = std::max(worst, (log[i] - log[i - 1]) / log[i - 1]);
        checks.push_back({"lbg_distortion_monotone", worst <= 1e-12, worst, 1e-12});
    }

    {
        CorrelationSpec spec;
        spec.nominal_angle_rad = 0.3;
        spec.angular_spread_std_rad = 10.0 * std::numbers::pi / 180.0;
        spec.n_antennas = 8;
        const CMat r = correlation_matrix(spec);
        const KlFactors f = kl_factors(r);
        const CMat rebuilt = f.eigvecs * f.eigvals.asDiagonal() * f.eigvecs.adjoint();
        const double dev = (rebuilt - r).norm() / r.norm();
        checks.push_back({"covariance_reconstruction", dev <= 1e-8, dev, 1e-8});
    }
    return checks;
}

void write_validation_report(std::ostream& out, const std::vector<ValidationCheck>& checks)
{
    for (const auto& c : checks)
        out << c.name << ',' << (c.passed ? "pass" : "fail") << ',' << sci(c.deviation) << ',' << sci(c.threshold)
            << '\n';
}

} // namespace cfmimo
