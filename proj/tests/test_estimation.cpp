#include <doctest.h>

#include <numbers>

#include "cfmimo/estimation.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

CMat random_psd(int n, Rng& rng)
{
    const CMat a = rng.complex_normal_matrix(n, n);
    return a * a.adjoint() / static_cast<double>(n);
}

CMat unit_complex_samples(int n, int count, Rng& rng) { return rng.complex_normal_matrix(n, count); }

RMat split_real(const CMat& m)
{
    RMat out(m.rows(), 2 * m.cols());
    out.leftCols(m.cols()) = m.real();
    out.rightCols(m.cols()) = m.imag();
    return out;
}

double spectral_norm(const CMat& m) { return Eigen::JacobiSVD<CMat>(m).singularValues()[0]; }

} // namespace

TEST_SUITE("estimation")
{
    TEST_CASE("scheme names round trip")
    {
        for (Scheme s : kAllSchemes)
            CHECK(parse_scheme(scheme_name(s)) == s);
        CHECK_FALSE(parse_scheme("VQ").has_value());
    }

    TEST_CASE("eq_gain closed forms")
    {
        CHECK(eq_gain(CMat::Identity(1, 1), 1.0).gamma(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
        CHECK((eq_gain(CMat::Identity(3, 3), 1e12).gamma - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);

        // explicit 2x2 inverse as the oracle
        Rng rng(3);
        for (int rep = 0; rep < 10; ++rep) {
            const CMat s = random_psd(2, rng);
            const double tau_rho = 0.7;
            CMat omega = s + CMat::Identity(2, 2) / tau_rho;
            const Complex det = omega(0, 0) * omega(1, 1) - omega(0, 1) * omega(1, 0);
            CMat inv(2, 2);
            inv << omega(1, 1), -omega(0, 1), -omega(1, 0), omega(0, 0);
            inv /= det;
            CHECK((eq_gain(s, tau_rho).gamma - s * inv).cwiseAbs().maxCoeff() < 1e-10);
        }

        for (int rep = 0; rep < 20; ++rep) {
            const CMat s = 1e3 * random_psd(4, rng);
            const EqGain g = eq_gain(s, 0.01 + rep);
            CHECK(g.gamma.allFinite());
            CHECK(spectral_norm(g.gamma) < 1.0 + 1e-9);
        }
        CHECK_THROWS_AS(eq_gain(CMat::Identity(2, 2), 0.0), std::invalid_argument);
    }

    TEST_CASE("estimate_eq noiseless with identity gain recovers the channel")
    {
        Rng rng(4);
        const PilotBook pilots = generate_pilots(5, 3, rng);
        const CMat g = rng.complex_normal_matrix(2, 3);
        const ReceivedPilots y = receive_pilots(g, pilots, 1.3, false, rng);
        const std::vector<EqGain> gains(3, EqGain{CMat::Identity(2, 2)});
        CHECK((estimate_eq(y, pilots, gains) - g).norm() < 1e-12);
    }

    TEST_CASE("scalar LMMSE Monte Carlo and orthogonality")
    {
        const double beta = 2.0, tau_rho = 3.0;
        const int trials = 100000;
        Rng rng(5);
        const PilotBook pilots = generate_pilots(3, 1, rng);
        const double rho = tau_rho / 3.0;
        const CMat sigma = beta * CMat::Identity(1, 1);
        const std::vector<EqGain> gains{eq_gain(sigma, tau_rho)};
        double se = 0.0;
        Complex cross{0.0, 0.0};
        for (int t = 0; t < trials; ++t) {
            CMat g(1, 1);
            g(0, 0) = std::sqrt(beta) * rng.complex_normal();
            const ReceivedPilots y = receive_pilots(g, pilots, rho, true, rng);
            const Complex est = estimate_eq(y, pilots, gains)(0, 0);
            const Complex r = project_pilot(y.y, pilots.phi(0), tau_rho)[0];
            se += std::norm(g(0, 0) - est);
            cross += (est - g(0, 0)) * std::conj(r);
        }
        const double expected = beta - beta * beta / (beta + 1.0 / tau_rho);
        CHECK(std::abs(se / trials / expected - 1.0) < 0.03);
        CHECK(std::abs(cross.real() / trials) < 3.0 / std::sqrt(1.0 * trials));
        CHECK(std::abs(cross.imag() / trials) < 3.0 / std::sqrt(1.0 * trials));
    }

    TEST_CASE("eq_quantize passthrough and beta scaling")
    {
        Rng rng(6);
        std::vector<CMat> local{rng.complex_normal_matrix(3, 2), rng.complex_normal_matrix(3, 2)};
        RMat beta(2, 2);
        beta << 1e-9, 2e-11, 4.0, 0.3;
        const std::vector<FronthaulQuantizer> pass(2, FronthaulQuantizer::passthrough());
        const CsiEstimate out = eq_quantize(local, pass, beta);
        const CsiEstimate ref = assemble_unquantized(local);
        CHECK((out.g_hat - ref.g_hat).norm() <= 1e-15 * ref.g_hat.norm());
        CHECK(out.g_hat.rows() == 6);
        CHECK(out.scheme == Scheme::VqEq);

        CHECK_THROWS_AS(eq_quantize(local, {FronthaulQuantizer::passthrough()}, beta), std::invalid_argument);
    }

    TEST_CASE("beta scaling matches the codebook's training statistics")
    {
        Rng rng(7);
        const Codebook cb = lbg_train(split_real(unit_complex_samples(2, 5000, rng)), 16);
        const std::vector<FronthaulQuantizer> q{FronthaulQuantizer::vector(cb)};
        const double b = 1e-10;
        RMat beta_true(1, 1), beta_unscaled(1, 1);
        beta_true << b;
        beta_unscaled << 1.0;
        double scaled = 0.0, unscaled = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const std::vector<CMat> local{std::sqrt(b) * rng.complex_normal_matrix(2, 1)};
            scaled += (eq_quantize(local, q, beta_true).g_hat - local[0]).squaredNorm();
            unscaled += (eq_quantize(local, q, beta_unscaled).g_hat - local[0]).squaredNorm();
        }
        CHECK(scaled <= unscaled);
        // relative distortion stays at the unit-variance level
        CHECK(scaled / 1000.0 / (2.0 * b) < 0.2);
    }

    TEST_CASE("qe_quantize_pilots")
    {
        Rng rng(8);
        ReceivedPilots y{rng.complex_normal_matrix(2, 6), 1.0};
        CHECK(qe_quantize_pilots(y, FronthaulQuantizer::passthrough()) == y.y);

        LbgOptions opts;
        opts.input_scale = 0.5;
        const Codebook cb = lbg_train(split_real(2.0 * unit_complex_samples(2, 3000, rng)), 8, opts);
        const FronthaulQuantizer q = FronthaulQuantizer::vector(cb);
        const CMat out = qe_quantize_pilots(y, q);
        for (Eigen::Index t = 0; t < out.cols(); ++t) {
            for (const RVec part : {RVec(out.col(t).real()), RVec(out.col(t).imag())}) {
                double best = 1e300;
                for (int s = 0; s < cb.size(); ++s)
                    best = std::min(best, (part * cb.input_scale() - cb.points().col(s)).norm());
                CHECK(best < 1e-12);
            }
        }

        ReceivedPilots reversed{y.y.rowwise().reverse(), 1.0};
        CHECK(qe_quantize_pilots(reversed, q).rowwise().reverse() == out);
    }

    TEST_CASE("qe_gain with F = I and no distortion equals eq_gain")
    {
        Rng rng(9);
        std::vector<CMat> sigma{random_psd(3, rng), random_psd(3, rng)};
        const std::vector<BussgangModel> identity(2, BussgangModel{CMat::Identity(3, 3), CMat::Zero(3, 3), 0});
        const QeGain g = qe_gain(sigma, identity, 2.5);
        for (int l = 0; l < 2; ++l)
            CHECK((g.gamma[l] - eq_gain(sigma[l], 2.5).gamma).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(g.global().rows() == 6);
    }

    TEST_CASE("qe_gain scalar one-bit algebra")
    {
        const double sigma_y = 2.0, s = 3.0, tau_rho = 0.5;
        const double f = std::sqrt(2.0 / std::numbers::pi) / sigma_y;
        const double c = 1.0 - 2.0 / std::numbers::pi;
        const double expected = s * f / (f * s * f + (f * f + c) / tau_rho);
        CMat sigma(1, 1), fm(1, 1), cm(1, 1);
        sigma << s;
        fm << f;
        cm << c;
        const QeGain g = qe_gain({sigma}, {BussgangModel{fm, cm, 0}}, tau_rho);
        CHECK(std::abs(g.gamma[0](0, 0) - expected) < 1e-10);
    }

    TEST_CASE("qe_gain block-diagonal equals the dense inverse")
    {
        Rng rng(10);
        const int n = 2;
        std::vector<CMat> sigma{random_psd(n, rng), random_psd(n, rng)};
        std::vector<BussgangModel> bm;
        for (int l = 0; l < 2; ++l) {
            const CMat d = rng.complex_normal_matrix(n, n);
            bm.push_back({CMat::Identity(n, n) * 0.8 + 0.1 * rng.complex_normal_matrix(n, n), 0.2 * d * d.adjoint(), 0});
        }
        const double tau_rho = 4.0;
        CMat s_all = CMat::Zero(2 * n, 2 * n), f_all = CMat::Zero(2 * n, 2 * n), c_all = CMat::Zero(2 * n, 2 * n);
        for (int l = 0; l < 2; ++l) {
            s_all.block(l * n, l * n, n, n) = sigma[l];
            f_all.block(l * n, l * n, n, n) = bm[l].gain;
            c_all.block(l * n, l * n, n, n) = bm[l].distortion_cov;
        }
        const CMat omega = f_all * s_all * f_all.adjoint() + (f_all * f_all.adjoint() + c_all) / tau_rho;
        const CMat dense = s_all * f_all.adjoint() * omega.fullPivLu().inverse();
        CHECK((qe_gain(sigma, bm, tau_rho).global() - dense).cwiseAbs().maxCoeff() < 1e-8);
    }

    TEST_CASE("qe_gain reports the singular AP")
    {
        std::vector<CMat> sigma{CMat::Identity(2, 2), CMat::Zero(2, 2)};
        std::vector<BussgangModel> bm{{CMat::Identity(2, 2), CMat::Zero(2, 2), 0}, {CMat::Zero(2, 2), CMat::Zero(2, 2), 0}};
        try {
            (void)qe_gain(sigma, bm, 1.0);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(std::string(e.what()).find("AP 1") != std::string::npos);
        }
    }

    TEST_CASE("QE pipeline degenerates to the unquantized EQ pipeline")
    {
        Rng rng(11);
        const int n_aps = 3, n = 2, k_users = 2, tau = 3;
        const double rho = 5.0;
        const PilotBook pilots = generate_pilots(tau, k_users, rng);
        std::vector<std::vector<CMat>> sigma(n_aps);
        std::vector<std::vector<EqGain>> eq(n_aps);
        for (int l = 0; l < n_aps; ++l)
            for (int k = 0; k < k_users; ++k) {
                sigma[l].push_back(random_psd(n, rng));
                eq[l].push_back(eq_gain(sigma[l].back(), tau * rho));
            }
        const std::vector<BussgangModel> identity(n_aps, BussgangModel{CMat::Identity(n, n), CMat::Zero(n, n), 0});
        std::vector<QeGain> qe;
        for (int k = 0; k < k_users; ++k) {
            std::vector<CMat> blocks;
            for (int l = 0; l < n_aps; ++l)
                blocks.push_back(sigma[l][k]);
            qe.push_back(qe_gain(blocks, identity, tau * rho));
        }

        std::vector<ReceivedPilots> received;
        std::vector<CMat> local;
        for (int l = 0; l < n_aps; ++l) {
            received.push_back(receive_pilots(rng.complex_normal_matrix(n, k_users), pilots, rho, true, rng));
            local.push_back(estimate_eq(received.back(), pilots, eq[l]));
        }
        const std::vector<FronthaulQuantizer> pass(n_aps, FronthaulQuantizer::passthrough());
        const CsiEstimate a = run_qe_pipeline(received, pass, pilots, qe, Scheme::VqQe);
        const CsiEstimate b = assemble_unquantized(local);
        CHECK((a.g_hat - b.g_hat).norm() <= 1e-10 * b.g_hat.norm());
        CHECK(run_qe_pipeline(received, pass, pilots, qe, Scheme::VqQe).g_hat == a.g_hat);
    }

    TEST_CASE("scalar and vector quantizers coincide for one antenna")
    {
        Rng rng(12);
        const Codebook cb = lbg_train(split_real(unit_complex_samples(1, 4000, rng)), 4);
        const FronthaulQuantizer vq = FronthaulQuantizer::vector(cb);
        const FronthaulQuantizer sq = FronthaulQuantizer::scalar(cb);
        std::vector<CMat> local{rng.complex_normal_matrix(1, 50)};
        RMat beta = RMat::Constant(1, 50, 0.7);
        CHECK(eq_quantize(local, {vq}, beta).g_hat == eq_quantize(local, {sq}, beta).g_hat);
        // same bit budget per vector: N b real bits per part
        CHECK(cb.bits_per_dim() == 2.0);
    }

    TEST_CASE("vector quantization is no worse than scalar on uncorrelated inputs")
    {
        Rng rng(13);
        const int n = 2;
        const Codebook vcb = lbg_train(split_real(unit_complex_samples(n, 10000, rng)), 16);
        const FronthaulQuantizer vq = FronthaulQuantizer::vector(vcb);
        const FronthaulQuantizer sq
            = FronthaulQuantizer::scalar(uniform_scalar_codebook(2, std::sqrt(0.5), default_loading_factor(2)));
        CHECK(vcb.bits_per_dim() == 2.0);
        std::vector<double> diff;
        double sum = 0.0;
        for (int t = 0; t < 500; ++t) {
            const CVec x = rng.complex_normal_vector(n);
            const double d = (vq(x) - x).squaredNorm() - (sq(x) - x).squaredNorm();
            diff.push_back(d);
            sum += d;
        }
        const double mean = sum / 500.0;
        double ss = 0.0;
        for (double d : diff)
            ss += (d - mean) * (d - mean);
        const double se = std::sqrt(ss / 499.0 / 500.0);
        CHECK(mean <= 2.0 * se);
    }
}
