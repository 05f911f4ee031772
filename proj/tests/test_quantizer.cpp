#include <doctest.h>

#include <cstring>
#include <limits>
#include <sstream>

#include "cfmimo/quantizer.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

RMat gaussian_samples(int dim, int n, double rho, Rng& rng)
{
    RMat x(dim, n);
    for (int i = 0; i < n; ++i) {
        const double common = rng.normal();
        for (int d = 0; d < dim; ++d)
            x(d, i) = std::sqrt(rho) * common + std::sqrt(1.0 - rho) * rng.normal();
    }
    return x;
}

int brute_nearest(const RMat& points, const RVec& x)
{
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < points.cols(); ++j) {
        const double d = (points.col(j) - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

double held_out_distortion(const Codebook& cb, const RMat& x)
{
    double acc = 0.0;
    for (int i = 0; i < x.cols(); ++i)
        acc += (quantize(cb, x.col(i)).reconstruction - x.col(i)).squaredNorm();
    return acc / x.cols();
}

} // namespace

TEST_SUITE("quantizer")
{
    TEST_CASE("single-cell codebook is the sample mean")
    {
        Rng rng(1);
        const RMat x = gaussian_samples(3, 500, 0.3, rng).array() + 2.0;
        const Codebook cb = lbg_train(x, 1);
        REQUIRE(cb.size() == 1);
        CHECK((cb.points().col(0) - x.rowwise().mean()).norm() < 1e-12);
    }

    TEST_CASE("two-cluster recovery against a k-means oracle")
    {
        Rng rng(2);
        const int per = 400;
        RMat x(2, 2 * per);
        for (int i = 0; i < 2 * per; ++i) {
            const double c = i < per ? 5.0 : -5.0;
            x(0, i) = c + 0.1 * rng.normal();
            x(1, i) = c + 0.1 * rng.normal();
        }
        // oracle: Lloyd from the generating cluster means, run to a fixed point
        RMat centers(2, 2);
        centers.col(0) = x.leftCols(per).rowwise().mean();
        centers.col(1) = x.rightCols(per).rowwise().mean();
        for (int it = 0; it < 100; ++it) {
            RMat sums = RMat::Zero(2, 2);
            RVec counts = RVec::Zero(2);
            for (int i = 0; i < x.cols(); ++i) {
                const int j = brute_nearest(centers, x.col(i));
                sums.col(j) += x.col(i);
                counts[j] += 1;
            }
            for (int j = 0; j < 2; ++j)
                centers.col(j) = sums.col(j) / counts[j];
        }

        const Codebook cb = lbg_train(x, 2);
        for (int j = 0; j < 2; ++j) {
            const RVec p = cb.points().col(j);
            const double d = std::min((p - centers.col(0)).norm(), (p - centers.col(1)).norm());
            CHECK(d < 0.05);
        }
        CHECK((cb.points().col(0) - cb.points().col(1)).norm() > 1.0);
    }

    TEST_CASE("LBG distortion is non-increasing and the fixed point satisfies both optimality conditions")
    {
        Rng rng(3);
        const RMat x = gaussian_samples(2, 3000, 0.8, rng);
        LbgOptions opt;
        opt.rel_tol = 0.0;
        opt.max_iters = 10000;
        const Codebook cb = lbg_train(x, 16, opt);
        const auto& log = cb.meta().distortion_log;
        REQUIRE(log.size() > 4);
        for (std::size_t i = 1; i < log.size(); ++i)
            CHECK(log[i] <= log[i - 1]);
        CHECK(cb.meta().final_distortion == log.back());
        CHECK(cb.meta().n_training_samples == 3000);

        // nearest-neighbour partition and centroid condition
        RMat sums = RMat::Zero(2, 16);
        RVec counts = RVec::Zero(16);
        for (int i = 0; i < x.cols(); ++i) {
            const int j = quantize(cb, x.col(i)).index;
            CHECK(j == brute_nearest(cb.points(), x.col(i)));
            sums.col(j) += x.col(i);
            counts[j] += 1;
        }
        for (int j = 0; j < 16; ++j) {
            REQUIRE(counts[j] > 0);
            const RVec centroid = sums.col(j) / counts[j];
            CHECK((centroid - cb.points().col(j)).norm() <= 1e-9 * std::max(1.0, centroid.norm()));
        }
        // pairwise distinct
        for (int a = 0; a < 16; ++a)
            for (int b = a + 1; b < 16; ++b)
                CHECK((cb.points().col(a) - cb.points().col(b)).norm() > 0.0);
    }

    TEST_CASE("held-out distortion decreases as the codebook doubles")
    {
        Rng rng(4);
        const RMat train = gaussian_samples(2, 4000, 0.9, rng);
        const RMat test = gaussian_samples(2, 4000, 0.9, rng);
        double prev = std::numeric_limits<double>::infinity();
        for (int s : {1, 2, 4, 8, 16, 32}) {
            const double d = held_out_distortion(lbg_train(train, s), test);
            CHECK(d <= prev);
            prev = d;
        }
    }

    TEST_CASE("input scale is applied before encoding and undone after")
    {
        Rng rng(5);
        const RMat x = 1e-6 * gaussian_samples(2, 2000, 0.5, rng);
        LbgOptions opt;
        opt.input_scale = 1e6;
        const Codebook cb = lbg_train(x, 8, opt);
        CHECK(cb.input_scale() == 1e6);
        CHECK(cb.points().cwiseAbs().maxCoeff() > 0.1); // trained on normalized data
        for (int j = 0; j < 8; ++j) {
            const QuantizedValue q = quantize(cb, cb.points().col(j) / cb.input_scale());
            CHECK(q.index == j);
            CHECK((q.reconstruction - cb.points().col(j) / 1e6).norm() == 0.0);
        }
    }

    TEST_CASE("lbg_train preconditions")
    {
        Rng rng(6);
        const RMat x = gaussian_samples(2, 10, 0.0, rng);
        CHECK_THROWS_AS(lbg_train(x, 16), std::invalid_argument);
        CHECK_THROWS_AS(lbg_train(x, 3), std::invalid_argument);
        RMat bad = x;
        bad(0, 3) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(lbg_train(bad, 2), std::invalid_argument);
        CHECK_THROWS_AS(lbg_train(RMat(2, 0), 1), std::invalid_argument);
    }

    TEST_CASE("quantize examples")
    {
        RMat pts(2, 2);
        pts << -1, 1, -1, 1;
        const Codebook cb(pts);
        RVec x(2);
        x << 0.9, 0.8;
        CHECK(quantize(cb, x).index == brute_nearest(pts, x));
        CHECK(quantize(cb, x).index == 1);
        CHECK(quantize(cb, RVec::Zero(2)).index == 0);
        CHECK(quantize(cb, pts.col(0)).index == 0);
        CHECK_THROWS_AS(quantize(cb, RVec::Zero(3)), std::invalid_argument);
    }

    TEST_CASE("nearest neighbour agrees with exhaustive search")
    {
        Rng rng(7);
        const Codebook cb = lbg_train(gaussian_samples(4, 4000, 0.7, rng), 64);
        for (int i = 0; i < 10000; ++i) {
            RVec x(4);
            for (int d = 0; d < 4; ++d)
                x[d] = 1.5 * rng.normal();
            CHECK(quantize(cb, x).index == brute_nearest(cb.points(), x));
        }
    }

    TEST_CASE("quantize_complex")
    {
        Rng rng(8);
        const Codebook cb = lbg_train(gaussian_samples(3, 2000, 0.5, rng), 16);
        CVec real_only(3);
        real_only << Complex{0.3, 0}, Complex{-1.0, 0}, Complex{0.2, 0};
        const CVec q = quantize_complex(cb, real_only);
        CHECK((q.imag() - quantize(cb, RVec::Zero(3)).reconstruction).norm() == 0.0);

        CVec same(3);
        same << Complex{0.4, 0.4}, Complex{-0.2, -0.2}, Complex{1.1, 1.1};
        const CVec qs = quantize_complex(cb, same);
        CHECK((qs.real() - qs.imag()).norm() == 0.0);

        for (int i = 0; i < 100; ++i) {
            const CVec x = rng.complex_normal_vector(3);
            const CVec out = quantize_complex(cb, x);
            const double total = (x - out).squaredNorm();
            const double re = (x.real() - quantize(cb, x.real()).reconstruction).squaredNorm();
            const double im = (x.imag() - quantize(cb, x.imag()).reconstruction).squaredNorm();
            CHECK(total == doctest::Approx(re + im).epsilon(1e-12));
        }
    }

    TEST_CASE("uniform scalar codebook levels")
    {
        const Codebook one = uniform_scalar_codebook(1, 1.0, 1.0);
        REQUIRE(one.size() == 2);
        CHECK(one.points()(0, 0) == -0.5);
        CHECK(one.points()(0, 1) == 0.5);

        const Codebook two = uniform_scalar_codebook(2, 1.0, 2.0);
        REQUIRE(two.size() == 4);
        const double expected[] = {-1.5, -0.5, 0.5, 1.5};
        for (int i = 0; i < 4; ++i)
            CHECK(two.points()(0, i) == doctest::Approx(expected[i]).epsilon(1e-15));
        CHECK(two.bits_per_dim() == 2.0);

        // midpoints stay at their level; far inputs clip to the outer levels
        for (int i = 0; i < 4; ++i) {
            RVec x(1);
            x[0] = expected[i];
            CHECK(quantize(two, x).index == i);
        }
        RVec big(1);
        big[0] = 100.0;
        CHECK(quantize(two, big).reconstruction[0] == doctest::Approx(1.5));
        big[0] = -100.0;
        CHECK(quantize(two, big).reconstruction[0] == doctest::Approx(-1.5));
    }

    TEST_CASE("default loading factor is near Gaussian-optimal")
    {
        Rng rng(9);
        RMat x(1, 100000);
        for (int i = 0; i < x.cols(); ++i)
            x(0, i) = rng.normal();
        for (int bits : {1, 2, 3}) {
            const double best = held_out_distortion(uniform_scalar_codebook(bits, 1.0, default_loading_factor(bits)), x);
            for (double factor : {0.8, 1.25}) {
                const auto other = uniform_scalar_codebook(bits, 1.0, factor * default_loading_factor(bits));
                CHECK(best < held_out_distortion(other, x));
            }
        }
    }

    TEST_CASE("codebook file round-trips bit-exactly")
    {
        Rng rng(10);
        for (int dim : {1, 2, 4}) {
            LbgOptions opt;
            opt.input_scale = 0.37;
            const Codebook cb = lbg_train(gaussian_samples(dim, 1000, 0.6, rng), 8, opt);
            std::stringstream buf;
            write_codebook(buf, cb);
            CHECK(buf.str().size() == 64 + 8 * dim * 8);
            const Codebook back = read_codebook(buf);
            CHECK(back.dim() == cb.dim());
            CHECK(back.size() == cb.size());
            CHECK(back.input_scale() == cb.input_scale());
            CHECK(back.meta().n_training_samples == cb.meta().n_training_samples);
            CHECK(back.meta().final_distortion == cb.meta().final_distortion);
            CHECK(back.meta().iterations == cb.meta().iterations);
            CHECK(std::memcmp(back.points().data(), cb.points().data(), sizeof(double) * cb.points().size()) == 0);
        }
        std::stringstream junk("NOTACODEBOOK....");
        CHECK_THROWS(read_codebook(junk));
    }

    TEST_CASE("fronthaul quantizer kinds")
    {
        Rng rng(11);
        const CVec x = rng.complex_normal_vector(3);
        CHECK(FronthaulQuantizer::passthrough()(x) == x);

        const Codebook sq = uniform_scalar_codebook(2, 0.7, default_loading_factor(2));
        const CVec q = FronthaulQuantizer::scalar(sq)(x);
        for (int i = 0; i < 3; ++i) {
            RVec re(1), im(1);
            re[0] = x[i].real();
            im[0] = x[i].imag();
            CHECK(q[i].real() == quantize(sq, re).reconstruction[0]);
            CHECK(q[i].imag() == quantize(sq, im).reconstruction[0]);
        }
        CHECK_THROWS_AS(FronthaulQuantizer::scalar(lbg_train(gaussian_samples(2, 100, 0.1, rng), 4)),
                        std::invalid_argument);
    }
}
