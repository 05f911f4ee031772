#include "cfmimo/quantizer.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace cfmimo {

namespace {

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

// Nearest point with partial-distance elimination; ties keep the lower index.
int nearest_point(const RMat& points, const double* x)
{
    const int n = static_cast<int>(points.rows());
    const int s = static_cast<int>(points.cols());
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < s; ++j) {
        const double* p = points.data() + static_cast<std::ptrdiff_t>(j) * n;
        double acc = 0.0;
        int d = 0;
        for (; d < n; ++d) {
            const double diff = x[d] - p[d];
            acc += diff * diff;
            if (acc >= best_dist)
                break;
        }
        if (d == n && acc < best_dist) {
            best_dist = acc;
            best = j;
        }
    }
    return best;
}

struct CellStats {
    RMat centroids;
    std::vector<std::size_t> counts;
};

CellStats compute_centroids(const RMat& x, const std::vector<int>& assign, int cells)
{
    CellStats st;
    st.centroids = RMat::Zero(x.rows(), cells);
    st.counts.assign(static_cast<std::size_t>(cells), 0);
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        const int c = assign[static_cast<std::size_t>(i)];
        st.centroids.col(c) += x.col(i);
        ++st.counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < cells; ++c)
        if (st.counts[static_cast<std::size_t>(c)] > 0)
            st.centroids.col(c) /= static_cast<double>(st.counts[static_cast<std::size_t>(c)]);
    return st;
}

// Gives every empty cell the sample farthest from its centroid in the cell
// with the largest total distortion. Never increases total distortion.
void reseed_empty_cells(const RMat& x, std::vector<int>& assign, int cells)
{
    for (;;) {
        CellStats st = compute_centroids(x, assign, cells);
        const auto empty = std::find(st.counts.begin(), st.counts.end(), std::size_t{0});
        if (empty == st.counts.end())
            return;
        const int target = static_cast<int>(empty - st.counts.begin());

        std::vector<double> cell_dist(static_cast<std::size_t>(cells), 0.0);
        std::vector<double> sample_dist(static_cast<std::size_t>(x.cols()));
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            const int c = assign[static_cast<std::size_t>(i)];
            const double d = (x.col(i) - st.centroids.col(c)).squaredNorm();
            sample_dist[static_cast<std::size_t>(i)] = d;
            cell_dist[static_cast<std::size_t>(c)] += d;
        }
        int worst = -1;
        for (int c = 0; c < cells; ++c) {
            if (st.counts[static_cast<std::size_t>(c)] < 2)
                continue;
            if (worst < 0 || cell_dist[static_cast<std::size_t>(c)] > cell_dist[static_cast<std::size_t>(worst)])
                worst = c;
        }
        if (worst < 0)
            throw NumericalError("lbg_train: cannot fill empty cell, not enough samples");

        Eigen::Index far = -1;
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            if (assign[static_cast<std::size_t>(i)] != worst)
                continue;
            if (far < 0 || sample_dist[static_cast<std::size_t>(i)] > sample_dist[static_cast<std::size_t>(far)])
                far = i;
        }
        assign[static_cast<std::size_t>(far)] = target;
    }
}

double mean_distortion(const RMat& x, const std::vector<int>& assign, const RMat& centroids)
{
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.cols(); ++i)
        acc += (x.col(i) - centroids.col(assign[static_cast<std::size_t>(i)])).squaredNorm();
    return acc / static_cast<double>(x.cols());
}

} // namespace

Codebook::Codebook(RMat points, double input_scale, TrainingMeta meta)
    : points_(std::move(points)), input_scale_(input_scale), meta_(std::move(meta))
{
    if (points_.rows() < 1 || !is_power_of_two(points_.cols()))
        throw std::invalid_argument("Codebook: size must be a power of two and dim >= 1");
    if (!points_.allFinite())
        throw std::invalid_argument("Codebook: non-finite reconstruction point");
    if (!(input_scale_ > 0.0) || !std::isfinite(input_scale_))
        throw std::invalid_argument("Codebook: input scale must be positive and finite");
}

double Codebook::bits_per_dim() const
{
    return std::log2(static_cast<double>(size())) / dim();
}

int Codebook::nearest(const double* scaled) const
{
    return nearest_point(points_, scaled);
}

Codebook lbg_train(const RMat& samples, int target_size, const LbgOptions& options)
{
    if (samples.cols() == 0 || samples.rows() == 0)
        throw std::invalid_argument("lbg_train: no training samples");
    if (!is_power_of_two(target_size))
        throw std::invalid_argument("lbg_train: target size must be a power of two");
    if (target_size > samples.cols())
        throw std::invalid_argument("lbg_train: target size exceeds the number of samples");
    if (!samples.allFinite())
        throw std::invalid_argument("lbg_train: non-finite training sample");
    if (!(options.input_scale > 0.0))
        throw std::invalid_argument("lbg_train: input scale must be positive");

    const RMat x = options.input_scale * samples;
    const Eigen::Index n_samples = x.cols();

    RVec mean = x.rowwise().mean();
    RVec spread = ((x.colwise() - mean).array().square().rowwise().mean()).sqrt();
    for (Eigen::Index d = 0; d < spread.size(); ++d)
        if (!(spread[d] > 0.0))
            spread[d] = 1.0;
    const RVec perturbation = options.split_epsilon * spread;

    TrainingMeta meta;
    meta.n_training_samples = static_cast<std::uint64_t>(n_samples);

    std::vector<int> assign(static_cast<std::size_t>(n_samples), 0);
    RMat points = mean;
    double distortion = mean_distortion(x, assign, points);
    meta.distortion_log.push_back(distortion);

    int cells = 1;
    while (cells < target_size) {
        const RMat parent = points;
        const int parent_cells = cells;
        cells *= 2;
        points.resize(x.rows(), cells);
        for (int c = 0; c < parent_cells; ++c) {
            points.col(2 * c) = parent.col(c) + perturbation;
            points.col(2 * c + 1) = parent.col(c) - perturbation;
        }
        // First partition of a stage refines the parent cells, so the
        // distortion sequence stays monotone across splits.
        for (Eigen::Index i = 0; i < n_samples; ++i) {
            const int p = assign[static_cast<std::size_t>(i)];
            const double side = (x.col(i) - parent.col(p)).dot(perturbation);
            assign[static_cast<std::size_t>(i)] = side >= 0.0 ? 2 * p : 2 * p + 1;
        }

        double prev = distortion;
        for (int it = 0;; ++it) {
            reseed_empty_cells(x, assign, cells);
            points = compute_centroids(x, assign, cells).centroids;
            distortion = mean_distortion(x, assign, points);
            meta.distortion_log.push_back(distortion);
            ++meta.iterations;

            if (it + 1 >= options.max_iters)
                break;
            if (prev - distortion <= options.rel_tol * prev)
                break;
            prev = distortion;

            bool changed = false;
            for (Eigen::Index i = 0; i < n_samples; ++i) {
                const int best = nearest_point(points, x.col(i).data());
                if (best != assign[static_cast<std::size_t>(i)]) {
                    assign[static_cast<std::size_t>(i)] = best;
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
    }

    meta.final_distortion = distortion;
    return Codebook(std::move(points), options.input_scale, std::move(meta));
}

QuantizedValue quantize(const Codebook& cb, const RVec& x)
{
    if (x.size() != cb.dim())
        throw std::invalid_argument("quantize: dimension mismatch");
    const RVec scaled = cb.input_scale() * x;
    QuantizedValue out;
    out.index = cb.nearest(scaled.data());
    out.reconstruction = cb.points().col(out.index) / cb.input_scale();
    return out;
}

CVec quantize_complex(const Codebook& cb, const CVec& x)
{
    if (x.size() != cb.dim())
        throw std::invalid_argument("quantize_complex: dimension mismatch");
    const RVec re = cb.input_scale() * x.real();
    const RVec im = cb.input_scale() * x.imag();
    const double inv = 1.0 / cb.input_scale();
    CVec out(x.size());
    out.real() = cb.points().col(cb.nearest(re.data())) * inv;
    out.imag() = cb.points().col(cb.nearest(im.data())) * inv;
    return out;
}

double default_loading_factor(int bits)
{
    // Gaussian-optimal uniform step sizes (in units of sigma) for 2..256 levels.
    static constexpr std::array<double, 8> step = {1.596, 0.9957, 0.5860, 0.3352, 0.1881, 0.1041, 0.0569, 0.0308};
    if (bits < 1)
        throw std::invalid_argument("default_loading_factor: bits must be >= 1");
    const int idx = std::min<int>(bits, static_cast<int>(step.size())) - 1;
    return step[static_cast<std::size_t>(idx)] * std::ldexp(1.0, idx);
}

Codebook uniform_scalar_codebook(int bits, double input_std, double loading_factor)
{
    if (bits < 1 || bits > 30)
        throw std::invalid_argument("uniform_scalar_codebook: bits out of range");
    if (!(input_std > 0.0) || !(loading_factor > 0.0))
        throw std::invalid_argument("uniform_scalar_codebook: sigma and loading factor must be positive");
    const int levels = 1 << bits;
    const double step = 2.0 * loading_factor * input_std / levels;
    RMat points(1, levels);
    const int half = levels / 2;
    for (int i = 0; i < half; ++i) {
        points(0, half - 1 - i) = -(i + 0.5) * step;
        points(0, half + i) = (i + 0.5) * step;
    }
    return Codebook(std::move(points), 1.0);
}

// Binary layout (little-endian):
//   char[8] magic "CFMIMOCB", u32 version, u32 dim, u64 size,
//   f64 bits_per_dim, f64 input_scale, u64 n_training_samples,
//   f64 final_distortion, u64 iterations, f64 points[size][dim]
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'F', 'M', 'I', 'M', 'O', 'C', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "codebook I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T)))
        throw std::runtime_error("codebook file truncated");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

} // namespace

void write_codebook(std::ostream& out, const Codebook& cb)
{
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.dim()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.size()));
    put<double>(out, cb.bits_per_dim());
    put<double>(out, cb.input_scale());
    put<std::uint64_t>(out, cb.meta().n_training_samples);
    put<double>(out, cb.meta().final_distortion);
    put<std::uint64_t>(out, cb.meta().iterations);
    // column-major N x S storage is row-major S x N on disk
    for (Eigen::Index j = 0; j < cb.points().cols(); ++j)
        for (Eigen::Index d = 0; d < cb.points().rows(); ++d)
            put<double>(out, cb.points()(d, j));
    if (!out)
        throw std::runtime_error("failed to write codebook");
}

Codebook read_codebook(std::istream& in)
{
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw std::runtime_error("not a codebook file (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if (version != kFormatVersion)
        throw std::runtime_error("unsupported codebook format version " + std::to_string(version));
    const auto dim = get<std::uint32_t>(in);
    const auto size = get<std::uint64_t>(in);
    const auto bits_per_dim = get<double>(in);
    const auto input_scale = get<double>(in);
    TrainingMeta meta;
    meta.n_training_samples = get<std::uint64_t>(in);
    meta.final_distortion = get<double>(in);
    meta.iterations = get<std::uint64_t>(in);
    if (dim == 0 || size == 0 || size > (1ULL << 32))
        throw std::runtime_error("codebook header has invalid dimensions");

    RMat points(dim, static_cast<Eigen::Index>(size));
    for (Eigen::Index j = 0; j < points.cols(); ++j)
        for (Eigen::Index d = 0; d < points.rows(); ++d)
            points(d, j) = get<double>(in);

    Codebook cb(std::move(points), input_scale, std::move(meta));
    if (std::abs(cb.bits_per_dim() - bits_per_dim) > 1e-12)
        throw std::runtime_error("codebook header bits_per_dim inconsistent with size and dim");
    return cb;
}

void save_codebook(const std::string& path, const Codebook& cb)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_codebook(out, cb);
}

Codebook load_codebook(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return read_codebook(in);
}

FronthaulQuantizer FronthaulQuantizer::passthrough()
{
    return {};
}

FronthaulQuantizer FronthaulQuantizer::vector(Codebook cb)
{
    FronthaulQuantizer q;
    q.kind_ = Kind::Vector;
    q.codebook_ = std::move(cb);
    return q;
}

FronthaulQuantizer FronthaulQuantizer::scalar(Codebook cb)
{
    if (cb.dim() != 1)
        throw std::invalid_argument("FronthaulQuantizer::scalar needs a one-dimensional codebook");
    FronthaulQuantizer q;
    q.kind_ = Kind::Scalar;
    q.codebook_ = std::move(cb);
    return q;
}

CVec FronthaulQuantizer::operator()(const CVec& x) const
{
    switch (kind_) {
    case Kind::Passthrough:
        return x;
    case Kind::Vector:
        return quantize_complex(codebook_, x);
    case Kind::Scalar: {
        const double scale = codebook_.input_scale();
        CVec out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double re = scale * x[i].real();
            const double im = scale * x[i].imag();
            out[i] = Complex{codebook_.points()(0, codebook_.nearest(&re)), codebook_.points()(0, codebook_.nearest(&im))}
                     / scale;
        }
        return out;
    }
    }
    return x;
}

} // namespace cfmimo
