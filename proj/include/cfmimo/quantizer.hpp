#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/common.hpp"

namespace cfmimo {

struct TrainingMeta {
    std::uint64_t n_training_samples = 0;
    double final_distortion = 0.0;
    std::uint64_t iterations = 0;
    /// Mean squared distortion after every centroid update, in training
    /// order across all splitting stages. Not serialized.
    std::vector<double> distortion_log;
};

/// Fixed-rate codebook of S = 2^(b N) reconstruction points in R^N.
///
/// Inputs are multiplied by `input_scale` before the nearest-neighbour
/// search and reconstructions are divided by it, so a codebook trained on
/// normalized data can be applied to raw signals.
class Codebook {
public:
    Codebook() = default;
    /// `points` holds one reconstruction point per column (N x S).
    explicit Codebook(RMat points, double input_scale = 1.0, TrainingMeta meta = {});

    int dim() const { return static_cast<int>(points_.rows()); }
    int size() const { return static_cast<int>(points_.cols()); }
    double bits_per_dim() const;
    double input_scale() const { return input_scale_; }
    const RMat& points() const { return points_; }
    const TrainingMeta& meta() const { return meta_; }

    /// Index of the nearest point to an already scaled input of length dim().
    /// Ties go to the lowest index.
    int nearest(const double* scaled) const;

private:
    RMat points_;
    double input_scale_ = 1.0;
    TrainingMeta meta_;
};

struct QuantizedValue {
    int index = 0;
    RVec reconstruction;
};

struct LbgOptions {
    double split_epsilon = 0.01;
    double rel_tol = 1e-6;
    int max_iters = 100; // Lloyd iterations per splitting stage
    double input_scale = 1.0;
};

/// Linde-Buzo-Gray training by binary splitting from the global centroid.
/// `samples` holds one training vector per column. Training runs on
/// input_scale * samples; the resulting codebook carries that scale.
Codebook lbg_train(const RMat& samples, int target_size, const LbgOptions& options = {});

QuantizedValue quantize(const Codebook& cb, const RVec& x);

/// Real and imaginary parts are quantized separately with the same codebook.
CVec quantize_complex(const Codebook& cb, const CVec& x);

/// Step size multiple gamma such that the mid-rise quantizer with
/// range +-gamma sigma has the MSE-optimal step for a Gaussian input.
double default_loading_factor(int bits);

/// 2^bits mid-rise levels +-(i + 1/2) step, step = 2 gamma sigma / 2^bits.
/// Inputs beyond the outermost level clip to it through nearest-neighbour
/// encoding.
Codebook uniform_scalar_codebook(int bits, double input_std, double loading_factor);

/// Binary codebook file, see docs/codebook_format.md.
void write_codebook(std::ostream& out, const Codebook& cb);
Codebook read_codebook(std::istream& in);
void save_codebook(const std::string& path, const Codebook& cb);
Codebook load_codebook(const std::string& path);

/// Quantizer interface applied on a fronthaul link to a complex N-vector.
class FronthaulQuantizer {
public:
    enum class Kind { Passthrough, Vector, Scalar };

    /// Identity map; exists so that pipelines can be compared against their
    /// unquantized counterparts.
    static FronthaulQuantizer passthrough();
    /// Joint quantization of the N antennas (real and imaginary separately).
    static FronthaulQuantizer vector(Codebook cb);
    /// Independent quantization of every real component with a 1-D codebook.
    static FronthaulQuantizer scalar(Codebook cb);

    CVec operator()(const CVec& x) const;

    Kind kind() const { return kind_; }
    const Codebook& codebook() const { return codebook_; }

private:
    Kind kind_ = Kind::Passthrough;
    Codebook codebook_;
};

} // namespace cfmimo
