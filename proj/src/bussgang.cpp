#include "cfmimo/bussgang.hpp"

namespace cfmimo {

CMat sample_covariance(const CMat& samples_a, const CMat& samples_b)
{
    if (samples_a.cols() == 0 || samples_b.cols() == 0)
        throw std::invalid_argument("sample_covariance: no samples");
    if (samples_a.cols() != samples_b.cols())
        throw std::invalid_argument("sample_covariance: sample counts differ");
    if (samples_a.rows() != samples_b.rows())
        throw std::invalid_argument("sample_covariance: dimensions differ");
    return (samples_a * samples_b.adjoint()) / static_cast<double>(samples_a.cols());
}

CMat clamp_psd(const CMat& m)
{
    const CMat herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> solver(herm);
    if (solver.info() != Eigen::Success)
        throw NumericalError("clamp_psd: eigendecomposition failed");
    const RVec vals = solver.eigenvalues().cwiseMax(0.0);
    const CMat& vecs = solver.eigenvectors();
    CMat out = vecs * vals.asDiagonal() * vecs.adjoint();
    return 0.5 * (out + out.adjoint());
}

BussgangModel bussgang_from_pairs(const CMat& inputs, const CMat& outputs)
{
    const CMat cxx = sample_covariance(inputs, inputs);
    const CMat cqx = sample_covariance(outputs, inputs);
    const CMat cqq = sample_covariance(outputs, outputs);
    const Eigen::Index n = cxx.rows();

    Eigen::LDLT<CMat> ldlt(cxx);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
        const double reg = 1e-12 * cxx.trace().real() / static_cast<double>(n);
        ldlt.compute(cxx + reg * CMat::Identity(n, n));
        if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 0.0) || !(reg > 0.0))
            throw NumericalError("estimate_bussgang: input covariance is singular (trace "
                                 + std::to_string(cxx.trace().real()) + ")");
    }

    // F^H = C_xx^{-1} C_{x xq}
    BussgangModel model;
    model.gain = ldlt.solve(cqx.adjoint()).adjoint();
    model.distortion_cov = clamp_psd(cqq - model.gain * cqx.adjoint());
    model.n_samples = static_cast<std::size_t>(inputs.cols());
    if (!model.gain.allFinite() || !model.distortion_cov.allFinite())
        throw NumericalError("estimate_bussgang: non-finite result");
    return model;
}

BussgangModel estimate_bussgang(const CMat& inputs, const ComplexQuantizer& quantizer)
{
    if (inputs.cols() == 0)
        throw std::invalid_argument("estimate_bussgang: no samples");
    CMat outputs(inputs.rows(), inputs.cols());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i)
        outputs.col(i) = quantizer(inputs.col(i));
    return bussgang_from_pairs(inputs, outputs);
}

BussgangModel bussgang_diagonal_from_pairs(const CMat& inputs, const CMat& outputs)
{
    const Eigen::Index n = inputs.rows();
    BussgangModel model;
    model.gain = CMat::Zero(n, n);
    model.distortion_cov = CMat::Zero(n, n);
    model.n_samples = static_cast<std::size_t>(inputs.cols());
    for (Eigen::Index a = 0; a < n; ++a) {
        const BussgangModel scalar = bussgang_from_pairs(inputs.row(a), outputs.row(a));
        model.gain(a, a) = scalar.gain(0, 0);
        model.distortion_cov(a, a) = scalar.distortion_cov(0, 0);
    }
    return model;
}

} // namespace cfmimo
