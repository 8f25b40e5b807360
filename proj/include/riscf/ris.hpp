#pragma once

#include "riscf/rng.hpp"
#include "riscf/units.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace riscf {

/// Sinc-kernel spatial correlation of an l_v x l_h planar array.
///
/// Element x (0-based) sits at (0, (x mod l_h) d_h, floor(x / l_h) d_v).
inline Eigen::MatrixXd correlation_matrix(int l_v, int l_h, double d_h, double d_v, double wavelength_m)
{
    if (l_v < 1 || l_h < 1)
        throw std::invalid_argument("correlation_matrix: panel needs at least one element");
    if (!(d_h > 0.0 && d_v > 0.0 && wavelength_m > 0.0))
        throw std::invalid_argument("correlation_matrix: spacings and wavelength must be positive");
    const int L = l_v * l_h;
    Eigen::MatrixXd R(L, L);
    for (int n = 0; n < L; ++n) {
        const double yn = (n % l_h) * d_h;
        const double zn = (n / l_h) * d_v;
        for (int m = 0; m <= n; ++m) {
            const double dy = yn - (m % l_h) * d_h;
            const double dz = zn - (m / l_h) * d_v;
            const double r = sinc(2.0 * std::sqrt(dy * dy + dz * dz) / wavelength_m);
            R(n, m) = r;
            R(m, n) = r;
        }
    }
    return R;
}

/// Symmetric PSD square root by eigendecomposition.
///
/// Eigenvalues down to -1e-10 (relative to the largest) are treated as
/// roundoff and clamped to zero; anything more negative is rejected.
inline Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& R)
{
    if (R.rows() != R.cols())
        throw std::invalid_argument("matrix_sqrt_psd: matrix must be square");
    if (R.size() == 0)
        return R;
    const double asym = (R - R.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, R.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("matrix_sqrt_psd: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.minCoeff() < -tol)
        throw std::domain_error("matrix_sqrt_psd: matrix has a significantly negative eigenvalue");
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd& V = eig.eigenvectors();
    Eigen::MatrixXd S = V * ev.asDiagonal() * V.transpose();
    return 0.5 * (S + S.transpose());
}

/// Uniform panel description as it appears in the scenario configuration.
struct PanelSpec {
    int l_v = 10;
    int l_h = 10;
    double spacing_over_lambda = 0.5;
    double phase_rad = kPi / 4.0;
    double amplitude = 1.0;
    double rho_db = 10.0; // signal-to-EMI power ratio
};

/// One RIS: geometry, phase configuration, correlation and the derived T matrix.
///
/// Immutable after construction; copies share the L x L matrices.
class RisPanel {
public:
    RisPanel(int l_v, int l_h, double d_h, double d_v, double wavelength_m, Eigen::VectorXd phases,
             Eigen::VectorXd amplitudes, double emi_power = 0.0)
    {
        auto d = std::make_shared<Data>();
        d->l_v = l_v;
        d->l_h = l_h;
        d->d_h = d_h;
        d->d_v = d_v;
        d->area = d_h * d_v;
        const int L = l_v * l_h;
        if (phases.size() != L || amplitudes.size() != L)
            throw std::invalid_argument("RisPanel: need one phase and amplitude per element");
        if ((amplitudes.array() < 0.0).any() || (amplitudes.array() > 1.0).any())
            throw std::invalid_argument("RisPanel: amplitudes must lie in [0, 1]");
        d->phases = std::move(phases);
        d->amplitudes = std::move(amplitudes);
        d->reflection.resize(L);
        for (int l = 0; l < L; ++l)
            d->reflection(l) = std::polar(d->amplitudes(l), d->phases(l));
        d->R = correlation_matrix(l_v, l_h, d_h, d_v, wavelength_m);
        d->R_sqrt = matrix_sqrt_psd(d->R);
        d->mix = d->R_sqrt.cast<cplx>() * d->reflection.asDiagonal() * d->R_sqrt.cast<cplx>();
        d->T = compute_t(d->area, d->R, d->R_sqrt, d->reflection);
        d->trace_t = d->T.trace().real();
        d->trace_t2 = (d->T * d->T).trace().real();
        data_ = std::move(d);
        set_emi(emi_power);
    }

    /// T = A^2 (R^{1/2})^H Theta^H R Theta R^{1/2}.
    static Eigen::MatrixXcd compute_t(double area, const Eigen::MatrixXd& R, const Eigen::MatrixXd& R_sqrt,
                                      const Eigen::VectorXcd& reflection)
    {
        const Eigen::MatrixXcd S = R_sqrt.cast<cplx>();
        const Eigen::MatrixXcd inner = reflection.conjugate().asDiagonal() * R.cast<cplx>() * reflection.asDiagonal();
        Eigen::MatrixXcd T = (area * area) * (S.adjoint() * inner * S);
        return 0.5 * (T + T.adjoint().eval());
    }

    static RisPanel uniform(const PanelSpec& spec, double wavelength_m, double emi_power = 0.0)
    {
        const int L = spec.l_v * spec.l_h;
        const double d = spec.spacing_over_lambda * wavelength_m;
        return RisPanel(spec.l_v, spec.l_h, d, d, wavelength_m, Eigen::VectorXd::Constant(L, spec.phase_rad),
                        Eigen::VectorXd::Constant(L, spec.amplitude), emi_power);
    }

    RisPanel with_emi_power(double emi_power) const
    {
        RisPanel p = *this;
        p.set_emi(emi_power);
        return p;
    }

    int rows() const { return data_->l_v; }
    int cols() const { return data_->l_h; }
    int elements() const { return data_->l_v * data_->l_h; }
    double spacing_h() const { return data_->d_h; }
    double spacing_v() const { return data_->d_v; }
    double area() const { return data_->area; }
    const Eigen::VectorXd& phases() const { return data_->phases; }
    const Eigen::VectorXd& amplitudes() const { return data_->amplitudes; }
    const Eigen::VectorXcd& reflection() const { return data_->reflection; }
    const Eigen::MatrixXd& correlation() const { return data_->R; }
    const Eigen::MatrixXd& correlation_sqrt() const { return data_->R_sqrt; }
    /// R^{1/2} Theta R^{1/2}: maps white user-side fading to R^{1/2} Theta g_kj.
    const Eigen::MatrixXcd& mixing() const { return data_->mix; }
    const Eigen::MatrixXcd& t() const { return data_->T; }
    double trace_t() const { return data_->trace_t; }
    /// tr(T^2), the fourth-order statistic of the cascaded channel.
    double trace_t2() const { return data_->trace_t2; }
    /// EMI power normalized by the noise power.
    double emi_power() const { return emi_power_; }
    /// A_j sigma_j^2 R_j.
    Eigen::MatrixXd emi_covariance() const { return area() * emi_power_ * correlation(); }

private:
    struct Data {
        int l_v = 0, l_h = 0;
        double d_h = 0, d_v = 0, area = 0;
        Eigen::VectorXd phases, amplitudes;
        Eigen::VectorXcd reflection;
        Eigen::MatrixXd R, R_sqrt;
        Eigen::MatrixXcd mix, T;
        double trace_t = 0, trace_t2 = 0;
    };

    void set_emi(double emi_power)
    {
        if (!(emi_power >= 0.0) || !std::isfinite(emi_power))
            throw std::invalid_argument("RisPanel: EMI power must be finite and non-negative");
        emi_power_ = emi_power;
    }

    std::shared_ptr<const Data> data_;
    double emi_power_ = 0.0;
};

inline Eigen::MatrixXcd t_matrix(const RisPanel& panel)
{
    return RisPanel::compute_t(panel.area(), panel.correlation(), panel.correlation_sqrt(), panel.reflection());
}

/// sigma_j^2 = p_p sum_m beta_mj / (rho M sigma^2), powers in W.
inline double emi_power(Eigen::Index panel_index, const Eigen::MatrixXd& beta_ap_ris, double pilot_power_w,
                        double rho, double noise_w)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("emi_power: signal-to-EMI ratio must be positive");
    if (!(noise_w > 0.0))
        throw std::invalid_argument("emi_power: noise power must be positive");
    if (panel_index < 0 || panel_index >= beta_ap_ris.cols())
        throw std::out_of_range("emi_power: panel index");
    const auto M = beta_ap_ris.rows();
    if (M == 0)
        throw std::invalid_argument("emi_power: no APs");
    if (std::isinf(rho))
        return 0.0;
    return pilot_power_w * beta_ap_ris.col(panel_index).sum() / (rho * static_cast<double>(M) * noise_w);
}

/// One EMI vector n_j ~ CN(0, A_j sigma_j^2 R_j).
inline Eigen::VectorXcd sample_emi(const RisPanel& panel, Stream& rng)
{
    const Eigen::VectorXcd w = rng.cnormal_vector(panel.elements());
    return std::sqrt(panel.area() * panel.emi_power()) * (panel.correlation_sqrt().cast<cplx>() * w);
}

} // namespace riscf
