#pragma once

#include "mhawkes/optimize.hpp"
#include "mhawkes/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mhawkes {

/// Parameter vector layouts used by the optimizer.
///   symmetric: (mu, alpha_s, alpha_c, beta, eta)
///   full:      (mu1, mu2, alpha11, alpha22, alpha12, alpha21,
///               beta11, beta22, beta12, beta21, eta)
using SymmetricVector = Eigen::Matrix<double, 5, 1>;
using FullVector = Eigen::Matrix<double, 11, 1>;

[[nodiscard]] SymmetricVector to_vector(const SymmetricParams& p);
[[nodiscard]] SymmetricParams symmetric_from_vector(const Eigen::VectorXd& v);
[[nodiscard]] FullVector to_vector(const FullParams& p);
[[nodiscard]] FullParams full_from_vector(const Eigen::VectorXd& v);

/// log L_g: sum of log left-limit intensities at events minus the compensator.
/// Throws InvalidLikelihood if some intensity at an event is nonpositive.
[[nodiscard]] double log_likelihood_ground(const EventStream& stream, const SymmetricParams& p);
[[nodiscard]] double log_likelihood_ground(const EventStream& stream, const FullParams& p);

/// log L_g together with its exact gradient in the vector layout above.
/// Returns NaN (and leaves grad unspecified) where the likelihood is undefined.
[[nodiscard]] double log_likelihood_ground(const EventStream& stream, const SymmetricParams& p,
                                           SymmetricVector& grad);
[[nodiscard]] double log_likelihood_ground(const EventStream& stream, const FullParams& p,
                                           FullVector& grad);

/// Closed-form integrated intensities over [0, T] per component.
struct Compensator {
    double up{0.0};
    double down{0.0};
    [[nodiscard]] double total() const noexcept { return up + down; }
};

[[nodiscard]] Compensator compensator_integral(const EventStream& stream, const SymmetricParams& p,
                                               double T);
[[nodiscard]] Compensator compensator_integral(const EventStream& stream, const FullParams& p,
                                               double T);

template <class Params>
struct FitResult {
    Params params;
    double loglik{0.0};
    Params std_errors; ///< NaN where the observed information is not invertible
    int iterations{0};
    bool converged{false};
    int starts{0};
    double mean_mark{1.0}; ///< empirical E[k], used only for the branching coefficients
};

struct SymmetricBounds {
    SymmetricParams lower{1e-8, 0.0, 0.0, 1e-4, -0.5};
    SymmetricParams upper{10.0, 50.0, 50.0, 100.0, 5.0};
};

struct FullBounds {
    FullParams lower{1e-8, 1e-8, 0.0, 0.0, 0.0, 0.0, 1e-4, 1e-4, 1e-4, 1e-4, -0.5};
    FullParams upper{10.0, 10.0, 50.0, 50.0, 50.0, 50.0, 100.0, 100.0, 100.0, 100.0, 5.0};
};

struct FitOptions {
    int starts{3};
    BoxOptions box{};
    bool std_errors{true};
};

/// Data-driven starting point: spectral value 0.6 at beta = 2, eta = 0.1.
[[nodiscard]] SymmetricParams initial_guess(const EventStream& stream);
[[nodiscard]] FullParams initial_guess_full(const EventStream& stream);

/// Maximizes log L_g over the box. Throws DegenerateError when either side has
/// fewer than two events; optimizer trouble surfaces as converged == false.
[[nodiscard]] FitResult<SymmetricParams> fit_symmetric(const EventStream& stream,
                                                       const SymmetricParams& init,
                                                       const SymmetricBounds& bounds = {},
                                                       const FitOptions& options = {});
[[nodiscard]] FitResult<FullParams> fit_full(const EventStream& stream, const FullParams& init,
                                             const FullBounds& bounds = {},
                                             const FitOptions& options = {});

/// Branching coefficients q_s, q_c = alpha / beta * (1 + (E[k]-1) eta).
[[nodiscard]] std::pair<double, double> branching_coefficients(const SymmetricParams& p,
                                                               double mean_mark);

/// Observed information surface of max over (mu, alpha_s, alpha_c) at fixed (beta, eta).
struct ProfilePoint {
    double beta{0.0};
    double eta{0.0};
    double loglik{0.0};
    SymmetricParams argmax;
};

struct ProfileSurface {
    std::vector<double> betas;
    std::vector<double> etas;
    std::vector<ProfilePoint> points; ///< row-major: index = i_beta * etas.size() + i_eta

    [[nodiscard]] const ProfilePoint& at(std::size_t i_beta, std::size_t i_eta) const {
        return points[i_beta * etas.size() + i_eta];
    }
};

[[nodiscard]] ProfileSurface conditional_profile(const EventStream& stream,
                                                 const std::vector<double>& beta_grid,
                                                 const std::vector<double>& eta_grid,
                                                 const SymmetricBounds& bounds = {});

/// Hessian of log L_g in (mu, alpha_s, alpha_c) at fixed (beta, eta), summed
/// from the per-event rank-one terms -(1/lambda^2) v v^T.
[[nodiscard]] Eigen::Matrix3d conditional_hessian(const EventStream& stream, const SymmetricParams& p);

/// The same Hessian by central differences of the exact gradient.
[[nodiscard]] Eigen::Matrix3d conditional_hessian_numeric(const EventStream& stream,
                                                          const SymmetricParams& p);

} // namespace mhawkes
