#pragma once

#include <Eigen/Dense>

#include <functional>

namespace mhawkes {

/// Objective returning f(x) and writing its gradient; returns +inf (or NaN)
/// outside the domain.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BoxOptions {
    int max_iterations{500};
    double gradient_tolerance{1e-7}; ///< on the scaled projected gradient
    double function_tolerance{1e-13}; ///< relative decrease
    int max_line_search{40};
    double armijo_c1{1e-4};
};

struct BoxResult {
    Eigen::VectorXd x;
    double value{0.0};
    int iterations{0};
    bool converged{false};
};

/// Minimizes f over the box [lower, upper] with a projected BFGS method.
/// Coordinates with lower == upper are held fixed.
[[nodiscard]] BoxResult minimize_box(const Objective& f, Eigen::VectorXd x0,
                                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                     const BoxOptions& options = {});

/// Central-difference gradient with step h_i = rel_step * max(|x_i|, 1).
[[nodiscard]] Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                                 const Eigen::VectorXd& x, double rel_step = 1e-6);

/// Symmetrized Jacobian of a gradient map by central differences.
[[nodiscard]] Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                                double rel_step = 1e-5);

} // namespace mhawkes
