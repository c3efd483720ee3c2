#include "mhawkes/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mhawkes {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return (x - project(x - g, lo, hi)).lpNorm<Eigen::Infinity>();
}

} // namespace

BoxResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, const BoxOptions& options) {
    const Eigen::Index n = x0.size();
    // Work in scaled coordinates z = x / scale so that BFGS starts well conditioned.
    Eigen::VectorXd scale = x0.cwiseAbs().cwiseMax(0.05);
    const Eigen::VectorXd lo = lower.cwiseQuotient(scale);
    const Eigen::VectorXd hi = upper.cwiseQuotient(scale);
    const Eigen::Array<bool, Eigen::Dynamic, 1> fixed = (upper - lower).array() <= 0.0;

    auto eval = [&](const Eigen::VectorXd& z, Eigen::VectorXd& gz) {
        Eigen::VectorXd gx(n);
        const double v = f(z.cwiseProduct(scale), gx);
        gz = gx.cwiseProduct(scale);
        for (Eigen::Index i = 0; i < n; ++i)
            if (fixed(i)) gz(i) = 0.0;
        return v;
    };

    Eigen::VectorXd z = project(x0.cwiseQuotient(scale), lo, hi);
    Eigen::VectorXd g(n);
    double fz = eval(z, g);
    BoxResult result;
    if (!std::isfinite(fz)) {
        result.x = z.cwiseProduct(scale);
        result.value = fz;
        return result;
    }

    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    int small_steps = 0;
    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it + 1;
        if (projected_gradient_norm(z, g, lo, hi) < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        // Active set: coordinates pinned at a bound with the gradient pushing outward.
        Eigen::Array<bool, Eigen::Dynamic, 1> active(n);
        const double eps = 1e-12;
        for (Eigen::Index i = 0; i < n; ++i) {
            active(i) = fixed(i) || (z(i) <= lo(i) + eps && g(i) > 0.0) ||
                        (z(i) >= hi(i) - eps && g(i) < 0.0);
        }
        Eigen::VectorXd gf = g;
        for (Eigen::Index i = 0; i < n; ++i)
            if (active(i)) gf(i) = 0.0;
        Eigen::VectorXd d = -(H * gf);
        for (Eigen::Index i = 0; i < n; ++i)
            if (active(i)) d(i) = 0.0;
        if (!(d.dot(gf) < 0.0)) {
            H.setIdentity();
            fresh = true;
            d = -gf;
        }

        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd z_new, g_new(n);
        double f_new = fz;
        for (int ls = 0; ls < options.max_line_search; ++ls) {
            z_new = project(z + step * d, lo, hi);
            f_new = eval(z_new, g_new);
            if (std::isfinite(f_new) && f_new <= fz + options.armijo_c1 * g.dot(z_new - z)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!fresh) {
                H.setIdentity();
                fresh = true;
                continue;
            }
            // No progress along steepest descent either: stationary to working precision.
            result.converged = projected_gradient_norm(z, g, lo, hi) < 1e3 * options.gradient_tolerance;
            break;
        }

        const Eigen::VectorXd s = z_new - z;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh) {
                H *= sy / y.squaredNorm();
                fresh = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        const double decrease = fz - f_new;
        z = z_new;
        g = g_new;
        fz = f_new;
        if (decrease <= options.function_tolerance * std::max(1.0, std::abs(fz))) {
            if (++small_steps >= 3) {
                result.converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    result.x = z.cwiseProduct(scale);
    result.value = fz;
    return result;
}

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel_step) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(std::abs(x(i)), 1.0);
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        g(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd gp(n), gm(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = rel_step * std::max(std::abs(x(j)), 1e-2);
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        f(xp, gp);
        f(xm, gm);
        H.col(j) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

} // namespace mhawkes
