#include "mhawkes/estimate.hpp"

#include "mhawkes/core.hpp"
#include "mhawkes/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace mhawkes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (1 - e^{-beta tau}) / beta and its derivative in beta.
double G(double beta, double tau) { return -std::expm1(-beta * tau) / beta; }
double dG(double beta, double tau) { return (tau * std::exp(-beta * tau) - G(beta, tau)) / beta; }

double weight(int k, double eta) { return 1.0 + static_cast<double>(k - 1) * eta; }

} // namespace

SymmetricVector to_vector(const SymmetricParams& p) {
    SymmetricVector v;
    v << p.mu, p.alpha_s, p.alpha_c, p.beta, p.eta;
    return v;
}

SymmetricParams symmetric_from_vector(const Eigen::VectorXd& v) {
    return {v(0), v(1), v(2), v(3), v(4)};
}

FullVector to_vector(const FullParams& p) {
    FullVector v;
    v << p.mu1, p.mu2, p.alpha11, p.alpha22, p.alpha12, p.alpha21, p.beta11, p.beta22, p.beta12,
        p.beta21, p.eta;
    return v;
}

FullParams full_from_vector(const Eigen::VectorXd& v) {
    return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8), v(9), v(10)};
}

double log_likelihood_ground(const EventStream& stream, const SymmetricParams& p,
                             SymmetricVector& grad) {
    const double mu = p.mu, as = p.alpha_s, ac = p.alpha_c, beta = p.beta, eta = p.eta;
    const double T = stream.horizon;
    const bool explicit_initial = stream.initial_intensity.has_value();
    const double x1 = explicit_initial ? stream.initial_intensity->up - mu : 0.0;
    const double x2 = explicit_initial ? stream.initial_intensity->down - mu : 0.0;

    // Per source side j: S = sum w e^{-beta(t-u)}, P = sum (k-1) e^{-beta(t-u)},
    // D = sum w (t-u) e^{-beta(t-u)}.
    std::array<double, 2> S{0.0, 0.0}, P{0.0, 0.0}, D{0.0, 0.0};
    double W = 0.0, Kx = 0.0; // totals of w and k-1
    double ll = 0.0;
    grad.setZero();
    double last = 0.0;
    for (const auto& e : stream.events) {
        const double dt = e.time - last;
        if (dt > 0.0) {
            const double f = std::exp(-beta * dt);
            for (int j = 0; j < 2; ++j) {
                D[j] = f * (D[j] + dt * S[j]);
                S[j] *= f;
                P[j] *= f;
            }
            last = e.time;
        }
        const int own = index_of(e.side);
        const int oth = 1 - own;
        const double x = own == 0 ? x1 : x2;
        const double base = explicit_initial ? std::exp(-beta * e.time) : 0.0;
        const double lambda = mu + x * base + as * S[own] + ac * S[oth];
        if (!(lambda > 0.0) || !std::isfinite(lambda)) return kNaN;
        const double inv = 1.0 / lambda;
        ll += std::log(lambda);
        grad(0) += inv * (explicit_initial ? 1.0 - base : 1.0);
        grad(1) += inv * S[own];
        grad(2) += inv * S[oth];
        grad(3) += inv * (-e.time * x * base - as * D[own] - ac * D[oth]);
        grad(4) += inv * (as * P[own] + ac * P[oth]);

        const double w = weight(e.mark, eta);
        S[own] += w;
        P[own] += static_cast<double>(e.mark - 1);
        W += w;
        Kx += static_cast<double>(e.mark - 1);
    }
    const double dt = T - last;
    const double f = std::exp(-beta * dt);
    for (int j = 0; j < 2; ++j) {
        D[j] = f * (D[j] + dt * S[j]);
        S[j] *= f;
        P[j] *= f;
    }
    const double Stot = S[0] + S[1], Ptot = P[0] + P[1], Dtot = D[0] + D[1];
    const double a = as + ac;
    const double comp = 2.0 * mu * T + (x1 + x2) * G(beta, T) + a * (W - Stot) / beta;
    ll -= comp;
    grad(0) -= 2.0 * T - (explicit_initial ? 2.0 * G(beta, T) : 0.0);
    grad(1) -= (W - Stot) / beta;
    grad(2) -= (W - Stot) / beta;
    grad(3) -= (x1 + x2) * dG(beta, T) + a * (-(W - Stot) / (beta * beta) + Dtot / beta);
    grad(4) -= a * (Kx - Ptot) / beta;
    return ll;
}

double log_likelihood_ground(const EventStream& stream, const FullParams& p, FullVector& grad) {
    const double T = stream.horizon;
    const bool explicit_initial = stream.initial_intensity.has_value();
    const std::array<double, 2> mu{p.mu1, p.mu2};
    const std::array<double, 2> x{explicit_initial ? stream.initial_intensity->up - p.mu1 : 0.0,
                                  explicit_initial ? stream.initial_intensity->down - p.mu2 : 0.0};
    // Channel (i, j): effect of type-j events on lambda_i.
    const double alpha[2][2] = {{p.alpha11, p.alpha12}, {p.alpha21, p.alpha22}};
    const double beta[2][2] = {{p.beta11, p.beta12}, {p.beta21, p.beta22}};
    // Positions in the parameter vector.
    constexpr int ia[2][2] = {{2, 4}, {5, 3}};
    constexpr int ib[2][2] = {{6, 8}, {9, 7}};
    constexpr int imu[2] = {0, 1};
    constexpr int ieta = 10;

    double S[2][2] = {}, P[2][2] = {}, D[2][2] = {};
    std::array<double, 2> W{0.0, 0.0}, Kx{0.0, 0.0};
    double ll = 0.0;
    grad.setZero();
    double last = 0.0;
    auto advance = [&](double dt) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double f = std::exp(-beta[i][j] * dt);
                D[i][j] = f * (D[i][j] + dt * S[i][j]);
                S[i][j] *= f;
                P[i][j] *= f;
            }
    };
    for (const auto& e : stream.events) {
        const double dt = e.time - last;
        if (dt > 0.0) {
            advance(dt);
            last = e.time;
        }
        const int i = index_of(e.side);
        const double base = explicit_initial ? std::exp(-beta[i][i] * e.time) : 0.0;
        const double lambda = mu[i] + x[i] * base + alpha[i][0] * S[i][0] + alpha[i][1] * S[i][1];
        if (!(lambda > 0.0) || !std::isfinite(lambda)) return kNaN;
        const double inv = 1.0 / lambda;
        ll += std::log(lambda);
        grad(imu[i]) += inv * (explicit_initial ? 1.0 - base : 1.0);
        double deta = 0.0;
        for (int j = 0; j < 2; ++j) {
            grad(ia[i][j]) += inv * S[i][j];
            grad(ib[i][j]) += inv * (-alpha[i][j] * D[i][j]);
            deta += alpha[i][j] * P[i][j];
        }
        grad(ib[i][i]) += inv * (-e.time * x[i] * base);
        grad(ieta) += inv * deta;

        const double w = weight(e.mark, p.eta);
        for (int r = 0; r < 2; ++r) {
            S[r][i] += w;
            P[r][i] += static_cast<double>(e.mark - 1);
        }
        W[i] += w;
        Kx[i] += static_cast<double>(e.mark - 1);
    }
    advance(T - last);
    for (int i = 0; i < 2; ++i) {
        ll -= mu[i] * T + x[i] * G(beta[i][i], T);
        grad(imu[i]) -= T - (explicit_initial ? G(beta[i][i], T) : 0.0);
        grad(ib[i][i]) -= x[i] * dG(beta[i][i], T);
        for (int j = 0; j < 2; ++j) {
            const double b = beta[i][j];
            const double rest = W[j] - S[i][j];
            ll -= alpha[i][j] * rest / b;
            grad(ia[i][j]) -= rest / b;
            grad(ib[i][j]) -= alpha[i][j] * (-rest / (b * b) + D[i][j] / b);
            grad(ieta) -= alpha[i][j] * (Kx[j] - P[i][j]) / b;
        }
    }
    return ll;
}

namespace {

template <class Params, class Vec>
double checked_likelihood(const EventStream& stream, const Params& p) {
    p.validate();
    Vec g;
    const double ll = log_likelihood_ground(stream, p, g);
    if (std::isnan(ll))
        throw InvalidLikelihood("nonpositive intensity at an event; eta below its admissible bound");
    return ll;
}

} // namespace

double log_likelihood_ground(const EventStream& stream, const SymmetricParams& p) {
    return checked_likelihood<SymmetricParams, SymmetricVector>(stream, p);
}

double log_likelihood_ground(const EventStream& stream, const FullParams& p) {
    return checked_likelihood<FullParams, FullVector>(stream, p);
}

Compensator compensator_integral(const EventStream& stream, const SymmetricParams& p, double T) {
    return compensator_integral(stream, FullParams::from_symmetric(p), T);
}

Compensator compensator_integral(const EventStream& stream, const FullParams& p, double T) {
    p.validate();
    if (!(T >= 0.0) || T > stream.horizon)
        throw RangeError("compensator horizon outside [0, horizon]");
    const IntensityState init = stream.initial_intensity.value_or(IntensityState{p.mu1, p.mu2});
    Compensator c;
    c.up = p.mu1 * T + (init.up - p.mu1) * G(p.beta11, T);
    c.down = p.mu2 * T + (init.down - p.mu2) * G(p.beta22, T);
    for (const auto& e : stream.events) {
        if (e.time >= T) break;
        const double w = weight(e.mark, p.eta);
        const double tau = T - e.time;
        if (e.side == Side::Up) {
            c.up += p.alpha11 * w * G(p.beta11, tau);
            c.down += p.alpha21 * w * G(p.beta21, tau);
        } else {
            c.up += p.alpha12 * w * G(p.beta12, tau);
            c.down += p.alpha22 * w * G(p.beta22, tau);
        }
    }
    return c;
}

std::pair<double, double> branching_coefficients(const SymmetricParams& p, double mean_mark) {
    const double w = 1.0 + (mean_mark - 1.0) * p.eta;
    return {p.alpha_s / p.beta * w, p.alpha_c / p.beta * w};
}

namespace {

void require_fit_data(const EventStream& stream) {
    stream.validate();
    if (!(stream.horizon > 0.0)) throw DegenerateError("stream horizon must be positive");
    if (stream.count(Side::Up) < 2 || stream.count(Side::Down) < 2)
        throw DegenerateError("fewer than two events on one side; parameters are not identified");
}

// Lowest eta keeping every observed jump weight positive.
double eta_floor(const EventStream& stream, double lower) {
    const int kmax = stream.max_mark();
    if (kmax <= 1) return lower;
    return std::max(lower, -1.0 / static_cast<double>(kmax - 1) + 1e-6);
}

} // namespace

SymmetricParams initial_guess(const EventStream& stream) {
    const double T = stream.horizon > 0.0 ? stream.horizon : 1.0;
    const double rate = std::max(static_cast<double>(stream.size()) / (2.0 * T), 1e-6);
    // Branching 0.6 split evenly: mu = rate * (1 - 0.6).
    return SymmetricParams{0.4 * rate, 0.6, 0.6, 2.0, 0.1};
}

FullParams initial_guess_full(const EventStream& stream) {
    const double T = stream.horizon > 0.0 ? stream.horizon : 1.0;
    const double r1 = std::max(static_cast<double>(stream.count(Side::Up)) / T, 1e-6);
    const double r2 = std::max(static_cast<double>(stream.count(Side::Down)) / T, 1e-6);
    return FullParams{0.4 * r1, 0.4 * r2, 0.6, 0.6, 0.6, 0.6, 2.0, 2.0, 2.0, 2.0, 0.1};
}

namespace {

template <class Params, class Vec, class Bounds>
FitResult<Params> fit_generic(const EventStream& stream, const Params& init, const Bounds& bounds,
                              const FitOptions& options, Params (*from_vec)(const Eigen::VectorXd&),
                              const std::vector<std::pair<int, double>>& multipliers,
                              int eta_index) {
    require_fit_data(stream);
    const Eigen::Index n = Vec::RowsAtCompileTime;
    Eigen::VectorXd lo = to_vector(bounds.lower);
    Eigen::VectorXd hi = to_vector(bounds.upper);
    lo(eta_index) = eta_floor(stream, lo(eta_index));
    if ((hi - lo).minCoeff() < 0.0) throw InvalidParameter("empty parameter box");
    const double scale = 1.0 / static_cast<double>(stream.size());

    Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        Vec gv;
        const double ll = log_likelihood_ground(stream, from_vec(x), gv);
        if (std::isnan(ll)) return std::numeric_limits<double>::infinity();
        g = -scale * gv;
        return -scale * ll;
    };

    const Eigen::VectorXd x0 = to_vector(init);
    FitResult<Params> best;
    double best_value = std::numeric_limits<double>::infinity();
    BoxResult best_box;
    const int starts = std::max(1, options.starts);
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd xs = x0;
        if (s > 0) {
            // Odd starts move toward faster, stronger excitation; even starts the opposite.
            const bool up = s % 2 == 1;
            const double level = 1.0 + 0.5 * static_cast<double>((s - 1) / 2);
            for (const auto& [index, factor] : multipliers) {
                const double m = up ? factor * level : 1.0 / (factor * level);
                xs(index) *= m;
            }
            xs(eta_index) = up ? xs(eta_index) + 0.15 * level : 0.5 * xs(eta_index);
        }
        xs = xs.cwiseMax(lo).cwiseMin(hi);
        const BoxResult r = minimize_box(objective, xs, lo, hi, options.box);
        best.iterations += r.iterations;
        if (std::isfinite(r.value) && r.value < best_value) {
            best_value = r.value;
            best_box = r;
        }
    }
    best.starts = starts;
    if (!std::isfinite(best_value))
        throw InvalidLikelihood("log-likelihood undefined at every starting point");
    best.params = from_vec(best_box.x);
    best.converged = best_box.converged;
    {
        Vec g;
        best.loglik = log_likelihood_ground(stream, best.params, g);
    }
    best.mean_mark = stream.mean_mark();

    Eigen::VectorXd se = Eigen::VectorXd::Constant(n, kNaN);
    if (options.std_errors) {
        Objective ll = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
            Vec gv;
            const double v = log_likelihood_ground(stream, from_vec(x), gv);
            g = gv;
            return v;
        };
        const Eigen::MatrixXd H = numerical_hessian(ll, best_box.x);
        if (H.allFinite()) {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                (ldlt.vectorD().array() > 0.0).all()) {
                const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
                for (Eigen::Index i = 0; i < n; ++i)
                    if (cov(i, i) > 0.0) se(i) = std::sqrt(cov(i, i));
            }
        }
    }
    best.std_errors = from_vec(se);
    return best;
}

} // namespace

FitResult<SymmetricParams> fit_symmetric(const EventStream& stream, const SymmetricParams& init,
                                         const SymmetricBounds& bounds, const FitOptions& options) {
    return fit_generic<SymmetricParams, SymmetricVector>(
        stream, init, bounds, options, &symmetric_from_vector, {{3, 1.6}, {1, 1.3}, {2, 1.3}, {0, 0.8}},
        4);
}

FitResult<FullParams> fit_full(const EventStream& stream, const FullParams& init,
                               const FullBounds& bounds, const FitOptions& options) {
    return fit_generic<FullParams, FullVector>(
        stream, init, bounds, options, &full_from_vector,
        {{6, 1.6}, {7, 1.6}, {8, 1.6}, {9, 1.6}, {2, 1.3}, {3, 1.3}, {4, 1.3}, {5, 1.3}, {0, 0.8}, {1, 0.8}},
        10);
}

ProfileSurface conditional_profile(const EventStream& stream, const std::vector<double>& beta_grid,
                                   const std::vector<double>& eta_grid, const SymmetricBounds& bounds) {
    require_fit_data(stream);
    if (beta_grid.empty() || eta_grid.empty()) throw InvalidParameter("profile grid is empty");
    ProfileSurface surface{beta_grid, eta_grid, {}};
    surface.points.reserve(beta_grid.size() * eta_grid.size());
    const SymmetricParams guess = initial_guess(stream);
    const double scale = 1.0 / static_cast<double>(stream.size());
    const double floor = eta_floor(stream, -std::numeric_limits<double>::infinity());
    BoxOptions box;
    box.gradient_tolerance = 1e-10;
    box.function_tolerance = 1e-15;
    for (double beta : beta_grid) {
        if (!(beta > 0.0)) throw InvalidParameter("profile beta must be positive");
        for (double eta : eta_grid) {
            if (eta < floor) throw InvalidParameter("profile eta makes some jump weight nonpositive");
            Eigen::VectorXd lo = to_vector(bounds.lower);
            Eigen::VectorXd hi = to_vector(bounds.upper);
            lo(3) = hi(3) = beta;
            lo(4) = hi(4) = eta;
            Eigen::VectorXd x0 = to_vector(guess);
            x0(1) = x0(2) = 0.3 * beta;
            x0(3) = beta;
            x0(4) = eta;
            x0 = x0.cwiseMax(lo).cwiseMin(hi);
            Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
                SymmetricVector gv;
                const double ll = log_likelihood_ground(stream, symmetric_from_vector(x), gv);
                if (std::isnan(ll)) return std::numeric_limits<double>::infinity();
                g = -scale * gv;
                return -scale * ll;
            };
            const BoxResult r = minimize_box(objective, x0, lo, hi, box);
            ProfilePoint pt;
            pt.beta = beta;
            pt.eta = eta;
            pt.argmax = symmetric_from_vector(r.x);
            SymmetricVector g;
            pt.loglik = log_likelihood_ground(stream, pt.argmax, g);
            surface.points.push_back(pt);
        }
    }
    return surface;
}

Eigen::Matrix3d conditional_hessian(const EventStream& stream, const SymmetricParams& p) {
    p.validate();
    const bool explicit_initial = stream.initial_intensity.has_value();
    const double x1 = explicit_initial ? stream.initial_intensity->up - p.mu : 0.0;
    const double x2 = explicit_initial ? stream.initial_intensity->down - p.mu : 0.0;
    std::array<double, 2> S{0.0, 0.0};
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    double last = 0.0;
    for (const auto& e : stream.events) {
        const double f = std::exp(-p.beta * (e.time - last));
        S[0] *= f;
        S[1] *= f;
        last = e.time;
        const int own = index_of(e.side);
        const double base = explicit_initial ? std::exp(-p.beta * e.time) : 0.0;
        const double lambda =
            p.mu + (own == 0 ? x1 : x2) * base + p.alpha_s * S[own] + p.alpha_c * S[1 - own];
        if (!(lambda > 0.0)) throw InvalidLikelihood("nonpositive intensity at an event");
        const Eigen::Vector3d v(explicit_initial ? 1.0 - base : 1.0, S[own], S[1 - own]);
        H -= (v * v.transpose()) / (lambda * lambda);
        S[own] += weight(e.mark, p.eta);
    }
    return H;
}

Eigen::Matrix3d conditional_hessian_numeric(const EventStream& stream, const SymmetricParams& p) {
    p.validate();
    Objective grad3 = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        SymmetricParams q = p;
        q.mu = x(0);
        q.alpha_s = x(1);
        q.alpha_c = x(2);
        SymmetricVector gv;
        const double v = log_likelihood_ground(stream, q, gv);
        g = gv.head<3>();
        return v;
    };
    return numerical_hessian(grad3, Eigen::Vector3d(p.mu, p.alpha_s, p.alpha_c));
}

} // namespace mhawkes
