#pragma once

#include "mhawkes/errors.hpp"

#include <Eigen/Core>

#include <cmath>

namespace mhawkes {

/// Kernel parameters of the symmetric model in an arbitrary scalar type.
template <class Scalar>
struct Kernel {
    Scalar mu;
    Scalar alpha_s;
    Scalar alpha_c;
    Scalar beta;
    Scalar eta;
};

/// Moment ratios K_{iX} = E[k X] / E[X] entering the variance formulas, plus
/// the mean ground intensity.
template <class Scalar>
struct KRatios {
    Scalar e_lambda;       ///< E[lambda_g1]
    Scalar k;              ///< K_{1 lambda_g1}
    Scalar k2;             ///< K^(2)_{1 lambda_g1}
    Scalar k_lambda_sq;    ///< K_{1 lambda_g1^2}
    Scalar k_lambda_cross; ///< K_{2 lambda_g1 lambda_g2}
    Scalar k_lambda_n;     ///< K_{1 lambda_g1 N_1}
    Scalar k_lambda_n_cross; ///< K_{1 lambda_g1 N_2}

    [[nodiscard]] static KRatios iid(Scalar e_lambda, Scalar K, Scalar K2) {
        return {e_lambda, K, K2, K, K, K, K};
    }
};

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

/// E[N1^2], E[N1 N2] and E[(N1-N2)^2] at horizon t, with the coefficient
/// vectors of t^2 and t for (E[N1^2], E[N1 N2]).
template <class Scalar>
struct VarianceParts {
    Scalar e_n1_sq;
    Scalar e_n1_n2;
    Scalar e_diff_sq;
    Vec2<Scalar> quadratic;
    Vec2<Scalar> linear;
};

/// Weights K-bar and K-double-bar of the linear impact function.
template <class Scalar>
[[nodiscard]] Scalar k_bar(Scalar K, Scalar K2, Scalar eta) {
    return K + (K2 - K) * eta;
}

template <class Scalar>
[[nodiscard]] Scalar k_double_bar(Scalar K, Scalar K2, Scalar eta) {
    return Scalar(1) + Scalar(2) * (K - Scalar(1)) * eta + (K2 - Scalar(2) * K + Scalar(1)) * eta * eta;
}

/// alpha {1 + (K_X - 1) eta}
template <class Scalar>
[[nodiscard]] Scalar accent(Scalar alpha, Scalar KX, Scalar eta) {
    return alpha * (Scalar(1) + (KX - Scalar(1)) * eta);
}

/// Closed-form 2x2 inverse; throws when |det| is below 1e-12 of the entry scale.
template <class Scalar>
[[nodiscard]] Mat2<Scalar> inverse2(const Mat2<Scalar>& m) {
    using std::abs;
    const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Scalar scale = m.cwiseAbs().maxCoeff();
    if (!(abs(det) > Scalar(1e-12) * scale * scale))
        throw DegenerateError("singular 2x2 matrix in the variance formula");
    Mat2<Scalar> inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

/// Second moments of the counting processes under the symmetric model.
template <class Scalar>
[[nodiscard]] VarianceParts<Scalar> variance_theorem(const Kernel<Scalar>& p, const KRatios<Scalar>& ks,
                                                     Scalar t) {
    const Scalar one(1), two(2);
    const Scalar eta = p.eta, beta = p.beta, as = p.alpha_s, ac = p.alpha_c;
    if (!(beta - (as + ac) * (one + (ks.k - one) * eta) > Scalar(0)))
        throw NonstationaryError("variance formula requires a stationary kernel");

    Mat2<Scalar> M, M2;
    M << accent(as, ks.k_lambda_sq, eta) - beta, accent(ac, ks.k_lambda_cross, eta),
        accent(ac, ks.k_lambda_sq, eta), accent(as, ks.k_lambda_cross, eta) - beta;
    M2 << accent(as, ks.k_lambda_n, eta) - beta, accent(ac, ks.k_lambda_n_cross, eta),
        accent(ac, ks.k_lambda_n, eta), accent(as, ks.k_lambda_n_cross, eta) - beta;
    const Mat2<Scalar> Minv = inverse2(M);
    const Mat2<Scalar> M2inv = inverse2(M2);
    const Mat2<Scalar> K = Vec2<Scalar>(ks.k, ks.k).asDiagonal();
    const Mat2<Scalar> K2 = Vec2<Scalar>(ks.k_lambda_sq, ks.k_lambda_cross).asDiagonal();
    const Mat2<Scalar> K3 = Vec2<Scalar>(ks.k_lambda_n, ks.k_lambda_n_cross).asDiagonal();
    const Scalar kb = k_bar(ks.k, ks.k2, eta);
    const Scalar kbb = k_double_bar(ks.k, ks.k2, eta);
    const Scalar bm = beta * p.mu;
    const Vec2<Scalar> ones(one, one);

    const Vec2<Scalar> quad_inner = bm * (K * M2inv * ones);
    const Vec2<Scalar> lin_inner =
        two * M2inv * Vec2<Scalar>(as * kb, ac * kb) -
        M2inv * K2 * Minv * Vec2<Scalar>((as * as + ac * ac) * kbb, two * as * ac * kbb) +
        two * M2inv * (K * M2inv - K2 * Minv) * (bm * ones) - Vec2<Scalar>(ks.k2 / ks.k_lambda_n, Scalar(0));

    VarianceParts<Scalar> out;
    out.quadratic = -ks.e_lambda * (K3 * quad_inner);
    out.linear = -ks.e_lambda * (K3 * lin_inner);
    const Vec2<Scalar> m = out.quadratic * t * t + out.linear * t;
    out.e_n1_sq = m(0);
    out.e_n1_n2 = m(1);
    // E[(N1-N2)^2] is a small difference of two large moments near the
    // stationarity boundary. The t^2 gap is taken in closed form and the t gap
    // in the sum/difference basis v -> (v0 + v1, v0 - v1), where the unit-mark
    // matrices are exactly diagonal.
    Mat2<Scalar> Q;
    Q << one, one, one, -one;
    const auto rot = [&](const Mat2<Scalar>& X) -> Mat2<Scalar> { return Q * X * Q / two; };
    const Mat2<Scalar> Mr = rot(M), M2r = rot(M2), Kr = rot(K), K2r = rot(K2);
    const Mat2<Scalar> Minv_r = inverse2(Mr);
    const Mat2<Scalar> M2inv_r = inverse2(M2r);
    const Vec2<Scalar> lin_r =
        two * M2inv_r * (Q * Vec2<Scalar>(as * kb, ac * kb)) -
        M2inv_r * K2r * Minv_r * (Q * Vec2<Scalar>((as * as + ac * ac) * kbb, two * as * ac * kbb)) +
        two * M2inv_r * (Kr * M2inv_r - K2r * Minv_r) * (Q * (bm * ones)) -
        Q * Vec2<Scalar>(ks.k2 / ks.k_lambda_n, Scalar(0));
    const Scalar dk = ks.k_lambda_n - ks.k_lambda_n_cross;
    const Scalar lin_gap = -ks.e_lambda * (ks.k_lambda_n * lin_r(1) + dk * (lin_r(0) - lin_r(1)) / two);
    const Scalar det2 = M2(0, 0) * M2(1, 1) - M2(0, 1) * M2(1, 0);
    const Scalar quad_gap =
        -ks.e_lambda * bm * ks.k * dk * (ks.k_lambda_n * eta * (ac - as) + M2(0, 0) - M2(1, 0)) / det2;
    out.e_diff_sq = two * (quad_gap * t * t + lin_gap * t);
    return out;
}

/// E[(N1-N2)^2] under K_{1 lambda N1} = K_{1 lambda N2} and
/// K_{1 lambda^2} = K_{1 lambda1 lambda2}; linear in t.
template <class Scalar>
[[nodiscard]] Scalar variance_approx(const Kernel<Scalar>& p, const KRatios<Scalar>& ks, Scalar t) {
    const Scalar one(1), two(2);
    const Scalar d = p.alpha_s - p.alpha_c;
    const Scalar breve = p.beta - accent(p.alpha_s, ks.k_lambda_sq, p.eta) + accent(p.alpha_c, ks.k_lambda_sq, p.eta);
    const Scalar acute = p.beta - accent(p.alpha_s, ks.k_lambda_n, p.eta) + accent(p.alpha_c, ks.k_lambda_n, p.eta);
    if (!(breve * acute > Scalar(0)))
        throw DegenerateError("nonpositive denominator in the approximate variance formula");
    if (!(p.beta - (p.alpha_s + p.alpha_c) * (one + (ks.k - one) * p.eta) > Scalar(0)))
        throw NonstationaryError("variance formula requires a stationary kernel");
    const Scalar kb = k_bar(ks.k, ks.k2, p.eta);
    const Scalar kbb = k_double_bar(ks.k, ks.k2, p.eta);
    const Scalar bracket = ks.k_lambda_sq * kbb * d * d / (breve * acute) + two * d * kb / acute +
                           ks.k2 / ks.k_lambda_n;
    return two * ks.k_lambda_n * ks.e_lambda * bracket * t;
}

/// E[(N1-N2)^2] for i.i.d. marks with E[k] = K and E[k^2] = K2.
template <class Scalar>
[[nodiscard]] Scalar variance_iid(const Kernel<Scalar>& p, Scalar e_lambda, Scalar K, Scalar K2, Scalar t) {
    return variance_approx(p, KRatios<Scalar>::iid(e_lambda, K, K2), t);
}

} // namespace mhawkes
