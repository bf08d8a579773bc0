#pragma once

#include <complex>
#include <vector>

namespace feeddrive {

/// Polynomial in s with real coefficients, stored lowest order first:
/// p[0] + p[1]·s + p[2]·s² + …
using Poly = std::vector<double>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);

/// Multiplies by s (prepends a zero constant term).
Poly poly_shift_up(const Poly& a);

/// Drops exact-zero high-order coefficients; never empties a non-zero poly.
void poly_trim(Poly& a);

std::complex<double> poly_eval(const Poly& a, std::complex<double> s);

/// Rational transfer function num(s)/den(s).
struct TransferFunction {
    Poly num;
    Poly den;

    std::complex<double> eval(std::complex<double> s) const {
        return poly_eval(num, s) / poly_eval(den, s);
    }
};

/// Cascade a·b.
TransferFunction series(const TransferFunction& a, const TransferFunction& b);

/// Unity negative feedback closure L/(1+L).
TransferFunction unity_feedback(const TransferFunction& loop);

/// Removes factors of s common to numerator and denominator (exact zero
/// leading coefficients), i.e. pole/zero cancellations at the origin.
void cancel_origin_pairs(Poly& num, Poly& den);

/// Routh–Hurwitz test: true iff every root of the polynomial lies strictly
/// in the open left half plane. Marginal (imaginary-axis) roots and
/// degenerate pivots report false. Throws std::domain_error on the zero
/// polynomial.
bool routh_hurwitz_stable(Poly coeffs);

}  // namespace feeddrive
