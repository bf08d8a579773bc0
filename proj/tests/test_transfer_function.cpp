#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <stdexcept>

#include "feeddrive/transfer_function.hpp"

using namespace feeddrive;
using cplx = std::complex<double>;

TEST_CASE("polynomial arithmetic") {
    const Poly a{1.0, 2.0};        // 1 + 2s
    const Poly b{3.0, 0.0, 1.0};   // 3 + s²

    const Poly sum = poly_add(a, b);
    REQUIRE(sum.size() == 3);
    CHECK(sum[0] == 4.0);
    CHECK(sum[1] == 2.0);
    CHECK(sum[2] == 1.0);

    const Poly prod = poly_mul(a, b);  // 3 + 6s + s² + 2s³
    REQUIRE(prod.size() == 4);
    CHECK(prod[0] == 3.0);
    CHECK(prod[1] == 6.0);
    CHECK(prod[2] == 1.0);
    CHECK(prod[3] == 2.0);

    const Poly scaled = poly_scale(a, -2.0);
    CHECK(scaled[0] == -2.0);
    CHECK(scaled[1] == -4.0);

    const Poly shifted = poly_shift_up(a);  // s + 2s²
    REQUIRE(shifted.size() == 3);
    CHECK(shifted[0] == 0.0);
    CHECK(shifted[1] == 1.0);
    CHECK(shifted[2] == 2.0);

    Poly padded{5.0, 1.0, 0.0, 0.0};
    poly_trim(padded);
    REQUIRE(padded.size() == 2);
}

TEST_CASE("polynomial evaluation is exact on small cases") {
    const Poly p{1.0, -3.0, 2.0};  // 1 − 3s + 2s²
    CHECK(poly_eval(p, {2.0, 0.0}) == cplx{3.0, 0.0});

    const cplx at_j = poly_eval(p, {0.0, 1.0});  // 1 − 3j − 2 = −1 − 3j
    CHECK(at_j.real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(at_j.imag() == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("real coefficients give conjugate-symmetric responses") {
    const Poly p{0.5, 1.7, -2.3, 4.1};
    for (double w : {0.1, 1.0, 33.0, 1e4}) {
        const cplx up = poly_eval(p, {0.0, w});
        const cplx down = poly_eval(p, {0.0, -w});
        CHECK(down.real() == doctest::Approx(up.real()).epsilon(1e-14));
        CHECK(down.imag() == doctest::Approx(-up.imag()).epsilon(1e-14));
    }
}

TEST_CASE("series and unity feedback compose rationals") {
    const TransferFunction a{{1.0}, {1.0, 1.0}};  // 1/(s+1)
    const TransferFunction b{{2.0}, {0.0, 1.0}};  // 2/s

    const TransferFunction ab = series(a, b);  // 2 / (s² + s)
    REQUIRE(ab.num.size() == 1);
    CHECK(ab.num[0] == 2.0);
    REQUIRE(ab.den.size() == 3);
    CHECK(ab.den[0] == 0.0);
    CHECK(ab.den[1] == 1.0);
    CHECK(ab.den[2] == 1.0);

    const TransferFunction closed = unity_feedback(ab);  // 2/(s²+s+2)
    REQUIRE(closed.den.size() == 3);
    CHECK(closed.den[0] == 2.0);
    CHECK(closed.den[1] == 1.0);
    CHECK(closed.den[2] == 1.0);
}

TEST_CASE("origin pole/zero pairs cancel exactly") {
    Poly num{0.0, 1.0};
    Poly den{0.0, 0.0, 2.0};
    cancel_origin_pairs(num, den);
    REQUIRE(num.size() == 1);
    CHECK(num[0] == 1.0);
    REQUIRE(den.size() == 2);
    CHECK(den[0] == 0.0);
    CHECK(den[1] == 2.0);

    // An all-zero numerator is never erased away.
    Poly zero{0.0};
    Poly d{0.0, 1.0};
    cancel_origin_pairs(zero, d);
    REQUIRE(zero.size() == 1);
    REQUIRE(d.size() == 2);
}

TEST_CASE("stability verdicts match the cubic gain boundary") {
    // Unity feedback around k/(s(s+1)(s+2)) has characteristic polynomial
    // s³ + 3s² + 2s + k, stable exactly for 0 < k < 6.
    auto char_poly = [](double k) { return Poly{k, 2.0, 3.0, 1.0}; };
    CHECK(routh_hurwitz_stable(char_poly(0.5)));
    CHECK(routh_hurwitz_stable(char_poly(5.9)));
    CHECK_FALSE(routh_hurwitz_stable(char_poly(6.0)));  // marginal: ±j√2 pair
    CHECK_FALSE(routh_hurwitz_stable(char_poly(6.1)));
    CHECK_FALSE(routh_hurwitz_stable(char_poly(-0.1)));
}

TEST_CASE("stability of low-order polynomials") {
    CHECK(routh_hurwitz_stable({1.0, 1.0}));            // s + 1
    CHECK_FALSE(routh_hurwitz_stable({-1.0, 1.0}));     // s − 1
    CHECK(routh_hurwitz_stable({1.0, 1.0, 1.0}));       // s² + s + 1
    CHECK_FALSE(routh_hurwitz_stable({1.0, 0.0, 1.0})); // s² + 1 (marginal)
    CHECK(routh_hurwitz_stable({6.0, 11.0, 6.0, 1.0})); // (s+1)(s+2)(s+3)
    CHECK(routh_hurwitz_stable({5.0}));                 // constant: no roots
    CHECK(routh_hurwitz_stable({-1.0, -1.0}));          // −(s+1), sign-normalized
    CHECK_THROWS_AS(routh_hurwitz_stable({0.0}), std::domain_error);
}

TEST_CASE("high order stability cross-check") {
    // (s+1)²(s+2)(s+3)(s+5) expanded: roots all in the left half plane.
    Poly stable{1.0};
    for (double r : {1.0, 1.0, 2.0, 3.0, 5.0}) stable = poly_mul(stable, {r, 1.0});
    CHECK(routh_hurwitz_stable(stable));

    // Same polynomial with one mirrored root (s − 3).
    Poly unstable{1.0};
    for (double r : {1.0, 1.0, 2.0, -3.0, 5.0}) unstable = poly_mul(unstable, {r, 1.0});
    CHECK_FALSE(routh_hurwitz_stable(unstable));
}
