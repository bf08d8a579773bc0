#include "feeddrive/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace feeddrive {

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_scale(const Poly& a, double k) {
    Poly out = a;
    for (double& c : out) c *= k;
    return out;
}

Poly poly_shift_up(const Poly& a) {
    Poly out(a.size() + 1, 0.0);
    std::copy(a.begin(), a.end(), out.begin() + 1);
    return out;
}

void poly_trim(Poly& a) {
    while (a.size() > 1 && a.back() == 0.0) a.pop_back();
}

std::complex<double> poly_eval(const Poly& a, std::complex<double> s) {
    // Horner from the highest order down.
    std::complex<double> acc = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * s + *it;
    return acc;
}

TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    return {poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
}

TransferFunction unity_feedback(const TransferFunction& loop) {
    return {loop.num, poly_add(loop.num, loop.den)};
}

void cancel_origin_pairs(Poly& num, Poly& den) {
    auto zero_front = [](const Poly& p) {
        std::size_t n = 0;
        while (n < p.size() && p[n] == 0.0) ++n;
        return n;
    };
    const std::size_t common = std::min({zero_front(num), zero_front(den),
                                         num.empty() ? std::size_t{0} : num.size() - 1,
                                         den.empty() ? std::size_t{0} : den.size() - 1});
    if (common == 0) return;
    num.erase(num.begin(), num.begin() + long(common));
    den.erase(den.begin(), den.begin() + long(common));
}

bool routh_hurwitz_stable(Poly coeffs) {
    poly_trim(coeffs);
    if (coeffs.empty() || (coeffs.size() == 1 && coeffs[0] == 0.0))
        throw std::domain_error("zero polynomial has no stability verdict");
    if (coeffs.size() == 1) return true;  // nonzero constant: no roots at all

    // Work highest order first, leading coefficient normalized positive.
    std::vector<double> c(coeffs.rbegin(), coeffs.rend());
    if (c.front() < 0.0)
        for (double& x : c) x = -x;

    // A strictly Hurwitz real polynomial has all coefficients positive.
    for (double x : c)
        if (x <= 0.0) return false;

    std::vector<double> upper, lower;
    for (std::size_t i = 0; i < c.size(); i += 2) upper.push_back(c[i]);
    for (std::size_t i = 1; i < c.size(); i += 2) lower.push_back(c[i]);

    while (lower.size() > 0) {
        if (lower.front() <= 0.0) return false;  // sign change or marginal pivot
        std::vector<double> next;
        for (std::size_t j = 1; j < upper.size(); ++j) {
            const double u = j < upper.size() ? upper[j] : 0.0;
            const double l = j < lower.size() ? lower[j] : 0.0;
            next.push_back((lower[0] * u - upper[0] * l) / lower[0]);
        }
        upper = lower;
        lower = next;
    }
    return true;
}

}  // namespace feeddrive
