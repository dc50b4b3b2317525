#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace symflow {

// Exact element of Q(i): a pair of arbitrary-precision rationals.
class Coefficient {
public:
    Coefficient() = default;
    Coefficient(long value) : re_(value) {}
    Coefficient(mpq_class re, mpq_class im = 0);

    static Coefficient imaginary_unit() { return {0, 1}; }
    static Coefficient rational(long num, long den);

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    Coefficient& operator+=(const Coefficient& o);
    Coefficient& operator-=(const Coefficient& o);
    Coefficient& operator*=(const Coefficient& o);
    Coefficient& operator/=(const Coefficient& o);

    friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
    friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
    friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
    friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }
    Coefficient operator-() const { return {-re_, -im_}; }

    friend bool operator==(const Coefficient& a, const Coefficient& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }

    Coefficient inverse() const;
    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    // Grammar form: "3/4", "-I", "2*I", "(1/2+3*I)".
    std::string to_string() const;

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

}  // namespace symflow
