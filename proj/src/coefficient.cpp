#include "symflow/coefficient.hpp"

#include <stdexcept>

namespace symflow {

Coefficient::Coefficient(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

Coefficient Coefficient::rational(long num, long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return {q, 0};
}

Coefficient& Coefficient::operator+=(const Coefficient& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

Coefficient& Coefficient::operator*=(const Coefficient& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

Coefficient& Coefficient::operator/=(const Coefficient& o) { return *this *= o.inverse(); }

Coefficient Coefficient::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero coefficient");
    if (sgn(im_) == 0) return {1 / re_, 0};
    mpq_class norm = re_ * re_ + im_ * im_;
    return {re_ / norm, -im_ / norm};
}

std::string Coefficient::to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    auto imag_part = [](const mpq_class& q) {
        if (q == 1) return std::string("I");
        if (q == -1) return std::string("-I");
        return q.get_str() + "*I";
    };
    if (sgn(re_) == 0) return imag_part(im_);
    std::string im = imag_part(im_);
    if (im.front() != '-') im = "+" + im;
    return "(" + re_.get_str() + im + ")";
}

}  // namespace symflow
