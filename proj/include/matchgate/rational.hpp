#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace matchgate {

// Thrown by GaussianRational::parse with the offset of the offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, const std::string& what)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Exact element of Q(i). Both components are kept in lowest terms with a
/// positive denominator (GMP canonical form), so equality is structural.
class GaussianRational {
public:
    GaussianRational() : re_(0), im_(0) {}
    GaussianRational(int value) : re_(value), im_(0) {}
    GaussianRational(long value) : re_(static_cast<long>(value)), im_(0) {}
    GaussianRational(mpq_class re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }
    GaussianRational(long num, long den) : re_(num, den), im_(0) {
        if (den == 0) throw std::domain_error("GaussianRational: zero denominator");
        re_.canonicalize();
    }

    static GaussianRational i() { return GaussianRational(0, mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }
    bool is_one() const { return im_ == 0 && re_ == 1; }

    GaussianRational operator-() const { return GaussianRational(-re_, -im_, already_canonical{}); }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.inv(); }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    /// Multiplicative inverse; throws std::domain_error on zero.
    GaussianRational inv() const {
        if (is_zero()) throw std::domain_error("GaussianRational: division by zero");
        mpq_class n = re_ * re_ + im_ * im_;
        return GaussianRational(re_ / n, -im_ / n, already_canonical{});
    }

    GaussianRational conj() const { return GaussianRational(re_, -im_, already_canonical{}); }

    /// Canonical literal: `R`, `Ri`, `R+Ri` or `R-Ri` with `R` of the form
    /// `[-]p` or `[-]p/q`, q > 0. No whitespace.
    std::string str() const {
        if (im_ == 0) return rational_str(re_);
        if (re_ == 0) return rational_str(im_) + "i";
        std::string out = rational_str(re_);
        if (im_ > 0) {
            out += "+" + rational_str(im_) + "i";
        } else {
            out += "-" + rational_str(mpq_class(-im_)) + "i";
        }
        return out;
    }

    /// Inverse of str(); rejects malformed literals with the failing position.
    static GaussianRational parse(std::string_view text) {
        std::size_t pos = 0;
        mpq_class first = parse_rational(text, pos);
        if (pos == text.size()) return GaussianRational(std::move(first));
        if (text[pos] == 'i') {
            ++pos;
            if (pos != text.size()) throw ParseError(pos, "trailing characters after literal");
            return GaussianRational(0, std::move(first));
        }
        if (text[pos] != '+' && text[pos] != '-')
            throw ParseError(pos, "expected '+', '-' or 'i'");
        bool negative = text[pos] == '-';
        ++pos;
        mpq_class second = parse_unsigned_rational(text, pos);
        if (negative) second = -second;
        if (pos == text.size() || text[pos] != 'i')
            throw ParseError(pos, "expected 'i' after imaginary part");
        ++pos;
        if (pos != text.size()) throw ParseError(pos, "trailing characters after literal");
        return GaussianRational(std::move(first), std::move(second));
    }

    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& x) {
        return os << x.str();
    }

private:
    struct already_canonical {};
    GaussianRational(mpq_class re, mpq_class im, already_canonical)
        : re_(std::move(re)), im_(std::move(im)) {}

    static std::string rational_str(const mpq_class& q) {
        std::string out = q.get_num().get_str();
        if (q.get_den() != 1) out += "/" + q.get_den().get_str();
        return out;
    }

    static mpq_class parse_rational(std::string_view text, std::size_t& pos) {
        bool negative = false;
        if (pos < text.size() && text[pos] == '-') {
            negative = true;
            ++pos;
        }
        mpq_class value = parse_unsigned_rational(text, pos);
        return negative ? mpq_class(-value) : value;
    }

    static mpq_class parse_unsigned_rational(std::string_view text, std::size_t& pos) {
        mpz_class num = parse_integer(text, pos);
        if (pos < text.size() && text[pos] == '/') {
            ++pos;
            std::size_t den_pos = pos;
            mpz_class den = parse_integer(text, pos);
            if (den == 0) throw ParseError(den_pos, "zero denominator");
            mpq_class value(num, den);
            value.canonicalize();
            return value;
        }
        return mpq_class(num);
    }

    static mpz_class parse_integer(std::string_view text, std::size_t& pos) {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == start) throw ParseError(start, "expected digit");
        return mpz_class(std::string(text.substr(start, pos - start)), 10);
    }

    mpq_class re_;
    mpq_class im_;
};

inline GaussianRational inv(const GaussianRational& x) { return x.inv(); }

}  // namespace matchgate
