#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace acclab {

using Rational = boost::rational<std::int64_t>;

// a + b*n in the formal dimension symbol n.
struct Affine {
    Rational a{0};
    Rational b{0};

    Affine() = default;
    Affine(Rational a_) : a(a_) {}
    Affine(std::int64_t a_) : a(a_) {}
    Affine(Rational a_, Rational b_) : a(a_), b(b_) {}

    static Affine dim() { return Affine(Rational(0), Rational(1)); }

    Rational at(int n) const { return a + b * Rational(n); }
    double value(int n) const { return boost::rational_cast<double>(at(n)); }
    bool is_constant() const { return b == Rational(0); }

    friend Affine operator+(const Affine& x, const Affine& y) { return {x.a + y.a, x.b + y.b}; }
    friend Affine operator-(const Affine& x, const Affine& y) { return {x.a - y.a, x.b - y.b}; }
    friend Affine operator-(const Affine& x) { return {-x.a, -x.b}; }
    friend Affine operator*(const Affine& x, Rational s) { return {x.a * s, x.b * s}; }
    friend Affine operator*(Rational s, const Affine& x) { return x * s; }
    Affine& operator+=(const Affine& y) { a += y.a; b += y.b; return *this; }

    friend bool operator==(const Affine& x, const Affine& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Affine& x, const Affine& y) { return !(x == y); }

    // Total order on the symbolic form, used only for deterministic sorting.
    friend bool symbolic_less(const Affine& x, const Affine& y) {
        if (x.b != y.b) return x.b < y.b;
        return x.a < y.a;
    }

    std::string str() const;
};

std::string rational_str(Rational q);

// Parses "3/2", "-1", "n", "-(n+3)/2", "2n+1", "(n-2)/2 + 1/2".
Affine parse_affine(const std::string& text);

} // namespace acclab
