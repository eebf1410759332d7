#include "affine.hpp"

#include <cctype>
#include <numeric>
#include <stdexcept>

namespace acclab {

std::string rational_str(Rational q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::string Affine::str() const {
    if (b == Rational(0)) return rational_str(a);
    std::int64_t d = std::lcm(a.denominator(), b.denominator());
    std::int64_t A = a.numerator() * (d / a.denominator());
    std::int64_t B = b.numerator() * (d / b.denominator());
    bool neg = B < 0 && A <= 0;
    if (neg) { A = -A; B = -B; }
    std::string num;
    if (B == 1) num = "n";
    else if (B == -1) num = "-n";
    else num = std::to_string(B) + "n";
    if (A > 0) num += "+" + std::to_string(A);
    else if (A < 0) num += std::to_string(A);
    std::string out;
    if (d == 1) {
        out = neg ? "-(" + num + ")" : num;
    } else {
        out = (neg ? "-(" : "(") + num + ")/" + std::to_string(d);
    }
    return out;
}

namespace {

class AffineParser {
public:
    explicit AffineParser(const std::string& s) : s_(s) {}

    Affine parse() {
        Affine v = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const char* what) const {
        throw std::invalid_argument(std::string("affine parse error (") + what + ") in '" + s_ + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    Affine expr() {
        Affine v = term();
        for (;;) {
            if (eat('+')) v = v + term();
            else if (eat('-')) v = v - term();
            else return v;
        }
    }
    static Affine mul(const Affine& x, const Affine& y, const char* ctx, const AffineParser& p) {
        if (x.is_constant()) return y * x.a;
        if (y.is_constant()) return x * y.a;
        p.fail(ctx);
    }
    Affine term() {
        Affine v = unary();
        for (;;) {
            if (eat('*')) v = mul(v, unary(), "nonlinear product", *this);
            else if (eat('/')) {
                Affine d = unary();
                if (!d.is_constant() || d.a == Rational(0)) fail("bad divisor");
                v = v * (Rational(1) / d.a);
            } else {
                // implicit product such as 2n or 3(n+1)
                skip();
                if (pos_ < s_.size() && (s_[pos_] == 'n' || s_[pos_] == '(')) v = mul(v, unary(), "nonlinear product", *this);
                else return v;
            }
        }
    }
    Affine unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return atom();
    }
    Affine atom() {
        skip();
        if (eat('(')) {
            Affine v = expr();
            if (!eat(')')) fail("missing )");
            return v;
        }
        if (pos_ < s_.size() && s_[pos_] == 'n') { ++pos_; return Affine::dim(); }
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected number");
        return Affine(Rational(std::stoll(s_.substr(start, pos_ - start))));
    }
};

} // namespace

Affine parse_affine(const std::string& text) { return AffineParser(text).parse(); }

} // namespace acclab
