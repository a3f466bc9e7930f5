#include "supercal/poly_parse.hpp"

#include "supercal/errors.hpp"

#include <cctype>
#include <string>

namespace supercal {

namespace {

class Parser {
public:
    Parser(int n, std::string_view text) : n_(n), text_(text) {}

    QPoly run() {
        QPoly p = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return p;
    }

private:
    int n_;
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidArgument("polynomial parse error at position " +
                              std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool consume(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    QPoly parse_expr() {
        bool negate = false;
        skip_ws();
        if (consume('-')) negate = true;
        else consume('+');
        QPoly acc = parse_term();
        if (negate) acc = -acc;
        for (;;) {
            skip_ws();
            if (consume('+')) acc += parse_term();
            else if (consume('-')) acc -= parse_term();
            else return acc;
        }
    }

    QPoly parse_term() {
        QPoly acc = parse_factor();
        for (;;) {
            skip_ws();
            if (consume('*')) {
                acc = acc * parse_factor();
            } else if (consume('/')) {
                QPoly d = parse_factor();
                if (d.degree() != 0 || d.is_zero()) fail("divisor must be a nonzero constant");
                Rational c = d.terms().front().second;
                acc = acc * QPoly(n_, Rational(1) / c);
            } else {
                return acc;
            }
        }
    }

    QPoly parse_factor() {
        QPoly base = parse_base();
        skip_ws();
        if (consume('^')) {
            long e = parse_integer();
            if (e < 0) fail("exponent must be nonnegative");
            QPoly r(n_, Rational(1));
            for (long i = 0; i < e; ++i) r = r * base;
            return r;
        }
        return base;
    }

    QPoly parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            QPoly inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (c == '-') {
            ++pos_;
            return -parse_base();
        }
        if (c == 'x') {
            ++pos_;
            long idx = parse_integer();
            if (idx < 1 || idx > n_) fail("variable index out of range");
            return QPoly::variable(n_, int(idx - 1));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        fail(std::string("unexpected character '") + c + "'");
    }

    long parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected an integer");
        return std::stol(std::string(text_.substr(start, pos_ - start)));
    }

    QPoly parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string digits(text_.substr(start, pos_ - start));
        std::string frac;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            std::size_t fstart = pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            frac = std::string(text_.substr(fstart, pos_ - fstart));
        }
        if (digits.empty() && frac.empty()) fail("expected a number");
        Rational v(digits.empty() ? std::string("0") : digits);
        if (!frac.empty()) {
            Rational scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            v += Rational(frac) / scale;
        }
        return QPoly(n_, v);
    }
};

} // namespace

QPoly parse_poly(int n, std::string_view text) {
    if (n < 1 || n > kMaxVars) throw InvalidArgument("polynomial parse: bad dimension");
    return Parser(n, text).run();
}

} // namespace supercal
