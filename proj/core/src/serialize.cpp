#include "supercal/serialize.hpp"

#include "supercal/errors.hpp"
#include "supercal/poly_parse.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace supercal {

namespace {

std::string mono_to_string(MonoKey key) {
    std::string s;
    for (int v = 0; v < kMaxVars; ++v) {
        int e = mono_exp(key, v);
        if (e == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(v + 1);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

std::string mask_list(Mask m) {
    std::string s;
    for (int i = 0; i < 32; ++i) {
        if (!(m >> i & 1u)) continue;
        if (!s.empty()) s += ",";
        s += std::to_string(i + 1);
    }
    return s;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

// Splits `coeff * dx[K] ^ dxi[L]` into the coefficient text and the two masks.
struct TermParts {
    std::string_view coeff;
    Mask k = 0;
    Mask l = 0;
};

Mask parse_index_list(std::string_view s, int n, const std::string& line) {
    Mask m = 0;
    int prev = 0;
    s = trim(s);
    while (!s.empty()) {
        std::size_t comma = s.find(',');
        std::string_view tok = trim(s.substr(0, comma));
        if (tok.empty()) throw InvalidArgument("form term has an empty index: " + line);
        int idx = 0;
        for (char c : tok) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw InvalidArgument("form term has a bad index: " + line);
            idx = idx * 10 + (c - '0');
        }
        if (idx < 1 || idx > n)
            throw InvalidArgument("form term index out of range: " + line);
        if (idx <= prev)
            throw InvalidArgument("form term indices must strictly increase: " + line);
        prev = idx;
        m |= Mask(1) << (idx - 1);
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return m;
}

TermParts split_term(const std::string& line, int n) {
    std::string_view s(line);
    std::size_t dxpos = s.find("dx[");
    if (dxpos == std::string_view::npos)
        throw InvalidArgument("form term lacks a dx[...] part: " + line);
    std::string_view head = trim(s.substr(0, dxpos));
    if (head.empty() || head.back() != '*')
        throw InvalidArgument("form term lacks 'coeff *': " + line);
    head.remove_suffix(1);
    TermParts parts;
    parts.coeff = trim(head);
    std::size_t kclose = s.find(']', dxpos);
    if (kclose == std::string_view::npos)
        throw InvalidArgument("form term has an unclosed dx list: " + line);
    parts.k = parse_index_list(s.substr(dxpos + 3, kclose - dxpos - 3), n, line);
    std::string_view rest = trim(s.substr(kclose + 1));
    if (rest.empty() || rest.front() != '^')
        throw InvalidArgument("form term lacks '^ dxi[...]': " + line);
    rest = trim(rest.substr(1));
    if (rest.substr(0, 4) != "dxi[")
        throw InvalidArgument("form term lacks '^ dxi[...]': " + line);
    std::size_t lclose = rest.find(']');
    if (lclose == std::string_view::npos)
        throw InvalidArgument("form term has an unclosed dxi list: " + line);
    parts.l = parse_index_list(rest.substr(4, lclose - 4), n, line);
    if (!trim(rest.substr(lclose + 1)).empty())
        throw InvalidArgument("form term has trailing text: " + line);
    return parts;
}

template <class C, class ParseCoef>
Form<C> parse_form_lines(int n, std::span<const std::string> lines, ParseCoef parse_coef) {
    if (lines.empty())
        throw InvalidArgument("form text needs at least one term line");
    bool started = false;
    Form<C> out;
    for (const std::string& line : lines) {
        if (trim(line).empty()) continue;
        TermParts parts = split_term(line, n);
        if (!started) {
            out = Form<C>(n, mask_size(parts.k), mask_size(parts.l));
            started = true;
        }
        out.add_term(parts.k, parts.l, parse_coef(parts.coeff));
    }
    if (!started) throw InvalidArgument("form text needs at least one term line");
    return out;
}

template <class C, class CoefStr>
std::string form_lines(const Form<C>& a, CoefStr coef_str) {
    std::string out;
    for (const auto& [key, c] : a.terms()) {
        if (!out.empty()) out += "\n";
        out += coef_str(c);
        out += " * dx[" + mask_list(key_k(key)) + "] ^ dxi[" + mask_list(key_l(key)) + "]";
    }
    return out;
}

} // namespace

std::string double_repr(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string poly_to_string(const QPoly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto& [key, c] : p.terms()) {
        Rational a = c;
        if (out.empty()) {
            if (a < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += a < 0 ? " - " : " + ";
            if (a < 0) a = -a;
        }
        std::string mono = mono_to_string(key);
        if (mono.empty()) out += to_string(a);
        else if (a == 1) out += mono;
        else out += to_string(a) + "*" + mono;
    }
    return out;
}

std::string form_to_string(const NumForm& a) {
    return form_lines(a, [](double c) { return double_repr(c); });
}

std::string form_to_string(const PolyForm& a) {
    return form_lines(a, [](const QPoly& c) {
        std::string s = poly_to_string(c);
        return c.n_terms() > 1 ? "(" + s + ")" : s;
    });
}

NumForm parse_num_form(int n, std::span<const std::string> lines) {
    return parse_form_lines<double>(n, lines, [](std::string_view coeff) {
        std::string s(trim(coeff));
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size())
            throw InvalidArgument("bad numeric coefficient: " + s);
        return v;
    });
}

PolyForm parse_poly_form(int n, std::span<const std::string> lines) {
    return parse_form_lines<QPoly>(n, lines, [n](std::string_view coeff) {
        return parse_poly(n, coeff);
    });
}

} // namespace supercal
