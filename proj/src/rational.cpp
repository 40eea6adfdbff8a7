#include "sumprod/rational.hpp"

#include "sumprod/errors.hpp"

#include <cctype>

namespace sumprod {

namespace {

std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw ParseError("empty number");
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("not an integer: " + s);
    }
    if (pos != s.size()) throw ParseError("not an integer: " + s);
    return v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    if (auto slash = text.find('/'); slash != std::string::npos) {
        auto den = parse_int(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator: " + text);
        return Rational(parse_int(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
        std::string whole = text.substr(0, dot);
        std::string frac = text.substr(dot + 1);
        if (frac.size() > 15) throw ParseError("too many decimals: " + text);
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad decimal: " + text);
        bool negative = !whole.empty() && whole[0] == '-';
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
        std::int64_t f = frac.empty() ? 0 : parse_int(frac);
        std::int64_t num = (w < 0 ? -w : w) * scale + f;
        return Rational(negative ? -num : num, scale);
    }
    return Rational(parse_int(text));
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace sumprod
