#include "fairmult/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace fairmult {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rat parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s.erase(0, 1);
    }

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("bad rational literal: " + text);
        // Base forced to 10: the auto-detecting constructor reads a leading
        // zero as octal.
        const mpz_class num_z(num, 10), den_z(den, 10);
        if (den_z == 0) throw std::invalid_argument("zero denominator: " + text);
        Rat q{num_z, den_z};
        q.canonicalize();
        if (negative) q = -q;
        return q;
    }

    // Decimal / scientific notation, read exactly: mantissa digits over a
    // power of ten shifted by the exponent.
    long exp10 = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string::npos) {
        std::string etail = s.substr(epos + 1);
        if (etail.empty()) throw std::invalid_argument("bad exponent: " + text);
        char* end = nullptr;
        exp10 = std::strtol(etail.c_str(), &end, 10);
        if (end == nullptr || *end != '\0')
            throw std::invalid_argument("bad exponent: " + text);
        s.erase(epos);
    }
    std::string digits = s;
    if (auto dot = s.find('.'); dot != std::string::npos) {
        digits = s.substr(0, dot) + s.substr(dot + 1);
        exp10 -= static_cast<long>(s.size() - dot - 1);
    }
    if (!all_digits(digits))
        throw std::invalid_argument("bad rational literal: " + text);

    Rat q{mpz_class(digits, 10)};
    mpz_class shift;
    mpz_ui_pow_ui(shift.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    if (exp10 >= 0)
        q *= shift;
    else
        q /= Rat(shift);
    q.canonicalize();
    return negative ? Rat(-q) : q;
}

std::string rat_to_string(const Rat& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace fairmult
