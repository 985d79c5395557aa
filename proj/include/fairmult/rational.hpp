#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace fairmult {

// Exact rational scalar. All probability masses, label rates, scores and
// bound values are carried as rationals so that tightness claims can be
// asserted as equalities instead of tolerances.
using Rat = mpq_class;

inline double to_double(const Rat& q) { return q.get_d(); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_from_double(double x) { return Rat(x); }

// Exact num/den in canonical form.  (The raw two-argument mpq constructor
// does not reduce, which silently breaks exact comparisons.)
inline Rat rat_frac(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rat q(static_cast<long>(num));
    q /= static_cast<long>(den);
    return q;
}

// Parses "3/4", "-1/8", "0.25", "1e-3", "7" into an exact rational.
// Decimal and scientific notation are read digit-exactly, not via double.
Rat parse_rational(const std::string& text);

// Canonical "n/d" (or "n" when d == 1) form, e.g. for JSON report fields.
std::string rat_to_string(const Rat& q);

}  // namespace fairmult
