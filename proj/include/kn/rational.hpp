#pragma once

// Exact scalars. Every quantity in the library is a rational number; the
// arbitrary-precision arithmetic itself comes from GMP.

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kn {

using Integer = mpz_class;
using Rational = mpq_class;

/// "p/q" with q > 0; integers are written "n/1".
std::string to_string(const Rational& q);

/// Accepts "n", "-n", "p/q" (whitespace trimmed). Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// q^e for integer e; q must be nonzero when e < 0.
Rational pow(const Rational& q, long e);

}  // namespace kn
