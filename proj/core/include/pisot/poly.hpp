#ifndef PISOT_POLY_HPP
#define PISOT_POLY_HPP

#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pisot/intmat.hpp"

namespace pisot {

/* Coefficients from the constant term upwards, no trailing zeros. */
using IntPoly = std::vector<mpz_class>;
using RatPoly = std::vector<mpq_class>;

constexpr int kMaxFieldDegree = 12;

void trim(IntPoly& f);
void trim(RatPoly& f);
inline int degree(IntPoly const& f) { return static_cast<int>(f.size()) - 1; }
inline int degree(RatPoly const& f) { return static_cast<int>(f.size()) - 1; }

IntPoly int_poly(std::vector<long> const& coeffs);
RatPoly to_rat(IntPoly const& f);
std::string to_string(IntPoly const& f);

mpq_class eval(IntPoly const& f, mpq_class const& x);
mpq_class eval(RatPoly const& f, mpq_class const& x);
mpz_class content(IntPoly const& f);
IntPoly primitive_part(IntPoly const& f);
IntPoly derivative(IntPoly const& f);
IntPoly mul(IntPoly const& a, IntPoly const& b);

RatPoly mul(RatPoly const& a, RatPoly const& b);
RatPoly sub(RatPoly const& a, RatPoly const& b);
std::pair<RatPoly, RatPoly> divmod(RatPoly const& a, RatPoly const& b);
RatPoly gcd(RatPoly a, RatPoly b); /* monic */

/* Exact division test over Z: returns true and the quotient when b | a. */
bool divides(IntPoly const& b, IntPoly const& a, IntPoly* quotient = nullptr);

/* Resultant over Q by the Euclidean remainder sequence. */
mpq_class resultant(RatPoly const& a, RatPoly const& b);

/* det(xI - M) by Bareiss determinants at n+1 points and exact interpolation. */
IntPoly char_poly(IntMatrix const& m);

bool is_irreducible_over_Q(IntPoly const& f);

/* Number of distinct real roots in the half-open interval (lo, hi]. */
int sturm_count(IntPoly const& f, mpq_class const& lo, mpq_class const& hi);
int sturm_count_total(IntPoly const& f);

/* Factorization modulo a prime: monic irreducible factors with multiplicity. */
std::vector<std::pair<IntPoly, int>> factor_mod_p(IntPoly const& f, mpz_class const& p);
/* Monic gcd over F_p; the zero polynomial when both inputs vanish mod p. */
IntPoly gcd_mod_p(IntPoly const& a, IntPoly const& b, mpz_class const& p);

} // namespace pisot

#endif
