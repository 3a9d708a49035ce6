#ifndef PISOT_FIELD_HPP
#define PISOT_FIELD_HPP

#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pisot/ball.hpp"
#include "pisot/intmat.hpp"
#include "pisot/poly.hpp"
#include "pisot/roots.hpp"

namespace pisot {

/* Q(alpha) for a monic irreducible integer polynomial. Immutable. */
class NumberField {
    IntPoly minpoly_;
    RootIsolation iso_;
    std::vector<std::vector<Ball>> powers_; /* powers_[root][k] = root^k, k < n */

  public:
    NumberField(IntPoly minpoly, RootIsolation iso);

    int degree() const { return pisot::degree(minpoly_); }
    IntPoly const& minpoly() const { return minpoly_; }
    std::vector<CertifiedRoot> const& roots() const { return iso_.roots; }
    RootIsolation const& isolation() const { return iso_; }
    CertifiedRoot const& perron() const { return iso_.roots.front(); }
    std::vector<Ball> const& root_powers(int root) const { return powers_[root]; }
    int precision_bits() const { return iso_.precision_bits; }
};

using FieldPtr = std::shared_ptr<NumberField const>;

FieldPtr make_field(IntPoly const& minpoly, int start_bits = 64);

class FieldElem {
    FieldPtr K_;
    std::vector<mpq_class> c_; /* exactly degree() entries */

    void reduce_from(std::vector<mpq_class> wide);

  public:
    FieldElem() = default;
    explicit FieldElem(FieldPtr K);
    FieldElem(FieldPtr K, mpq_class const& q);
    FieldElem(FieldPtr K, std::vector<mpq_class> coeffs);
    static FieldElem alpha(FieldPtr K);
    static FieldElem alpha_pow(FieldPtr K, int k);

    FieldPtr const& field() const { return K_; }
    std::vector<mpq_class> const& coeffs() const { return c_; }
    mpq_class const& coeff(int k) const { return c_[k]; }
    bool is_zero() const;
    bool is_rational() const;

    FieldElem operator+(FieldElem const& b) const;
    FieldElem operator-(FieldElem const& b) const;
    FieldElem operator-() const;
    FieldElem operator*(FieldElem const& b) const;
    FieldElem operator*(mpq_class const& q) const;
    FieldElem operator/(FieldElem const& b) const;
    FieldElem& operator+=(FieldElem const& b);
    FieldElem& operator-=(FieldElem const& b);
    FieldElem& operator*=(FieldElem const& b);
    bool operator==(FieldElem const& b) const { return c_ == b.c_; }
    bool operator!=(FieldElem const& b) const { return c_ != b.c_; }

    FieldElem inv() const;
    FieldElem pow(long k) const;
    /* exact N_{K/Q} via the resultant with the minimal polynomial */
    mpq_class norm() const;
    /* lcm of the coefficient denominators */
    mpz_class denominator() const;
    /* integer coefficients of den * x */
    std::vector<mpz_class> scaled_numerators(mpz_class const& den) const;

    Ball embed(int root) const;
    /* exact sign of the image at the Perron root */
    int sign() const;

    std::string to_string() const;
};

FieldElem operator*(mpq_class const& q, FieldElem const& x);

/* Multiplication by alpha as an integer matrix in the power basis. */
IntMatrix companion_matrix(IntPoly const& minpoly);

} // namespace pisot

#endif
