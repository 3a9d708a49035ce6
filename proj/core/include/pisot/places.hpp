#ifndef PISOT_PLACES_HPP
#define PISOT_PLACES_HPP

#include <climits>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pisot/ball.hpp"
#include "pisot/field.hpp"

namespace pisot {

/* Prime ideal p = (p, g(alpha)) of Z[alpha] at a prime where Dedekind's
 * criterion holds, so that Z[alpha] is p-maximal and v_p is computed by
 * membership in the powers of the ideal. */
class PrimeIdeal {
    FieldPtr K_;
    mpz_class p_;
    IntPoly g_;
    int e_ = 1, f_ = 1;

    struct Powers {
        std::mutex m;
        std::vector<std::vector<std::vector<mpz_class>>> hnf; /* hnf[k-1] = basis of p^k */
    };
    std::shared_ptr<Powers> powers_;

    std::vector<std::vector<mpz_class>> power(int k) const;
    bool contains(std::vector<mpz_class> const& y, int k) const;

  public:
    PrimeIdeal(FieldPtr K, mpz_class p, IntPoly g, int e);

    mpz_class const& p() const { return p_; }
    IntPoly const& generator() const { return g_; }
    int e() const { return e_; }
    int f() const { return f_; }
    mpz_class norm() const;

    /* exact v_p(x); x must be nonzero */
    int valuation(FieldElem const& x) const;
};

/* All prime ideals above p; unsupported_field error when p divides the index. */
std::vector<PrimeIdeal> primes_above(FieldPtr const& K, mpz_class const& p);

/* Trial division; cap error if a composite cofactor survives. */
std::vector<std::pair<mpz_class, int>> factor_integer(mpz_class n);

enum class PlaceKind { real, complex, finite };

struct Place {
    PlaceKind kind;
    int root = -1;      /* archimedean: index into the field's root list */
    int fin = -1;       /* finite: index into PlaceSystem::fin */
    mpz_class q = 0;    /* N(p) */
    int nu = 0;         /* v_p(alpha) */
};

struct FinitePlace {
    PrimeIdeal ideal;
    mpz_class q;
    int nu;
};

/* The contracting places M: every archimedean place but the Perron one,
 * and the prime ideals dividing (alpha). */
struct PlaceSystem {
    FieldPtr K;
    mpz_class det;
    std::vector<Place> places;      /* archimedean first, in root order */
    std::vector<FinitePlace> fin;

    int arch_count() const { return static_cast<int>(places.size() - fin.size()); }
    int fin_count() const { return static_cast<int>(fin.size()); }
    /* |alpha|_v (squared modulus at complex places) */
    double abs_alpha(int place) const;
    /* plain contraction factor |alpha_v| used by the metric and radii */
    double contraction(int place) const;
};

PlaceSystem enumerate_places(FieldPtr const& K, mpz_class const& det);

int finite_valuation(FieldElem const& x, FinitePlace const& pl);

/* Memoized exact norms. */
class NormCache {
    mutable std::mutex m_;
    mutable std::unordered_map<std::string, mpq_class> map_;

  public:
    mpq_class norm(FieldElem const& x) const;
    std::size_t size() const;
};

constexpr int kExactLevel = INT_MAX;

struct FinCoord {
    FieldElem sum;
    int level = kExactLevel; /* true coordinate = sum + (valuation >= nu * level) */
};

struct RepPoint {
    std::vector<Ball> arch;
    std::vector<FinCoord> fin;
};

struct Interval {
    double lo = 0.0, hi = 0.0;
};

RepPoint phi_prime(FieldElem const& x, PlaceSystem const& ps);
RepPoint phi_prime(FieldElem const& x, PlaceSystem const& ps, int level);
Interval dK(RepPoint const& x, RepPoint const& y, PlaceSystem const& ps);

/* |prod_v |x|_v - 1| over all places of K */
double product_formula_check(FieldElem const& x, PlaceSystem const& ps);
/* |prod_{v in M} |alpha|_v - 1/alpha| */
double haar_scaling_residual(PlaceSystem const& ps);

} // namespace pisot

#endif
