#ifndef PISOT_EIGEN_HPP
#define PISOT_EIGEN_HPP

#include <vector>

#include "pisot/field.hpp"
#include "pisot/intmat.hpp"

namespace pisot {

/* w = M^{-level} * base */
struct LatticeVec {
    IntVector base;
    int level = 0;
    bool operator==(LatticeVec const&) const = default;
    auto operator<=>(LatticeVec const&) const = default;
};

struct EigenData {
    FieldPtr K;
    std::vector<FieldElem> u; /* M u = alpha u */
    std::vector<FieldElem> v; /* tM v = alpha v, already multiplied by c */
    mpz_class c = 1;

    int n() const { return static_cast<int>(u.size()); }
    /* <x, v> for an integer vector */
    FieldElem pair(IntVector const& x) const;
    /* <w, v> = alpha^{-level} <base, v> */
    FieldElem pair(LatticeVec const& w) const;
    /* B with v = B (1, alpha, ..., alpha^{n-1})^T; requires integral v */
    IntMatrix B() const;
    bool v_integral() const;
};

EigenData eigen_data(IntMatrix const& M, FieldPtr K);

/* Least c clearing the denominators of v and of <w, v> over w in Z0. */
EigenData scale_v(EigenData const& e, std::vector<LatticeVec> const& Z0);

/* Null vector of a square matrix over Q(alpha) with one-dimensional kernel. */
std::vector<FieldElem> null_vector(std::vector<std::vector<FieldElem>> m);

} // namespace pisot

#endif
