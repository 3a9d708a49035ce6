#ifndef PISOT_TESTS_COMMON_HPP
#define PISOT_TESTS_COMMON_HPP

#include <memory>

#include "pisot/eigen.hpp"
#include "pisot/fractal.hpp"
#include "pisot/markov.hpp"
#include "pisot/places.hpp"
#include "pisot/poly.hpp"
#include "pisot/subst.hpp"

namespace pisot::fixture {

constexpr char const* kRauzy = "1->12;2->13;3->1";
constexpr char const* kFibonacci = "1->12;2->1";
constexpr char const* kNonUnimodular = "1->1112;2->11"; /* x^2 - 3x - 2 */

/* Unscaled pipeline up to the fractal facade. */
struct World {
    Substitution s;
    IntMatrix M;
    FieldPtr K;
    EigenData e;
    PlaceSystem ps;
    Automaton a;
    LiftedVectors lv;
    ParryChain chain;
    std::shared_ptr<Fractal> fr;

    explicit World(char const* text, int depth_cap = 20)
    {
        s = parse_substitution(text);
        M = incidence_matrix(s);
        K = make_field(char_poly(M));
        e = eigen_data(M, K);
        ps = enumerate_places(K, M.det());
        a = build_automaton(s);
        lv = lift_vectors(a, e);
        chain = parry_chain(a, lv);
        fr = std::make_shared<Fractal>(s, e, ps, depth_cap);
    }
};

} // namespace pisot::fixture

#endif
