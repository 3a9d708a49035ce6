#ifndef PISOT_LAB_HPP
#define PISOT_LAB_HPP

#include <memory>
#include <string_view>

#include "pisot/eigen.hpp"
#include "pisot/fractal.hpp"
#include "pisot/markov.hpp"
#include "pisot/places.hpp"
#include "pisot/poly.hpp"
#include "pisot/roots.hpp"
#include "pisot/subst.hpp"
#include "pisot/tiling.hpp"

namespace pisot {

struct LabOptions {
    int depth_cap = 20;
    int primitivity_cap = 64;
    int precision_bits = 64;
    int i_max = -1;
};

/* Full pipeline for one substitution: hypotheses checked, v scaled so
 * that v and every <w, v> over Z0 are integral. */
struct Lab {
    Substitution s;
    IntMatrix M;
    IntPoly chi;
    Primitivity prim;
    FieldPtr K;
    EigenData e;
    PlaceSystem ps;
    Automaton a;
    LiftedVectors lv;
    ParryChain chain;
    std::shared_ptr<Fractal> fr;
    Patch Z0;
};

/* hypothesis error: "not primitive", "not irreducible", "not Pisot" */
Lab build_lab(std::string_view text, LabOptions const& opt = {});

} // namespace pisot

#endif
