#include "pisot/lab.hpp"

#include "pisot/error.hpp"

namespace pisot {

Lab build_lab(std::string_view text, LabOptions const& opt)
{
    Lab L;
    L.s = parse_substitution(text);
    L.M = incidence_matrix(L.s);
    L.prim = is_primitive(L.s, opt.primitivity_cap);
    if (!L.prim.primitive)
        fail(ErrorKind::hypothesis, "not primitive");
    L.chi = char_poly(L.M);
    if (!is_irreducible_over_Q(L.chi))
        fail(ErrorKind::hypothesis, "not irreducible: " + to_string(L.chi));
    if (!pisot_check(L.chi, opt.precision_bits).pisot)
        fail(ErrorKind::hypothesis, "not Pisot: " + to_string(L.chi));
    L.K = make_field(L.chi, opt.precision_bits);
    EigenData e0 = eigen_data(L.M, L.K);
    L.ps = enumerate_places(L.K, L.M.det());
    Fractal f0(L.s, e0, L.ps, opt.depth_cap);
    Patch z0 = candidate_Z0(f0, opt.i_max);
    L.e = scale_v(e0, lattice_vectors(z0));
    L.fr = std::make_shared<Fractal>(L.s, L.e, L.ps, opt.depth_cap);
    L.Z0 = L.e.c == e0.c ? std::move(z0) : candidate_Z0(*L.fr, opt.i_max);
    L.a = build_automaton(L.s);
    L.lv = lift_vectors(L.a, L.e);
    L.chain = parry_chain(L.a, L.lv);
    return L;
}

} // namespace pisot
