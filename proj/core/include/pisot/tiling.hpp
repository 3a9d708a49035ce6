#ifndef PISOT_TILING_HPP
#define PISOT_TILING_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pisot/eigen.hpp"
#include "pisot/fractal.hpp"
#include "pisot/markov.hpp"
#include "pisot/places.hpp"

namespace pisot {

/* (w, a) in Gamma: <w,v> >= 0 and <w - e_a, v> < 0, decided exactly. */
bool gamma_member(EigenData const& e, LatticeVec const& w, int a);

/* Lowest level representing the same vector: while M^{-1} base is
 * integral, replace base by it and decrement the level. */
LatticeVec canonical_lattice_vec(LatticeVec w, IntMatrix const& M);

/* Ball |x - center|_v <= radius[v] at every place of the PlaceSystem.
 * A finite radius r means N(p)^{-v_p(x - center)} <= r. */
struct Region {
    FieldElem center;
    std::vector<double> radius;
};

Region ball_region(Fractal const& fr, std::vector<double> radius);

struct PatchItem {
    LatticeVec w;
    int letter = 0;
    FieldElem x;     /* <w, v> */
    RepPoint gamma;  /* Phi'(x) */
    IntVector prefix; /* f(p), preimage patches only */
};

struct Patch {
    std::vector<PatchItem> items;
    std::optional<Region> region;
    int i_max = 0;
    std::string kind; /* "box", "preimage" */
};

struct PatchOptions {
    int letter = -1;       /* -1: every letter */
    int i_max = -1;        /* -1: 0 for unimodular M, 6 otherwise */
    std::size_t item_cap = 2000000;
    std::size_t box_cap = 200000000;
};

int default_i_max(PlaceSystem const& ps);

/* Cut-and-project enumeration: integer base vectors in a box derived from
 * conjugate bounds of the region, per level, filtered exactly. */
Patch translation_patch(Fractal const& fr, Region const& region, PatchOptions const& opt = {});

/* Every (w, a) in Gamma with gamma in the ball of radius 2R around 0. */
Patch candidate_Z0(Fractal const& fr, int i_max = -1);

std::vector<LatticeVec> lattice_vectors(Patch const& p);

struct Disk {
    std::complex<double> center;
    double radius = 0.0;
};

/* Enclosures of the subtiles: at archimedean place P, R(b) lies within
 * radius[P][b] of center[P][b] and inside every disk of hull[P][b]; at
 * finite place f its valuation is at least min_val[f]. */
struct TileBalls {
    std::vector<std::vector<std::complex<double>>> center;
    std::vector<std::vector<double>> radius;
    std::vector<std::vector<std::vector<Disk>>> hull;
    std::vector<int> min_val;
    int refine_depth = 0;
};

/* A point of K_sigma: certified archimedean coordinates, and the exact
 * field element when finite places are present. */
struct SpacePoint {
    std::vector<Ball> arch;
    std::optional<FieldElem> exact;
};

struct ItemCover {
    int item = 0;
    int deepest = -1;   /* deepest depth with a surviving piece, capped */
    double gap = 0.0;   /* depth 0 separation: dist to ball center minus radius */
};

struct CoverResult {
    std::vector<int> depths;
    std::vector<int> counts;       /* per entry of depths */
    std::vector<ItemCover> items;  /* items within reach of X at depth 0 */
    bool stable() const;
};

struct TilingStats {
    int samples = 0;
    std::vector<int> depths;
    std::uint64_t seed = 0;
    int path_length = 0;
    std::vector<std::map<int, int>> histogram; /* per depth: count -> samples */
    int resolve_depth = 0;
    int count1 = 0;          /* count 1 at the first depth */
    int unstable = 0;        /* count changes across depths, resolution included */
    int stable_defects = 0;  /* count != 1 at the first depth and never changing */
    std::size_t patch_items = 0;
    std::vector<std::vector<int>> per_sample; /* counts per depth */
    std::vector<int> resolved;                /* count at resolve_depth, -1 if not run */

    double count1_fraction() const { return samples ? double(count1) / samples : 0.0; }
};

struct DeloneRadii {
    double r1 = 0.0; /* covering radius estimate on the archimedean component */
    double r2 = 0.0; /* packing radius */
    int items = 0;
    int probes = 0;
};

struct QuasiPeriodWitness {
    FieldElem t;
    int letter = 0;                /* haystack preimage_patch(letter, k) */
    std::vector<PatchItem> matched; /* aligned with the needle */
};

class Tiler {
    Fractal const* fr_;
    IntMatrix M_;
    TileBalls balls_;
    std::vector<std::vector<int>> by_core_;        /* states with given core */
    std::vector<std::vector<Ball>> digit_ball_;   /* [place][state] */
    std::vector<Ball> alpha_;                     /* per arch place */
    std::vector<double> alpha_hi_;

    bool piece_alive(SpacePoint const& y, std::vector<Ball> const& pos, Coord const& t, int k,
                     int b, std::vector<std::vector<Ball>> const& apow) const;
    int deepest(SpacePoint const& y, int b, int dmax) const;

  public:
    explicit Tiler(Fractal const& fr, int refine_depth = 12, int hull_disks = 12);

    Fractal const& fractal() const { return *fr_; }
    IntMatrix const& matrix() const { return M_; }
    TileBalls const& balls() const { return balls_; }

    SpacePoint point(FieldElem const& x) const;
    /* Psi of a finite path, evaluated place by place (no cancellation) */
    SpacePoint psi_point(std::vector<int> const& path) const;

    /* Patch ball around 0 that contains every tile meeting R_sigma. */
    Region sampling_region() const;

    CoverResult covering_degree(SpacePoint const& X, Patch const& patch,
                                std::vector<int> const& depths) const;

    /* Samples whose count at the deepest listed depth is not 1 are rerun
     * at resolve_depth. */
    TilingStats tiling_statistics(ParryChain const& chain, int samples,
                                  std::vector<int> const& depths, std::uint64_t seed,
                                  int resolve_depth = 40, int threads = 0,
                                  Patch const* patch = nullptr) const;
};

DeloneRadii delone_radii(Fractal const& fr, Patch const& patch, int letter, int probes_per_axis = 24);

/* {(M^{-k} f(p), b) : sigma^k(b) = p a s} */
Patch preimage_patch(Fractal const& fr, int a, int k);

/* Translation t with needle + t contained in preimage_patch(c, k) for some
 * letter c, matching exact <w,v> values and letters. */
std::optional<QuasiPeriodWitness> quasi_periodic_search(Fractal const& fr,
                                                        std::vector<PatchItem> const& needle,
                                                        int k);

PatchItem make_item(Fractal const& fr, LatticeVec w, int letter);

} // namespace pisot

#endif
