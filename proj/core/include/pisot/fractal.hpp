#ifndef PISOT_FRACTAL_HPP
#define PISOT_FRACTAL_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pisot/eigen.hpp"
#include "pisot/markov.hpp"
#include "pisot/places.hpp"
#include "pisot/subst.hpp"

namespace pisot {

/* Element (c_0 + c_1 alpha + ... + c_{n-1} alpha^{n-1}) / den of Z[alpha]/den.
 * Arithmetic is int64 with overflow checks (cap error on overflow). */
using Coord = std::vector<std::int64_t>;

class CoordRing {
    FieldPtr K_;
    std::int64_t den_ = 1;
    std::vector<std::int64_t> red_; /* alpha^n = sum red_[k] alpha^k */

  public:
    CoordRing() = default;
    CoordRing(FieldPtr K, std::int64_t den);

    FieldPtr const& field() const { return K_; }
    int degree() const { return static_cast<int>(red_.size()); }
    std::int64_t den() const { return den_; }

    Coord zero() const { return Coord(red_.size(), 0); }
    Coord add(Coord const& x, Coord const& y) const;
    Coord sub(Coord const& x, Coord const& y) const;
    Coord mul_alpha(Coord const& x) const;
    /* x * alpha^k */
    Coord mul_alpha_pow(Coord x, int k) const;

    FieldElem to_field(Coord const& x) const;
    /* fails (internal) when den does not clear the denominators of x */
    Coord from_field(FieldElem const& x) const;
    Ball embed(Coord const& x, int root) const;
};

/* Common denominator of v's power-basis coefficients. */
std::int64_t coord_denominator(EigenData const& e);

struct PointCloud {
    int letter = 0;
    int depth = 0;
    std::vector<Coord> points;      /* distinct, lexicographically sorted */
    std::vector<std::int64_t> mult; /* multiplicity of each point */
    std::vector<double> delta;      /* per place of the PlaceSystem */

    std::int64_t count() const;
    double delta_max() const;
};

struct ProjectionSpec {
    enum class Mode { complex_place, real_pair, real_line };
    Mode mode = Mode::complex_place;
    int place_x = 0; /* index into PlaceSystem::places */
    int place_y = -1;
    int width = 512;
    int height = 512;
    bool auto_box = true;
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
};

struct Projected {
    int width = 0, height = 0;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    std::vector<std::uint8_t> grid;   /* 0 empty, else 1 + layer index */
    std::vector<double> xs, ys;       /* one entry per distinct point */
    std::vector<int> layer;
};

/* Facade bundling a substitution with its automaton, eigenvectors and
 * contracting places. Clouds are memoized per depth; safe to share
 * between threads. */
class Fractal {
    Substitution s_;
    Automaton a_;
    EigenData e_;
    PlaceSystem ps_;
    CoordRing ring_;
    int depth_cap_;
    std::int64_t point_cap_;

    std::vector<Coord> digit_;     /* <f(prefix(I)), v> per state */
    std::vector<double> Mv_;       /* max |<f(p), v>|_v over prefixes */
    std::vector<double> Cv_;       /* max |<f(p) - f(q), v>|_v */
    std::vector<double> rho_;      /* M_v / (1 - |alpha_v|), finite places 1 */

    mutable std::mutex memo_m_;
    mutable std::vector<std::vector<PointCloud>> memo_; /* memo_[m][a] */

  public:
    Fractal(Substitution s, EigenData e, PlaceSystem ps, int depth_cap = 20,
            std::int64_t point_cap = 20000000);

    Substitution const& substitution() const { return s_; }
    Automaton const& automaton() const { return a_; }
    EigenData const& eigen() const { return e_; }
    PlaceSystem const& places() const { return ps_; }
    CoordRing const& ring() const { return ring_; }
    int depth_cap() const { return depth_cap_; }

    Coord const& digit(int state) const { return digit_[state]; }
    std::vector<double> const& prefix_bound() const { return Mv_; }
    std::vector<double> const& prefix_spread() const { return Cv_; }
    /* R_sigma(b) lies in the ball of this radius around 0 at each place */
    std::vector<double> const& radius_bound() const { return rho_; }
    std::vector<double> delta(int m) const;
    /* dK radius of R_sigma around 0 */
    double radius() const;

    /* exact partial sum of the first `path.size()` digit terms */
    Coord psi_coord(std::vector<int> const& path) const;
    RepPoint embed(Coord const& x, int level = kExactLevel) const;

    PointCloud const& cloud(int a, int m) const;
    /* number of admissible paths of length m with core(first) = a */
    mpz_class path_count(int a, int m) const;
};

RepPoint psi_partial(std::vector<int> const& path, Fractal const& fr);

PointCloud subtile_cloud(Fractal const& fr, int a, int m);

/* Direct multiset {<f(p), v> : sigma^m(b) = p a s} from the letters of
 * sigma^m(b), independent of the automaton recursion. */
PointCloud scan_cloud(Fractal const& fr, int a, int m);

/* cloud_m(a) against the direct scan, and against the one-step
 * decomposition built from scanned depth m-1 clouds. */
bool set_equation_check(Fractal const& fr, int a, int m);

/* Embedded archimedean coordinates of a cloud's points. */
struct ArchPoints {
    int dim = 0;                     /* real dimension */
    std::vector<int> block;          /* place of each real coordinate */
    std::vector<double> x;           /* point-major */
    double radius = 0.0;             /* max error radius */
    std::size_t size() const { return dim ? x.size() / dim : 0; }
};
ArchPoints arch_points(Fractal const& fr, PointCloud const& c);

Interval hausdorff_estimate(Fractal const& fr, PointCloud const& c1, PointCloud const& c2);

Projected project(Fractal const& fr, std::vector<PointCloud const*> const& layers,
                  ProjectionSpec const& spec);

/* Binary P6; layer k drawn with palette entry k. */
std::string write_ppm(Projected const& p);
std::string write_svg(Projected const& p);
std::string write_csv(Fractal const& fr, std::vector<PointCloud const*> const& layers);

/* Fraction of occupied pixels with an empty 4-neighbour. */
double boundary_fraction(Projected const& p);

struct ContinuityReport {
    int trials = 0;
    int violations = 0;
    double worst_ratio = 0.0; /* max distance / bound */
};
ContinuityReport continuity_modulus_check(Fractal const& fr, ParryChain const& chain, int k,
                                          int trials, std::uint64_t seed);

} // namespace pisot

#endif
