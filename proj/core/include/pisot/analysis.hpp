#ifndef PISOT_ANALYSIS_HPP
#define PISOT_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pisot/eigen.hpp"
#include "pisot/fractal.hpp"
#include "pisot/markov.hpp"
#include "pisot/places.hpp"
#include "pisot/tiling.hpp"

namespace pisot {

/* Bound on the power-basis coefficients of every polynomial part.
 * Coefficient j of F collects (tB Delta_k)_{j-k} for up to n values of k,
 * so the prefix part sums the per-row maxima. */
struct CoefficientBound {
    mpz_class M;
    mpz_class prefix_part;
    mpz_class w_part;
    IntMatrix B; /* v = B (1, alpha, ..., alpha^{n-1})^T */
};

CoefficientBound coefficient_bound(Fractal const& fr, std::vector<LatticeVec> const& Z0);

/* Cylinder of L+1 repeats of I = (u0 : empty). */
struct SpecialCylinder {
    int I = 0;
    int u0 = 0;
    int L = 0;
    int N = 0;
    bool certified = false; /* L satisfies the two neighbourhood inequalities */
    std::vector<double> lhs; /* per place, upper bound of the left-hand side at L */
};

/* Letter u0 with sigma(u0) starting with u0; hypothesis error otherwise. */
int fixed_letter(Substitution const& s);

/* Least certified L >= N+1 for the coefficient bound M. */
SpecialCylinder special_cylinder(Fractal const& fr, mpz_class const& M, int N, int L_cap = 100000);

/* Cylinder with a given L >= N+1, without the neighbourhood inequalities. */
SpecialCylinder plain_cylinder(Fractal const& fr, int N, int L);

/* Upper bounds of the left-hand sides at L, one per contracting place. */
std::vector<double> cylinder_inequality(Fractal const& fr, mpz_class const& M, int L);

struct NeighborhoodRadii {
    int d = 0;
    std::vector<double> lo, hi; /* enclosure of R_v per place */
};

NeighborhoodRadii neighborhood_radii(Fractal const& fr, mpz_class const& M, int d);

struct PolyPart {
    FieldElem F;
    std::vector<mpz_class> coeffs; /* degree <= d + n - 2, constant term first */
    int d = 0;
    LatticeVec w;
    bool zero() const { return F.is_zero(); }
    int degree() const;
    mpz_class max_coeff() const;
};

/* F = sum_{k<d} alpha^k <f(p_k) - f(q_k), v> - <w, v>, paths given as state ids. */
PolyPart polynomial_part(Fractal const& fr, std::vector<int> const& path1,
                         std::vector<int> const& path2, LatticeVec const& w, int d);

/* Same quantity for an arbitrary integer polynomial, evaluated at alpha. */
PolyPart poly_from_coeffs(Fractal const& fr, std::vector<mpz_class> coeffs);

struct GarsiaResult {
    Interval product;
    double bound = 0.0;
    bool ok = false;
};

/* Product of |F|_v over the contracting places against
 * (1 - 1/alpha) / (alpha^deg M), with M the largest coefficient. */
GarsiaResult garsia_check(Fractal const& fr, PolyPart const& F);

struct GarsiaFuzz {
    int trials = 0;
    int violations = 0;
    double worst_ratio = 0.0; /* min product.hi / bound */
};

GarsiaFuzz garsia_fuzz(Fractal const& fr, int trials, int max_degree, int max_coeff,
                       std::uint64_t seed, int threads = 0);

/* Both paths show L+1 consecutive I states starting at d. */
bool co_visit(SpecialCylinder const& cyl, std::vector<int> const& path, int d);

enum class Verdict { poly_vanishes, escapes, indeterminate, violation };
std::string to_string(Verdict v);

struct EitherResult {
    Verdict verdict = Verdict::indeterminate;
    PolyPart F;
    std::vector<Interval> distance; /* |Psi(w1) - Psi(w2) - gamma|_v */
    NeighborhoodRadii radii;        /* at d + 1 */
};

/* Horizon is the common path length; the tail beyond it is enclosed. */
EitherResult either_check(Fractal const& fr, mpz_class const& M, SpecialCylinder const& cyl,
                          std::vector<int> const& path1, std::vector<int> const& path2,
                          LatticeVec const& w, int d);

struct CoVisitPair {
    std::vector<int> path1, path2;
    LatticeVec w;
    int letter = 0;
    int d = 0;
};

/* Random prefixes joined to I at d by bridges of admissible length,
 * then L+1 copies of I and Parry tails. path2 starts with core `letter`. */
CoVisitPair covisiting_pair(ParryChain const& chain, Automaton const& a, SpecialCylinder const& cyl,
                            int d, int letter, int tail, std::mt19937_64& g);

struct CoincidenceCase {
    int kase = 0;               /* 1, 2 or 3 */
    bool prefix_identity = false; /* f(P) = f(Q) + w */
    bool states_equal = false;  /* case 1 only */
    bool gamma_ok = false;      /* (w, core of path2) in Gamma */
    bool coincidence_violation = false;
    mpz_class len_p, len_q;
};

CoincidenceCase coincidence_from_vanishing(Fractal const& fr, std::vector<int> const& path1,
                                           std::vector<int> const& path2, LatticeVec const& w, int d);

struct EitherCorpus {
    int pairs = 0;
    int poly_vanishes = 0;
    int escapes = 0;
    int indeterminate = 0;
    int violations = 0;
    int case1 = 0;            /* vanishing instances resolved as case I */
    int case_other = 0;       /* vanishing instances in case II or III */
    int coincidence_violations = 0;
    double indeterminate_rate() const { return pairs ? double(indeterminate) / pairs : 0.0; }
};

EitherCorpus either_corpus(Fractal const& fr, ParryChain const& chain, mpz_class const& M,
                           SpecialCylinder const& cyl, Patch const& Z0, int pairs, int d_max,
                           std::uint64_t seed, int threads = 0);

/* Smallest k <= horizon with both paths in the cylinder at k. */
std::optional<int> tau2(SpecialCylinder const& cyl, std::vector<int> const& path1,
                        std::vector<int> const& path2, int horizon);

struct Tau2Exact {
    std::vector<double> pmf; /* P(tau2 = k), k <= k_max */
    double tail = 0.0;       /* P(tau2 > k_max) */
    double m_cyl = 0.0;
    std::size_t states = 0;
};

/* Product chain with I-run progress capped at L+1, in long double. */
Tau2Exact tau2_distribution(ParryChain const& chain, SpecialCylinder const& cyl, int k_max,
                            std::size_t state_cap = 4000000);

/* Same program in Q(alpha) for small k_max; pmf and tail exact. */
struct Tau2ExactField {
    std::vector<FieldElem> pmf;
    FieldElem tail;
};
Tau2ExactField tau2_distribution_exact(ParryChain const& chain, SpecialCylinder const& cyl, int k_max,
                                       std::size_t state_cap = 4000000);

struct Tau2Empirical {
    int samples = 0;
    int not_found = 0;
    std::vector<int> values; /* per sample, -1 when not found */
};

/* Pairs of independent Parry paths, streamed until the first joint entry. */
Tau2Empirical tau2_sample(ParryChain const& chain, SpecialCylinder const& cyl, int samples,
                          int horizon, std::uint64_t seed, int threads = 0);

/* Total variation over bins of roughly equal exact mass. */
struct Tau2Comparison {
    std::vector<int> edges; /* bin b covers [edges[b], edges[b+1]) */
    std::vector<double> exact, empirical;
    double tv = 0.0;
};
Tau2Comparison tau2_compare(Tau2Exact const& ex, Tau2Empirical const& em, int bins);

struct EntrySeries {
    int N0 = 0;
    std::vector<int> times; /* N_1 < N_2 < ... */
};

/* N0 is the least index >= n_min whose window N0-(N+1)..N0 avoids the
 * cylinder; times are the next `count` entries of x. */
EntrySeries entry_series(SpecialCylinder const& cyl, std::vector<int> const& x, int count, int n_min);

/* Samples x incrementally until `count` entries follow N0. */
EntrySeries sample_entry_series(ParryChain const& chain, SpecialCylinder const& cyl, int count,
                                int n_min, std::uint64_t seed, std::size_t length_cap = 50000000);

struct SSeries {
    std::vector<mpz_class> b;    /* b(N_k), k = 0..j */
    std::vector<double> ratio;   /* s_j / E */
    std::vector<int> dp_checked; /* indices verified by the direct count */
    double E = 0.0;              /* m(<z_0 ... z_N0>) */
    double final_gap() const { return ratio.empty() ? 1.0 : std::abs(ratio.back() - 1.0); }
};

/* b(N_k) by the first-entry recursion; the direct count over
 * (state, run length) cross-checks k <= dp_max, internal error on mismatch.
 * z is the reference path (length N0+1, z[N0] = I) for E. */
SSeries b_counts_and_s(ParryChain const& chain, Automaton const& a, SpecialCylinder const& cyl,
                       EntrySeries const& series, int j_max, int dp_max,
                       std::vector<int> const& z);

/* Reference path: y's states up to N0-(N+1), then a bridge reaching I at N0. */
std::vector<int> reference_path(Automaton const& a, SpecialCylinder const& cyl,
                                std::vector<int> const& y, int N0);

/* Direct count of words from I at N0 whose first entry along the series is N_k. */
mpz_class b_direct(Automaton const& a, SpecialCylinder const& cyl, EntrySeries const& series, int k);

} // namespace pisot

#endif
