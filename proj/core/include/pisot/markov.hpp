#ifndef PISOT_MARKOV_HPP
#define PISOT_MARKOV_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "pisot/eigen.hpp"
#include "pisot/field.hpp"
#include "pisot/intmat.hpp"
#include "pisot/subst.hpp"

namespace pisot {

/* (b : p a s) with sigma(b) = p a s. */
struct PathState {
    int id;
    int source;
    Word prefix;
    int core;
    Word suffix;
};

/* States ordered by source letter, then prefix length.
 * a_IJ = 1 iff core(J) = source(I). */
struct Automaton {
    int n = 0;
    std::vector<PathState> states;
    IntMatrix A;
    std::vector<std::vector<int>> succ;  /* J with a_IJ = 1 */
    std::vector<std::vector<int>> pred;  /* I with a_IJ = 1 */
    std::vector<IntVector> prefix_ab;    /* f(p) per state */
    std::vector<int> empty_state;        /* id of (b : empty) per letter */

    int size() const { return static_cast<int>(states.size()); }
};

Automaton build_automaton(Substitution const& s);

/* A^{N+1} > 0 */
bool verify_primitive_A(IntMatrix const& A, int N);

/* [u]_J = u_{source(J)}, [v]_J = v_{core(J)}: A[u] = alpha [u], tA[v] = alpha [v]. */
struct LiftedVectors {
    std::vector<FieldElem> u;
    std::vector<FieldElem> v;
};
LiftedVectors lift_vectors(Automaton const& a, EigenData const& e);

struct SpectralEntry {
    mpz_class exact;
    double spectral = 0.0;
    double radius = 0.0;
};

/* Exact (A^k)_IJ and the eigen-expansion sum over all conjugates. The
 * expansion is the trace of alpha^k [u]_I [v]_J / <[u],[v]>. */
class SpectralTable {
    LiftedVectors lv_;
    FieldElem pairing_inv_;

  public:
    explicit SpectralTable(LiftedVectors lv);
    FieldElem const& pairing_inverse() const { return pairing_inv_; }
    SpectralEntry entry(IntMatrix const& Ak, int k, int I, int J) const;
};

struct ParryChain {
    FieldPtr K;
    LiftedVectors lifted;
    FieldElem pairing;                                   /* <[u],[v]> */
    std::vector<FieldElem> p;
    std::vector<std::vector<std::pair<int, FieldElem>>> P;
    std::vector<double> p_num;
    std::vector<std::vector<std::pair<int, double>>> P_num;

    int size() const { return static_cast<int>(p.size()); }
    bool stationary() const;   /* pP = p exactly */
    bool stochastic() const;   /* row sums 1 exactly */
    FieldElem transition(int I, int J) const;
};

ParryChain parry_chain(Automaton const& a, LiftedVectors const& lv);

struct CylinderMeasure {
    FieldElem exact;
    double value;
};
CylinderMeasure cylinder_measure(ParryChain const& c, std::vector<int> const& path);

/* Uniform double in [0,1) from the top 53 bits. */
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1p-53; }

int sample_categorical(std::vector<std::pair<int, double>> const& row, std::mt19937_64& g);

std::vector<int> sample_path(ParryChain const& c, std::size_t length, std::uint64_t seed);
std::vector<int> sample_path(ParryChain const& c, std::size_t length, std::mt19937_64& g);
/* Continue a path from a given state. */
std::vector<int> sample_from(ParryChain const& c, int start, std::size_t length,
                             std::mt19937_64& g);

constexpr char const* kGeneratorName = "mt19937_64";

} // namespace pisot

#endif
