#ifndef PISOT_ROOTS_HPP
#define PISOT_ROOTS_HPP

#include <complex>
#include <vector>

#include "pisot/ball.hpp"
#include "pisot/poly.hpp"

namespace pisot {

/* A real root, or one representative (positive imaginary part) of a
 * complex-conjugate pair. The disk of the given radius around the center
 * contains exactly one root. */
struct CertifiedRoot {
    bool real = true;
    std::complex<double> center;
    double radius = 0.0;

    Ball ball() const { return Ball(center, radius); }
    double modulus() const { return std::abs(center); }
};

struct RootIsolation {
    std::vector<CertifiedRoot> roots; /* reals descending, then pairs by modulus */
    int real_count = 0;
    int pair_count = 0;
    int precision_bits = 0;
};

/* Simultaneous (Aberth) iteration with a posteriori inclusion disks;
 * precision escalates 64 -> 128 -> 256 -> 512 bits. */
RootIsolation isolate_roots(IntPoly const& f, int start_bits = 64);

struct PisotResult {
    bool pisot = false;
    RootIsolation iso;
};

PisotResult pisot_check(IntPoly const& f, int start_bits = 64);

} // namespace pisot

#endif
