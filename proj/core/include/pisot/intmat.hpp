#ifndef PISOT_INTMAT_HPP
#define PISOT_INTMAT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace pisot {

using IntVector = std::vector<std::int64_t>;

/* Dense matrix with arbitrary precision integer entries. */
class IntMatrix {
    int rows_ = 0;
    int cols_ = 0;
    std::vector<mpz_class> a_;

  public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
    static IntMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    mpz_class& operator()(int i, int j) { return a_[i * cols_ + j]; }
    mpz_class const& operator()(int i, int j) const { return a_[i * cols_ + j]; }

    IntMatrix operator*(IntMatrix const& b) const;
    IntMatrix operator+(IntMatrix const& b) const;
    IntMatrix operator-(IntMatrix const& b) const;
    bool operator==(IntMatrix const& b) const = default;

    IntMatrix transpose() const;
    IntMatrix pow(int k) const;
    bool positive() const;

    /* Exact, throws on int64 overflow. */
    IntVector apply(IntVector const& x) const;

    mpz_class det() const;
    int rank() const;

    std::vector<std::vector<long long>> to_ll() const;
    std::string to_string() const;
};

/* Checked 64-bit helpers used by the fast lattice paths. */
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

} // namespace pisot

#endif
