#include "pisot/intmat.hpp"

#include <sstream>

#include "pisot/error.hpp"

namespace pisot {

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        fail(ErrorKind::cap, "64-bit overflow in lattice arithmetic");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        fail(ErrorKind::cap, "64-bit overflow in lattice arithmetic");
    return r;
}

IntMatrix IntMatrix::identity(int n)
{
    IntMatrix m(n, n);
    for (int i = 0; i < n; i++)
        m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::operator*(IntMatrix const& b) const
{
    if (cols_ != b.rows_)
        fail(ErrorKind::internal, "matrix shape mismatch");
    IntMatrix r(rows_, b.cols_);
    for (int i = 0; i < rows_; i++)
        for (int k = 0; k < cols_; k++) {
            mpz_class const& x = (*this)(i, k);
            if (x == 0)
                continue;
            for (int j = 0; j < b.cols_; j++)
                r(i, j) += x * b(k, j);
        }
    return r;
}

IntMatrix IntMatrix::operator+(IntMatrix const& b) const
{
    IntMatrix r = *this;
    for (size_t i = 0; i < a_.size(); i++)
        r.a_[i] += b.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-(IntMatrix const& b) const
{
    IntMatrix r = *this;
    for (size_t i = 0; i < a_.size(); i++)
        r.a_[i] -= b.a_[i];
    return r;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; i++)
        for (int j = 0; j < cols_; j++)
            r(j, i) = (*this)(i, j);
    return r;
}

IntMatrix IntMatrix::pow(int k) const
{
    IntMatrix result = identity(rows_);
    IntMatrix base = *this;
    while (k > 0) {
        if (k & 1)
            result = result * base;
        k >>= 1;
        if (k)
            base = base * base;
    }
    return result;
}

bool IntMatrix::positive() const
{
    for (auto const& x : a_)
        if (x <= 0)
            return false;
    return true;
}

IntVector IntMatrix::apply(IntVector const& x) const
{
    IntVector r(rows_, 0);
    for (int i = 0; i < rows_; i++) {
        mpz_class s = 0;
        for (int j = 0; j < cols_; j++)
            s += (*this)(i, j) * x[j];
        if (!s.fits_slong_p())
            fail(ErrorKind::cap, "64-bit overflow in matrix-vector product");
        r[i] = s.get_si();
    }
    return r;
}

/* Bareiss fraction-free elimination. */
mpz_class IntMatrix::det() const
{
    int n = rows_;
    if (n == 0)
        return 1;
    IntMatrix m = *this;
    mpz_class prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; k++) {
        if (m(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; i++)
                if (m(i, k) != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0)
                return 0;
            for (int j = 0; j < n; j++)
                std::swap(m(k, j), m(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; i++)
            for (int j = k + 1; j < n; j++) {
                mpz_class t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = t;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

int IntMatrix::rank() const
{
    std::vector<std::vector<mpq_class>> m(rows_, std::vector<mpq_class>(cols_));
    for (int i = 0; i < rows_; i++)
        for (int j = 0; j < cols_; j++)
            m[i][j] = (*this)(i, j);
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; c++) {
        int piv = -1;
        for (int i = r; i < rows_; i++)
            if (m[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(m[r], m[piv]);
        for (int i = r + 1; i < rows_; i++) {
            if (m[i][c] == 0)
                continue;
            mpq_class f = m[i][c] / m[r][c];
            for (int j = c; j < cols_; j++)
                m[i][j] -= f * m[r][j];
        }
        r++;
    }
    return r;
}

std::vector<std::vector<long long>> IntMatrix::to_ll() const
{
    std::vector<std::vector<long long>> r(rows_, std::vector<long long>(cols_));
    for (int i = 0; i < rows_; i++)
        for (int j = 0; j < cols_; j++) {
            if (!(*this)(i, j).fits_slong_p())
                fail(ErrorKind::cap, "matrix entry exceeds 64 bits");
            r[i][j] = (*this)(i, j).get_si();
        }
    return r;
}

std::string IntMatrix::to_string() const
{
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; i++) {
        os << (i ? ",[" : "[");
        for (int j = 0; j < cols_; j++)
            os << (j ? "," : "") << (*this)(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

} // namespace pisot
