#include "pisot/eigen.hpp"

#include "pisot/error.hpp"

namespace pisot {

std::vector<FieldElem> null_vector(std::vector<std::vector<FieldElem>> m)
{
    int n = static_cast<int>(m.size());
    std::vector<int> pivcol;
    int r = 0;
    std::vector<int> where(n, -1);
    for (int c = 0; c < n && r < n; c++) {
        int piv = -1;
        for (int i = r; i < n; i++)
            if (!m[i][c].is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(m[r], m[piv]);
        FieldElem inv = m[r][c].inv();
        for (int j = c; j < n; j++)
            m[r][j] = m[r][j] * inv;
        for (int i = 0; i < n; i++) {
            if (i == r || m[i][c].is_zero())
                continue;
            FieldElem f = m[i][c];
            for (int j = c; j < n; j++)
                m[i][j] -= f * m[r][j];
        }
        where[c] = r;
        r++;
    }
    if (r != n - 1)
        fail(ErrorKind::internal, "degenerate elimination: kernel is not one-dimensional");
    int free = -1;
    for (int c = 0; c < n; c++)
        if (where[c] < 0)
            free = c;
    FieldPtr K = m[0][0].field();
    std::vector<FieldElem> x(n, FieldElem(K));
    x[free] = FieldElem(K, mpq_class(1));
    for (int c = 0; c < n; c++)
        if (where[c] >= 0)
            x[c] = -m[where[c]][free];
    return x;
}

namespace {

std::vector<FieldElem> eigenvector(IntMatrix const& M, FieldPtr const& K)
{
    int n = M.rows();
    FieldElem a = FieldElem::alpha(K);
    std::vector<std::vector<FieldElem>> m(n, std::vector<FieldElem>(n, FieldElem(K)));
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            m[i][j] = FieldElem(K, mpq_class(M(i, j)));
            if (i == j)
                m[i][j] -= a;
        }
    auto x = null_vector(m);
    if (x[0].is_zero())
        fail(ErrorKind::internal, "Perron eigenvector has a zero first coordinate");
    FieldElem s = x[0].inv();
    for (auto& y : x)
        y = y * s;
    return x;
}

} // namespace

EigenData eigen_data(IntMatrix const& M, FieldPtr K)
{
    EigenData e;
    e.K = K;
    e.u = eigenvector(M, K);
    e.v = eigenvector(M.transpose(), K);
    e.c = 1;
    return e;
}

FieldElem EigenData::pair(IntVector const& x) const
{
    FieldElem r(K);
    for (size_t j = 0; j < x.size(); j++)
        if (x[j] != 0)
            r += v[j] * mpq_class(static_cast<long>(x[j]));
    return r;
}

FieldElem EigenData::pair(LatticeVec const& w) const
{
    FieldElem r = pair(w.base);
    if (w.level > 0)
        r = r * FieldElem::alpha(K).pow(-w.level);
    return r;
}

bool EigenData::v_integral() const
{
    for (auto const& x : v)
        if (x.denominator() != 1)
            return false;
    return true;
}

IntMatrix EigenData::B() const
{
    int n = this->n();
    IntMatrix b(n, n);
    for (int i = 0; i < n; i++) {
        auto num = v[i].scaled_numerators(1);
        for (int k = 0; k < n; k++)
            b(i, k) = num[k];
    }
    return b;
}

EigenData scale_v(EigenData const& e, std::vector<LatticeVec> const& Z0)
{
    mpz_class c = 1;
    for (auto const& x : e.v)
        c = lcm(c, x.denominator());
    for (auto const& w : Z0)
        c = lcm(c, e.pair(w).denominator());
    EigenData r = e;
    r.c = e.c * c;
    for (auto& x : r.v)
        x = x * mpq_class(c);
    return r;
}

} // namespace pisot
