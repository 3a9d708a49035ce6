#include "pisot/poly.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pisot/error.hpp"

namespace pisot {

void trim(IntPoly& f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

void trim(RatPoly& f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

IntPoly int_poly(std::vector<long> const& coeffs)
{
    IntPoly f;
    for (long c : coeffs)
        f.emplace_back(c);
    trim(f);
    return f;
}

RatPoly to_rat(IntPoly const& f)
{
    RatPoly r;
    for (auto const& c : f)
        r.emplace_back(c);
    return r;
}

std::string to_string(IntPoly const& f)
{
    if (f.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(f); k >= 0; k--) {
        mpz_class c = f[k];
        if (c == 0)
            continue;
        bool neg = c < 0;
        mpz_class a = abs(c);
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        if (a != 1 || k == 0)
            os << a.get_str();
        if (k >= 1)
            os << "x";
        if (k >= 2)
            os << "^" << k;
    }
    return os.str();
}

mpq_class eval(IntPoly const& f, mpq_class const& x)
{
    mpq_class r = 0;
    for (int k = degree(f); k >= 0; k--)
        r = r * x + f[k];
    return r;
}

mpq_class eval(RatPoly const& f, mpq_class const& x)
{
    mpq_class r = 0;
    for (int k = degree(f); k >= 0; k--)
        r = r * x + f[k];
    return r;
}

mpz_class content(IntPoly const& f)
{
    mpz_class g = 0;
    for (auto const& c : f)
        g = gcd(g, c);
    return g;
}

IntPoly primitive_part(IntPoly const& f)
{
    IntPoly r = f;
    trim(r);
    if (r.empty())
        return r;
    mpz_class g = content(r);
    if (r.back() < 0)
        g = -g;
    for (auto& c : r)
        c /= g;
    return r;
}

IntPoly derivative(IntPoly const& f)
{
    IntPoly r;
    for (int k = 1; k <= degree(f); k++)
        r.push_back(f[k] * k);
    trim(r);
    return r;
}

IntPoly mul(IntPoly const& a, IntPoly const& b)
{
    if (a.empty() || b.empty())
        return {};
    IntPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

RatPoly mul(RatPoly const& a, RatPoly const& b)
{
    if (a.empty() || b.empty())
        return {};
    RatPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

RatPoly sub(RatPoly const& a, RatPoly const& b)
{
    RatPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); i++)
        r[i] += a[i];
    for (size_t i = 0; i < b.size(); i++)
        r[i] -= b[i];
    trim(r);
    return r;
}

std::pair<RatPoly, RatPoly> divmod(RatPoly const& a, RatPoly const& b)
{
    if (b.empty())
        fail(ErrorKind::internal, "polynomial division by zero");
    RatPoly r = a;
    trim(r);
    if (degree(r) < degree(b))
        return {{}, r};
    RatPoly q(r.size() - b.size() + 1);
    while (!r.empty() && degree(r) >= degree(b)) {
        int s = degree(r) - degree(b);
        mpq_class c = r.back() / b.back();
        q[s] = c;
        for (size_t i = 0; i < b.size(); i++)
            r[i + s] -= c * b[i];
        trim(r);
    }
    trim(q);
    return {q, r};
}

RatPoly gcd(RatPoly a, RatPoly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        mpq_class lc = a.back();
        for (auto& c : a)
            c /= lc;
    }
    return a;
}

bool divides(IntPoly const& b, IntPoly const& a, IntPoly* quotient)
{
    IntPoly r = a;
    trim(r);
    if (b.empty())
        return false;
    if (r.empty()) {
        if (quotient)
            quotient->clear();
        return true;
    }
    if (degree(r) < degree(b))
        return false;
    IntPoly q(r.size() - b.size() + 1);
    while (!r.empty() && degree(r) >= degree(b)) {
        int s = degree(r) - degree(b);
        if (!mpz_divisible_p(r.back().get_mpz_t(), b.back().get_mpz_t()))
            return false;
        mpz_class c = r.back() / b.back();
        q[s] = c;
        for (size_t i = 0; i < b.size(); i++)
            r[i + s] -= c * b[i];
        trim(r);
    }
    if (!r.empty())
        return false;
    if (quotient) {
        trim(q);
        *quotient = q;
    }
    return true;
}

mpq_class resultant(RatPoly const& a0, RatPoly const& b0)
{
    RatPoly a = a0, b = b0;
    trim(a);
    trim(b);
    mpq_class acc = 1;
    for (;;) {
        if (a.empty() || b.empty())
            return 0;
        int da = degree(a), db = degree(b);
        if (db == 0) {
            mpq_class r;
            mpz_pow_ui(r.get_num_mpz_t(), b[0].get_num_mpz_t(), da);
            mpz_pow_ui(r.get_den_mpz_t(), b[0].get_den_mpz_t(), da);
            r.canonicalize();
            return acc * r;
        }
        if (da < db) {
            if ((da * db) % 2)
                acc = -acc;
            std::swap(a, b);
            continue;
        }
        RatPoly r = divmod(a, b).second;
        if (r.empty())
            return 0;
        int dr = degree(r);
        /* res(a,b) = (-1)^{da db} lc(b)^{da-dr} res(b,r) */
        if ((da * db) % 2)
            acc = -acc;
        mpq_class lc = b.back(), pw = 1;
        for (int i = 0; i < da - dr; i++)
            pw *= lc;
        acc *= pw;
        a = std::move(b);
        b = std::move(r);
    }
}

IntPoly char_poly(IntMatrix const& m)
{
    int n = m.rows();
    std::vector<mpq_class> xs(n + 1), ys(n + 1);
    for (int k = 0; k <= n; k++) {
        IntMatrix t(n, n);
        for (int i = 0; i < n; i++)
            for (int j = 0; j < n; j++)
                t(i, j) = (i == j ? mpz_class(k) : mpz_class(0)) - m(i, j);
        xs[k] = k;
        ys[k] = t.det();
    }
    /* Newton divided differences, then expand to the monomial basis */
    std::vector<mpq_class> dd = ys;
    for (int j = 1; j <= n; j++)
        for (int i = n; i >= j; i--)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
    RatPoly acc{dd[n]};
    for (int i = n - 1; i >= 0; i--) {
        acc = mul(acc, RatPoly{-xs[i], 1});
        if (acc.empty())
            acc.resize(1);
        acc[0] += dd[i];
    }
    trim(acc);
    IntPoly r;
    for (auto const& c : acc) {
        if (c.get_den() != 1)
            fail(ErrorKind::internal, "non-integral characteristic polynomial");
        r.push_back(c.get_num());
    }
    return r;
}

/* ---------------------------------------------------------------- */
/* arithmetic in F_p[x]                                              */

namespace {

using ZP = std::vector<mpz_class>;

struct Fp {
    mpz_class p;

    void norm(ZP& f) const
    {
        for (auto& c : f) {
            c %= p;
            if (c < 0)
                c += p;
        }
        while (!f.empty() && f.back() == 0)
            f.pop_back();
    }
    ZP reduce(IntPoly const& f) const
    {
        ZP r = f;
        norm(r);
        return r;
    }
    ZP sub(ZP const& a, ZP const& b) const
    {
        ZP r(std::max(a.size(), b.size()));
        for (size_t i = 0; i < a.size(); i++)
            r[i] += a[i];
        for (size_t i = 0; i < b.size(); i++)
            r[i] -= b[i];
        norm(r);
        return r;
    }
    ZP mul(ZP const& a, ZP const& b) const
    {
        if (a.empty() || b.empty())
            return {};
        ZP r(a.size() + b.size() - 1);
        for (size_t i = 0; i < a.size(); i++)
            for (size_t j = 0; j < b.size(); j++)
                r[i + j] += a[i] * b[j];
        norm(r);
        return r;
    }
    mpz_class inv(mpz_class const& a) const
    {
        mpz_class r;
        if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()))
            fail(ErrorKind::internal, "non-invertible element mod p");
        return r;
    }
    std::pair<ZP, ZP> divmod(ZP const& a, ZP const& b) const
    {
        ZP r = a;
        if (b.empty())
            fail(ErrorKind::internal, "division by zero mod p");
        if (r.size() < b.size())
            return {{}, r};
        mpz_class il = inv(b.back());
        ZP q(r.size() - b.size() + 1);
        while (!r.empty() && r.size() >= b.size()) {
            size_t s = r.size() - b.size();
            mpz_class c = r.back() * il % p;
            q[s] = c;
            for (size_t i = 0; i < b.size(); i++)
                r[i + s] -= c * b[i];
            norm(r);
        }
        norm(q);
        return {q, r};
    }
    ZP rem(ZP const& a, ZP const& b) const { return divmod(a, b).second; }
    ZP quo(ZP const& a, ZP const& b) const { return divmod(a, b).first; }
    ZP monic(ZP f) const
    {
        if (f.empty())
            return f;
        mpz_class il = inv(f.back());
        for (auto& c : f)
            c = c * il % p;
        return f;
    }
    ZP gcd(ZP a, ZP b) const
    {
        while (!b.empty()) {
            ZP r = rem(a, b);
            a = std::move(b);
            b = std::move(r);
        }
        return monic(a);
    }
    ZP deriv(ZP const& f) const
    {
        ZP r;
        for (size_t k = 1; k < f.size(); k++)
            r.push_back(f[k] * static_cast<unsigned long>(k));
        norm(r);
        return r;
    }
    ZP powmod(ZP base, mpz_class e, ZP const& m) const
    {
        ZP r{1};
        base = rem(base, m);
        r = rem(r, m);
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t()))
                r = rem(mul(r, base), m);
            e >>= 1;
            if (e > 0)
                base = rem(mul(base, base), m);
        }
        return r;
    }
};

void sqf_rec(Fp const& F, ZP f, int mult, std::vector<std::pair<ZP, int>>& out)
{
    int i = 1;
    ZP c = F.gcd(f, F.deriv(f));
    ZP w = F.quo(f, c);
    while (w.size() > 1) {
        ZP y = F.gcd(w, c);
        ZP z = F.quo(w, y);
        if (z.size() > 1)
            out.emplace_back(F.monic(z), i * mult);
        i++;
        w = y;
        c = F.quo(c, y);
    }
    if (c.size() > 1) {
        /* c is a p-th power */
        unsigned long p = F.p.get_ui();
        ZP r;
        for (size_t k = 0; k < c.size(); k += p)
            r.push_back(c[k]);
        sqf_rec(F, r, mult * static_cast<int>(p), out);
    }
}

std::vector<ZP> berlekamp(Fp const& F, ZP const& f)
{
    int n = static_cast<int>(f.size()) - 1;
    if (n <= 1)
        return {f};
    ZP xp = F.powmod(ZP{0, 1}, F.p, f);
    std::vector<std::vector<mpz_class>> Q(n, std::vector<mpz_class>(n));
    ZP row{1};
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n && j < static_cast<int>(row.size()); j++)
            Q[i][j] = row[j];
        row = F.rem(F.mul(row, xp), f);
    }
    /* null space of (Q - I)^T */
    std::vector<std::vector<mpz_class>> B(n, std::vector<mpz_class>(n));
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            mpz_class v = Q[j][i] - (i == j ? 1 : 0);
            v %= F.p;
            if (v < 0)
                v += F.p;
            B[i][j] = v;
        }
    std::vector<int> pivcol;
    int r = 0;
    std::vector<int> where(n, -1);
    for (int c = 0; c < n && r < n; c++) {
        int piv = -1;
        for (int i = r; i < n; i++)
            if (B[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0)
            continue;
        std::swap(B[r], B[piv]);
        mpz_class il = F.inv(B[r][c]);
        for (auto& x : B[r])
            x = x * il % F.p;
        for (int i = 0; i < n; i++) {
            if (i == r || B[i][c] == 0)
                continue;
            mpz_class t = B[i][c];
            for (int j = 0; j < n; j++) {
                B[i][j] = (B[i][j] - t * B[r][j]) % F.p;
                if (B[i][j] < 0)
                    B[i][j] += F.p;
            }
        }
        where[c] = r;
        r++;
    }
    std::vector<ZP> basis;
    for (int fc = 0; fc < n; fc++) {
        if (where[fc] >= 0)
            continue;
        ZP v(n);
        v[fc] = 1;
        for (int c = 0; c < n; c++)
            if (where[c] >= 0) {
                mpz_class t = -B[where[c]][fc] % F.p;
                if (t < 0)
                    t += F.p;
                v[c] = t;
            }
        F.norm(v);
        basis.push_back(v);
    }
    size_t k = basis.size();
    std::vector<ZP> factors{f};
    unsigned long p = F.p.get_ui();
    for (auto const& h : basis) {
        if (factors.size() == k)
            break;
        if (h.size() <= 1)
            continue;
        std::vector<ZP> next;
        for (auto const& g : factors) {
            if (g.size() <= 2) {
                next.push_back(g);
                continue;
            }
            for (unsigned long s = 0; s < p; s++) {
                ZP hs = h;
                hs[0] = (hs[0] - s) % F.p;
                if (hs[0] < 0)
                    hs[0] += F.p;
                F.norm(hs);
                ZP d = F.gcd(g, hs);
                if (d.size() > 1)
                    next.push_back(d);
            }
        }
        factors = std::move(next);
    }
    return factors;
}

std::vector<ZP> cantor_zassenhaus(Fp const& F, ZP const& f)
{
    std::vector<std::pair<ZP, int>> ddf;
    ZP g = f, x{0, 1}, h = x;
    int d = 0;
    while (static_cast<int>(g.size()) - 1 >= 2 * (d + 1)) {
        d++;
        h = F.powmod(h, F.p, g);
        ZP t = F.gcd(g, F.sub(h, x));
        if (t.size() > 1) {
            ddf.emplace_back(t, d);
            g = F.quo(g, t);
            h = F.rem(h, g);
        }
    }
    if (g.size() > 1)
        ddf.emplace_back(g, static_cast<int>(g.size()) - 1);

    gmp_randclass rng(gmp_randinit_default);
    rng.seed(20240917);
    std::vector<ZP> out;
    std::vector<std::pair<ZP, int>> todo = ddf;
    while (!todo.empty()) {
        auto [u, dd] = todo.back();
        todo.pop_back();
        int du = static_cast<int>(u.size()) - 1;
        if (du == dd) {
            out.push_back(u);
            continue;
        }
        mpz_class e;
        mpz_pow_ui(e.get_mpz_t(), F.p.get_mpz_t(), dd);
        e = (e - 1) / 2;
        for (;;) {
            ZP a(du);
            for (auto& c : a)
                c = rng.get_z_range(F.p);
            F.norm(a);
            if (a.size() <= 1)
                continue;
            ZP b = F.powmod(a, e, u);
            b = F.sub(b, ZP{1});
            ZP t = F.gcd(u, b);
            if (t.size() > 1 && t.size() < u.size()) {
                todo.emplace_back(t, dd);
                todo.emplace_back(F.quo(u, t), dd);
                break;
            }
        }
    }
    return out;
}

std::vector<ZP> split_squarefree(Fp const& F, ZP const& f)
{
    if (F.p < 5000)
        return berlekamp(F, f);
    return cantor_zassenhaus(F, f);
}

bool zp_less(ZP const& a, ZP const& b)
{
    if (a.size() != b.size())
        return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i])
            return a[i] < b[i];
    return false;
}

} // namespace

IntPoly gcd_mod_p(IntPoly const& a, IntPoly const& b, mpz_class const& p)
{
    Fp F{p};
    return F.gcd(F.reduce(a), F.reduce(b));
}

std::vector<std::pair<IntPoly, int>> factor_mod_p(IntPoly const& f, mpz_class const& p)
{
    Fp F{p};
    ZP g = F.reduce(f);
    if (g.size() <= 1)
        fail(ErrorKind::internal, "degenerate polynomial mod p");
    g = F.monic(g);
    std::vector<std::pair<ZP, int>> sqf;
    sqf_rec(F, g, 1, sqf);
    std::vector<std::pair<IntPoly, int>> out;
    for (auto const& [h, e] : sqf)
        for (auto& fac : split_squarefree(F, h))
            out.emplace_back(F.monic(fac), e);
    std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
        if (zp_less(a.first, b.first))
            return true;
        if (zp_less(b.first, a.first))
            return false;
        return a.second < b.second;
    });
    return out;
}

/* ---------------------------------------------------------------- */

namespace {

std::vector<mpz_class> small_divisors(mpz_class n)
{
    n = abs(n);
    std::vector<mpz_class> d;
    if (n == 0 || n > 1000000)
        return d;
    unsigned long m = n.get_ui();
    for (unsigned long k = 1; k * k <= m; k++)
        if (m % k == 0) {
            d.emplace_back(k);
            if (k * k != m)
                d.emplace_back(m / k);
        }
    return d;
}

} // namespace

bool is_irreducible_over_Q(IntPoly const& f0)
{
    IntPoly f = primitive_part(f0);
    int n = degree(f);
    if (n < 1)
        fail(ErrorKind::internal, "irreducibility of a constant");
    if (n > kMaxFieldDegree)
        fail(ErrorKind::cap, "degree above supported bound " + std::to_string(kMaxFieldDegree));
    if (n == 1)
        return true;
    if (f[0] == 0)
        return false;

    /* rational roots d/e with d | a0, e | an */
    auto num = small_divisors(f[0]);
    auto den = small_divisors(f[n]);
    for (auto const& d : num)
        for (auto const& e : den)
            for (int s : {1, -1})
                if (eval(f, mpq_class(s * d, e)) == 0)
                    return false;

    RatPoly fr = to_rat(f);
    RatPoly g = gcd(fr, to_rat(derivative(f)));
    if (degree(g) > 0)
        return false;

    /* Mignotte-type bound on factor coefficients, scaled by lc */
    mpz_class norm2 = 0;
    for (auto const& c : f)
        norm2 += c * c;
    mpz_class root = sqrt(norm2) + 1;
    mpz_class B = (mpz_class(1) << n) * root * abs(f[n]);
    mpz_class p = 2 * B + 1;
    Fp F{p};
    for (;;) {
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        F.p = p;
        if (f[n] % p == 0)
            continue;
        ZP fb = F.monic(F.reduce(f));
        if (F.gcd(fb, F.deriv(fb)).size() == 1)
            break;
    }
    ZP fb = F.monic(F.reduce(f));
    std::vector<ZP> facs = cantor_zassenhaus(F, fb);
    std::sort(facs.begin(), facs.end(), zp_less);
    int r = static_cast<int>(facs.size());
    if (r == 1)
        return true;
    mpz_class half = p / 2;
    for (unsigned mask = 1; mask < (1u << r); mask++) {
        if (__builtin_popcount(mask) > r / 2)
            continue;
        ZP prod{f[n] % p};
        F.norm(prod);
        for (int i = 0; i < r; i++)
            if (mask & (1u << i))
                prod = F.mul(prod, facs[i]);
        IntPoly cand;
        for (auto const& c : prod)
            cand.push_back(c > half ? c - p : c);
        trim(cand);
        cand = primitive_part(cand);
        if (degree(cand) >= 1 && degree(cand) < n && divides(cand, f))
            return false;
    }
    return true;
}

namespace {

int sign_variations(std::vector<int> const& s)
{
    int v = 0, last = 0;
    for (int x : s) {
        if (x == 0)
            continue;
        if (last != 0 && x != last)
            v++;
        last = x;
    }
    return v;
}

std::vector<RatPoly> sturm_chain(IntPoly const& f)
{
    std::vector<RatPoly> ch{to_rat(f), to_rat(derivative(f))};
    while (!ch.back().empty()) {
        RatPoly r = divmod(ch[ch.size() - 2], ch.back()).second;
        for (auto& c : r)
            c = -c;
        if (r.empty())
            break;
        ch.push_back(r);
    }
    return ch;
}

int sgn(mpq_class const& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

} // namespace

int sturm_count(IntPoly const& f, mpq_class const& lo, mpq_class const& hi)
{
    auto ch = sturm_chain(f);
    std::vector<int> a, b;
    for (auto const& g : ch) {
        a.push_back(sgn(eval(g, lo)));
        b.push_back(sgn(eval(g, hi)));
    }
    return sign_variations(a) - sign_variations(b);
}

int sturm_count_total(IntPoly const& f)
{
    auto ch = sturm_chain(f);
    std::vector<int> a, b;
    for (auto const& g : ch) {
        int lc = sgn(g.back());
        b.push_back(lc);
        a.push_back(degree(g) % 2 ? -lc : lc);
    }
    return sign_variations(a) - sign_variations(b);
}

} // namespace pisot
