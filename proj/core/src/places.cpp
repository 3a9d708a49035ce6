#include "pisot/places.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pisot/error.hpp"

namespace pisot {

namespace {

using ZVec = std::vector<mpz_class>;
using Lattice = std::vector<ZVec>;

int vp(mpz_class n, mpz_class const& p)
{
    if (n == 0)
        fail(ErrorKind::internal, "valuation of zero");
    n = abs(n);
    mpz_class r;
    return static_cast<int>(mpz_remove(r.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

void mod_reduce(ZVec& v, mpz_class const& D)
{
    for (auto& x : v) {
        x %= D;
        if (x < 0)
            x += D;
    }
}

/* x * y in Z[alpha], reduced by the monic minimal polynomial */
ZVec zmul(ZVec const& x, ZVec const& y, IntPoly const& f)
{
    int n = degree(f);
    ZVec w(2 * n - 1);
    for (int i = 0; i < n; i++) {
        if (x[i] == 0)
            continue;
        for (int j = 0; j < n; j++)
            w[i + j] += x[i] * y[j];
    }
    for (int k = 2 * n - 2; k >= n; k--) {
        if (w[k] == 0)
            continue;
        mpz_class t = w[k];
        for (int j = 0; j < n; j++)
            w[k - n + j] -= t * f[j];
        w[k] = 0;
    }
    w.resize(n);
    return w;
}

/* Upper triangular basis of span(gens) + D Z^n. Pivots divide D. */
Lattice hnf_mod(std::vector<ZVec> const& gens, mpz_class const& D, int n)
{
    Lattice H(n, ZVec(n));
    for (int j = 0; j < n; j++)
        H[j][j] = D;
    for (ZVec v : gens) {
        mod_reduce(v, D);
        for (int j = 0; j < n; j++) {
            if (v[j] == 0)
                continue;
            mpz_class d, s, t;
            mpz_gcdext(d.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), H[j][j].get_mpz_t(),
                       v[j].get_mpz_t());
            mpz_class a = H[j][j] / d, b = v[j] / d;
            ZVec row(n), rest(n);
            for (int i = j; i < n; i++) {
                row[i] = s * H[j][i] + t * v[i];
                rest[i] = a * v[i] - b * H[j][i];
            }
            for (int i = j + 1; i < n; i++) {
                row[i] %= D;
                if (row[i] < 0)
                    row[i] += D;
            }
            H[j] = std::move(row);
            mod_reduce(rest, D);
            v = std::move(rest);
        }
    }
    return H;
}

bool lattice_contains(Lattice const& H, ZVec v, mpz_class const& D)
{
    int n = static_cast<int>(H.size());
    mod_reduce(v, D);
    for (int j = 0; j < n; j++) {
        if (v[j] == 0)
            continue;
        if (v[j] % H[j][j] != 0)
            return false;
        mpz_class c = v[j] / H[j][j];
        for (int i = j; i < n; i++)
            v[i] -= c * H[j][i];
        mod_reduce(v, D);
    }
    return true;
}

ZVec integral_coeffs(FieldElem const& x, mpz_class const& den)
{
    return x.scaled_numerators(den);
}

} // namespace

PrimeIdeal::PrimeIdeal(FieldPtr K, mpz_class p, IntPoly g, int e)
    : K_(std::move(K)), p_(std::move(p)), g_(std::move(g)), e_(e), f_(degree(g_)),
      powers_(std::make_shared<Powers>())
{
}

mpz_class PrimeIdeal::norm() const
{
    mpz_class q;
    mpz_pow_ui(q.get_mpz_t(), p_.get_mpz_t(), f_);
    return q;
}

std::vector<std::vector<mpz_class>> PrimeIdeal::power(int k) const
{
    std::lock_guard<std::mutex> lock(powers_->m);
    int n = K_->degree();
    IntPoly const& f = K_->minpoly();
    ZVec gvec(n);
    for (int i = 0; i < n && i < static_cast<int>(g_.size()); i++)
        gvec[i] = g_[i];
    while (static_cast<int>(powers_->hnf.size()) < k) {
        int j = static_cast<int>(powers_->hnf.size()) + 1;
        Lattice prev;
        if (j == 1) {
            prev.assign(n, ZVec(n));
            for (int i = 0; i < n; i++)
                prev[i][i] = 1;
        } else {
            prev = powers_->hnf[j - 2];
        }
        std::vector<ZVec> gens;
        for (auto const& b : prev) {
            ZVec pb = b;
            for (auto& x : pb)
                x *= p_;
            gens.push_back(pb);
            gens.push_back(zmul(b, gvec, f));
        }
        mpz_class D;
        mpz_pow_ui(D.get_mpz_t(), p_.get_mpz_t(), j);
        powers_->hnf.push_back(hnf_mod(gens, D, n));
    }
    return powers_->hnf[k - 1];
}

bool PrimeIdeal::contains(std::vector<mpz_class> const& y, int k) const
{
    mpz_class D;
    mpz_pow_ui(D.get_mpz_t(), p_.get_mpz_t(), k);
    return lattice_contains(power(k), y, D);
}

int PrimeIdeal::valuation(FieldElem const& x) const
{
    if (x.is_zero())
        fail(ErrorKind::internal, "valuation of zero");
    mpz_class d = x.denominator();
    ZVec y = integral_coeffs(x, d);
    int shift = d == 1 ? 0 : e_ * vp(d, p_);
    mpq_class N = (x * mpq_class(d)).norm();
    int kmax = vp(N.get_num(), p_) / f_;
    int k = 0;
    while (k < kmax && contains(y, k + 1))
        k++;
    return k - shift;
}

std::vector<PrimeIdeal> primes_above(FieldPtr const& K, mpz_class const& p)
{
    IntPoly const& f = K->minpoly();
    auto fac = factor_mod_p(f, p);
    IntPoly G{1}, H{1};
    for (auto const& [g, e] : fac) {
        G = mul(G, g);
        for (int i = 1; i < e; i++)
            H = mul(H, g);
    }
    /* Dedekind: Z[alpha] is p-maximal iff gcd(F, G, H) = 1 mod p */
    IntPoly GH = mul(G, H);
    IntPoly F(std::max(f.size(), GH.size()));
    for (size_t i = 0; i < F.size(); i++) {
        mpz_class a = i < f.size() ? f[i] : mpz_class(0);
        mpz_class b = i < GH.size() ? GH[i] : mpz_class(0);
        F[i] = a - b;
        if (F[i] % p != 0)
            fail(ErrorKind::internal, "mod p factorization does not lift");
        F[i] /= p;
    }
    trim(F);
    IntPoly t = gcd_mod_p(F, gcd_mod_p(G, H, p), p);
    if (degree(t) > 0)
        fail(ErrorKind::unsupported_field, "unsupported field at prime " + p.get_str());
    std::vector<PrimeIdeal> out;
    for (auto const& [g, e] : fac)
        out.emplace_back(K, p, g, e);
    return out;
}

std::vector<std::pair<mpz_class, int>> factor_integer(mpz_class n)
{
    std::vector<std::pair<mpz_class, int>> out;
    n = abs(n);
    if (n <= 1)
        return out;
    for (unsigned long d = 2; d <= 1000000UL; d++) {
        if (n == 1)
            break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            int e = 0;
            while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
                mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), d);
                e++;
            }
            out.emplace_back(mpz_class(d), e);
        }
        if (mpz_class(d) * d > n)
            break;
    }
    if (n > 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0)
            fail(ErrorKind::cap, "integer factorization beyond trial division: " + n.get_str());
        out.emplace_back(n, 1);
    }
    return out;
}

double PlaceSystem::abs_alpha(int i) const
{
    Place const& pl = places[i];
    if (pl.kind == PlaceKind::finite)
        return std::pow(pl.q.get_d(), -pl.nu);
    double m = K->roots()[pl.root].modulus();
    return pl.kind == PlaceKind::complex ? m * m : m;
}

double PlaceSystem::contraction(int i) const
{
    Place const& pl = places[i];
    if (pl.kind == PlaceKind::finite)
        return std::pow(pl.q.get_d(), -pl.nu);
    return K->roots()[pl.root].modulus();
}

PlaceSystem enumerate_places(FieldPtr const& K, mpz_class const& det)
{
    PlaceSystem ps;
    ps.K = K;
    ps.det = det;
    auto const& roots = K->roots();
    for (int r = 1; r < static_cast<int>(roots.size()); r++) {
        Place pl;
        pl.kind = roots[r].real ? PlaceKind::real : PlaceKind::complex;
        pl.root = r;
        ps.places.push_back(pl);
    }
    FieldElem a = FieldElem::alpha(K);
    mpz_class check = 1;
    for (auto const& [p, mult] : factor_integer(det)) {
        for (auto& P : primes_above(K, p)) {
            int nu = P.valuation(a);
            if (nu < 1)
                continue;
            mpz_class q = P.norm();
            Place pl;
            pl.kind = PlaceKind::finite;
            pl.fin = static_cast<int>(ps.fin.size());
            pl.q = q;
            pl.nu = nu;
            ps.places.push_back(pl);
            for (int i = 0; i < nu; i++)
                check *= q;
            ps.fin.push_back(FinitePlace{std::move(P), q, nu});
        }
    }
    if (check != abs(det))
        fail(ErrorKind::internal, "finite places do not account for det M");
    return ps;
}

int finite_valuation(FieldElem const& x, FinitePlace const& pl)
{
    return pl.ideal.valuation(x);
}

mpq_class NormCache::norm(FieldElem const& x) const
{
    std::ostringstream os;
    for (auto const& c : x.coeffs())
        os << c.get_str() << ',';
    std::string key = os.str();
    {
        std::lock_guard<std::mutex> lock(m_);
        auto it = map_.find(key);
        if (it != map_.end())
            return it->second;
    }
    mpq_class N = x.norm();
    std::lock_guard<std::mutex> lock(m_);
    map_.emplace(key, N);
    return N;
}

std::size_t NormCache::size() const
{
    std::lock_guard<std::mutex> lock(m_);
    return map_.size();
}

RepPoint phi_prime(FieldElem const& x, PlaceSystem const& ps)
{
    return phi_prime(x, ps, kExactLevel);
}

RepPoint phi_prime(FieldElem const& x, PlaceSystem const& ps, int level)
{
    RepPoint r;
    for (auto const& pl : ps.places)
        if (pl.kind != PlaceKind::finite)
            r.arch.push_back(x.embed(pl.root));
    for (size_t i = 0; i < ps.fin.size(); i++)
        r.fin.push_back(FinCoord{x, level});
    return r;
}

Interval dK(RepPoint const& x, RepPoint const& y, PlaceSystem const& ps)
{
    if (x.arch.size() != y.arch.size() || x.fin.size() != y.fin.size() ||
        static_cast<int>(x.arch.size()) != ps.arch_count())
        fail(ErrorKind::internal, "place mismatch in d_K");
    Interval r;
    for (size_t i = 0; i < x.arch.size(); i++) {
        Ball d = x.arch[i] - y.arch[i];
        r.lo = std::max(r.lo, d.abs_lo());
        r.hi = std::max(r.hi, d.abs_hi());
    }
    for (size_t i = 0; i < x.fin.size(); i++) {
        FinitePlace const& pl = ps.fin[i];
        double q = pl.q.get_d();
        int lvl = std::min(x.fin[i].level, y.fin[i].level);
        FieldElem diff = x.fin[i].sum - y.fin[i].sum;
        long cap = lvl == kExactLevel ? LONG_MAX : static_cast<long>(pl.nu) * lvl;
        if (diff.is_zero()) {
            if (cap != LONG_MAX)
                r.hi = std::max(r.hi, std::pow(q, -static_cast<double>(cap)));
            continue;
        }
        long v = pl.ideal.valuation(diff);
        if (v < cap) {
            double d = std::pow(q, -static_cast<double>(v));
            r.lo = std::max(r.lo, d);
            r.hi = std::max(r.hi, d);
        } else {
            r.hi = std::max(r.hi, std::pow(q, -static_cast<double>(cap)));
        }
    }
    return r;
}

double product_formula_check(FieldElem const& x, PlaceSystem const& ps)
{
    if (x.is_zero())
        fail(ErrorKind::internal, "product formula needs a nonzero element");
    FieldPtr const& K = ps.K;
    double log_sum = 0.0;
    auto const& roots = K->roots();
    for (int r = 0; r < static_cast<int>(roots.size()); r++) {
        double m = std::log(x.embed(r).abs_mid());
        log_sum += roots[r].real ? m : 2 * m;
    }
    mpz_class d = x.denominator();
    mpq_class N = (x * mpq_class(d)).norm();
    std::vector<mpz_class> primes;
    for (auto const& [p, e] : factor_integer(N.get_num()))
        primes.push_back(p);
    for (auto const& [p, e] : factor_integer(d))
        if (std::find(primes.begin(), primes.end(), p) == primes.end())
            primes.push_back(p);
    for (auto const& p : primes)
        for (auto const& P : primes_above(K, p)) {
            int v = P.valuation(x);
            if (v != 0)
                log_sum -= v * std::log(P.norm().get_d());
        }
    return std::abs(std::exp(log_sum) - 1.0);
}

double haar_scaling_residual(PlaceSystem const& ps)
{
    double log_prod = 0.0;
    for (int i = 0; i < static_cast<int>(ps.places.size()); i++)
        log_prod += std::log(ps.abs_alpha(i));
    double alpha = ps.K->perron().center.real();
    return std::abs(std::exp(log_prod) - 1.0 / alpha);
}

} // namespace pisot
