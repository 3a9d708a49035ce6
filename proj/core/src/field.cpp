#include "pisot/field.hpp"

#include <sstream>

#include "pisot/error.hpp"

namespace pisot {

NumberField::NumberField(IntPoly minpoly, RootIsolation iso)
    : minpoly_(std::move(minpoly)), iso_(std::move(iso))
{
    if (minpoly_.empty() || minpoly_.back() != 1)
        fail(ErrorKind::internal, "minimal polynomial must be monic");
    int n = degree();
    for (auto const& r : iso_.roots) {
        std::vector<Ball> pw;
        Ball x(1.0);
        for (int k = 0; k < n; k++) {
            pw.push_back(x);
            x = x * r.ball();
        }
        powers_.push_back(pw);
    }
}

FieldPtr make_field(IntPoly const& minpoly, int start_bits)
{
    return std::make_shared<NumberField const>(minpoly, isolate_roots(minpoly, start_bits));
}

FieldElem::FieldElem(FieldPtr K) : K_(std::move(K)), c_(K_->degree()) {}

FieldElem::FieldElem(FieldPtr K, mpq_class const& q) : K_(std::move(K)), c_(K_->degree())
{
    c_[0] = q;
}

FieldElem::FieldElem(FieldPtr K, std::vector<mpq_class> coeffs) : K_(std::move(K))
{
    reduce_from(std::move(coeffs));
}

void FieldElem::reduce_from(std::vector<mpq_class> w)
{
    int n = K_->degree();
    IntPoly const& p = K_->minpoly();
    for (int k = static_cast<int>(w.size()) - 1; k >= n; k--) {
        if (w[k] == 0)
            continue;
        mpq_class t = w[k];
        for (int j = 0; j < n; j++)
            w[k - n + j] -= t * p[j];
        w[k] = 0;
    }
    w.resize(n);
    c_ = std::move(w);
}

FieldElem FieldElem::alpha(FieldPtr K)
{
    if (K->degree() == 1)
        return FieldElem(K, mpq_class(-K->minpoly()[0]));
    std::vector<mpq_class> c(K->degree());
    c[1] = 1;
    return FieldElem(K, c);
}

FieldElem FieldElem::alpha_pow(FieldPtr K, int k)
{
    std::vector<mpq_class> c(std::max(k + 1, K->degree()));
    c[k] = 1;
    return FieldElem(K, c);
}

bool FieldElem::is_zero() const
{
    for (auto const& x : c_)
        if (x != 0)
            return false;
    return true;
}

bool FieldElem::is_rational() const
{
    for (size_t k = 1; k < c_.size(); k++)
        if (c_[k] != 0)
            return false;
    return true;
}

FieldElem FieldElem::operator+(FieldElem const& b) const
{
    FieldElem r = *this;
    r += b;
    return r;
}

FieldElem FieldElem::operator-(FieldElem const& b) const
{
    FieldElem r = *this;
    r -= b;
    return r;
}

FieldElem FieldElem::operator-() const
{
    FieldElem r = *this;
    for (auto& x : r.c_)
        x = -x;
    return r;
}

FieldElem& FieldElem::operator+=(FieldElem const& b)
{
    for (size_t k = 0; k < c_.size(); k++)
        c_[k] += b.c_[k];
    return *this;
}

FieldElem& FieldElem::operator-=(FieldElem const& b)
{
    for (size_t k = 0; k < c_.size(); k++)
        c_[k] -= b.c_[k];
    return *this;
}

FieldElem FieldElem::operator*(FieldElem const& b) const
{
    int n = K_->degree();
    std::vector<mpq_class> w(2 * n - 1);
    for (int i = 0; i < n; i++) {
        if (c_[i] == 0)
            continue;
        for (int j = 0; j < n; j++)
            if (b.c_[j] != 0)
                w[i + j] += c_[i] * b.c_[j];
    }
    FieldElem r;
    r.K_ = K_;
    r.reduce_from(std::move(w));
    return r;
}

FieldElem& FieldElem::operator*=(FieldElem const& b)
{
    *this = *this * b;
    return *this;
}

FieldElem FieldElem::operator*(mpq_class const& q) const
{
    FieldElem r = *this;
    for (auto& x : r.c_)
        x *= q;
    return r;
}

FieldElem operator*(mpq_class const& q, FieldElem const& x) { return x * q; }

FieldElem FieldElem::inv() const
{
    if (is_zero())
        fail(ErrorKind::internal, "division by zero in Q(alpha)");
    /* extended Euclid: s*g + t*p = 1 */
    RatPoly g(c_.begin(), c_.end());
    trim(g);
    RatPoly p = to_rat(K_->minpoly());
    RatPoly r0 = p, r1 = g, s0{}, s1{mpq_class(1)};
    while (degree(r1) > 0) {
        auto [q, r] = divmod(r0, r1);
        RatPoly s = sub(s0, mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r1.empty())
        fail(ErrorKind::internal, "minimal polynomial is not irreducible");
    mpq_class c = r1[0];
    std::vector<mpq_class> out(s1.begin(), s1.end());
    for (auto& x : out)
        x /= c;
    return FieldElem(K_, out);
}

FieldElem FieldElem::operator/(FieldElem const& b) const { return *this * b.inv(); }

FieldElem FieldElem::pow(long k) const
{
    if (k < 0)
        return inv().pow(-k);
    FieldElem r(K_, mpq_class(1)), base = *this;
    while (k > 0) {
        if (k & 1)
            r *= base;
        k >>= 1;
        if (k)
            base *= base;
    }
    return r;
}

mpq_class FieldElem::norm() const
{
    RatPoly g(c_.begin(), c_.end());
    trim(g);
    if (g.empty())
        return 0;
    return resultant(to_rat(K_->minpoly()), g);
}

mpz_class FieldElem::denominator() const
{
    mpz_class d = 1;
    for (auto const& x : c_)
        d = lcm(d, mpz_class(x.get_den()));
    return d;
}

std::vector<mpz_class> FieldElem::scaled_numerators(mpz_class const& den) const
{
    std::vector<mpz_class> r;
    for (auto const& x : c_) {
        mpq_class y = x * den;
        if (y.get_den() != 1)
            fail(ErrorKind::internal, "denominator does not clear element");
        r.push_back(y.get_num());
    }
    return r;
}

Ball FieldElem::embed(int root) const
{
    auto const& pw = K_->root_powers(root);
    Ball acc;
    for (size_t k = 0; k < c_.size(); k++) {
        if (c_[k] == 0)
            continue;
        acc = acc + Ball::from_rational(c_[k]) * pw[k];
    }
    if (K_->roots()[root].real)
        acc.mid.imag(0.0);
    return acc;
}

namespace {

struct QInterval {
    mpq_class lo, hi;
};

QInterval horner_interval(std::vector<mpq_class> const& c, mpq_class const& lo, mpq_class const& hi)
{
    /* lo > 0 is required */
    QInterval r{0, 0};
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; k--) {
        mpq_class a = r.lo * lo, b = r.lo * hi, d = r.hi * lo, e = r.hi * hi;
        r.lo = std::min({a, b, d, e}) + c[k];
        r.hi = std::max({a, b, d, e}) + c[k];
    }
    return r;
}

} // namespace

int FieldElem::sign() const
{
    Ball b = embed(0);
    if (!b.contains_zero())
        return b.mid.real() > 0 ? 1 : -1;
    if (is_zero())
        return 0;
    CertifiedRoot const& pr = K_->perron();
    IntPoly const& p = K_->minpoly();
    mpq_class lo = mpq_class(pr.center.real()) - mpq_class(pr.radius);
    mpq_class hi = mpq_class(pr.center.real()) + mpq_class(pr.radius);
    int slo = sgn(eval(p, lo));
    if (slo == 0 || sgn(eval(p, hi)) == slo || lo <= 0)
        fail(ErrorKind::internal, "Perron isolating interval is not certified");
    for (int round = 0; round < 4000; round++) {
        QInterval v = horner_interval(c_, lo, hi);
        if (v.lo > 0)
            return 1;
        if (v.hi < 0)
            return -1;
        for (int s = 0; s < 16; s++) {
            mpq_class mid = (lo + hi) / 2;
            int sm = sgn(eval(p, mid));
            if (sm == slo)
                lo = mid;
            else
                hi = mid;
        }
    }
    fail(ErrorKind::internal, "exact sign determination did not terminate");
}

std::string FieldElem::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; k--) {
        if (c_[k] == 0)
            continue;
        mpq_class a = abs(c_[k]);
        bool neg = c_[k] < 0;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        if (a != 1 || k == 0)
            os << a.get_str();
        if (k >= 1)
            os << (a != 1 ? "*a" : "a");
        if (k >= 2)
            os << "^" << k;
    }
    if (first)
        os << "0";
    return os.str();
}

IntMatrix companion_matrix(IntPoly const& p)
{
    int n = degree(p);
    IntMatrix m(n, n);
    for (int i = 1; i < n; i++)
        m(i, i - 1) = 1;
    for (int i = 0; i < n; i++)
        m(i, n - 1) = -p[i];
    return m;
}

} // namespace pisot
