#include "pisot/roots.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/mpfr.hpp>

#include "pisot/error.hpp"

namespace pisot {

namespace {

template <unsigned D>
using MP = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<D>,
                                         boost::multiprecision::et_off>;

template <class T>
struct Cx {
    T re, im;
};

template <class T> Cx<T> operator+(Cx<T> const& a, Cx<T> const& b) { return {a.re + b.re, a.im + b.im}; }
template <class T> Cx<T> operator-(Cx<T> const& a, Cx<T> const& b) { return {a.re - b.re, a.im - b.im}; }
template <class T> Cx<T> operator*(Cx<T> const& a, Cx<T> const& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T> Cx<T> operator/(Cx<T> const& a, Cx<T> const& b)
{
    T d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
template <class T> T cabs(Cx<T> const& a) { return sqrt(a.re * a.re + a.im * a.im); }

struct RawRoot {
    std::complex<double> c;
    double r;
};

template <unsigned D>
bool attempt(IntPoly const& f, int bits, std::vector<RawRoot>& out)
{
    using T = MP<D>;
    int n = degree(f);
    std::vector<T> a(n + 1);
    for (int k = 0; k <= n; k++)
        a[k] = T(f[k].get_str());
    std::vector<T> da(n);
    for (int k = 1; k <= n; k++)
        da[k - 1] = a[k] * k;

    auto horner = [&](std::vector<T> const& c, Cx<T> const& z) {
        Cx<T> r{T(0), T(0)};
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; k--)
            r = r * z + Cx<T>{c[k], T(0)};
        return r;
    };

    /* Fujiwara bound for the starting circle */
    double R = 0;
    double an = std::abs(f[n].get_d());
    for (int k = 1; k <= n; k++) {
        double c = std::abs(f[n - k].get_d()) / an;
        if (c > 0)
            R = std::max(R, 2 * std::pow(c, 1.0 / k));
    }
    if (R == 0)
        R = 1;
    std::vector<Cx<T>> z(n);
    double const pi = 3.14159265358979323846;
    for (int k = 0; k < n; k++) {
        double th = 2 * pi * k / n + 0.4;
        z[k] = {T(R * std::cos(th)), T(R * std::sin(th))};
    }

    T tol = ldexp(T(1), -(bits - 8));
    int max_iter = 200 + 4 * bits;
    bool converged = false;
    for (int it = 0; it < max_iter && !converged; it++) {
        converged = true;
        for (int i = 0; i < n; i++) {
            Cx<T> pv = horner(a, z[i]);
            if (pv.re == 0 && pv.im == 0)
                continue;
            Cx<T> dv = horner(da, z[i]);
            Cx<T> ratio = pv / dv;
            Cx<T> s{T(0), T(0)};
            for (int j = 0; j < n; j++)
                if (j != i)
                    s = s + Cx<T>{T(1), T(0)} / (z[i] - z[j]);
            Cx<T> w = ratio / (Cx<T>{T(1), T(0)} - ratio * s);
            z[i] = z[i] - w;
            T scale = std::max(T(1), cabs(z[i]));
            if (cabs(w) > tol * scale)
                converged = false;
        }
    }
    if (!converged)
        return false;

    T u = ldexp(T(1), -bits);
    out.clear();
    for (int i = 0; i < n; i++) {
        Cx<T> pv = horner(a, z[i]);
        T az = cabs(z[i]);
        T bound = 0, pw = 1;
        for (int k = 0; k <= n; k++) {
            bound += abs(a[k]) * pw;
            pw *= az;
        }
        T err = bound * u * (4 * (n + 1));
        Cx<T> den{a[n], T(0)};
        for (int j = 0; j < n; j++)
            if (j != i)
                den = den * (z[i] - z[j]);
        T dabs = cabs(den);
        if (dabs == 0)
            return false;
        T rad = T(n) * (cabs(pv) + err) / dabs;
        rad *= T(1) + ldexp(T(1), -30);
        std::complex<double> c(z[i].re.template convert_to<double>(),
                               z[i].im.template convert_to<double>());
        double rd = rad.template convert_to<double>() * (1 + 0x1p-30) +
                    std::abs(c) * 0x1p-51 + 0x1p-1000;
        out.push_back({c, rd});
    }
    return true;
}

bool certify(IntPoly const& f, std::vector<RawRoot> const& raw, RootIsolation& iso)
{
    int n = static_cast<int>(raw.size());
    for (int i = 0; i < n; i++) {
        if (!(raw[i].r <= 1e-12 * std::abs(raw[i].c)) && !(raw[i].r < 1e-300))
            return false;
        for (int j = i + 1; j < n; j++)
            if (!(std::abs(raw[i].c - raw[j].c) > (raw[i].r + raw[j].r) * (1 + 1e-9)))
                return false;
    }
    int nreal = sturm_count_total(f);
    std::vector<CertifiedRoot> reals, pairs;
    std::vector<int> upper, lower;
    for (int i = 0; i < n; i++) {
        if (std::abs(raw[i].c.imag()) <= raw[i].r) {
            CertifiedRoot cr{true, {raw[i].c.real(), 0.0}, raw[i].r};
            mpq_class lo = mpq_class(cr.center.real()) - mpq_class(cr.radius);
            mpq_class hi = mpq_class(cr.center.real()) + mpq_class(cr.radius);
            if (sgn(eval(f, lo)) * sgn(eval(f, hi)) >= 0)
                return false;
            reals.push_back(cr);
        } else if (raw[i].c.imag() > 0) {
            upper.push_back(i);
        } else {
            lower.push_back(i);
        }
    }
    if (static_cast<int>(reals.size()) != nreal || upper.size() != lower.size())
        return false;
    for (int i : upper) {
        int match = 0;
        for (int j : lower)
            if (std::abs(raw[j].c - std::conj(raw[i].c)) <= raw[i].r + raw[j].r)
                match++;
        if (match != 1)
            return false;
        pairs.push_back({false, raw[i].c, raw[i].r});
    }
    std::sort(reals.begin(), reals.end(),
              [](auto const& x, auto const& y) { return x.center.real() > y.center.real(); });
    std::sort(pairs.begin(), pairs.end(), [](auto const& x, auto const& y) {
        if (std::abs(x.center) != std::abs(y.center))
            return std::abs(x.center) > std::abs(y.center);
        return std::arg(x.center) < std::arg(y.center);
    });
    iso.roots = reals;
    iso.roots.insert(iso.roots.end(), pairs.begin(), pairs.end());
    iso.real_count = static_cast<int>(reals.size());
    iso.pair_count = static_cast<int>(pairs.size());
    return true;
}

} // namespace

RootIsolation isolate_roots(IntPoly const& f0, int start_bits)
{
    IntPoly f = f0;
    trim(f);
    int n = degree(f);
    if (n < 1)
        fail(ErrorKind::internal, "root isolation of a constant");
    if (f[0] == 0)
        fail(ErrorKind::internal, "root isolation expects nonzero constant term");
    RootIsolation iso;
    for (int bits : {64, 128, 256, 512}) {
        if (bits < start_bits)
            continue;
        std::vector<RawRoot> raw;
        bool ok = false;
        switch (bits) {
        case 64: ok = attempt<20>(f, 64, raw); break;
        case 128: ok = attempt<39>(f, 128, raw); break;
        case 256: ok = attempt<78>(f, 256, raw); break;
        default: ok = attempt<155>(f, 512, raw); break;
        }
        if (ok && certify(f, raw, iso)) {
            iso.precision_bits = bits;
            return iso;
        }
    }
    fail(ErrorKind::internal, "root isolation failed at 512 bits");
}

PisotResult pisot_check(IntPoly const& f, int start_bits)
{
    PisotResult res;
    res.iso = isolate_roots(f, start_bits);
    auto const& r = res.iso.roots;
    int outside = 0;
    bool ok = !r.empty() && r[0].real && r[0].center.real() - r[0].radius > 1;
    for (size_t i = 0; i < r.size(); i++) {
        if (i == 0)
            continue;
        if (!(std::abs(r[i].center) + r[i].radius < 1))
            ok = false;
    }
    for (auto const& x : r)
        if (std::abs(x.center) - x.radius > 1)
            outside++;
    res.pisot = ok && outside == 1;
    return res;
}

} // namespace pisot
