#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pisot/error.hpp"
#include "pisot/places.hpp"

using namespace pisot;

namespace {

FieldPtr field(std::vector<long> c) { return make_field(int_poly(c)); }

FieldElem elem(FieldPtr const& K, std::vector<long> c)
{
    std::vector<mpq_class> q;
    for (long x : c)
        q.emplace_back(x);
    q.resize(K->degree());
    return FieldElem(K, q);
}

int vp(mpz_class n, long p)
{
    int e = 0;
    n = abs(n);
    while (n % p == 0) {
        n /= p;
        e++;
    }
    return e;
}

} // namespace

TEST(Places, Tribonacci)
{
    auto K = field({-1, -1, -1, 1});
    auto ps = enumerate_places(K, 1);
    ASSERT_EQ(ps.places.size(), 1u);
    EXPECT_EQ(ps.places[0].kind, PlaceKind::complex);
    EXPECT_EQ(ps.fin_count(), 0);
    EXPECT_LT(haar_scaling_residual(ps), 1e-10);
}

TEST(Places, Fibonacci)
{
    auto ps = enumerate_places(field({-1, -1, 1}), -1);
    ASSERT_EQ(ps.places.size(), 1u);
    EXPECT_EQ(ps.places[0].kind, PlaceKind::real);
    EXPECT_EQ(ps.fin_count(), 0);
}

TEST(Places, NonUnimodularQuadratic)
{
    auto K = field({-2, -3, 1});
    auto above = primes_above(K, 2);
    ASSERT_EQ(above.size(), 2u);
    auto ps = enumerate_places(K, -2);
    ASSERT_EQ(ps.fin_count(), 1);
    EXPECT_EQ(ps.fin[0].q, 2);
    EXPECT_EQ(ps.fin[0].nu, 1);
    EXPECT_EQ(ps.fin[0].ideal.generator(), int_poly({0, 1}));
    FieldElem a = FieldElem::alpha(K);
    EXPECT_EQ(finite_valuation(a, ps.fin[0]), 1);
    EXPECT_EQ(finite_valuation(a.pow(3), ps.fin[0]), 3);
    for (auto const& P : above)
        EXPECT_EQ(P.valuation(FieldElem(K, mpq_class(2))), 1);
    EXPECT_EQ(finite_valuation(FieldElem(K, mpq_class(1, 4)), ps.fin[0]), -2);
    EXPECT_LT(haar_scaling_residual(ps), 1e-10);
    EXPECT_LT(product_formula_check(a, ps), 1e-10);
}

TEST(Places, RamifiedPrime)
{
    auto K = field({-2, -2, 1}); /* 1 +- sqrt 3 */
    auto above = primes_above(K, 2);
    ASSERT_EQ(above.size(), 1u);
    EXPECT_EQ(above[0].e(), 2);
    EXPECT_EQ(above[0].valuation(FieldElem(K, mpq_class(2))), 2);
    EXPECT_EQ(above[0].valuation(FieldElem::alpha(K)), 1);
    auto ps = enumerate_places(K, -2);
    ASSERT_EQ(ps.fin_count(), 1);
    EXPECT_EQ(ps.fin[0].nu, 1);
}

TEST(Places, UnsupportedPrime)
{
    auto K = field({-12, 0, 1});
    try {
        primes_above(K, 2);
        FAIL() << "expected an error";
    } catch (Error const& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported_field);
        EXPECT_NE(std::string(e.what()).find("prime 2"), std::string::npos);
    }
}

TEST(Places, ValuationsSumToNormValuation)
{
    std::mt19937_64 rng(17);
    struct Case {
        std::vector<long> f;
        std::vector<long> primes;
    };
    for (auto const& c : {Case{{-2, -3, 1}, {2, 3, 5, 7}}, Case{{-2, -2, 1}, {2, 11, 13}},
                          Case{{-1, -1, -1, 1}, {2, 3, 5, 11}}, Case{{-3, -1, -2, 1}, {3, 5}}}) {
        auto K = field(c.f);
        int n = K->degree();
        for (long p : c.primes) {
            auto above = primes_above(K, p);
            for (int t = 0; t < 40; t++) {
                std::vector<long> x(n), y(n);
                for (int k = 0; k < n; k++) {
                    x[k] = static_cast<long>(rng() % 41) - 20;
                    y[k] = static_cast<long>(rng() % 41) - 20;
                }
                FieldElem X = elem(K, x), Y = elem(K, y);
                if (X.is_zero() || Y.is_zero())
                    continue;
                int total = 0;
                for (auto const& P : above) {
                    int vx = P.valuation(X);
                    total += P.f() * vx;
                    EXPECT_EQ(P.valuation(X * Y), vx + P.valuation(Y));
                }
                EXPECT_EQ(total, vp(X.norm().get_num(), p));
            }
        }
    }
}

TEST(Places, PhiPrimeAndMetric)
{
    auto K = field({-1, -1, -1, 1});
    auto ps = enumerate_places(K, 1);
    FieldElem a = FieldElem::alpha(K);
    RepPoint z = phi_prime(FieldElem(K), ps), one = phi_prime(FieldElem(K, mpq_class(1)), ps);
    EXPECT_EQ(z.arch[0].mid, std::complex<double>(0.0, 0.0));
    EXPECT_NEAR(std::abs(one.arch[0].mid - 1.0), 0.0, 1e-15);
    RepPoint pa = phi_prime(a, ps);
    EXPECT_NEAR(pa.arch[0].mid.real(), -0.419643377607081, 1e-12);
    EXPECT_NEAR(std::abs(pa.arch[0].mid.imag()), 0.606290729207199, 1e-12);
    Interval d0 = dK(z, z, ps);
    EXPECT_EQ(d0.hi, 0.0);
    Interval d1 = dK(z, one, ps);
    EXPECT_LE(d1.lo, 1.0);
    EXPECT_GE(d1.hi, 1.0);
    EXPECT_LT(d1.hi - d1.lo, 1e-12);
}

TEST(Places, FiniteMetricOnPartialSums)
{
    auto K = field({-2, -3, 1});
    auto ps = enumerate_places(K, -2);
    FieldElem a = FieldElem::alpha(K);
    /* sums agreeing below index m differ by a multiple of alpha^m */
    for (int m = 1; m <= 8; m++) {
        FieldElem s1(K), s2(K);
        for (int i = 0; i < m; i++)
            s1 += a.pow(i);
        s2 = s1 + a.pow(m) * mpq_class(3);
        s1 += a.pow(m);
        RepPoint x = phi_prime(s1, ps, m + 1), y = phi_prime(s2, ps, m + 1);
        Interval d = dK(x, y, ps);
        double arch_bound = 2 * std::pow(ps.contraction(0), m);
        EXPECT_LE(d.hi, std::max(arch_bound * 1.0000001, std::pow(2.0, -m)));
    }
}

TEST(Places, ProductFormulaAndHaar)
{
    for (auto const& c : std::vector<std::pair<std::vector<long>, long>>{
             {{-1, -1, -1, 1}, 1}, {{-1, -1, 1}, -1}, {{-2, -3, 1}, -2}, {{-2, -2, 1}, -2},
             {{-1, -1, 0, 1}, 1}}) {
        auto K = field(c.first);
        auto ps = enumerate_places(K, c.second);
        EXPECT_LT(haar_scaling_residual(ps), 1e-10);
        EXPECT_LT(product_formula_check(FieldElem::alpha(K), ps), 1e-10);
        EXPECT_EQ(product_formula_check(FieldElem(K, mpq_class(1)), ps), 0.0);
        std::mt19937_64 rng(23);
        int n = K->degree();
        for (int t = 0; t < 30; t++) {
            std::vector<mpq_class> x(n);
            for (auto& v : x)
                v = mpq_class(static_cast<long>(rng() % 19) - 9, 1 + static_cast<long>(rng() % 4));
            FieldElem X(K, x);
            if (X.is_zero())
                continue;
            EXPECT_LT(product_formula_check(X, ps), 1e-9);
        }
    }
}

TEST(Places, LatticeInjectivity)
{
    auto K = field({-1, -1, -1, 1});
    FieldElem a = FieldElem::alpha(K), one(K, mpq_class(1));
    std::vector<FieldElem> v = {one, a - one, a.inv()};
    std::mt19937_64 rng(29);
    for (int t = 0; t < 1000; t++) {
        FieldElem s(K);
        bool nonzero = false;
        for (int i = 0; i < 3; i++) {
            long d = static_cast<long>(rng() % 41) - 20;
            nonzero |= d != 0;
            s += v[i] * mpq_class(d);
        }
        EXPECT_EQ(s.is_zero(), !nonzero);
    }
}

TEST(Places, NormCacheAgrees)
{
    auto K = field({-2, -3, 1});
    NormCache cache;
    std::mt19937_64 rng(31);
    for (int t = 0; t < 50; t++) {
        FieldElem x = elem(K, {static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3});
        EXPECT_EQ(cache.norm(x), x.norm());
        EXPECT_EQ(cache.norm(x), x.norm());
    }
    EXPECT_LE(cache.size(), 49u);
}

TEST(Places, FactorInteger)
{
    auto f = factor_integer(mpz_class(-360));
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[0], std::make_pair(mpz_class(2), 3));
    EXPECT_EQ(f[1], std::make_pair(mpz_class(3), 2));
    EXPECT_EQ(f[2], std::make_pair(mpz_class(5), 1));
    EXPECT_TRUE(factor_integer(1).empty());
}
