#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "common.hpp"
#include "pisot/error.hpp"
#include "pisot/tiling.hpp"

using namespace pisot;
using pisot::fixture::World;
namespace fx = pisot::fixture;

namespace {

std::vector<double> radii(World const& w, double arch, double fin = 1.0)
{
    std::vector<double> r;
    for (auto const& pl : w.ps.places)
        r.push_back(pl.kind == PlaceKind::finite ? fin : arch);
    return r;
}

/* brute force over |base|_inf <= B at level 0 */
std::set<std::pair<IntVector, int>> brute(World const& w, Region const& reg, int B)
{
    std::set<std::pair<IntVector, int>> out;
    int n = w.s.size();
    IntVector b(n, -B);
    for (;;) {
        FieldElem x = w.e.pair(b);
        bool inside = x.sign() >= 0;
        for (size_t P = 0; inside && P < w.ps.places.size(); P++) {
            auto const& pl = w.ps.places[P];
            if (pl.kind != PlaceKind::finite)
                inside = (x.embed(pl.root) - reg.center.embed(pl.root)).abs_mid() <= reg.radius[P];
        }
        if (inside)
            for (int a = 0; a < n; a++)
                if ((x - w.e.v[a]).sign() < 0)
                    out.insert({b, a});
        int j = 0;
        while (j < n && b[j] == B)
            b[j++] = -B;
        if (j == n)
            break;
        b[j]++;
    }
    return out;
}

std::set<std::pair<IntVector, int>> as_set(Patch const& p)
{
    std::set<std::pair<IntVector, int>> out;
    for (auto const& it : p.items) {
        EXPECT_EQ(it.w.level, 0);
        out.insert({it.w.base, it.letter});
    }
    return out;
}

} // namespace

TEST(Gamma, ZeroVectorForEveryLetter)
{
    for (auto text : {fx::kRauzy, fx::kFibonacci, fx::kNonUnimodular}) {
        World w(text);
        for (int a = 0; a < w.s.size(); a++)
            EXPECT_TRUE(gamma_member(w.e, LatticeVec{IntVector(w.s.size(), 0), 0}, a));
    }
}

TEST(Gamma, RauzySecondUnitVector)
{
    World r(fx::kRauzy);
    LatticeVec e2{{0, 1, 0}, 0};
    EXPECT_TRUE(gamma_member(r.e, e2, 0));
    EXPECT_FALSE(gamma_member(r.e, e2, 1));
    EXPECT_FALSE(gamma_member(r.e, e2, 2));
}

TEST(Gamma, CanonicalLevel)
{
    World w(fx::kNonUnimodular);
    /* M^{-1} (M x) = x */
    IntVector x{3, -2};
    LatticeVec up{w.M.apply(w.M.apply(x)), 2};
    LatticeVec c = canonical_lattice_vec(up, w.M);
    EXPECT_EQ(c.level, 0);
    EXPECT_EQ(c.base, x);
    EXPECT_EQ(w.e.pair(c), w.e.pair(up));
    LatticeVec odd{{1, 0}, 1};
    EXPECT_EQ(canonical_lattice_vec(odd, w.M), odd);
}

TEST(Patch, FibonacciMatchesBruteForce)
{
    World f(fx::kFibonacci);
    Region reg = ball_region(*f.fr, radii(f, 3.0));
    Patch p = translation_patch(*f.fr, reg);
    EXPECT_FALSE(p.items.empty());
    EXPECT_EQ(as_set(p), brute(f, reg, 20));
}

TEST(Patch, RauzyMatchesBruteForce)
{
    World r(fx::kRauzy);
    Region reg = ball_region(*r.fr, radii(r, 2.5));
    Patch p = translation_patch(*r.fr, reg);
    EXPECT_EQ(as_set(p), brute(r, reg, 12));
    PatchOptions one;
    one.letter = 1;
    for (auto const& it : translation_patch(*r.fr, reg, one).items)
        EXPECT_EQ(it.letter, 1);
}

TEST(Patch, ItemsInGammaAndDistinct)
{
    for (auto text : {fx::kRauzy, fx::kNonUnimodular}) {
        World w(text);
        Patch p = translation_patch(*w.fr, ball_region(*w.fr, radii(w, 3.0, 4.0)));
        std::set<std::vector<mpq_class>> xs;
        std::set<LatticeVec> ws;
        for (auto const& it : p.items) {
            EXPECT_TRUE(gamma_member(w.e, it.w, it.letter));
            EXPECT_EQ(it.x, w.e.pair(it.w));
            EXPECT_EQ(canonical_lattice_vec(it.w, w.M), it.w);
            if (ws.insert(it.w).second)
                EXPECT_TRUE(xs.insert(it.x.coeffs()).second) << "distinct w with equal <w,v>";
        }
    }
}

TEST(Patch, CapAndBounds)
{
    World r(fx::kRauzy);
    PatchOptions small;
    small.item_cap = 5;
    EXPECT_THROW(translation_patch(*r.fr, ball_region(*r.fr, radii(r, 6.0)), small), Error);
    EXPECT_THROW(translation_patch(*r.fr, ball_region(*r.fr, radii(r, INFINITY))), Error);
    EXPECT_THROW(ball_region(*r.fr, {}), Error);
}

TEST(Z0, TribonacciBruteForce)
{
    World r(fx::kRauzy);
    Patch z = candidate_Z0(*r.fr);
    for (int a = 0; a < 3; a++) {
        bool found = false;
        for (auto const& it : z.items)
            found |= it.letter == a && it.w.base == IntVector{0, 0, 0};
        EXPECT_TRUE(found);
    }
    ASSERT_TRUE(z.region.has_value());
    EXPECT_EQ(as_set(z), brute(r, *z.region, 14));
    EXPECT_EQ(z.i_max, 0);
}

TEST(Z0, NonUnimodularScaling)
{
    World w(fx::kNonUnimodular);
    Patch z = candidate_Z0(*w.fr);
    EXPECT_EQ(z.i_max, 6);
    EXPECT_FALSE(z.items.empty());
    EigenData s = scale_v(w.e, lattice_vectors(z));
    for (auto const& v : lattice_vectors(z))
        EXPECT_EQ(s.pair(v).denominator(), 1);
}

TEST(Covering, OriginIsInteriorForTribonacci)
{
    World r(fx::kRauzy);
    Tiler T(*r.fr);
    Patch p = translation_patch(*r.fr, T.sampling_region());
    CoverResult c = T.covering_degree(T.point(FieldElem(r.K)), p, {14, 16, 18});
    EXPECT_EQ(c.counts, (std::vector<int>{1, 1, 1}));
    EXPECT_TRUE(c.stable());
}

TEST(Covering, FarPointAndEmptyPatch)
{
    World r(fx::kRauzy);
    Tiler T(*r.fr);
    Patch p = translation_patch(*r.fr, T.sampling_region());
    FieldElem far(r.K, std::vector<mpq_class>{0, 0, 40});
    CoverResult c = T.covering_degree(T.point(far), p, {14});
    EXPECT_EQ(c.counts[0], 0);
    EXPECT_TRUE(c.items.empty());
    Patch empty;
    EXPECT_EQ(T.covering_degree(T.point(FieldElem(r.K)), empty, {14}).counts[0], 0);
}

TEST(Covering, EnclosuresContainClouds)
{
    for (auto text : {fx::kRauzy, fx::kFibonacci}) {
        World w(text);
        Tiler T(*w.fr);
        auto const& tb = T.balls();
        for (int b = 0; b < w.s.size(); b++)
            for (auto const& pt : w.fr->cloud(b, 12).points)
                for (int P = 0; P < w.ps.arch_count(); P++) {
                    auto z = w.fr->ring().embed(pt, w.ps.places[P].root).mid;
                    EXPECT_LE(std::abs(z - tb.center[P][b]), tb.radius[P][b]);
                    for (auto const& dk : tb.hull[P][b])
                        EXPECT_LE(std::abs(z - dk.center), dk.radius);
                }
    }
}

TEST(Covering, CountsNonIncreasingInDepth)
{
    World r(fx::kRauzy);
    Tiler T(*r.fr);
    Patch p = translation_patch(*r.fr, T.sampling_region());
    std::mt19937_64 g(3);
    for (int i = 0; i < 50; i++) {
        auto path = sample_path(r.chain, 80, g);
        auto c = T.covering_degree(T.psi_point(path), p, {6, 10, 14}).counts;
        EXPECT_GE(c[0], c[1]);
        EXPECT_GE(c[1], c[2]);
        EXPECT_GE(c[2], 1);
    }
}

TEST(Statistics, TribonacciAndFibonacci)
{
    for (auto text : {fx::kRauzy, fx::kFibonacci}) {
        World w(text);
        Tiler T(*w.fr);
        TilingStats st = T.tiling_statistics(w.chain, 1000, {14, 16, 18}, 1);
        EXPECT_GE(st.count1_fraction(), 0.99) << text;
        EXPECT_EQ(st.stable_defects, 0) << text;
        EXPECT_EQ(st.count1 + st.unstable >= st.samples, true);
    }
}

TEST(Statistics, DeterministicAcrossThreads)
{
    World r(fx::kRauzy);
    Tiler T(*r.fr);
    auto a = T.tiling_statistics(r.chain, 200, {10, 12}, 99, 30, 1);
    auto b = T.tiling_statistics(r.chain, 200, {10, 12}, 99, 30, 3);
    EXPECT_EQ(a.per_sample, b.per_sample);
    EXPECT_EQ(a.resolved, b.resolved);
    auto c = T.tiling_statistics(r.chain, 200, {10, 12}, 100, 30, 1);
    EXPECT_NE(a.per_sample, c.per_sample);
}

TEST(Statistics, MissingCentralTilesReportZero)
{
    World r(fx::kRauzy);
    Tiler T(*r.fr);
    Patch empty;
    auto st = T.tiling_statistics(r.chain, 50, {8}, 5, 8, 0, &empty);
    EXPECT_EQ(st.histogram[0][0], 50);
    EXPECT_EQ(st.count1, 0);
}

TEST(Delone, TribonacciRadii)
{
    World r(fx::kRauzy);
    Patch p10 = translation_patch(*r.fr, ball_region(*r.fr, radii(r, 10.0)));
    Patch p20 = translation_patch(*r.fr, ball_region(*r.fr, radii(r, 20.0)));
    DeloneRadii d10 = delone_radii(*r.fr, p10, 0), d20 = delone_radii(*r.fr, p20, 0);
    EXPECT_GT(d10.r2, 0.0);
    EXPECT_GT(d10.r1, d10.r2);
    EXPECT_LT(std::abs(d20.r1 - d10.r1) / d10.r1, 0.10);
    /* oracle: minimum over all pairs */
    double best = 1e300;
    std::vector<std::complex<double>> g;
    for (auto const& it : p10.items)
        if (it.letter == 0)
            g.push_back(it.gamma.arch[0].mid);
    for (size_t i = 0; i < g.size(); i++)
        for (size_t j = i + 1; j < g.size(); j++)
            best = std::min(best, std::abs(g[i] - g[j]));
    EXPECT_NEAR(d10.r2, best / 2, 1e-12);
}

TEST(Delone, SingleItemRejected)
{
    World r(fx::kRauzy);
    Patch p;
    p.items.push_back(make_item(*r.fr, LatticeVec{{0, 0, 0}, 0}, 0));
    EXPECT_THROW(delone_radii(*r.fr, p, 0), Error);
}

TEST(Preimage, RauzyDepthOne)
{
    World r(fx::kRauzy);
    Patch p = preimage_patch(*r.fr, 0, 1);
    ASSERT_EQ(p.items.size(), 3u);
    for (int b = 0; b < 3; b++) {
        EXPECT_EQ(p.items[b].letter, b);
        EXPECT_EQ(p.items[b].w.base, (IntVector{0, 0, 0}));
        EXPECT_EQ(p.items[b].w.level, 0);
        EXPECT_TRUE(p.items[b].x.is_zero());
    }
}

TEST(Preimage, CountsAndMembership)
{
    for (auto text : {fx::kRauzy, fx::kFibonacci, fx::kNonUnimodular}) {
        World w(text);
        for (int k = 0; k <= 6; k++) {
            IntMatrix Mk = w.M.pow(k);
            for (int a = 0; a < w.s.size(); a++) {
                Patch p = preimage_patch(*w.fr, a, k);
                mpz_class expect = 0;
                for (int b = 0; b < w.s.size(); b++)
                    expect += Mk(a, b);
                EXPECT_EQ(mpz_class(static_cast<long>(p.items.size())), expect);
                for (auto const& it : p.items)
                    EXPECT_TRUE(gamma_member(w.e, it.w, it.letter));
            }
        }
    }
    World r(fx::kRauzy);
    EXPECT_THROW(preimage_patch(*r.fr, 0, 21), Error);
}

TEST(QuasiPeriodic, StrongCoincidenceWitnesses)
{
    World r(fx::kRauzy), f(fx::kFibonacci);
    for (World* w : {&r, &f}) {
        LatticeVec zero{IntVector(w->s.size(), 0), 0};
        std::vector<PatchItem> needle{make_item(*w->fr, zero, 0), make_item(*w->fr, zero, 1)};
        auto wit = quasi_periodic_search(*w->fr, needle, 1);
        ASSERT_TRUE(wit.has_value());
        EXPECT_TRUE(wit->t.is_zero());
        ASSERT_EQ(wit->matched.size(), 2u);
        EXPECT_EQ(wit->matched[0].prefix, wit->matched[1].prefix);
        EXPECT_EQ(wit->matched[0].prefix, IntVector(w->s.size(), 0));
    }
    LatticeVec zero{{0, 0, 0}, 0};
    for (int a = 0; a < 3; a++)
        EXPECT_TRUE(quasi_periodic_search(*r.fr, {make_item(*r.fr, zero, a)}, 1).has_value());
}

TEST(QuasiPeriodic, WitnessPrefixesAgree)
{
    World r(fx::kRauzy);
    for (int i = 0; i < 3; i++)
        for (int j = i + 1; j < 3; j++) {
            LatticeVec zero{{0, 0, 0}, 0};
            std::vector<PatchItem> needle{make_item(*r.fr, zero, i), make_item(*r.fr, zero, j)};
            for (int k = 1; k <= 4; k++) {
                auto wit = quasi_periodic_search(*r.fr, needle, k);
                ASSERT_TRUE(wit.has_value());
                EXPECT_EQ(wit->matched[0].prefix, wit->matched[1].prefix);
                EXPECT_EQ(wit->matched[0].x, wit->t);
            }
        }
}
