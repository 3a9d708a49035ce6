#include "pisot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "pisot/error.hpp"

namespace pisot {

namespace {

double alpha_lo(NumberField const& K)
{
    auto const& r = K.perron();
    return (r.center.real() - r.radius) * (1 - Ball::eps);
}

double alpha_hi(NumberField const& K)
{
    auto const& r = K.perron();
    return (r.center.real() + r.radius) * (1 + Ball::eps);
}

double modulus_hi(PlaceSystem const& ps, int i)
{
    Place const& pl = ps.places[i];
    if (pl.kind == PlaceKind::finite)
        return ps.contraction(i);
    auto const& r = ps.K->roots()[pl.root];
    return (r.modulus() + r.radius) * (1 + Ball::eps);
}

double modulus_lo(PlaceSystem const& ps, int i)
{
    Place const& pl = ps.places[i];
    if (pl.kind == PlaceKind::finite)
        return ps.contraction(i);
    auto const& r = ps.K->roots()[pl.root];
    return std::max(0.0, (r.modulus() - r.radius) * (1 - Ball::eps));
}

std::mt19937_64 rng_for(std::uint64_t seed, int index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

template <class Fn>
void parallel_for(int count, int threads, Fn const& fn)
{
    if (count <= 0)
        return;
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, count);
    std::vector<std::exception_ptr> errs(threads);
    auto work = [&](int tid) {
        try {
            for (int i = tid; i < count; i += threads)
                fn(i);
        } catch (...) {
            errs[tid] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; t++)
        pool.emplace_back(work, t);
    for (auto& t : pool)
        t.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

using ZVec = std::vector<mpz_class>;

ZVec to_z(IntVector const& x)
{
    ZVec r;
    for (auto c : x)
        r.emplace_back(static_cast<long>(c));
    return r;
}

ZVec mat_apply(IntMatrix const& A, ZVec const& x)
{
    ZVec y(A.rows());
    for (int i = 0; i < A.rows(); i++)
        for (int j = 0; j < A.cols(); j++)
            y[i] += A(i, j) * x[j];
    return y;
}

FieldElem eval_field(FieldPtr const& K, std::vector<mpz_class> const& c)
{
    std::vector<mpq_class> q(c.begin(), c.end());
    if (q.empty())
        return FieldElem(K);
    return FieldElem(K, std::move(q));
}

Ball eval_ball(std::vector<mpz_class> const& c, Ball const& x)
{
    Ball acc(0.0);
    for (size_t j = c.size(); j-- > 0;)
        acc = acc * x + Ball::from_rational(mpq_class(c[j]));
    return acc;
}

int pick_weighted(std::vector<std::pair<int, double>> const& w, std::mt19937_64& g)
{
    double total = 0.0;
    for (auto const& [i, x] : w)
        total += x;
    if (w.empty() || total <= 0.0)
        fail(ErrorKind::hypothesis, "no admissible choice");
    double u = uniform01(g) * total, acc = 0.0;
    for (auto const& [i, x] : w) {
        acc += x;
        if (u < acc && x > 0.0)
            return i;
    }
    for (size_t k = w.size(); k-- > 0;)
        if (w[k].second > 0.0)
            return w[k].first;
    return w.back().first;
}

/* cnt[j][s]: paths of exactly j steps from s to I */
std::vector<std::vector<double>> bridge_counts(Automaton const& a, int I, int len)
{
    std::vector<std::vector<double>> cnt(len + 1, std::vector<double>(a.size(), 0.0));
    cnt[0][I] = 1.0;
    for (int j = 1; j <= len; j++)
        for (int s = 0; s < a.size(); s++)
            for (int J : a.succ[s])
                cnt[j][s] += cnt[j - 1][J];
    return cnt;
}

/* Local run-annotated states: s != I with run 0 at index s,
 * (I, r) for r = 1..L+1 at index D + r - 1. */
struct RunStates {
    int D, I, L;
    int size() const { return D + L + 1; }
    int index(int s, int r) const { return s == I ? D + r - 1 : s; }
    int full() const { return D + L; }
    int next_run(int r, int J) const { return J == I ? std::min(r + 1, L + 1) : 0; }
    std::pair<int, int> decode(int x) const { return x < D ? std::pair{x, 0} : std::pair{I, x - D + 1}; }
    bool valid(int x) const { return x != I; }
};

std::vector<int> run_lengths(std::vector<int> const& path, int I)
{
    std::vector<int> run(path.size() + 1, 0);
    for (size_t t = path.size(); t-- > 0;)
        run[t] = path[t] == I ? run[t + 1] + 1 : 0;
    return run;
}

SpecialCylinder base_cylinder(Fractal const& fr, int N)
{
    SpecialCylinder c;
    c.u0 = fixed_letter(fr.substitution());
    auto const& a = fr.automaton();
    c.I = a.empty_state[c.u0];
    c.N = N;
    auto const& s = a.succ[c.I];
    if (std::find(s.begin(), s.end(), c.I) == s.end())
        fail(ErrorKind::internal, "(u0 : empty) has no self-transition");
    return c;
}

} // namespace

CoefficientBound coefficient_bound(Fractal const& fr, std::vector<LatticeVec> const& Z0)
{
    EigenData const& e = fr.eigen();
    if (!e.v_integral())
        fail(ErrorKind::hypothesis, "v is not integral; scale it first");
    CoefficientBound cb;
    cb.B = e.B();
    IntMatrix T = cb.B.transpose();
    int n = e.n();
    ZVec hi(n), lo(n);
    bool first = true;
    for (auto const& fp : fr.automaton().prefix_ab) {
        ZVec y = mat_apply(T, to_z(fp));
        for (int l = 0; l < n; l++) {
            if (first || y[l] > hi[l])
                hi[l] = y[l];
            if (first || y[l] < lo[l])
                lo[l] = y[l];
        }
        first = false;
    }
    for (int l = 0; l < n; l++)
        cb.prefix_part += hi[l] - lo[l];
    for (auto const& w : Z0) {
        FieldElem x = e.pair(w);
        if (x.denominator() != 1)
            fail(ErrorKind::hypothesis, "<w, v> not integral after scaling");
        for (auto const& c : x.coeffs()) {
            mpz_class m = abs(c.get_num());
            if (m > cb.w_part)
                cb.w_part = m;
        }
    }
    cb.M = cb.prefix_part + cb.w_part;
    if (cb.M == 0)
        cb.M = 1;
    return cb;
}

int fixed_letter(Substitution const& s)
{
    for (int a = 0; a < s.size(); a++)
        if (s.image(a).front() == a)
            return a;
    fail(ErrorKind::hypothesis, "no letter a with sigma(a) starting with a");
}

std::vector<double> cylinder_inequality(Fractal const& fr, mpz_class const& M, int L)
{
    PlaceSystem const& ps = fr.places();
    int n = ps.K->degree();
    if (n < 2)
        fail(ErrorKind::hypothesis, "degree 1 has no contracting places");
    double e = L - n + 3;
    double g = std::log(M.get_d() / (1 - 1 / alpha_lo(*ps.K))) / (n - 1);
    std::vector<double> lhs;
    for (int i = 0; i < static_cast<int>(ps.places.size()); i++) {
        Place const& pl = ps.places[i];
        double r;
        if (pl.kind == PlaceKind::finite) {
            double q = pl.q.get_d();
            r = 2 * std::pow(q, -pl.nu * e) + std::pow(q, -pl.nu);
        } else {
            double a = modulus_hi(ps, i);
            if (a >= 1.0)
                fail(ErrorKind::internal, "contracting place with |alpha_v| >= 1");
            r = 2 * std::exp(e * std::log(a) + g) * fr.prefix_bound()[i] / (1 - a) + a;
        }
        lhs.push_back(r * (1 + 1e-12));
    }
    return lhs;
}

SpecialCylinder special_cylinder(Fractal const& fr, mpz_class const& M, int N, int L_cap)
{
    SpecialCylinder c = base_cylinder(fr, N);
    for (int L = N + 1; L <= L_cap; L++) {
        auto lhs = cylinder_inequality(fr, M, L);
        if (std::all_of(lhs.begin(), lhs.end(), [](double x) { return x < 1.0; })) {
            c.L = L;
            c.certified = true;
            c.lhs = std::move(lhs);
            return c;
        }
    }
    fail(ErrorKind::cap, "no certified L up to " + std::to_string(L_cap));
}

SpecialCylinder plain_cylinder(Fractal const& fr, int N, int L)
{
    if (L < N + 1)
        fail(ErrorKind::hypothesis, "L must be at least N+1");
    SpecialCylinder c = base_cylinder(fr, N);
    c.L = L;
    return c;
}

NeighborhoodRadii neighborhood_radii(Fractal const& fr, mpz_class const& M, int d)
{
    if (d < 0)
        fail(ErrorKind::hypothesis, "d must be nonnegative");
    PlaceSystem const& ps = fr.places();
    int n = ps.K->degree();
    if (n < 2)
        fail(ErrorKind::hypothesis, "degree 1 has no contracting places");
    NeighborhoodRadii r;
    r.d = d;
    double Md = M.get_d();
    double glo = std::pow((1 - 1 / alpha_lo(*ps.K)) / Md, 1.0 / (n - 1));
    double ghi = std::pow((1 - 1 / alpha_hi(*ps.K)) / Md, 1.0 / (n - 1));
    int k = d + n - 2;
    for (int i = 0; i < static_cast<int>(ps.places.size()); i++) {
        Place const& pl = ps.places[i];
        if (pl.kind == PlaceKind::finite) {
            double x = std::pow(pl.q.get_d(), -double(k) * pl.nu);
            r.lo.push_back(x * (1 - 1e-15));
            r.hi.push_back(x * (1 + 1e-15));
        } else {
            r.lo.push_back(std::pow(modulus_lo(ps, i), k) * glo * (1 - 1e-12));
            r.hi.push_back(std::pow(modulus_hi(ps, i), k) * ghi * (1 + 1e-12));
        }
    }
    return r;
}

int PolyPart::degree() const
{
    for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; j--)
        if (coeffs[j] != 0)
            return j;
    return -1;
}

mpz_class PolyPart::max_coeff() const
{
    mpz_class m = 0;
    for (auto const& c : coeffs)
        if (abs(c) > m)
            m = abs(c);
    return m;
}

PolyPart polynomial_part(Fractal const& fr, std::vector<int> const& path1,
                         std::vector<int> const& path2, LatticeVec const& w, int d)
{
    if (d < 0 || path1.size() < static_cast<size_t>(d) || path2.size() < static_cast<size_t>(d))
        fail(ErrorKind::hypothesis, "paths shorter than d");
    EigenData const& e = fr.eigen();
    auto const& a = fr.automaton();
    int n = e.n();
    IntMatrix T = e.B().transpose();
    PolyPart pp;
    pp.d = d;
    pp.w = w;
    pp.coeffs.assign(std::max(d + n - 1, n), 0);
    for (int k = 0; k < d; k++) {
        if (path1[k] == path2[k])
            continue;
        ZVec delta = to_z(a.prefix_ab[path1[k]]);
        ZVec q = to_z(a.prefix_ab[path2[k]]);
        for (int l = 0; l < n; l++)
            delta[l] -= q[l];
        ZVec y = mat_apply(T, delta);
        for (int l = 0; l < n; l++)
            pp.coeffs[k + l] += y[l];
    }
    FieldElem x = e.pair(w);
    if (x.denominator() != 1)
        fail(ErrorKind::hypothesis, "w not integral after scaling");
    for (int j = 0; j < n; j++)
        pp.coeffs[j] -= x.coeff(j).get_num();
    pp.F = eval_field(e.K, pp.coeffs);
    return pp;
}

PolyPart poly_from_coeffs(Fractal const& fr, std::vector<mpz_class> coeffs)
{
    PolyPart pp;
    pp.d = -1;
    pp.coeffs = std::move(coeffs);
    pp.F = eval_field(fr.eigen().K, pp.coeffs);
    return pp;
}

GarsiaResult garsia_check(Fractal const& fr, PolyPart const& F)
{
    if (F.zero())
        fail(ErrorKind::hypothesis, "F(alpha) = 0");
    PlaceSystem const& ps = fr.places();
    GarsiaResult r;
    double lo = 1.0, hi = 1.0;
    for (auto const& pl : ps.places) {
        if (pl.kind == PlaceKind::finite) {
            int v = finite_valuation(F.F, ps.fin[pl.fin]);
            double x = std::pow(pl.q.get_d(), -v);
            lo *= x * (1 - 1e-15);
            hi *= x * (1 + 1e-15);
            continue;
        }
        Ball y = eval_ball(F.coeffs, ps.K->roots()[pl.root].ball());
        double a = y.abs_lo(), b = y.abs_hi();
        if (pl.kind == PlaceKind::complex) {
            a *= a;
            b *= b;
        }
        lo *= a * (1 - 4 * Ball::eps);
        hi *= b * (1 + 4 * Ball::eps);
    }
    r.product = {lo, hi};
    NumberField const& K = *ps.K;
    r.bound = (1 - 1 / alpha_hi(K)) / (std::pow(alpha_lo(K), F.degree()) * F.max_coeff().get_d());
    r.ok = hi >= r.bound * (1 - 1e-9);
    return r;
}

GarsiaFuzz garsia_fuzz(Fractal const& fr, int trials, int max_degree, int max_coeff,
                       std::uint64_t seed, int threads)
{
    std::vector<double> ratio(trials);
    std::vector<char> ok(trials);
    std::uint64_t range = 2 * static_cast<std::uint64_t>(max_coeff) + 1;
    parallel_for(trials, threads, [&](int t) {
        auto g = rng_for(seed, t);
        for (;;) {
            std::vector<mpz_class> c(max_degree + 1);
            for (auto& x : c)
                x = static_cast<long>(g() % range) - max_coeff;
            PolyPart F = poly_from_coeffs(fr, std::move(c));
            if (F.zero())
                continue;
            GarsiaResult r = garsia_check(fr, F);
            ratio[t] = r.product.hi / r.bound;
            ok[t] = r.ok;
            return;
        }
    });
    GarsiaFuzz f;
    f.trials = trials;
    f.worst_ratio = trials ? *std::min_element(ratio.begin(), ratio.end()) : 0.0;
    for (char x : ok)
        f.violations += !x;
    return f;
}

bool co_visit(SpecialCylinder const& cyl, std::vector<int> const& path, int d)
{
    if (d < 0 || path.size() < static_cast<size_t>(d + cyl.L + 1))
        return false;
    for (int t = d; t <= d + cyl.L; t++)
        if (path[t] != cyl.I)
            return false;
    return true;
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::poly_vanishes:
        return "poly-vanishes";
    case Verdict::escapes:
        return "escapes-neighborhood";
    case Verdict::indeterminate:
        return "indeterminate";
    case Verdict::violation:
        return "VIOLATION";
    }
    return "?";
}

EitherResult either_check(Fractal const& fr, mpz_class const& M, SpecialCylinder const& cyl,
                          std::vector<int> const& path1, std::vector<int> const& path2,
                          LatticeVec const& w, int d)
{
    if (!co_visit(cyl, path1, d) || !co_visit(cyl, path2, d))
        fail(ErrorKind::hypothesis, "paths do not visit the cylinder together at d");
    EitherResult r;
    r.F = polynomial_part(fr, path1, path2, w, d);
    r.radii = neighborhood_radii(fr, M, d + 1);
    if (r.F.zero()) {
        r.verdict = Verdict::poly_vanishes;
        return r;
    }
    PlaceSystem const& ps = fr.places();
    int n = ps.K->degree();
    int H = static_cast<int>(std::min(path1.size(), path2.size()));
    PolyPart D = polynomial_part(fr, path1, path2, w, H);
    int k = d + 1 + n - 2;
    bool inside = true, outside = false;
    for (int i = 0; i < static_cast<int>(ps.places.size()); i++) {
        Place const& pl = ps.places[i];
        if (pl.kind == PlaceKind::finite) {
            /* digits lie in Z[alpha], so both tails have valuation >= nu H */
            long vt = static_cast<long>(pl.nu) * H;
            double q = pl.q.get_d();
            if (!D.F.is_zero()) {
                int v = finite_valuation(D.F, ps.fin[pl.fin]);
                if (v < vt) {
                    double x = std::pow(q, -v);
                    r.distance.push_back({x, x});
                    bool in = v > static_cast<long>(k) * pl.nu;
                    inside = inside && in;
                    outside = outside || !in;
                    continue;
                }
            }
            r.distance.push_back({0.0, std::pow(q, -double(vt))});
            inside = inside && vt > static_cast<long>(k) * pl.nu;
            continue;
        }
        Ball y = eval_ball(D.coeffs, ps.K->roots()[pl.root].ball());
        double a = modulus_hi(ps, i);
        double tail = 2 * std::pow(a, H) * fr.prefix_bound()[i] / (1 - a) * (1 + 1e-12);
        Interval dist{std::max(0.0, y.abs_lo() - tail), y.abs_hi() + tail};
        r.distance.push_back(dist);
        inside = inside && dist.hi < r.radii.lo[i];
        outside = outside || dist.lo >= r.radii.hi[i];
    }
    r.verdict = outside ? Verdict::escapes : inside ? Verdict::violation : Verdict::indeterminate;
    return r;
}

namespace {

/* Path with I at d..d+L; first core constrained when letter >= 0. */
std::vector<int> covisiting_path(ParryChain const& chain, Automaton const& a,
                                 SpecialCylinder const& cyl, int d, int letter, int tail,
                                 std::mt19937_64& g)
{
    int t0 = std::max(0, d - (cyl.N + 1));
    int blen = d - t0;
    auto cnt = bridge_counts(a, cyl.I, blen);
    std::vector<std::pair<int, double>> w0;
    for (int s = 0; s < a.size(); s++) {
        bool ok = (letter < 0 || a.states[s].core == letter) && cnt[blen][s] > 0;
        w0.emplace_back(s, ok ? chain.p_num[s] : 0.0);
    }
    int s0 = pick_weighted(w0, g);
    std::vector<int> path = sample_from(chain, s0, t0 + 1, g);
    if (cnt[blen][path.back()] <= 0)
        fail(ErrorKind::internal, "bridge into I does not exist");
    for (int j = blen; j >= 1; j--) {
        std::vector<std::pair<int, double>> w;
        for (int J : a.succ[path.back()])
            w.emplace_back(J, cnt[j - 1][J]);
        path.push_back(pick_weighted(w, g));
    }
    for (int t = 0; t < cyl.L; t++)
        path.push_back(cyl.I);
    auto rest = sample_from(chain, cyl.I, tail + 1, g);
    path.insert(path.end(), rest.begin() + 1, rest.end());
    return path;
}

} // namespace

CoVisitPair covisiting_pair(ParryChain const& chain, Automaton const& a, SpecialCylinder const& cyl,
                            int d, int letter, int tail, std::mt19937_64& g)
{
    CoVisitPair p;
    p.d = d;
    p.letter = letter;
    p.path1 = covisiting_path(chain, a, cyl, d, -1, tail, g);
    p.path2 = covisiting_path(chain, a, cyl, d, letter, tail, g);
    return p;
}

CoincidenceCase coincidence_from_vanishing(Fractal const& fr, std::vector<int> const& path1,
                                           std::vector<int> const& path2, LatticeVec const& w, int d)
{
    PolyPart F = polynomial_part(fr, path1, path2, w, d);
    if (!F.zero())
        fail(ErrorKind::hypothesis, "polynomial part does not vanish");
    auto const& a = fr.automaton();
    IntMatrix M = incidence_matrix(fr.substitution());
    int n = M.rows();
    /* f(P) = sum_k M^k f(p_k), by Horner */
    auto expand = [&](std::vector<int> const& path) {
        ZVec acc(n);
        for (int k = d; k-- > 0;) {
            acc = mat_apply(M, acc);
            ZVec x = to_z(a.prefix_ab[path[k]]);
            for (int l = 0; l < n; l++)
                acc[l] += x[l];
        }
        return acc;
    };
    ZVec fP = expand(path1), fQ = expand(path2);
    CoincidenceCase c;
    for (int l = 0; l < n; l++) {
        c.len_p += fP[l];
        c.len_q += fQ[l];
    }
    ZVec diff(n);
    for (int l = 0; l < n; l++)
        diff[l] = fP[l] - fQ[l];
    for (int i = 0; i < w.level; i++)
        diff = mat_apply(M, diff);
    c.prefix_identity = true;
    for (int l = 0; l < n; l++)
        c.prefix_identity = c.prefix_identity && diff[l] == mpz_class(static_cast<long>(w.base[l]));
    c.kase = c.len_p == c.len_q ? 1 : c.len_p < c.len_q ? 2 : 3;
    if (c.kase == 1)
        c.states_equal = std::equal(path1.begin(), path1.begin() + d, path2.begin());
    c.gamma_ok = gamma_member(fr.eigen(), w, a.states[path2[0]].core);
    c.coincidence_violation = c.kase == 1 ? !(c.states_equal && c.prefix_identity) : c.gamma_ok;
    return c;
}

EitherCorpus either_corpus(Fractal const& fr, ParryChain const& chain, mpz_class const& M,
                           SpecialCylinder const& cyl, Patch const& Z0, int pairs, int d_max,
                           std::uint64_t seed, int threads)
{
    if (Z0.items.empty())
        fail(ErrorKind::hypothesis, "empty translation patch");
    PlaceSystem const& ps = fr.places();
    double amax = 0.0;
    for (int i = 0; i < static_cast<int>(ps.places.size()); i++)
        amax = std::max(amax, modulus_hi(ps, i));
    int tail = std::max(32, static_cast<int>(std::ceil(std::log(1e-15) / std::log(amax))) + 8);
    auto const& a = fr.automaton();

    std::vector<Verdict> verdict(pairs);
    std::vector<int> kase(pairs, 0);
    std::vector<char> bad(pairs, 0);
    parallel_for(pairs, threads, [&](int idx) {
        auto g = rng_for(seed, idx);
        bool shared = g() % 4 == 0;
        for (;;) {
            int d = static_cast<int>(g() % static_cast<std::uint64_t>(d_max + 1));
            CoVisitPair p;
            try {
                p.d = d;
                p.path1 = covisiting_path(chain, a, cyl, d, -1, tail, g);
                if (shared) {
                    p.w = LatticeVec{IntVector(a.n, 0), 0};
                    p.letter = a.states[p.path1[0]].core;
                    p.path2.assign(p.path1.begin(), p.path1.begin() + d + cyl.L + 1);
                    auto rest = sample_from(chain, cyl.I, tail + 1, g);
                    p.path2.insert(p.path2.end(), rest.begin() + 1, rest.end());
                } else {
                    auto const& it = Z0.items[g() % Z0.items.size()];
                    p.w = it.w;
                    p.letter = it.letter;
                    p.path2 = covisiting_path(chain, a, cyl, d, it.letter, tail, g);
                }
            } catch (Error const& e) {
                if (e.kind() == ErrorKind::hypothesis)
                    continue;
                throw;
            }
            EitherResult r = either_check(fr, M, cyl, p.path1, p.path2, p.w, p.d);
            verdict[idx] = r.verdict;
            if (r.verdict == Verdict::poly_vanishes) {
                auto c = coincidence_from_vanishing(fr, p.path1, p.path2, p.w, p.d);
                kase[idx] = c.kase;
                bad[idx] = c.coincidence_violation;
            }
            return;
        }
    });
    EitherCorpus c;
    c.pairs = pairs;
    for (int i = 0; i < pairs; i++) {
        switch (verdict[i]) {
        case Verdict::poly_vanishes:
            c.poly_vanishes++;
            break;
        case Verdict::escapes:
            c.escapes++;
            break;
        case Verdict::indeterminate:
            c.indeterminate++;
            break;
        case Verdict::violation:
            c.violations++;
            break;
        }
        c.case1 += kase[i] == 1;
        c.case_other += kase[i] > 1;
        c.coincidence_violations += bad[i];
    }
    return c;
}

std::optional<int> tau2(SpecialCylinder const& cyl, std::vector<int> const& path1,
                        std::vector<int> const& path2, int horizon)
{
    size_t need = static_cast<size_t>(horizon) + cyl.L + 1;
    if (horizon < 0 || path1.size() < need || path2.size() < need)
        fail(ErrorKind::hypothesis, "paths too short for the horizon");
    auto r1 = run_lengths(path1, cyl.I), r2 = run_lengths(path2, cyl.I);
    for (int k = 0; k <= horizon; k++)
        if (r1[k] > cyl.L && r2[k] > cyl.L)
            return k;
    return std::nullopt;
}

namespace {

void check_state_cap(ParryChain const& chain, SpecialCylinder const& cyl, std::size_t cap)
{
    double s = double(chain.size()) * (cyl.L + 2);
    if (s * s > double(cap))
        fail(ErrorKind::cap, "product state space exceeds the cap");
}

} // namespace

Tau2Exact tau2_distribution(ParryChain const& chain, SpecialCylinder const& cyl, int k_max,
                            std::size_t state_cap)
{
    check_state_cap(chain, cyl, state_cap);
    RunStates rs{chain.size(), cyl.I, cyl.L};
    int S = rs.size();
    std::vector<std::vector<std::pair<int, long double>>> step(S);
    for (int x = 0; x < S; x++) {
        if (!rs.valid(x))
            continue;
        auto [s, r] = rs.decode(x);
        long double tot = 0;
        for (auto const& [J, p] : chain.P_num[s])
            tot += p;
        for (auto const& [J, p] : chain.P_num[s])
            step[x].emplace_back(rs.index(J, rs.next_run(r, J)), p / tot);
    }
    std::vector<long double> mass(static_cast<size_t>(S) * S, 0.0L), next(mass.size());
    long double tot = 0;
    for (int s = 0; s < chain.size(); s++)
        tot += chain.p_num[s];
    for (int s = 0; s < chain.size(); s++)
        for (int t = 0; t < chain.size(); t++)
            mass[rs.index(s, s == cyl.I) * S + rs.index(t, t == cyl.I)] =
                chain.p_num[s] / tot * (chain.p_num[t] / tot);

    Tau2Exact ex;
    ex.states = mass.size();
    ex.pmf.assign(k_max + 1, 0.0);
    int full = rs.full() * S + rs.full();
    for (int t = 0;; t++) {
        if (t >= cyl.L) {
            ex.pmf[t - cyl.L] = static_cast<double>(mass[full]);
            mass[full] = 0;
        }
        if (t == k_max + cyl.L)
            break;
        std::fill(next.begin(), next.end(), 0.0L);
        for (int x = 0; x < S; x++)
            for (int y = 0; y < S; y++) {
                long double m = mass[x * S + y];
                if (m == 0)
                    continue;
                for (auto const& [x2, p] : step[x])
                    for (auto const& [y2, q] : step[y])
                        next[x2 * S + y2] += m * p * q;
            }
        mass.swap(next);
    }
    long double tail = 0;
    for (auto m : mass)
        tail += m;
    ex.tail = static_cast<double>(tail);
    double pII = 0.0;
    for (auto const& [J, p] : chain.P_num[cyl.I])
        if (J == cyl.I)
            pII = p;
    ex.m_cyl = chain.p_num[cyl.I] * std::pow(pII, cyl.L);
    return ex;
}

Tau2ExactField tau2_distribution_exact(ParryChain const& chain, SpecialCylinder const& cyl, int k_max,
                                       std::size_t state_cap)
{
    check_state_cap(chain, cyl, state_cap);
    RunStates rs{chain.size(), cyl.I, cyl.L};
    int S = rs.size();
    std::vector<std::vector<std::pair<int, FieldElem>>> step(S);
    for (int x = 0; x < S; x++) {
        if (!rs.valid(x))
            continue;
        auto [s, r] = rs.decode(x);
        for (auto const& [J, p] : chain.P[s])
            step[x].emplace_back(rs.index(J, rs.next_run(r, J)), p);
    }
    FieldElem zero(chain.K);
    std::vector<FieldElem> mass(static_cast<size_t>(S) * S, zero);
    for (int s = 0; s < chain.size(); s++)
        for (int t = 0; t < chain.size(); t++)
            mass[rs.index(s, s == cyl.I) * S + rs.index(t, t == cyl.I)] = chain.p[s] * chain.p[t];
    Tau2ExactField ex;
    ex.pmf.assign(k_max + 1, zero);
    int full = rs.full() * S + rs.full();
    for (int t = 0;; t++) {
        if (t >= cyl.L) {
            ex.pmf[t - cyl.L] = mass[full];
            mass[full] = zero;
        }
        if (t == k_max + cyl.L)
            break;
        std::vector<FieldElem> next(mass.size(), zero);
        for (int x = 0; x < S; x++)
            for (int y = 0; y < S; y++) {
                FieldElem const& m = mass[x * S + y];
                if (m.is_zero())
                    continue;
                for (auto const& [x2, p] : step[x]) {
                    FieldElem mp = m * p;
                    for (auto const& [y2, q] : step[y])
                        next[x2 * S + y2] += mp * q;
                }
            }
        mass.swap(next);
    }
    ex.tail = zero;
    for (auto const& m : mass)
        ex.tail += m;
    return ex;
}

Tau2Empirical tau2_sample(ParryChain const& chain, SpecialCylinder const& cyl, int samples,
                          int horizon, std::uint64_t seed, int threads)
{
    std::vector<std::pair<int, double>> init;
    for (int s = 0; s < chain.size(); s++)
        init.emplace_back(s, chain.p_num[s]);
    Tau2Empirical em;
    em.samples = samples;
    em.values.assign(samples, -1);
    int L = cyl.L, I = cyl.I;
    parallel_for(samples, threads, [&](int idx) {
        auto g = rng_for(seed, idx);
        int s1 = sample_categorical(init, g), s2 = sample_categorical(init, g);
        int r1 = s1 == I, r2 = s2 == I;
        for (long t = 0; t <= static_cast<long>(horizon) + L; t++) {
            if (r1 > L && r2 > L) {
                em.values[idx] = static_cast<int>(t - L);
                return;
            }
            s1 = sample_categorical(chain.P_num[s1], g);
            s2 = sample_categorical(chain.P_num[s2], g);
            r1 = s1 == I ? std::min(r1 + 1, L + 1) : 0;
            r2 = s2 == I ? std::min(r2 + 1, L + 1) : 0;
        }
    });
    for (int v : em.values)
        em.not_found += v < 0;
    return em;
}

Tau2Comparison tau2_compare(Tau2Exact const& ex, Tau2Empirical const& em, int bins)
{
    if (bins < 1 || em.samples <= 0)
        fail(ErrorKind::hypothesis, "need at least one bin and one sample");
    int k_max = static_cast<int>(ex.pmf.size()) - 1;
    double inside = 1.0 - ex.tail, cum = 0.0;
    Tau2Comparison c;
    c.edges.push_back(0);
    for (int k = 0; k <= k_max; k++) {
        cum += ex.pmf[k];
        int b = static_cast<int>(c.edges.size());
        if (b < bins && cum >= inside * b / bins && k < k_max)
            c.edges.push_back(k + 1);
    }
    c.edges.push_back(k_max + 1);
    int nb = static_cast<int>(c.edges.size()) - 1;
    c.exact.assign(nb + 1, 0.0);
    c.empirical.assign(nb + 1, 0.0);
    for (int b = 0; b < nb; b++)
        for (int k = c.edges[b]; k < c.edges[b + 1]; k++)
            c.exact[b] += ex.pmf[k];
    c.exact[nb] = ex.tail;
    for (int v : em.values) {
        int b = nb;
        if (v >= 0 && v <= k_max)
            b = static_cast<int>(std::upper_bound(c.edges.begin(), c.edges.end(), v) - c.edges.begin()) - 1;
        c.empirical[b] += 1.0 / em.samples;
    }
    for (int b = 0; b <= nb; b++)
        c.tv += 0.5 * std::abs(c.exact[b] - c.empirical[b]);
    return c;
}

namespace {

std::optional<EntrySeries> try_entry_series(SpecialCylinder const& cyl, std::vector<int> const& x,
                                            int count, int n_min)
{
    auto run = run_lengths(x, cyl.I);
    long last = static_cast<long>(x.size()) - cyl.L - 1; /* entries decidable up to here */
    auto in_cyl = [&](long t) { return run[t] > cyl.L; };
    EntrySeries es;
    es.N0 = -1;
    for (long t = std::max(n_min, cyl.N + 1); t <= last; t++) {
        bool clear = true;
        for (long i = t - cyl.N - 1; i <= t && clear; i++)
            clear = !in_cyl(i);
        if (clear) {
            es.N0 = static_cast<int>(t);
            break;
        }
    }
    if (es.N0 < 0)
        return std::nullopt;
    for (long t = es.N0 + 1; t <= last && static_cast<int>(es.times.size()) < count; t++)
        if (in_cyl(t))
            es.times.push_back(static_cast<int>(t));
    if (static_cast<int>(es.times.size()) < count)
        return std::nullopt;
    return es;
}

} // namespace

EntrySeries entry_series(SpecialCylinder const& cyl, std::vector<int> const& x, int count, int n_min)
{
    auto es = try_entry_series(cyl, x, count, n_min);
    if (!es)
        fail(ErrorKind::cap, "insufficient entries within the path");
    return *es;
}

EntrySeries sample_entry_series(ParryChain const& chain, SpecialCylinder const& cyl, int count,
                                int n_min, std::uint64_t seed, std::size_t length_cap)
{
    auto g = rng_for(seed, 0);
    std::size_t len = static_cast<std::size_t>(n_min) + cyl.N + cyl.L + 1024;
    std::vector<int> x = sample_path(chain, len, g);
    for (;;) {
        if (auto es = try_entry_series(cyl, x, count, n_min))
            return *es;
        if (x.size() >= length_cap)
            fail(ErrorKind::cap, "entry series needs a path longer than the cap");
        auto more = sample_from(chain, x.back(), std::min(x.size(), length_cap - x.size()) + 1, g);
        x.insert(x.end(), more.begin() + 1, more.end());
    }
}

mpz_class b_direct(Automaton const& a, SpecialCylinder const& cyl, EntrySeries const& series, int k)
{
    if (k < 0 || k > static_cast<int>(series.times.size()))
        fail(ErrorKind::hypothesis, "entry index out of range");
    RunStates rs{a.size(), cyl.I, cyl.L};
    int S = rs.size();
    auto rel = [&](int i) { return i == 0 ? 0 : series.times[i - 1] - series.N0; };
    std::vector<char> forbid(rel(k) + cyl.L + 1, 0);
    for (int i = 0; i < k; i++)
        forbid[rel(i) + cyl.L] = 1;
    std::vector<mpz_class> cnt(S), next(S);
    cnt[rs.index(cyl.I, 1)] = 1;
    int target = rel(k) + cyl.L;
    for (int t = 1; t <= target; t++) {
        std::fill(next.begin(), next.end(), 0);
        for (int x = 0; x < S; x++) {
            if (cnt[x] == 0)
                continue;
            auto [s, r] = rs.decode(x);
            for (int J : a.succ[s])
                next[rs.index(J, rs.next_run(r, J))] += cnt[x];
        }
        cnt.swap(next);
        if (forbid[t])
            cnt[rs.full()] = 0;
    }
    return cnt[rs.full()];
}

std::vector<int> reference_path(Automaton const& a, SpecialCylinder const& cyl,
                                std::vector<int> const& y, int N0)
{
    int t0 = N0 - (cyl.N + 1);
    if (t0 < 0 || y.size() <= static_cast<size_t>(t0))
        fail(ErrorKind::hypothesis, "reference path needs N0 >= N+1 and a longer y");
    std::vector<int> z(y.begin(), y.begin() + t0 + 1);
    auto cnt = bridge_counts(a, cyl.I, cyl.N + 1);
    for (int j = cyl.N + 1; j >= 1; j--) {
        int nxt = -1;
        for (int J : a.succ[z.back()])
            if (cnt[j - 1][J] > 0) {
                nxt = J;
                break;
            }
        if (nxt < 0)
            fail(ErrorKind::internal, "no bridge of length N+1 into I");
        z.push_back(nxt);
    }
    return z;
}

SSeries b_counts_and_s(ParryChain const& chain, Automaton const& a, SpecialCylinder const& cyl,
                       EntrySeries const& series, int j_max, int dp_max,
                       std::vector<int> const& z)
{
    int j = std::min(j_max, static_cast<int>(series.times.size()));
    std::vector<int> T(j + 1, 0);
    for (int k = 1; k <= j; k++) {
        T[k] = series.times[k - 1] - series.N0;
        if (T[k] <= T[k - 1])
            fail(ErrorKind::hypothesis, "entry times must increase");
    }
    /* (A^t)_II for t <= T_j */
    std::vector<mpz_class> aII(T[j] + 1);
    {
        std::vector<mpz_class> row(a.size()), next(a.size());
        row[cyl.I] = 1;
        aII[0] = 1;
        for (int t = 1; t <= T[j]; t++) {
            std::fill(next.begin(), next.end(), 0);
            for (int s = 0; s < a.size(); s++)
                if (row[s] != 0)
                    for (int J : a.succ[s])
                        next[J] += row[s];
            row.swap(next);
            aII[t] = row[cyl.I];
        }
    }
    SSeries out;
    out.b.resize(j + 1);
    for (int k = 0; k <= j; k++) {
        mpz_class b = aII[T[k]];
        for (int i = 0; i < k; i++) {
            int gap = T[k] - T[i];
            if (gap <= cyl.L)
                b -= out.b[i];
            else
                b -= aII[gap - cyl.L] * out.b[i];
        }
        if (b < 0)
            fail(ErrorKind::internal, "negative first-entry count");
        out.b[k] = b;
    }
    for (int k = 0; k <= std::min(dp_max, j); k++) {
        if (b_direct(a, cyl, series, k) != out.b[k])
            fail(ErrorKind::internal, "recursion and direct count disagree at k = " + std::to_string(k));
        out.dp_checked.push_back(k);
    }
    double l2a = std::log2(chain.K->perron().center.real());
    double s = 0.0;
    for (int k = 0; k <= j; k++) {
        if (out.b[k] != 0) {
            long e = 0;
            double m = mpz_get_d_2exp(&e, out.b[k].get_mpz_t());
            s += m * std::exp2(static_cast<double>(e) - (T[k] + cyl.L) * l2a);
        }
        out.ratio.push_back(s);
    }
    if (!z.empty()) {
        if (z.size() != static_cast<size_t>(series.N0) + 1 || z.back() != cyl.I)
            fail(ErrorKind::hypothesis, "reference path must end with I at N0");
        out.E = cylinder_measure(chain, z).value;
    }
    return out;
}

} // namespace pisot
