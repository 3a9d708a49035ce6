#include "pisot/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "pisot/error.hpp"
#include "pisot/kdtree.hpp"

namespace pisot {

namespace {

/* adj(M), so that M^{-1} = adj(M) / det(M) */
IntMatrix adjugate(IntMatrix const& M)
{
    int n = M.rows();
    IntMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) {
            IntMatrix minor(n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; r++) {
                if (r == i)
                    continue;
                for (int c = 0, cc = 0; c < n; c++) {
                    if (c == j)
                        continue;
                    minor(rr, cc++) = M(r, c);
                }
                rr++;
            }
            mpz_class d = minor.det();
            adj(j, i) = ((i + j) % 2) ? mpz_class(-d) : d;
        }
    return adj;
}

/* M^{-1} x when integral */
std::optional<IntVector> inverse_apply(IntMatrix const& adj, mpz_class const& det,
                                       IntVector const& x)
{
    int n = adj.rows();
    IntVector r(n);
    for (int i = 0; i < n; i++) {
        mpz_class s = 0;
        for (int j = 0; j < n; j++)
            s += adj(i, j) * mpz_class(static_cast<long>(x[j]));
        if (s % det != 0)
            return std::nullopt;
        s /= det;
        if (!s.fits_slong_p())
            fail(ErrorKind::cap, "lattice coordinate exceeds 64 bits");
        r[i] = s.get_si();
    }
    return r;
}

/* Solve with partial pivoting; returns the inverse of a small dense matrix. */
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a)
{
    int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; i++)
        inv[i][i] = 1.0;
    for (int c = 0; c < n; c++) {
        int piv = c;
        for (int r = c + 1; r < n; r++)
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        if (std::abs(a[piv][c]) < 1e-300)
            fail(ErrorKind::internal, "singular conjugate matrix");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        double d = a[c][c];
        for (int k = 0; k < n; k++) {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for (int r = 0; r < n; r++) {
            if (r == c || a[r][c] == 0.0)
                continue;
            double f = a[r][c];
            for (int k = 0; k < n; k++) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

double abs_p(FieldElem const& x, FinitePlace const& f)
{
    if (x.is_zero())
        return 0.0;
    return std::pow(f.q.get_d(), -f.ideal.valuation(x));
}

int min_digit_valuation(Fractal const& fr, FinitePlace const& f)
{
    int m = 0;
    bool any = false;
    for (int I = 0; I < fr.automaton().size(); I++) {
        FieldElem d = fr.ring().to_field(fr.digit(I));
        if (d.is_zero())
            continue;
        int v = f.ideal.valuation(d);
        m = any ? std::min(m, v) : v;
        any = true;
    }
    return m;
}

double alpha_hi(PlaceSystem const& ps, int P)
{
    auto const& r = ps.K->roots()[ps.places[P].root];
    return (r.modulus() + r.radius) * (1 + Ball::eps);
}

bool in_region(FieldElem const& x, Region const& reg, PlaceSystem const& ps)
{
    for (int P = 0; P < static_cast<int>(ps.places.size()); P++) {
        Place const& pl = ps.places[P];
        if (pl.kind == PlaceKind::finite) {
            if (abs_p(x - reg.center, ps.fin[pl.fin]) > reg.radius[P] * (1 + 1e-12))
                return false;
        } else if ((x.embed(pl.root) - reg.center.embed(pl.root)).abs_mid() >
                   reg.radius[P] * (1 + 1e-12)) {
            return false;
        }
    }
    return true;
}

} // namespace

/* ------------------------------------------------------------- Gamma */

bool gamma_member(EigenData const& e, LatticeVec const& w, int a)
{
    FieldElem x = e.pair(w);
    return x.sign() >= 0 && (x - e.v[a]).sign() < 0;
}

LatticeVec canonical_lattice_vec(LatticeVec w, IntMatrix const& M)
{
    if (w.level == 0)
        return w;
    IntMatrix adj = adjugate(M);
    mpz_class det = M.det();
    while (w.level > 0) {
        auto c = inverse_apply(adj, det, w.base);
        if (!c)
            break;
        w.base = std::move(*c);
        w.level--;
    }
    return w;
}

Region ball_region(Fractal const& fr, std::vector<double> radius)
{
    if (radius.size() != fr.places().places.size())
        fail(ErrorKind::parse, "region needs one radius per place");
    return Region{FieldElem(fr.eigen().K), std::move(radius)};
}

PatchItem make_item(Fractal const& fr, LatticeVec w, int letter)
{
    PatchItem it;
    it.x = fr.eigen().pair(w);
    it.w = std::move(w);
    it.letter = letter;
    it.gamma = phi_prime(it.x, fr.places());
    return it;
}

int default_i_max(PlaceSystem const& ps) { return abs(ps.det) == 1 ? 0 : 6; }

std::vector<LatticeVec> lattice_vectors(Patch const& p)
{
    std::vector<LatticeVec> r;
    for (auto const& it : p.items)
        r.push_back(it.w);
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

/* ---------------------------------------------------------- enumeration */

Patch translation_patch(Fractal const& fr, Region const& region, PatchOptions const& opt)
{
    EigenData const& e = fr.eigen();
    PlaceSystem const& ps = fr.places();
    FieldPtr const& K = e.K;
    int n = e.n();
    if (region.radius.size() != ps.places.size())
        fail(ErrorKind::parse, "region needs one radius per place");
    for (double r : region.radius)
        if (!(r >= 0.0) || !std::isfinite(r))
            fail(ErrorKind::parse, "region must be bounded");
    int i_max = opt.i_max < 0 ? default_i_max(ps) : opt.i_max;
    std::vector<int> letters;
    for (int a = 0; a < n; a++)
        if (opt.letter < 0 || opt.letter == a)
            letters.push_back(a);
    IntMatrix M = incidence_matrix(fr.substitution());
    IntMatrix adj = adjugate(M);
    mpz_class det = M.det();

    /* real coordinates of <base, v>: Perron root, then each contracting
     * archimedean place (one row if real, two if complex) */
    auto const& roots = K->roots();
    std::vector<std::vector<double>> L;
    std::vector<int> row_root, row_part;
    for (int r = 0; r < static_cast<int>(roots.size()); r++)
        for (int part = 0; part < (roots[r].real ? 1 : 2); part++) {
            std::vector<double> row(n);
            for (int j = 0; j < n; j++) {
                auto z = e.v[j].embed(r).mid;
                row[j] = part ? z.imag() : z.real();
            }
            L.push_back(row);
            row_root.push_back(r);
            row_part.push_back(part);
        }
    if (static_cast<int>(L.size()) != n)
        fail(ErrorKind::internal, "embedding count differs from the degree");
    auto Linv = invert(L);

    double vmax = 0.0;
    for (int a : letters)
        vmax = std::max(vmax, e.v[a].embed(0).mid.real());

    Patch patch;
    patch.region = region;
    patch.i_max = i_max;
    patch.kind = "box";
    std::vector<std::complex<double>> center(roots.size());
    for (int r = 1; r < static_cast<int>(roots.size()); r++)
        center[r] = region.center.embed(r).mid;
    std::vector<double> rad_of_root(roots.size(), 0.0);
    for (int P = 0; P < ps.arch_count(); P++)
        rad_of_root[ps.places[P].root] = region.radius[P];

    for (int lev = 0; lev <= i_max; lev++) {
        std::vector<double> lo(n), hi(n);
        for (int k = 0; k < n; k++) {
            int r = row_root[k];
            if (r == 0) {
                lo[k] = 0.0;
                hi[k] = std::pow(roots[0].center.real(), lev) * vmax;
                continue;
            }
            std::complex<double> c = center[r] * std::pow(roots[r].center, lev);
            double rad = rad_of_root[r] * std::pow(std::abs(roots[r].center), lev);
            double m = row_part[k] ? c.imag() : c.real();
            lo[k] = m - rad;
            hi[k] = m + rad;
        }
        std::vector<std::int64_t> blo(n), bhi(n);
        double box = 1.0;
        for (int j = 0; j < n; j++) {
            double a = 0.0, b = 0.0;
            for (int k = 0; k < n; k++) {
                double x = Linv[j][k] * lo[k], y = Linv[j][k] * hi[k];
                a += std::min(x, y);
                b += std::max(x, y);
            }
            double slack = 1e-7 * (std::abs(a) + std::abs(b) + 1.0);
            if (std::abs(a) > 4e18 || std::abs(b) > 4e18)
                fail(ErrorKind::cap, "enumeration box exceeds 64 bits");
            blo[j] = static_cast<std::int64_t>(std::floor(a - slack));
            bhi[j] = static_cast<std::int64_t>(std::ceil(b + slack));
            box *= static_cast<double>(bhi[j] - blo[j] + 1);
        }
        if (box > static_cast<double>(opt.box_cap))
            fail(ErrorKind::cap, "enumeration box of " + std::to_string(static_cast<long long>(box)) +
                                     " vectors exceeds the cap");

        double tol = 1e-9 * (1.0 + vmax * std::pow(roots[0].center.real(), lev));
        IntVector base(blo);
        for (;;) {
            /* fast filter in double, then exact */
            bool ok = true;
            for (int k = 0; k < n && ok; k++) {
                double y = 0.0;
                for (int j = 0; j < n; j++)
                    y += L[k][j] * static_cast<double>(base[j]);
                double w = tol + 1e-9 * std::abs(y);
                ok = y >= lo[k] - w && y <= hi[k] + w;
            }
            if (ok && (lev == 0 || !inverse_apply(adj, det, base))) {
                LatticeVec w{base, lev};
                FieldElem x = e.pair(w);
                if (x.sign() >= 0 && in_region(x, region, ps))
                    for (int a : letters)
                        if ((x - e.v[a]).sign() < 0) {
                            PatchItem it;
                            it.w = w;
                            it.letter = a;
                            it.x = x;
                            it.gamma = phi_prime(x, ps);
                            patch.items.push_back(std::move(it));
                            if (patch.items.size() > opt.item_cap)
                                fail(ErrorKind::cap, "patch exceeds the item cap");
                        }
            }
            int j = 0;
            while (j < n && base[j] == bhi[j]) {
                base[j] = blo[j];
                j++;
            }
            if (j == n)
                break;
            base[j]++;
        }
    }
    std::sort(patch.items.begin(), patch.items.end(), [](PatchItem const& a, PatchItem const& b) {
        return a.w != b.w ? a.w < b.w : a.letter < b.letter;
    });
    return patch;
}

Patch candidate_Z0(Fractal const& fr, int i_max)
{
    PlaceSystem const& ps = fr.places();
    std::vector<double> rad(ps.places.size());
    for (size_t P = 0; P < rad.size(); P++) {
        Place const& pl = ps.places[P];
        if (pl.kind == PlaceKind::finite) {
            FinitePlace const& f = ps.fin[pl.fin];
            rad[P] = std::pow(f.q.get_d(), -min_digit_valuation(fr, f));
        } else {
            rad[P] = 2 * fr.radius_bound()[P];
        }
    }
    PatchOptions opt;
    opt.i_max = i_max;
    return translation_patch(fr, ball_region(fr, rad), opt);
}

/* ---------------------------------------------------------------- Tiler */

bool CoverResult::stable() const
{
    return std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) == counts.end();
}

Tiler::Tiler(Fractal const& fr, int refine_depth, int hull_disks) : fr_(&fr)
{
    PlaceSystem const& ps = fr.places();
    Automaton const& A = fr.automaton();
    int n = fr.substitution().size();
    int arch = ps.arch_count();
    M_ = incidence_matrix(fr.substitution());
    by_core_.assign(n, {});
    for (int I = 0; I < A.size(); I++)
        by_core_[A.states[I].core].push_back(I);

    digit_ball_.assign(arch, {});
    for (int P = 0; P < arch; P++) {
        alpha_.push_back(ps.K->roots()[ps.places[P].root].ball());
        alpha_hi_.push_back(alpha_hi(ps, P));
        for (int I = 0; I < A.size(); I++)
            digit_ball_[P].push_back(fr.ring().embed(fr.digit(I), ps.places[P].root));
    }
    for (auto const& f : ps.fin)
        balls_.min_val.push_back(min_digit_valuation(fr, f));

    /* depth-K pieces (position, end letter) of every subtile */
    balls_.refine_depth = refine_depth;
    balls_.center.assign(arch, std::vector<std::complex<double>>(n));
    balls_.radius.assign(arch, std::vector<double>(n));
    balls_.hull.assign(arch, std::vector<std::vector<Disk>>(n));
    for (int P = 0; P < arch; P++) {
        std::vector<Ball> apow{Ball(1.0)};
        for (int k = 1; k <= refine_depth; k++)
            apow.push_back(apow.back() * alpha_[P]);
        std::vector<std::vector<std::pair<Ball, int>>> pieces(n);
        for (int b = 0; b < n; b++) {
            std::vector<std::pair<Ball, int>> cur{{Ball(0.0), b}};
            for (int k = 0; k < refine_depth; k++) {
                std::vector<std::pair<Ball, int>> next;
                for (auto const& [pos, c] : cur)
                    for (int I : by_core_[c])
                        next.push_back({pos + apow[k] * digit_ball_[P][I], A.states[I].source});
                cur.swap(next);
            }
            pieces[b] = std::move(cur);
            double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
            for (auto const& pc : pieces[b]) {
                x0 = std::min(x0, pc.first.mid.real());
                x1 = std::max(x1, pc.first.mid.real());
                y0 = std::min(y0, pc.first.mid.imag());
                y1 = std::max(y1, pc.first.mid.imag());
            }
            balls_.center[P][b] = {(x0 + x1) / 2, (y0 + y1) / 2};
        }
        auto& c = balls_.center[P];
        auto& r = balls_.radius[P];
        double a = alpha_hi_[P];
        for (int b = 0; b < n; b++)
            r[b] = fr.radius_bound()[P] + std::abs(c[b]) * (1 + Ball::eps);
        /* the set equation maps enclosing balls to enclosing balls */
        for (int it = 0; it < 400; it++) {
            std::vector<double> nr(n, 0.0);
            for (int b = 0; b < n; b++)
                for (int I : by_core_[b]) {
                    int s = A.states[I].source;
                    Ball z = digit_ball_[P][I] + alpha_[P] * Ball(c[s], 0.0) - Ball(c[b], 0.0);
                    nr[b] = std::max(nr[b], (z.abs_hi() + a * r[s]) * (1 + 2 * Ball::eps));
                }
            for (int b = 0; b < n; b++)
                r[b] = std::min(r[b], nr[b]);
        }
        double aK = std::pow(a, refine_depth) * (1 + 4 * refine_depth * Ball::eps);
        for (int b = 0; b < n; b++) {
            double m = 0.0;
            for (auto const& [pos, s] : pieces[b]) {
                Ball z = pos + apow[refine_depth] * Ball(c[s], 0.0) - Ball(c[b], 0.0);
                m = std::max(m, (z.abs_hi() + aK * r[s]) * (1 + 2 * Ball::eps));
            }
            r[b] = std::min(r[b], m);
        }
        /* far disks approximate supporting half-planes */
        bool real = ps.places[P].kind == PlaceKind::real;
        int J = real ? 2 : hull_disks;
        for (int b = 0; b < n; b++)
            for (int j = 0; j < J; j++) {
                double th = real ? (j ? 0.0 : std::acos(-1.0)) : 2 * std::acos(-1.0) * j / J;
                Disk dk;
                dk.center = c[b] + 3 * r[b] * std::complex<double>(std::cos(th), std::sin(th));
                if (real)
                    dk.center.imag(0.0);
                for (auto const& [pos, s] : pieces[b]) {
                    Ball z = pos + apow[refine_depth] * Ball(c[s], 0.0) - Ball(dk.center, 0.0);
                    dk.radius = std::max(dk.radius, (z.abs_hi() + aK * r[s]) * (1 + 2 * Ball::eps));
                }
                balls_.hull[P][b].push_back(dk);
            }
    }
}

SpacePoint Tiler::point(FieldElem const& x) const
{
    PlaceSystem const& ps = fr_->places();
    SpacePoint p;
    for (int P = 0; P < ps.arch_count(); P++)
        p.arch.push_back(x.embed(ps.places[P].root));
    if (ps.fin_count() > 0)
        p.exact = x;
    return p;
}

SpacePoint Tiler::psi_point(std::vector<int> const& path) const
{
    PlaceSystem const& ps = fr_->places();
    SpacePoint p;
    for (int P = 0; P < ps.arch_count(); P++) {
        Ball acc;
        for (size_t i = path.size(); i-- > 0;)
            acc = digit_ball_[P][path[i]] + alpha_[P] * acc;
        p.arch.push_back(acc);
    }
    if (ps.fin_count() > 0) {
        FieldElem acc(fr_->eigen().K), a = FieldElem::alpha(fr_->eigen().K);
        for (size_t i = path.size(); i-- > 0;)
            acc = fr_->ring().to_field(fr_->digit(path[i])) + a * acc;
        p.exact = acc;
    }
    return p;
}

Region Tiler::sampling_region() const
{
    PlaceSystem const& ps = fr_->places();
    std::vector<double> rad(ps.places.size());
    for (size_t P = 0; P < rad.size(); P++) {
        Place const& pl = ps.places[P];
        if (pl.kind == PlaceKind::finite) {
            rad[P] = std::pow(ps.fin[pl.fin].q.get_d(), -balls_.min_val[pl.fin]);
            continue;
        }
        double m = 0.0;
        for (size_t b = 0; b < balls_.center[P].size(); b++)
            m = std::max(m, std::abs(balls_.center[P][b]) + balls_.radius[P][b]);
        rad[P] = (fr_->radius_bound()[P] + m) * (1 + 1e-9);
    }
    return ball_region(*fr_, rad);
}

bool Tiler::piece_alive(SpacePoint const& y, std::vector<Ball> const& pos, Coord const& t, int k,
                        int b, std::vector<std::vector<Ball>> const& apow) const
{
    PlaceSystem const& ps = fr_->places();
    for (size_t P = 0; P < pos.size(); P++) {
        double scale = std::pow(alpha_hi_[P], k) * (1 + 4 * (k + 1) * Ball::eps);
        Ball rel = y.arch[P] - pos[P];
        if ((rel - apow[P][k] * Ball(balls_.center[P][b], 0.0)).abs_lo() > scale * balls_.radius[P][b])
            return false;
        for (auto const& dk : balls_.hull[P][b])
            if ((rel - apow[P][k] * Ball(dk.center, 0.0)).abs_lo() > scale * dk.radius)
                return false;
    }
    for (int f = 0; f < ps.fin_count(); f++) {
        FieldElem z = *y.exact - fr_->ring().to_field(t);
        if (!z.is_zero() && ps.fin[f].ideal.valuation(z) < k * ps.fin[f].nu + balls_.min_val[f])
            return false;
    }
    return true;
}

int Tiler::deepest(SpacePoint const& y, int b, int dmax) const
{
    struct Node {
        int k, b;
        std::vector<Ball> pos;
        Coord t;
    };
    PlaceSystem const& ps = fr_->places();
    Automaton const& A = fr_->automaton();
    bool fin = ps.fin_count() > 0;
    std::vector<std::vector<Ball>> apow(digit_ball_.size());
    for (size_t P = 0; P < apow.size(); P++) {
        apow[P].push_back(Ball(1.0));
        for (int k = 1; k <= dmax; k++)
            apow[P].push_back(apow[P].back() * alpha_[P]);
    }
    std::vector<Node> stack;
    Node root{0, b, std::vector<Ball>(digit_ball_.size()), fr_->ring().zero()};
    if (!piece_alive(y, root.pos, root.t, 0, b, apow))
        return -1;
    stack.push_back(std::move(root));
    int best = 0;
    std::size_t visited = 0;
    while (!stack.empty()) {
        Node nd = std::move(stack.back());
        stack.pop_back();
        best = std::max(best, nd.k);
        if (best == dmax)
            break;
        if (++visited > 5000000)
            fail(ErrorKind::cap, "covering search exceeds the node cap");
        for (int I : by_core_[nd.b]) {
            Node ch{nd.k + 1, A.states[I].source, nd.pos, {}};
            for (size_t P = 0; P < ch.pos.size(); P++)
                ch.pos[P] = nd.pos[P] + apow[P][nd.k] * digit_ball_[P][I];
            if (fin)
                ch.t = fr_->ring().add(nd.t, fr_->ring().mul_alpha_pow(fr_->digit(I), nd.k));
            if (piece_alive(y, ch.pos, ch.t, ch.k, ch.b, apow))
                stack.push_back(std::move(ch));
        }
    }
    return best;
}

CoverResult Tiler::covering_degree(SpacePoint const& X, Patch const& patch,
                                   std::vector<int> const& depths) const
{
    if (depths.empty())
        fail(ErrorKind::parse, "no covering depth");
    int dmax = *std::max_element(depths.begin(), depths.end());
    if (dmax > 60 || *std::min_element(depths.begin(), depths.end()) < 0)
        fail(ErrorKind::cap, "covering depth out of range");
    CoverResult res;
    res.depths = depths;
    res.counts.assign(depths.size(), 0);
    for (size_t i = 0; i < patch.items.size(); i++) {
        PatchItem const& it = patch.items[i];
        SpacePoint y;
        double gap = -1e300;
        for (size_t P = 0; P < X.arch.size(); P++) {
            y.arch.push_back(X.arch[P] - it.gamma.arch[P]);
            gap = std::max(gap, std::abs(y.arch[P].mid - balls_.center[P][it.letter]) -
                                    balls_.radius[P][it.letter]);
        }
        if (X.exact)
            y.exact = *X.exact - it.x;
        int d = deepest(y, it.letter, dmax);
        if (d < 0)
            continue;
        res.items.push_back(ItemCover{static_cast<int>(i), d, gap});
        for (size_t j = 0; j < depths.size(); j++)
            res.counts[j] += d >= depths[j];
    }
    return res;
}

TilingStats Tiler::tiling_statistics(ParryChain const& chain, int samples,
                                     std::vector<int> const& depths, std::uint64_t seed,
                                     int resolve_depth, int threads, Patch const* patch) const
{
    if (samples <= 0)
        fail(ErrorKind::parse, "sample count must be positive");
    Patch own;
    if (!patch) {
        own = translation_patch(*fr_, sampling_region());
        patch = &own;
    }
    /* truncation error far below the smallest piece radius */
    double amax = 0.0;
    for (double a : alpha_hi_)
        amax = std::max(amax, a);
    for (auto const& f : fr_->places().fin)
        amax = std::max(amax, std::pow(f.q.get_d(), -f.nu));
    if (depths.empty())
        fail(ErrorKind::parse, "no covering depth");
    int dmax = *std::max_element(depths.begin(), depths.end());
    resolve_depth = std::max(resolve_depth, dmax);
    int H = std::max(resolve_depth + 8, static_cast<int>(std::ceil(std::log(1e-12) / std::log(amax))));
    H = std::min(H, 400);

    TilingStats st;
    st.samples = samples;
    st.depths = depths;
    st.seed = seed;
    st.path_length = H;
    st.patch_items = patch->items.size();
    st.resolve_depth = resolve_depth;
    st.per_sample.assign(samples, {});
    st.resolved.assign(samples, -1);
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, samples);
    std::vector<std::exception_ptr> errs(threads);
    auto work = [&](int tid) {
        try {
            for (int s = tid; s < samples; s += threads) {
                std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                  static_cast<std::uint32_t>(s)};
                std::mt19937_64 g(seq);
                auto path = sample_path(chain, static_cast<std::size_t>(H), g);
                SpacePoint X = psi_point(path);
                st.per_sample[s] = covering_degree(X, *patch, depths).counts;
                if (st.per_sample[s].back() != 1 && resolve_depth > dmax)
                    st.resolved[s] = covering_degree(X, *patch, {resolve_depth}).counts[0];
            }
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

    st.histogram.assign(depths.size(), {});
    for (int s = 0; s < samples; s++) {
        auto c = st.per_sample[s];
        for (size_t j = 0; j < depths.size(); j++)
            st.histogram[j][c[j]]++;
        if (st.resolved[s] >= 0)
            c.push_back(st.resolved[s]);
        bool stable = std::adjacent_find(c.begin(), c.end(), std::not_equal_to<>()) == c.end();
        st.count1 += c[0] == 1;
        st.unstable += !stable;
        st.stable_defects += stable && c[0] != 1;
    }
    return st;
}

/* -------------------------------------------------------------- Delone */

DeloneRadii delone_radii(Fractal const& fr, Patch const& patch, int letter, int probes_per_axis)
{
    PlaceSystem const& ps = fr.places();
    std::vector<PatchItem const*> items;
    for (auto const& it : patch.items)
        if (letter < 0 || it.letter == letter)
            items.push_back(&it);
    if (items.size() < 2)
        fail(ErrorKind::hypothesis, "Delone radii need at least two items");

    std::vector<int> block;
    for (int P = 0; P < ps.arch_count(); P++)
        for (int part = 0; part < (ps.places[P].kind == PlaceKind::complex ? 2 : 1); part++)
            block.push_back(P);
    int dim = static_cast<int>(block.size());
    std::vector<double> x;
    for (auto const* it : items)
        for (int P = 0; P < ps.arch_count(); P++) {
            x.push_back(it->gamma.arch[P].mid.real());
            if (ps.places[P].kind == PlaceKind::complex)
                x.push_back(it->gamma.arch[P].mid.imag());
        }
    DeloneRadii out;
    out.items = static_cast<int>(items.size());
    double best = std::numeric_limits<double>::infinity();
    if (dim == 0) {
        for (size_t i = 0; i < items.size(); i++)
            for (size_t j = i + 1; j < items.size(); j++) {
                double d = 0.0;
                for (auto const& f : ps.fin)
                    d = std::max(d, abs_p(items[i]->x - items[j]->x, f));
                best = std::min(best, d);
            }
        out.r2 = best / 2;
        return out;
    }
    KdTree tree(x, dim, block);
    auto full = [&](size_t i, int j, double arch) {
        double d = arch;
        for (auto const& f : ps.fin)
            d = std::max(d, abs_p(items[i]->x - items[j]->x, f));
        return d;
    };
    for (size_t i = 0; i < items.size(); i++) {
        double const* q = &x[i * dim];
        auto [j, d] = tree.nearest(q, static_cast<int>(i));
        double u = full(i, j, d);
        if (ps.fin_count() > 0 && u > d)
            for (int k : tree.within(q, u))
                if (k != static_cast<int>(i))
                    u = std::min(u, full(i, k, tree.dist(q, k)));
        best = std::min(best, u);
    }
    out.r2 = best / 2;

    /* probes over the inner half of the region (or of the items' hull) */
    std::vector<double> lo(dim), hi(dim);
    if (patch.region) {
        int k = 0;
        for (int P = 0; P < ps.arch_count(); P++) {
            auto c = patch.region->center.embed(ps.places[P].root).mid;
            double r = patch.region->radius[P] / 2;
            lo[k] = c.real() - r;
            hi[k++] = c.real() + r;
            if (ps.places[P].kind == PlaceKind::complex) {
                lo[k] = c.imag() - r;
                hi[k++] = c.imag() + r;
            }
        }
    } else {
        for (int d = 0; d < dim; d++) {
            lo[d] = 1e300;
            hi[d] = -1e300;
            for (size_t i = 0; i < items.size(); i++) {
                lo[d] = std::min(lo[d], x[i * dim + d]);
                hi[d] = std::max(hi[d], x[i * dim + d]);
            }
            double c = (lo[d] + hi[d]) / 2, h = (hi[d] - lo[d]) / 4;
            lo[d] = c - h;
            hi[d] = c + h;
        }
    }
    std::vector<double> q(dim);
    auto probe = [&]() {
        out.r1 = std::max(out.r1, tree.nearest(q.data()).second);
        out.probes++;
    };
    if (dim <= 2) {
        int m = probes_per_axis;
        for (int i = 0; i < m; i++)
            for (int j = 0; j < (dim == 2 ? m : 1); j++) {
                q[0] = lo[0] + (hi[0] - lo[0]) * (i + 0.5) / m;
                if (dim == 2)
                    q[1] = lo[1] + (hi[1] - lo[1]) * (j + 0.5) / m;
                probe();
            }
    } else {
        std::mt19937_64 g(0x5eed);
        for (int s = 0; s < probes_per_axis * probes_per_axis; s++) {
            for (int d = 0; d < dim; d++)
                q[d] = lo[d] + (hi[d] - lo[d]) * uniform01(g);
            probe();
        }
    }
    return out;
}

/* ------------------------------------------------------------ preimages */

Patch preimage_patch(Fractal const& fr, int a, int k)
{
    Substitution const& s = fr.substitution();
    if (a < 0 || a >= s.size())
        fail(ErrorKind::parse, "letter out of range");
    if (k < 0 || k > fr.depth_cap())
        fail(ErrorKind::cap, "preimage depth exceeds the depth cap");
    IntMatrix M = incidence_matrix(s);
    Patch patch;
    patch.kind = "preimage";
    patch.i_max = k;
    for (int b = 0; b < s.size(); b++)
        scan_positions(s, b, k, kDefaultWordCap, [&](IntVector const& p, int c) {
            if (c != a)
                return;
            PatchItem it = make_item(fr, canonical_lattice_vec(LatticeVec{p, k}, M), b);
            it.prefix = p;
            if (!gamma_member(fr.eigen(), it.w, b))
                fail(ErrorKind::internal, "preimage item outside Gamma");
            patch.items.push_back(std::move(it));
        });
    return patch;
}

std::optional<QuasiPeriodWitness> quasi_periodic_search(Fractal const& fr,
                                                        std::vector<PatchItem> const& needle,
                                                        int k)
{
    if (needle.empty())
        return std::nullopt;
    using Key = std::pair<std::vector<mpq_class>, int>;
    for (int c = 0; c < fr.substitution().size(); c++) {
        Patch hay = preimage_patch(fr, c, k);
        std::map<Key, int> index;
        for (size_t i = 0; i < hay.items.size(); i++)
            index.emplace(Key{hay.items[i].x.coeffs(), hay.items[i].letter}, static_cast<int>(i));
        for (auto const& h : hay.items) {
            if (h.letter != needle[0].letter)
                continue;
            FieldElem t = h.x - needle[0].x;
            QuasiPeriodWitness wit{t, c, {}};
            for (auto const& e : needle) {
                auto f = index.find(Key{(e.x + t).coeffs(), e.letter});
                if (f == index.end())
                    break;
                wit.matched.push_back(hay.items[f->second]);
            }
            if (wit.matched.size() == needle.size())
                return wit;
        }
    }
    return std::nullopt;
}

} // namespace pisot
