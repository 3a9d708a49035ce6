#include "pisot/fractal.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>

#include "pisot/error.hpp"
#include "pisot/kdtree.hpp"

namespace pisot {

/* ---------------------------------------------------------------- ring */

CoordRing::CoordRing(FieldPtr K, std::int64_t den) : K_(std::move(K)), den_(den)
{
    IntPoly const& f = K_->minpoly();
    int n = pisot::degree(f);
    red_.resize(n);
    for (int k = 0; k < n; k++) {
        mpz_class c = -f[k];
        if (!c.fits_slong_p())
            fail(ErrorKind::cap, "minimal polynomial coefficient exceeds 64 bits");
        red_[k] = c.get_si();
    }
}

Coord CoordRing::add(Coord const& x, Coord const& y) const
{
    Coord r(x.size());
    for (size_t k = 0; k < x.size(); k++)
        r[k] = checked_add(x[k], y[k]);
    return r;
}

Coord CoordRing::sub(Coord const& x, Coord const& y) const
{
    Coord r(x.size());
    for (size_t k = 0; k < x.size(); k++)
        r[k] = checked_add(x[k], checked_mul(-1, y[k]));
    return r;
}

Coord CoordRing::mul_alpha(Coord const& x) const
{
    int n = degree();
    Coord r(n, 0);
    for (int k = 0; k + 1 < n; k++)
        r[k + 1] = x[k];
    std::int64_t top = x[n - 1];
    if (top != 0)
        for (int k = 0; k < n; k++)
            r[k] = checked_add(r[k], checked_mul(top, red_[k]));
    return r;
}

Coord CoordRing::mul_alpha_pow(Coord x, int k) const
{
    for (int i = 0; i < k; i++)
        x = mul_alpha(x);
    return x;
}

FieldElem CoordRing::to_field(Coord const& x) const
{
    std::vector<mpq_class> c(x.size());
    for (size_t k = 0; k < x.size(); k++) {
        c[k] = mpq_class(mpz_class(static_cast<long>(x[k])), mpz_class(static_cast<long>(den_)));
        c[k].canonicalize();
    }
    return FieldElem(K_, c);
}

Coord CoordRing::from_field(FieldElem const& x) const
{
    Coord r(degree());
    for (int k = 0; k < degree(); k++) {
        mpq_class q = x.coeff(k) * mpq_class(static_cast<long>(den_));
        if (q.get_den() != 1)
            fail(ErrorKind::internal, "coordinate outside Z[alpha]/" + std::to_string(den_));
        if (!q.get_num().fits_slong_p())
            fail(ErrorKind::cap, "coordinate exceeds 64 bits");
        r[k] = q.get_num().get_si();
    }
    return r;
}

Ball CoordRing::embed(Coord const& x, int root) const
{
    auto const& pw = K_->root_powers(root);
    Ball s;
    for (size_t k = 0; k < x.size(); k++) {
        if (x[k] == 0)
            continue;
        double d = static_cast<double>(x[k]);
        double r = std::abs(x[k]) > (std::int64_t(1) << 53) ? std::abs(d) * Ball::eps : 0.0;
        s = s + Ball({d, 0.0}, r) * pw[k];
    }
    if (den_ != 1)
        s = s * Ball::from_rational(mpq_class(1, static_cast<unsigned long>(den_)));
    return s;
}

std::int64_t coord_denominator(EigenData const& e)
{
    mpz_class d = 1;
    for (auto const& x : e.v)
        d = lcm(d, x.denominator());
    if (!d.fits_slong_p())
        fail(ErrorKind::cap, "eigenvector denominator exceeds 64 bits");
    return d.get_si();
}

/* --------------------------------------------------------------- cloud */

std::int64_t PointCloud::count() const
{
    return std::accumulate(mult.begin(), mult.end(), std::int64_t(0));
}

double PointCloud::delta_max() const
{
    double m = 0.0;
    for (double d : delta)
        m = std::max(m, d);
    return m;
}

namespace {

/* Sort (point, multiplicity) pairs and merge equal points. */
void canonicalize(std::vector<std::pair<Coord, std::int64_t>>& v, PointCloud& out)
{
    std::sort(v.begin(), v.end());
    out.points.clear();
    out.mult.clear();
    for (auto& [p, m] : v) {
        if (!out.points.empty() && out.points.back() == p) {
            out.mult.back() += m;
            continue;
        }
        out.points.push_back(std::move(p));
        out.mult.push_back(m);
    }
}

double contraction_hi(PlaceSystem const& ps, int i)
{
    Place const& pl = ps.places[i];
    if (pl.kind == PlaceKind::finite)
        return ps.contraction(i);
    auto const& r = ps.K->roots()[pl.root];
    return (r.modulus() + r.radius) * (1 + Ball::eps);
}

} // namespace

Fractal::Fractal(Substitution s, EigenData e, PlaceSystem ps, int depth_cap,
                 std::int64_t point_cap)
    : s_(std::move(s)), e_(std::move(e)), ps_(std::move(ps)), depth_cap_(depth_cap),
      point_cap_(point_cap)
{
    a_ = build_automaton(s_);
    ring_ = CoordRing(e_.K, coord_denominator(e_));
    for (int I = 0; I < a_.size(); I++)
        digit_.push_back(ring_.from_field(e_.pair(a_.prefix_ab[I])));

    int P = static_cast<int>(ps_.places.size());
    Mv_.assign(P, 1.0);
    Cv_.assign(P, 1.0);
    rho_.assign(P, 1.0);
    for (int i = 0; i < P; i++) {
        Place const& pl = ps_.places[i];
        if (pl.kind == PlaceKind::finite)
            continue;
        std::vector<Ball> b;
        for (auto const& d : digit_)
            b.push_back(ring_.embed(d, pl.root));
        double m = 0.0, c = 0.0;
        for (size_t I = 0; I < b.size(); I++) {
            m = std::max(m, b[I].abs_hi());
            for (size_t J = 0; J < b.size(); J++)
                c = std::max(c, (b[I] - b[J]).abs_hi());
        }
        double a = contraction_hi(ps_, i);
        if (a >= 1.0)
            fail(ErrorKind::internal, "contracting place with |alpha| >= 1");
        Mv_[i] = m;
        Cv_[i] = c;
        rho_[i] = m / (1.0 - a) * (1 + 4 * Ball::eps);
    }
}

std::vector<double> Fractal::delta(int m) const
{
    std::vector<double> d(rho_.size());
    for (size_t i = 0; i < d.size(); i++)
        d[i] = std::pow(contraction_hi(ps_, static_cast<int>(i)), m) * rho_[i] * (1 + 4 * m * Ball::eps);
    return d;
}

double Fractal::radius() const
{
    double r = 0.0;
    for (double x : rho_)
        r = std::max(r, x);
    return r;
}

Coord Fractal::psi_coord(std::vector<int> const& path) const
{
    Coord acc = ring_.zero();
    for (size_t i = path.size(); i-- > 0;)
        acc = ring_.add(ring_.mul_alpha(acc), digit_[path[i]]);
    return acc;
}

RepPoint Fractal::embed(Coord const& x, int level) const
{
    RepPoint r;
    for (auto const& pl : ps_.places)
        if (pl.kind != PlaceKind::finite)
            r.arch.push_back(ring_.embed(x, pl.root));
    if (ps_.fin_count() > 0) {
        FieldElem f = ring_.to_field(x);
        for (int i = 0; i < ps_.fin_count(); i++)
            r.fin.push_back(FinCoord{f, level});
    }
    return r;
}

mpz_class Fractal::path_count(int a, int m) const
{
    if (m == 0)
        return 1;
    int D = a_.size();
    std::vector<mpz_class> x(D, 1), y(D);
    for (int k = 1; k < m; k++) {
        for (int I = 0; I < D; I++) {
            y[I] = 0;
            for (int J : a_.succ[I])
                y[I] += x[J];
        }
        std::swap(x, y);
    }
    mpz_class t = 0;
    for (int I = 0; I < D; I++)
        if (a_.states[I].core == a)
            t += x[I];
    return t;
}

PointCloud const& Fractal::cloud(int a, int m) const
{
    if (m < 0 || m > depth_cap_)
        fail(ErrorKind::cap, "depth " + std::to_string(m) + " exceeds the cap " +
                                 std::to_string(depth_cap_));
    std::lock_guard<std::mutex> lock(memo_m_);
    int n = s_.size();
    while (static_cast<int>(memo_.size()) <= m) {
        int k = static_cast<int>(memo_.size());
        mpz_class total = 0;
        for (int b = 0; b < n; b++)
            total += path_count(b, k);
        if (total > point_cap_)
            fail(ErrorKind::cap, "depth " + std::to_string(k) + " needs " + total.get_str() +
                                     " points, above the cap");
        std::vector<PointCloud> level(n);
        if (k == 0) {
            for (int b = 0; b < n; b++) {
                level[b].points = {ring_.zero()};
                level[b].mult = {1};
            }
        } else {
            auto const& prev = memo_[k - 1];
            std::vector<std::vector<Coord>> scaled(n);
            for (int b = 0; b < n; b++)
                for (auto const& p : prev[b].points)
                    scaled[b].push_back(ring_.mul_alpha(p));
            std::vector<std::vector<std::pair<Coord, std::int64_t>>> acc(n);
            for (int I = 0; I < a_.size(); I++) {
                int src = a_.states[I].source, core = a_.states[I].core;
                for (size_t j = 0; j < scaled[src].size(); j++)
                    acc[core].emplace_back(ring_.add(scaled[src][j], digit_[I]), prev[src].mult[j]);
            }
            for (int b = 0; b < n; b++)
                canonicalize(acc[b], level[b]);
        }
        for (int b = 0; b < n; b++) {
            level[b].letter = b;
            level[b].depth = k;
            level[b].delta = delta(k);
        }
        memo_.push_back(std::move(level));
    }
    return memo_[m][a];
}

RepPoint psi_partial(std::vector<int> const& path, Fractal const& fr)
{
    FieldPtr const& K = fr.eigen().K;
    FieldElem acc(K), al = FieldElem::alpha(K);
    for (size_t i = path.size(); i-- > 0;)
        acc = al * acc + fr.ring().to_field(fr.digit(path[i]));
    return phi_prime(acc, fr.places(), static_cast<int>(path.size()));
}

PointCloud subtile_cloud(Fractal const& fr, int a, int m) { return fr.cloud(a, m); }

PointCloud scan_cloud(Fractal const& fr, int a, int m)
{
    Substitution const& s = fr.substitution();
    int n = s.size();
    std::vector<Coord> vc;
    for (auto const& x : fr.eigen().v)
        vc.push_back(fr.ring().from_field(x));
    std::vector<std::pair<Coord, std::int64_t>> acc;
    for (int b = 0; b < n; b++)
        scan_positions(s, b, m, kDefaultWordCap, [&](IntVector const& pre, int letter) {
            if (letter != a)
                return;
            Coord p = fr.ring().zero();
            for (int k = 0; k < n; k++)
                if (pre[k] != 0)
                    for (int j = 0; j < fr.ring().degree(); j++)
                        p[j] = checked_add(p[j], checked_mul(pre[k], vc[k][j]));
            acc.emplace_back(std::move(p), 1);
        });
    PointCloud c;
    c.letter = a;
    c.depth = m;
    c.delta = fr.delta(m);
    canonicalize(acc, c);
    return c;
}

bool set_equation_check(Fractal const& fr, int a, int m)
{
    if (m < 1)
        fail(ErrorKind::internal, "set equation needs m >= 1");
    PointCloud direct = scan_cloud(fr, a, m);
    PointCloud const& rec = fr.cloud(a, m);
    if (direct.points != rec.points || direct.mult != rec.mult)
        return false;
    Automaton const& au = fr.automaton();
    std::vector<std::optional<PointCloud>> lower(fr.substitution().size());
    std::vector<std::pair<Coord, std::int64_t>> acc;
    for (int I = 0; I < au.size(); I++) {
        if (au.states[I].core != a)
            continue;
        int b = au.states[I].source;
        if (!lower[b])
            lower[b] = scan_cloud(fr, b, m - 1);
        for (size_t j = 0; j < lower[b]->points.size(); j++)
            acc.emplace_back(fr.ring().add(fr.ring().mul_alpha(lower[b]->points[j]), fr.digit(I)),
                             lower[b]->mult[j]);
    }
    PointCloud one;
    canonicalize(acc, one);
    return one.points == direct.points && one.mult == direct.mult;
}

ArchPoints arch_points(Fractal const& fr, PointCloud const& c)
{
    PlaceSystem const& ps = fr.places();
    ArchPoints ap;
    for (int i = 0; i < ps.arch_count(); i++) {
        ap.block.push_back(i);
        if (ps.places[i].kind == PlaceKind::complex)
            ap.block.push_back(i);
    }
    ap.dim = static_cast<int>(ap.block.size());
    ap.x.reserve(c.points.size() * ap.dim);
    for (auto const& p : c.points)
        for (int i = 0; i < ps.arch_count(); i++) {
            Ball b = fr.ring().embed(p, ps.places[i].root);
            ap.radius = std::max(ap.radius, b.rad);
            ap.x.push_back(b.mid.real());
            if (ps.places[i].kind == PlaceKind::complex)
                ap.x.push_back(b.mid.imag());
        }
    return ap;
}

namespace {

/* sup over A of the distance to B: arch-only lower value, and the exact
 * product-metric value as upper value */
std::pair<double, double> directed(Fractal const& fr, PointCloud const& A, ArchPoints const& pa,
                                   PointCloud const& B, ArchPoints const& pb)
{
    PlaceSystem const& ps = fr.places();
    KdTree tree(pb.x, pb.dim, pb.block);
    auto fin_dist = [&](Coord const& x, Coord const& y) {
        FieldElem diff = fr.ring().to_field(fr.ring().sub(x, y));
        double m = 0.0;
        if (!diff.is_zero())
            for (auto const& f : ps.fin)
                m = std::max(m, std::pow(f.q.get_d(), -f.ideal.valuation(diff)));
        return m;
    };
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < pa.size() || (pa.dim == 0 && i < A.points.size()); i++) {
        if (pa.dim == 0) {
            double best = 1e300;
            for (auto const& q : B.points)
                best = std::min(best, fin_dist(A.points[i], q));
            lo = std::max(lo, best);
            hi = std::max(hi, best);
            continue;
        }
        double const* q = &pa.x[i * pa.dim];
        auto [j, d] = tree.nearest(q);
        lo = std::max(lo, d);
        double h = d;
        if (ps.fin_count() > 0) {
            h = std::max(d, fin_dist(A.points[i], B.points[j]));
            /* any better partner is within h at the archimedean places */
            if (h > d)
                for (int k : tree.within(q, h))
                    h = std::min(h, std::max(tree.dist(q, k), fin_dist(A.points[i], B.points[k])));
        }
        hi = std::max(hi, h);
    }
    return {lo, hi};
}

} // namespace

Interval hausdorff_estimate(Fractal const& fr, PointCloud const& c1, PointCloud const& c2)
{
    if (c1.points.empty() || c2.points.empty())
        fail(ErrorKind::internal, "Hausdorff distance of an empty cloud");
    ArchPoints p1 = arch_points(fr, c1), p2 = arch_points(fr, c2);
    auto [l1, h1] = directed(fr, c1, p1, c2, p2);
    auto [l2, h2] = directed(fr, c2, p2, c1, p1);
    double r = 2 * std::max(p1.radius, p2.radius);
    Interval iv;
    iv.lo = std::max(0.0, std::max(l1, l2) * (1 - 2 * Ball::eps) - r);
    iv.hi = std::max(h1, h2) * (1 + 2 * Ball::eps) + r;
    return iv;
}

/* ---------------------------------------------------------- projection */

Projected project(Fractal const& fr, std::vector<PointCloud const*> const& layers,
                  ProjectionSpec const& spec)
{
    PlaceSystem const& ps = fr.places();
    if (spec.width < 16 || spec.height < 16)
        fail(ErrorKind::parse, "projection resolution must be at least 16");
    if (ps.arch_count() == 0)
        fail(ErrorKind::unsupported_field, "no archimedean contracting place to project");
    auto check_place = [&](int i, bool want_complex) {
        if (i < 0 || i >= ps.arch_count() ||
            (want_complex && ps.places[i].kind != PlaceKind::complex))
            fail(ErrorKind::parse, "projection place " + std::to_string(i) + " unusable");
    };
    using Mode = ProjectionSpec::Mode;
    check_place(spec.place_x, spec.mode == Mode::complex_place);
    if (spec.mode == Mode::real_pair)
        check_place(spec.place_y, false);

    Projected out;
    out.width = spec.width;
    out.height = spec.height;
    for (size_t L = 0; L < layers.size(); L++)
        for (auto const& p : layers[L]->points) {
            Ball bx = fr.ring().embed(p, ps.places[spec.place_x].root);
            double x = bx.mid.real(), y;
            switch (spec.mode) {
            case Mode::complex_place: y = bx.mid.imag(); break;
            case Mode::real_pair: y = fr.ring().embed(p, ps.places[spec.place_y].root).mid.real(); break;
            default: y = static_cast<double>(layers.size() - 1 - L) + 0.5; break;
            }
            out.xs.push_back(x);
            out.ys.push_back(y);
            out.layer.push_back(static_cast<int>(L));
        }
    if (out.xs.empty())
        fail(ErrorKind::internal, "empty cloud");
    if (spec.auto_box) {
        auto [xmin, xmax] = std::minmax_element(out.xs.begin(), out.xs.end());
        auto [ymin, ymax] = std::minmax_element(out.ys.begin(), out.ys.end());
        double w = std::max(*xmax - *xmin, 1e-9), h = std::max(*ymax - *ymin, 1e-9);
        if (spec.mode == Mode::real_line) {
            out.y0 = 0.0;
            out.y1 = static_cast<double>(layers.size());
        } else {
            out.y0 = *ymin - 0.02 * h;
            out.y1 = *ymax + 0.02 * h;
        }
        out.x0 = *xmin - 0.02 * w;
        out.x1 = *xmax + 0.02 * w;
    } else {
        if (!(spec.x1 > spec.x0) || !(spec.y1 > spec.y0))
            fail(ErrorKind::parse, "empty projection box");
        out.x0 = spec.x0;
        out.x1 = spec.x1;
        out.y0 = spec.y0;
        out.y1 = spec.y1;
    }
    out.grid.assign(static_cast<size_t>(out.width) * out.height, 0);
    for (size_t i = 0; i < out.xs.size(); i++) {
        double fx = (out.xs[i] - out.x0) / (out.x1 - out.x0);
        double fy = (out.y1 - out.ys[i]) / (out.y1 - out.y0);
        if (fx < 0 || fx >= 1 || fy < 0 || fy >= 1)
            continue;
        int px = static_cast<int>(fx * out.width), py = static_cast<int>(fy * out.height);
        out.grid[static_cast<size_t>(py) * out.width + px] = static_cast<std::uint8_t>(1 + out.layer[i] % 255);
    }
    return out;
}

namespace {

constexpr unsigned char kPalette[][3] = {
    {228, 26, 28}, {55, 126, 184}, {77, 175, 74}, {152, 78, 163},
    {255, 127, 0}, {166, 86, 40},  {247, 129, 191}, {153, 153, 153},
};
constexpr int kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double x, char const* f = "%.4f")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

} // namespace

std::string write_ppm(Projected const& p)
{
    std::string out = "P6\n" + std::to_string(p.width) + " " + std::to_string(p.height) + "\n255\n";
    out.reserve(out.size() + p.grid.size() * 3);
    for (auto g : p.grid) {
        if (g == 0) {
            out.append(3, static_cast<char>(255));
            continue;
        }
        auto const& c = kPalette[(g - 1) % kPaletteSize];
        out.push_back(static_cast<char>(c[0]));
        out.push_back(static_cast<char>(c[1]));
        out.push_back(static_cast<char>(c[2]));
    }
    return out;
}

std::string write_svg(Projected const& p)
{
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.width) +
                      "\" height=\"" + std::to_string(p.height) + "\" viewBox=\"0 0 " +
                      std::to_string(p.width) + " " + std::to_string(p.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (size_t i = 0; i < p.xs.size(); i++) {
        double fx = (p.xs[i] - p.x0) / (p.x1 - p.x0) * p.width;
        double fy = (p.y1 - p.ys[i]) / (p.y1 - p.y0) * p.height;
        auto const& c = kPalette[p.layer[i] % kPaletteSize];
        out += "<circle cx=\"" + fmt(fx, "%.2f") + "\" cy=\"" + fmt(fy, "%.2f") +
               "\" r=\"0.6\" fill=\"rgb(" + std::to_string(c[0]) + "," + std::to_string(c[1]) +
               "," + std::to_string(c[2]) + ")\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string write_csv(Fractal const& fr, std::vector<PointCloud const*> const& layers)
{
    PlaceSystem const& ps = fr.places();
    int n = fr.ring().degree();
    std::string out = "letter,depth,mult";
    for (int k = 0; k < n; k++)
        out += ",c" + std::to_string(k);
    for (int i = 0; i < ps.arch_count(); i++) {
        std::string tag = "v" + std::to_string(i + 2);
        out += ps.places[i].kind == PlaceKind::complex ? "," + tag + "_re," + tag + "_im" : "," + tag;
    }
    out += "\n";
    mpz_class den(static_cast<long>(fr.ring().den()));
    for (auto const* c : layers)
        for (size_t j = 0; j < c->points.size(); j++) {
            auto const& p = c->points[j];
            out += std::to_string(c->letter + 1) + "," + std::to_string(c->depth) + "," +
                   std::to_string(c->mult[j]);
            for (int k = 0; k < n; k++) {
                mpq_class q(mpz_class(static_cast<long>(p[k])), den);
                q.canonicalize();
                out += "," + q.get_str();
            }
            for (int i = 0; i < ps.arch_count(); i++) {
                Ball b = fr.ring().embed(p, ps.places[i].root);
                out += "," + fmt(b.mid.real(), "%.17g");
                if (ps.places[i].kind == PlaceKind::complex)
                    out += "," + fmt(b.mid.imag(), "%.17g");
            }
            out += "\n";
        }
    return out;
}

double boundary_fraction(Projected const& p)
{
    long occ = 0, bd = 0;
    auto at = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= p.width || y >= p.height)
            return 0;
        return p.grid[static_cast<size_t>(y) * p.width + x];
    };
    for (int y = 0; y < p.height; y++)
        for (int x = 0; x < p.width; x++) {
            if (!at(x, y))
                continue;
            occ++;
            if (!at(x - 1, y) || !at(x + 1, y) || !at(x, y - 1) || !at(x, y + 1))
                bd++;
        }
    return occ ? static_cast<double>(bd) / occ : 0.0;
}

/* ---------------------------------------------------------- continuity */

ContinuityReport continuity_modulus_check(Fractal const& fr, ParryChain const& chain, int k,
                                          int trials, std::uint64_t seed)
{
    if (trials < 1 || k < 1)
        fail(ErrorKind::internal, "continuity check needs trials >= 1 and k >= 1");
    PlaceSystem const& ps = fr.places();
    FieldPtr const& K = fr.eigen().K;
    FieldElem al = FieldElem::alpha(K);
    std::vector<FieldElem> dig;
    for (int I = 0; I < fr.automaton().size(); I++)
        dig.push_back(fr.ring().to_field(fr.digit(I)));
    auto psi = [&](std::vector<int> const& path) {
        FieldElem acc(K);
        for (size_t i = path.size(); i-- > 0;)
            acc = al * acc + dig[path[i]];
        return acc;
    };
    std::mt19937_64 g(seed);
    const int H = k + 24;
    ContinuityReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; t++) {
        std::vector<int> p1 = sample_path(chain, H, g);
        std::vector<int> tail = sample_from(chain, p1[k - 1], H - k + 1, g);
        std::vector<int> p2(p1.begin(), p1.begin() + k);
        p2.insert(p2.end(), tail.begin() + 1, tail.end());
        FieldElem diff = psi(p1) - psi(p2);
        bool bad = false;
        for (int i = 0; i < static_cast<int>(ps.places.size()); i++) {
            Place const& pl = ps.places[i];
            if (pl.kind == PlaceKind::finite) {
                if (diff.is_zero())
                    continue;
                long v = ps.fin[pl.fin].ideal.valuation(diff);
                double r = std::pow(pl.q.get_d(), -static_cast<double>(v - long(pl.nu) * k));
                rep.worst_ratio = std::max(rep.worst_ratio, r);
                bad |= v < long(pl.nu) * k;
                continue;
            }
            double a = contraction_hi(ps, i);
            double bound = fr.prefix_spread()[i] * std::pow(a, k) / (1 - a) * (1 + 1e-12);
            double d = diff.embed(pl.root).abs_lo();
            if (bound > 0)
                rep.worst_ratio = std::max(rep.worst_ratio, d / bound);
            bad |= d > bound;
        }
        rep.violations += bad;
    }
    return rep;
}

} // namespace pisot
