#include "pisot/markov.hpp"

#include "pisot/error.hpp"

namespace pisot {

Automaton build_automaton(Substitution const& s)
{
    Automaton a;
    a.n = s.size();
    a.empty_state.assign(a.n, -1);
    for (int b = 0; b < a.n; b++) {
        Word const& img = s.image(b);
        for (size_t i = 0; i < img.size(); i++) {
            PathState st;
            st.id = a.size();
            st.source = b;
            st.prefix.assign(img.begin(), img.begin() + i);
            st.core = img[i];
            st.suffix.assign(img.begin() + i + 1, img.end());
            if (i == 0)
                a.empty_state[b] = st.id;
            a.prefix_ab.push_back(abelianize(st.prefix, a.n));
            a.states.push_back(std::move(st));
        }
    }
    int D = a.size();
    a.A = IntMatrix(D, D);
    a.succ.assign(D, {});
    a.pred.assign(D, {});
    for (int I = 0; I < D; I++)
        for (int J = 0; J < D; J++)
            if (a.states[J].core == a.states[I].source) {
                a.A(I, J) = 1;
                a.succ[I].push_back(J);
                a.pred[J].push_back(I);
            }
    return a;
}

bool verify_primitive_A(IntMatrix const& A, int N)
{
    return A.pow(N + 1).positive();
}

LiftedVectors lift_vectors(Automaton const& a, EigenData const& e)
{
    LiftedVectors lv;
    for (auto const& st : a.states) {
        lv.u.push_back(e.u[st.source]);
        lv.v.push_back(e.v[st.core]);
    }
    return lv;
}

namespace {

FieldElem pairing(LiftedVectors const& lv)
{
    FieldElem s(lv.u.front().field());
    for (size_t i = 0; i < lv.u.size(); i++)
        s += lv.u[i] * lv.v[i];
    return s;
}

} // namespace

SpectralTable::SpectralTable(LiftedVectors lv)
    : lv_(std::move(lv)), pairing_inv_(pairing(lv_).inv())
{
}

SpectralEntry SpectralTable::entry(IntMatrix const& Ak, int k, int I, int J) const
{
    SpectralEntry r;
    r.exact = Ak(I, J);
    FieldPtr const& K = pairing_inv_.field();
    FieldElem xi = FieldElem::alpha(K).pow(k) * lv_.u[I] * lv_.v[J] * pairing_inv_;
    auto const& roots = K->roots();
    for (int t = 0; t < static_cast<int>(roots.size()); t++) {
        Ball b = xi.embed(t);
        int w = roots[t].real ? 1 : 2;
        r.spectral += w * b.mid.real();
        r.radius += w * b.rad;
    }
    return r;
}

ParryChain parry_chain(Automaton const& a, LiftedVectors const& lv)
{
    ParryChain c;
    c.K = lv.u.front().field();
    c.lifted = lv;
    c.pairing = pairing(lv);
    FieldElem inv = c.pairing.inv();
    FieldElem alpha = FieldElem::alpha(c.K);
    int D = a.size();
    c.P.assign(D, {});
    c.P_num.assign(D, {});
    for (int I = 0; I < D; I++) {
        c.p.push_back(lv.u[I] * lv.v[I] * inv);
        c.p_num.push_back(c.p.back().embed(0).mid.real());
        FieldElem den = (alpha * lv.u[I]).inv();
        for (int J : a.succ[I]) {
            FieldElem x = lv.u[J] * den;
            c.P[I].emplace_back(J, x);
            c.P_num[I].emplace_back(J, x.embed(0).mid.real());
        }
    }
    return c;
}

FieldElem ParryChain::transition(int I, int J) const
{
    for (auto const& [j, x] : P[I])
        if (j == J)
            return x;
    return FieldElem(K);
}

bool ParryChain::stationary() const
{
    int D = size();
    std::vector<FieldElem> q(D, FieldElem(K));
    for (int I = 0; I < D; I++)
        for (auto const& [J, x] : P[I])
            q[J] += p[I] * x;
    for (int J = 0; J < D; J++)
        if (q[J] != p[J])
            return false;
    FieldElem total(K);
    for (auto const& x : p)
        total += x;
    return total == FieldElem(K, mpq_class(1));
}

bool ParryChain::stochastic() const
{
    FieldElem one(K, mpq_class(1));
    for (auto const& row : P) {
        FieldElem s(K);
        for (auto const& [J, x] : row)
            s += x;
        if (s != one)
            return false;
    }
    return true;
}

CylinderMeasure cylinder_measure(ParryChain const& c, std::vector<int> const& path)
{
    if (path.empty())
        fail(ErrorKind::internal, "empty cylinder");
    FieldElem m = c.p[path[0]];
    for (size_t k = 1; k < path.size(); k++) {
        bool found = false;
        for (auto const& [J, x] : c.P[path[k - 1]])
            if (J == path[k]) {
                m *= x;
                found = true;
                break;
            }
        if (!found)
            fail(ErrorKind::internal, "inadmissible path");
    }
    return {m, m.embed(0).mid.real()};
}

int sample_categorical(std::vector<std::pair<int, double>> const& row, std::mt19937_64& g)
{
    double u = uniform01(g), acc = 0.0;
    for (auto const& [j, w] : row) {
        acc += w;
        if (u < acc)
            return j;
    }
    return row.back().first;
}

std::vector<int> sample_from(ParryChain const& c, int start, std::size_t length,
                             std::mt19937_64& g)
{
    std::vector<int> path;
    path.reserve(length);
    int s = start;
    for (std::size_t k = 0; k < length; k++) {
        path.push_back(s);
        if (k + 1 < length)
            s = sample_categorical(c.P_num[s], g);
    }
    return path;
}

std::vector<int> sample_path(ParryChain const& c, std::size_t length, std::mt19937_64& g)
{
    if (length == 0)
        fail(ErrorKind::internal, "path length must be positive");
    std::vector<std::pair<int, double>> init;
    for (int I = 0; I < c.size(); I++)
        init.emplace_back(I, c.p_num[I]);
    int s = sample_categorical(init, g);
    return sample_from(c, s, length, g);
}

std::vector<int> sample_path(ParryChain const& c, std::size_t length, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    return sample_path(c, length, g);
}

} // namespace pisot
