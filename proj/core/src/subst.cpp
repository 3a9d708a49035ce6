#include "pisot/subst.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pisot/error.hpp"

namespace pisot {

Substitution::Substitution(std::vector<Word> images) : images_(std::move(images))
{
    int n = size();
    if (n < 2)
        fail(ErrorKind::parse, "alphabet must have at least 2 letters");
    for (auto const& w : images_) {
        if (w.empty())
            fail(ErrorKind::parse, "empty image");
        for (int x : w)
            if (x < 0 || x >= n)
                fail(ErrorKind::parse, "letter out of range");
    }
}

Word Substitution::apply(Word const& w) const
{
    Word r;
    for (int x : w)
        r.insert(r.end(), images_[x].begin(), images_[x].end());
    return r;
}

Substitution Substitution::power(int k) const
{
    std::vector<Word> imgs;
    for (int a = 0; a < size(); a++)
        imgs.push_back(iterate_word(*this, Word{a}, k));
    return Substitution(std::move(imgs));
}

std::string format_word(Word const& w, int n)
{
    std::string r;
    for (size_t i = 0; i < w.size(); i++) {
        if (n >= 10 && i)
            r += ',';
        r += std::to_string(w[i] + 1);
    }
    return r;
}

std::string Substitution::to_string() const
{
    std::string r;
    for (int a = 0; a < size(); a++) {
        if (a)
            r += ';';
        r += std::to_string(a + 1) + "->" + format_word(images_[a], size());
    }
    return r;
}

namespace {

long parse_number(std::string const& tok)
{
    if (tok.empty() || tok.size() > 6)
        fail(ErrorKind::parse, "syntax error: bad letter '" + tok + "'");
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            fail(ErrorKind::parse, "syntax error: bad letter '" + tok + "'");
    return std::stol(tok);
}

} // namespace

Substitution parse_substitution(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;

    std::vector<std::pair<std::string, std::string>> rules;
    std::stringstream ss(s);
    std::string rule;
    while (std::getline(ss, rule, ';')) {
        if (rule.empty())
            continue;
        auto arrow = rule.find("->");
        if (arrow == std::string::npos)
            fail(ErrorKind::parse, "syntax error: missing '->' in '" + rule + "'");
        rules.emplace_back(rule.substr(0, arrow), rule.substr(arrow + 2));
    }
    if (rules.empty())
        fail(ErrorKind::parse, "syntax error: no rules");

    bool comma = false;
    for (auto const& [h, w] : rules)
        if (w.find(',') != std::string::npos || parse_number(h) > 9)
            comma = true;

    std::map<long, std::vector<long>> parsed;
    long n = 0;
    for (auto const& [h, w] : rules) {
        long head = parse_number(h);
        if (head < 1)
            fail(ErrorKind::parse, "letter out of range: " + h);
        if (parsed.count(head))
            fail(ErrorKind::parse, "syntax error: duplicate rule for letter " + h);
        std::vector<long> img;
        if (w.empty())
            fail(ErrorKind::parse, "empty image for letter " + h);
        if (comma) {
            std::stringstream ws(w);
            std::string tok;
            while (std::getline(ws, tok, ','))
                img.push_back(parse_number(tok));
            if (!w.empty() && w.back() == ',')
                fail(ErrorKind::parse, "syntax error: trailing comma");
        } else {
            for (char c : w)
                img.push_back(parse_number(std::string(1, c)));
        }
        for (long x : img) {
            if (x < 1)
                fail(ErrorKind::parse, "letter out of range: " + std::to_string(x));
            n = std::max(n, x);
        }
        n = std::max(n, head);
        parsed[head] = std::move(img);
    }
    if (n > 4096)
        fail(ErrorKind::parse, "letter out of range: alphabet too large");
    std::vector<Word> images(n);
    for (long a = 1; a <= n; a++) {
        auto it = parsed.find(a);
        if (it == parsed.end())
            fail(ErrorKind::parse, "missing rule for letter " + std::to_string(a));
        for (long x : it->second)
            images[a - 1].push_back(static_cast<int>(x - 1));
    }
    return Substitution(std::move(images));
}

IntVector abelianize(Word const& w, int n)
{
    IntVector v(n, 0);
    for (int x : w)
        v[x]++;
    return v;
}

IntMatrix incidence_matrix(Substitution const& s)
{
    int n = s.size();
    IntMatrix m(n, n);
    for (int j = 0; j < n; j++)
        for (int x : s.image(j))
            m(x, j) += 1;
    return m;
}

std::vector<mpz_class> image_lengths(Substitution const& s, int k)
{
    int n = s.size();
    IntMatrix mk = incidence_matrix(s).pow(k);
    std::vector<mpz_class> r(n);
    for (int j = 0; j < n; j++)
        for (int i = 0; i < n; i++)
            r[j] += mk(i, j);
    return r;
}

Word iterate_word(Substitution const& s, Word const& w, int k, std::size_t cap)
{
    Word cur = w;
    for (int step = 0; step < k; step++) {
        std::size_t len = 0;
        for (int x : cur) {
            len += s.image(x).size();
            if (len > cap)
                fail(ErrorKind::cap, "word length cap exceeded");
        }
        Word next;
        next.reserve(len);
        for (int x : cur)
            next.insert(next.end(), s.image(x).begin(), s.image(x).end());
        cur.swap(next);
    }
    return cur;
}

Primitivity is_primitive(Substitution const& s, int N_max)
{
    int n = s.size();
    std::vector<char> base(n * n, 0), cur;
    for (int j = 0; j < n; j++)
        for (int x : s.image(j))
            base[x * n + j] = 1;
    cur = base;
    for (int N = 1; N <= N_max; N++) {
        if (std::all_of(cur.begin(), cur.end(), [](char c) { return c != 0; }))
            return {true, N};
        std::vector<char> next(n * n, 0);
        for (int i = 0; i < n; i++)
            for (int k = 0; k < n; k++)
                if (cur[i * n + k])
                    for (int j = 0; j < n; j++)
                        if (base[k * n + j])
                            next[i * n + j] = 1;
        cur.swap(next);
    }
    return {false, 0};
}

std::vector<PSRep> prefix_suffix_reps(Substitution const& s, int k, int target, std::size_t cap)
{
    if (k < 1)
        fail(ErrorKind::internal, "prefix_suffix_reps needs k >= 1");
    std::vector<PSRep> out;
    for (int b = 0; b < s.size(); b++) {
        Word w = iterate_word(s, Word{b}, k, cap);
        for (size_t i = 0; i < w.size(); i++)
            if (w[i] == target)
                out.push_back({b, Word(w.begin(), w.begin() + i), target,
                               Word(w.begin() + i + 1, w.end()), k});
    }
    return out;
}

void scan_positions(Substitution const& s, int b, int k, std::size_t cap,
                    std::function<void(IntVector const&, int)> const& fn)
{
    auto lens = image_lengths(s, k);
    if (lens[b] > static_cast<unsigned long>(cap))
        fail(ErrorKind::cap, "word length cap exceeded");
    IntVector counts(s.size(), 0);
    /* explicit stack of (letter, remaining depth) */
    std::vector<std::pair<int, int>> stack{{b, k}};
    while (!stack.empty()) {
        auto [x, d] = stack.back();
        stack.pop_back();
        if (d == 0) {
            fn(counts, x);
            counts[x]++;
            continue;
        }
        Word const& img = s.image(x);
        for (auto it = img.rbegin(); it != img.rend(); ++it)
            stack.emplace_back(*it, d - 1);
    }
}

std::vector<std::pair<int, int>> legal_pairs(Substitution const& s)
{
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> todo;
    auto add = [&](int x, int y) {
        if (seen.insert({x, y}).second)
            todo.emplace_back(x, y);
    };
    for (int a = 0; a < s.size(); a++) {
        Word const& w = s.image(a);
        for (size_t i = 0; i + 1 < w.size(); i++)
            add(w[i], w[i + 1]);
    }
    while (!todo.empty()) {
        auto [x, y] = todo.back();
        todo.pop_back();
        Word w = s.apply(Word{x, y});
        for (size_t i = 0; i + 1 < w.size(); i++)
            add(w[i], w[i + 1]);
    }
    return {seen.begin(), seen.end()};
}

FixedPointWindow fixed_point_window(Substitution const& s, int radius, int power_cap)
{
    int n = s.size();
    if (power_cap <= 0)
        power_cap = n * n;
    auto legal = legal_pairs(s);
    std::set<std::pair<int, int>> legal_set(legal.begin(), legal.end());

    auto orbit_power = [&](int a, bool first) {
        int x = a;
        for (int q = 1; q <= power_cap; q++) {
            x = first ? s.image(x).front() : s.image(x).back();
            if (x == a)
                return q;
        }
        return 0;
    };

    /* right seed: smallest q, then smallest letter */
    std::vector<std::pair<int, int>> right;
    for (int a = 0; a < n; a++)
        if (int q = orbit_power(a, true))
            right.emplace_back(q, a);
    std::sort(right.begin(), right.end());
    std::vector<std::pair<int, int>> left;
    for (int b = 0; b < n; b++)
        if (int q = orbit_power(b, false))
            left.emplace_back(q, b);
    std::sort(left.begin(), left.end());

    for (auto [q, u0] : right)
        for (auto [ql, ul] : left) {
            if (!legal_set.count({ul, u0}))
                continue;
            FixedPointWindow fw{ul, u0, q, ql, {}, {}};
            int Q = std::lcm(q, ql);
            Substitution sq = s.power(Q);
            Word r{u0}, l{ul};
            while (static_cast<int>(r.size()) < radius)
                r = iterate_word(sq, r, 1);
            while (static_cast<int>(l.size()) < radius)
                l = iterate_word(sq, l, 1);
            fw.right.assign(r.begin(), r.begin() + std::min<size_t>(radius, r.size()));
            fw.left.assign(l.end() - std::min<size_t>(radius, l.size()), l.end());
            return fw;
        }
    fail(ErrorKind::cap, "no fixed point seed below power cap");
}

namespace {

struct VecHash {
    std::size_t operator()(IntVector const& v) const
    {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

std::vector<CoincidenceWitness> strong_coincidence(Substitution const& s, int k_max, std::size_t cap)
{
    int n = s.size();
    std::vector<CoincidenceWitness> out;
    for (int a = 0; a < n; a++)
        for (int b = a; b < n; b++)
            out.push_back({a, b});

    for (int k = 1; k <= k_max; k++) {
        bool pending = false;
        for (auto& w : out)
            pending |= !w.resolved;
        if (!pending)
            break;
        /* key = prefix vector followed by the letter; value = position */
        std::vector<std::unordered_map<IntVector, std::size_t, VecHash>> sets(n);
        std::vector<std::vector<IntVector>> ordered(n);
        for (int a = 0; a < n; a++) {
            std::size_t pos = 0;
            scan_positions(s, a, k, cap, [&](IntVector const& pre, int x) {
                IntVector key = pre;
                key.push_back(x);
                sets[a].emplace(key, pos);
                ordered[a].push_back(std::move(key));
                pos++;
            });
        }
        for (auto& w : out) {
            if (w.resolved)
                continue;
            /* first position in sigma^k(a) whose key also occurs in sigma^k(b) */
            for (std::size_t i = 0; i < ordered[w.a].size(); i++) {
                auto it = sets[w.b].find(ordered[w.a][i]);
                if (it == sets[w.b].end())
                    continue;
                IntVector key = ordered[w.a][i];
                w.resolved = true;
                w.k = k;
                w.letter = static_cast<int>(key.back());
                key.pop_back();
                w.prefix = key;
                w.pos_a = i;
                w.pos_b = it->second;
                break;
            }
        }
    }
    return out;
}

} // namespace pisot
