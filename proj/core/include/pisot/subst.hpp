#ifndef PISOT_SUBST_HPP
#define PISOT_SUBST_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pisot/intmat.hpp"

namespace pisot {

/* Letters are stored 0-based; text and reports use 1..n. */
using Word = std::vector<int>;

constexpr std::size_t kDefaultWordCap = 10000000;

class Substitution {
    std::vector<Word> images_;

  public:
    Substitution() = default;
    explicit Substitution(std::vector<Word> images);

    int size() const { return static_cast<int>(images_.size()); }
    Word const& image(int a) const { return images_[a]; }
    std::vector<Word> const& images() const { return images_; }

    Word apply(Word const& w) const;
    Substitution power(int k) const;
    std::string to_string() const;
    bool operator==(Substitution const&) const = default;
};

Substitution parse_substitution(std::string_view text);
std::string format_word(Word const& w, int n);

IntVector abelianize(Word const& w, int n);
IntMatrix incidence_matrix(Substitution const& s);
Word iterate_word(Substitution const& s, Word const& w, int k,
                  std::size_t cap = kDefaultWordCap);

/* |sigma^k(b)| for every letter b, exact. */
std::vector<mpz_class> image_lengths(Substitution const& s, int k);

struct Primitivity {
    bool primitive = false;
    int N = 0;
};
Primitivity is_primitive(Substitution const& s, int N_max);

struct PSRep {
    int source;
    Word prefix;
    int core;
    Word suffix;
    int power;
};
std::vector<PSRep> prefix_suffix_reps(Substitution const& s, int k, int target,
                                      std::size_t cap = kDefaultWordCap);

/* Streams the letters of sigma^k(b) together with the abelianized prefix
 * in front of each one, without materializing the word. */
void scan_positions(Substitution const& s, int b, int k, std::size_t cap,
                    std::function<void(IntVector const&, int)> const& fn);

struct FixedPointWindow {
    int u_left;  /* u_{-1} */
    int u0;
    int q;       /* smallest power with sigma^q(u0) starting with u0 */
    int q_left;  /* smallest power with sigma^q(u_{-1}) ending with u_{-1} */
    Word left;   /* u_{-radius} .. u_{-1} */
    Word right;  /* u_0 .. u_{radius-1} */
};
FixedPointWindow fixed_point_window(Substitution const& s, int radius, int power_cap = 0);

/* Two-letter words occurring in some sigma^k(a). */
std::vector<std::pair<int, int>> legal_pairs(Substitution const& s);

struct CoincidenceWitness {
    int a;
    int b;
    bool resolved = false;
    int k = 0;
    int letter = -1;
    IntVector prefix;
    std::size_t pos_a = 0;
    std::size_t pos_b = 0;
};
std::vector<CoincidenceWitness> strong_coincidence(Substitution const& s, int k_max,
                                                   std::size_t cap = kDefaultWordCap);

} // namespace pisot

#endif
