#ifndef PISOT_TOOLS_LAB_CLI_HPP
#define PISOT_TOOLS_LAB_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace pisot::cli {

using Json = nlohmann::ordered_json;

constexpr char const* kSchema = "pisot-lab/1";

/* -1 in depth, samples and the simulate sizes selects the command default. */
struct JobConfig {
    std::string command;
    std::string sub;
    int depth = -1;
    int levels = -1;           /* i_max for translation sets */
    int samples = -1;
    std::uint64_t seed = 1;
    int precision_bits = 64;
    std::string out;
    std::string format;
    int threads = 0;
    int resolution = 512;
    int kmax = 6;
    double region_scale = 1.0;
    int garsia_trials = 10000;
    int pairs = 1000;
    int horizon = 20000;
    int tau_kmax = 20000;
    int bins = 20;
    int jmax = 400;
    int lshort = -1;           /* L for tau2 and s_j; -1 means N+1 */

    Json to_json() const;
    void apply(Json const& j);  /* keys as in to_json(); parse error on unknown keys */
};

/* Exit code per the ErrorKind convention; reports go to cfg.out or `out`. */
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

/* Report builders; artifacts other than the report are written only when
 * cfg.out is set. */
Json analyze(JobConfig const& cfg);
Json render(JobConfig const& cfg, std::string* image = nullptr);
Json tile(JobConfig const& cfg);
Json coincide(JobConfig const& cfg);
Json simulate(JobConfig const& cfg);

/* "@path" reads the file, otherwise the text itself. */
std::string load_substitution(std::string const& arg);

} // namespace pisot::cli

#endif
