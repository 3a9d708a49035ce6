#include "lab_cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "pisot/analysis.hpp"
#include "pisot/error.hpp"
#include "pisot/lab.hpp"
#include "pisot/tiling.hpp"

namespace pisot::cli {

namespace {

Json zj(mpz_class const& z)
{
    if (z.fits_slong_p())
        return z.get_si();
    return z.get_str();
}

Json matrix_json(IntMatrix const& m)
{
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); i++) {
        Json r = Json::array();
        for (int j = 0; j < m.cols(); j++)
            r.push_back(zj(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

Json word_json(Word const& w, int n) { return format_word(w, n); }

Json header(JobConfig const& cfg)
{
    Json j;
    j["schema"] = kSchema;
    j["version"] = PISOT_VERSION;
    j["command"] = cfg.command;
    j["config"] = cfg.to_json();
    j["seeds"] = {{"master", cfg.seed}, {"generator", kGeneratorName}};
    return j;
}

LabOptions lab_options(JobConfig const& cfg)
{
    LabOptions o;
    o.precision_bits = cfg.precision_bits;
    o.i_max = cfg.levels;
    return o;
}

void write_file(std::string const& dir, std::string const& name, std::string const& data)
{
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f)
        fail(ErrorKind::parse, "cannot write " + name + " in " + dir);
    f << data;
}

std::string dump(Json const& j) { return j.dump(2) + "\n"; }

void require_format(JobConfig const& cfg, std::initializer_list<char const*> allowed)
{
    for (auto f : allowed)
        if (cfg.format == f)
            return;
    fail(ErrorKind::parse, "format '" + cfg.format + "' not available for " + cfg.command);
}

std::string one_line(JobConfig const& cfg)
{
    Json j = header(cfg);
    return j.dump();
}

Json places_json(PlaceSystem const& ps)
{
    Json a = Json::array();
    for (size_t i = 0; i < ps.places.size(); i++) {
        Place const& pl = ps.places[i];
        Json p;
        if (pl.kind == PlaceKind::finite) {
            FinitePlace const& f = ps.fin[pl.fin];
            p["kind"] = "finite";
            p["p"] = zj(f.ideal.p());
            p["q"] = zj(f.q);
            p["nu"] = f.nu;
            p["e"] = f.ideal.e();
            p["f"] = f.ideal.f();
        } else {
            p["kind"] = pl.kind == PlaceKind::real ? "real" : "complex";
            p["root"] = pl.root;
        }
        p["contraction"] = ps.contraction(static_cast<int>(i));
        a.push_back(p);
    }
    return a;
}

Json fixed_point_json(Substitution const& s)
{
    FixedPointWindow w = fixed_point_window(s, 1);
    return {{"u_left", w.u_left + 1}, {"u0", w.u0 + 1}, {"q", w.q}, {"q_left", w.q_left}};
}

} // namespace

Json JobConfig::to_json() const
{
    return Json{{"command", command},
                {"sub", sub},
                {"depth", depth},
                {"levels", levels},
                {"samples", samples},
                {"seed", seed},
                {"precision_bits", precision_bits},
                {"out", out},
                {"format", format},
                {"threads", threads},
                {"resolution", resolution},
                {"kmax", kmax},
                {"region_scale", region_scale},
                {"garsia_trials", garsia_trials},
                {"pairs", pairs},
                {"horizon", horizon},
                {"tau_kmax", tau_kmax},
                {"bins", bins},
                {"jmax", jmax},
                {"lshort", lshort}};
}

void JobConfig::apply(Json const& j)
{
    if (!j.is_object())
        fail(ErrorKind::parse, "config must be a JSON object");
    try {
        for (auto const& [k, v] : j.items()) {
            if (k == "sub")
                sub = v.get<std::string>();
            else if (k == "depth")
                depth = v.get<int>();
            else if (k == "levels")
                levels = v.get<int>();
            else if (k == "samples")
                samples = v.get<int>();
            else if (k == "seed")
                seed = v.get<std::uint64_t>();
            else if (k == "precision_bits")
                precision_bits = v.get<int>();
            else if (k == "out")
                out = v.get<std::string>();
            else if (k == "format")
                format = v.get<std::string>();
            else if (k == "threads")
                threads = v.get<int>();
            else if (k == "resolution")
                resolution = v.get<int>();
            else if (k == "kmax")
                kmax = v.get<int>();
            else if (k == "region_scale")
                region_scale = v.get<double>();
            else if (k == "garsia_trials")
                garsia_trials = v.get<int>();
            else if (k == "pairs")
                pairs = v.get<int>();
            else if (k == "horizon")
                horizon = v.get<int>();
            else if (k == "tau_kmax")
                tau_kmax = v.get<int>();
            else if (k == "bins")
                bins = v.get<int>();
            else if (k == "jmax")
                jmax = v.get<int>();
            else if (k == "lshort")
                lshort = v.get<int>();
            else if (k != "command")
                fail(ErrorKind::parse, "unknown config key '" + k + "'");
        }
    } catch (Json::exception const& e) {
        fail(ErrorKind::parse, std::string("config: ") + e.what());
    }
}

std::string load_substitution(std::string const& arg)
{
    if (arg.empty())
        fail(ErrorKind::parse, "--sub is required");
    if (arg[0] != '@')
        return arg;
    std::ifstream f(arg.substr(1));
    if (!f)
        fail(ErrorKind::parse, "cannot read " + arg.substr(1));
    std::stringstream ss;
    ss << f.rdbuf();
    std::string s = ss.str();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    return s;
}

Json analyze(JobConfig const& cfg)
{
    require_format(cfg, {"json"});
    std::string text = load_substitution(cfg.sub);
    Lab L = build_lab(text, lab_options(cfg));
    Json j = header(cfg);
    int n = L.s.size();
    j["substitution"] = L.s.to_string();
    j["fixed_point"] = fixed_point_json(L.s);
    j["alphabet"] = n;
    j["incidence"] = matrix_json(L.M);
    Json chi = Json::array();
    for (auto const& c : L.chi)
        chi.push_back(zj(c));
    j["char_poly"] = {{"text", to_string(L.chi)}, {"coeffs", chi}};
    j["irreducible"] = true;
    j["pisot"] = true;
    Json roots = Json::array();
    for (auto const& r : L.K->roots())
        roots.push_back({{"re", r.center.real()}, {"im", r.center.imag()}, {"radius", r.radius},
                         {"modulus", r.modulus()}, {"real", r.real}});
    j["roots"] = roots;
    j["det"] = zj(L.M.det());
    j["places"] = places_json(L.ps);
    j["primitivity_N"] = L.prim.N;

    Json states = Json::array();
    for (auto const& s : L.a.states)
        states.push_back({{"id", s.id}, {"source", s.source + 1}, {"prefix", word_json(s.prefix, n)},
                          {"core", s.core + 1}, {"suffix", word_json(s.suffix, n)}});
    j["automaton"] = {{"D", L.a.size()}, {"states", states}, {"A", matrix_json(L.a.A)},
                      {"A_N_plus_1_positive", verify_primitive_A(L.a.A, L.prim.N)}};
    Json edges = Json::array();
    for (int I = 0; I < L.a.size(); I++)
        for (int J : L.a.succ[I])
            edges.push_back({I, J});
    j["automaton"]["edges"] = edges;

    Json u = Json::array(), v = Json::array();
    for (auto const& x : L.e.u)
        u.push_back(x.to_string());
    for (auto const& x : L.e.v)
        v.push_back(x.to_string());
    j["eigen"] = {{"u", u}, {"v", v}, {"c", zj(L.e.c)}};

    Json p = Json::array(), P = Json::array();
    for (int I = 0; I < L.chain.size(); I++) {
        p.push_back({{"exact", L.chain.p[I].to_string()}, {"value", L.chain.p_num[I]}});
        Json row = Json::array();
        for (size_t k = 0; k < L.chain.P[I].size(); k++)
            row.push_back({{"to", L.chain.P[I][k].first},
                           {"exact", L.chain.P[I][k].second.to_string()},
                           {"value", L.chain.P_num[I][k].second}});
        P.push_back(row);
    }
    j["parry"] = {{"pairing", L.chain.pairing.to_string()}, {"p", p}, {"P", P},
                  {"stationary", L.chain.stationary()}, {"stochastic", L.chain.stochastic()}};

    SpectralTable tab(L.lv);
    IntMatrix Ak = L.a.A;
    double worst = 0.0;
    int kmax = 25;
    for (int k = 1; k <= kmax; k++) {
        for (int I = 0; I < L.a.size(); I++)
            for (int J = 0; J < L.a.size(); J++) {
                auto e = tab.entry(Ak, k, I, J);
                worst = std::max(worst, std::abs(e.exact.get_d() - e.spectral));
            }
        Ak = Ak * L.a.A;
    }
    j["spectral_check"] = {{"k_max", kmax}, {"max_abs_error", worst}, {"pass", worst < 0.5}};
    j["translation_set"] = {{"Z0_items", L.Z0.items.size()}, {"i_max", L.Z0.i_max}};
    return j;
}

Json render(JobConfig const& cfg, std::string* image)
{
    if (cfg.format.empty())
        fail(ErrorKind::internal, "format not resolved");
    require_format(cfg, {"svg", "ppm"});
    Lab L = build_lab(load_substitution(cfg.sub), lab_options(cfg));
    int m = cfg.depth;
    if (m < 0)
        fail(ErrorKind::parse, "depth must be nonnegative");
    if (m > L.fr->depth_cap())
        fail(ErrorKind::cap, "depth " + std::to_string(m) + " exceeds the cap " +
                                 std::to_string(L.fr->depth_cap()));
    std::vector<PointCloud const*> layers;
    for (int a = 0; a < L.s.size(); a++)
        layers.push_back(&L.fr->cloud(a, m));

    ProjectionSpec spec;
    spec.width = spec.height = cfg.resolution;
    std::vector<int> reals, complexes;
    for (size_t i = 0; i < L.ps.places.size(); i++) {
        auto k = L.ps.places[i].kind;
        if (k == PlaceKind::real)
            reals.push_back(static_cast<int>(i));
        else if (k == PlaceKind::complex)
            complexes.push_back(static_cast<int>(i));
    }
    if (!complexes.empty()) {
        spec.mode = ProjectionSpec::Mode::complex_place;
        spec.place_x = complexes[0];
    } else if (reals.size() >= 2) {
        spec.mode = ProjectionSpec::Mode::real_pair;
        spec.place_x = reals[0];
        spec.place_y = reals[1];
    } else {
        spec.mode = ProjectionSpec::Mode::real_line;
        spec.place_x = reals.at(0);
        spec.height = std::max(16, cfg.resolution / 8);
    }
    Projected pr = project(*L.fr, layers, spec);

    std::string meta = one_line(cfg);
    std::string img;
    if (cfg.format == "svg") {
        img = write_svg(pr);
        auto nl = img.find('\n');
        img.insert(nl + 1, "<!-- " + meta + " -->\n");
    } else {
        img = write_ppm(pr);
        img.insert(3, "# " + meta + "\n");
    }
    std::string csv = "# " + meta + "\n" + write_csv(*L.fr, layers);

    Json j = header(cfg);
    j["substitution"] = L.s.to_string();
    j["fixed_point"] = fixed_point_json(L.s);
    j["depth"] = m;
    Json counts = Json::array();
    for (auto const* c : layers)
        counts.push_back({{"letter", c->letter + 1}, {"distinct", c->points.size()}, {"paths", c->count()}});
    j["layers"] = counts;
    j["box"] = {pr.x0, pr.y0, pr.x1, pr.y1};
    j["width"] = pr.width;
    j["height"] = pr.height;
    j["boundary_fraction"] = boundary_fraction(pr);
    if (!cfg.out.empty()) {
        write_file(cfg.out, "render." + cfg.format, img);
        write_file(cfg.out, "render.csv", csv);
        j["artifacts"] = {"render." + cfg.format, "render.csv", "render.json"};
    }
    if (image)
        *image = std::move(img);
    return j;
}

Json tile(JobConfig const& cfg)
{
    require_format(cfg, {"json", "csv"});
    Lab L = build_lab(load_substitution(cfg.sub), lab_options(cfg));
    Tiler T(*L.fr);
    Region region = T.sampling_region();
    for (auto& r : region.radius)
        r *= cfg.region_scale;
    PatchOptions po;
    po.i_max = cfg.levels;
    Patch patch = translation_patch(*L.fr, region, po);
    std::vector<int> depths{cfg.depth, cfg.depth + 2, cfg.depth + 4};
    TilingStats st = T.tiling_statistics(L.chain, cfg.samples, depths, cfg.seed, 40, cfg.threads, &patch);

    Json j = header(cfg);
    Json warnings = Json::array();
    j["substitution"] = L.s.to_string();
    j["fixed_point"] = fixed_point_json(L.s);
    Json hist = Json::array();
    for (size_t k = 0; k < depths.size(); k++) {
        Json c = Json::object();
        for (auto const& [count, num] : st.histogram[k])
            c[std::to_string(count)] = num;
        hist.push_back({{"depth", depths[k]}, {"counts", c}});
    }
    j["histogram"] = hist;
    j["samples"] = st.samples;
    j["path_length"] = st.path_length;
    j["count1"] = st.count1;
    j["count1_fraction"] = st.count1_fraction();
    j["boundary_unstable"] = st.unstable;
    j["stable_defects"] = st.stable_defects;
    j["resolve_depth"] = st.resolve_depth;
    int rerun = 0;
    for (int r : st.resolved)
        rerun += r >= 0;
    j["resolved_samples"] = rerun;
    Json radii = Json::array();
    for (double r : region.radius)
        radii.push_back(r);
    j["patch"] = {{"items", patch.items.size()}, {"i_max", patch.i_max}, {"region_radius", radii}};

    Json delone = Json::array();
    for (int a = 0; a < L.s.size(); a++) {
        try {
            DeloneRadii d = delone_radii(*L.fr, patch, a);
            delone.push_back({{"letter", a + 1}, {"r1", d.r1}, {"r2", d.r2}, {"items", d.items}, {"probes", d.probes}});
        } catch (Error const& e) {
            if (e.kind() != ErrorKind::hypothesis)
                throw;
            delone.push_back({{"letter", a + 1}, {"r1", nullptr}, {"r2", nullptr}});
            warnings.push_back("letter " + std::to_string(a + 1) + ": " + e.what());
        }
    }
    j["delone"] = delone;
    if (st.count1_fraction() < 0.99)
        warnings.push_back("count-1 fraction below 0.99; region may be too small for the sampled points");
    if (patch.items.size() < 2 * static_cast<size_t>(L.s.size()))
        warnings.push_back("small patch: " + std::to_string(patch.items.size()) + " items");
    j["warnings"] = warnings;

    if (!cfg.out.empty()) {
        std::string body;
        if (cfg.format == "json") {
            Json items = Json::array();
            for (auto const& it : patch.items) {
                Json g = Json::array();
                for (auto const& b : it.gamma.arch)
                    g.push_back({b.mid.real(), b.mid.imag()});
                items.push_back({{"base", it.w.base}, {"level", it.w.level}, {"letter", it.letter + 1},
                                 {"x", it.x.to_string()}, {"gamma", g}});
            }
            Json pj = header(cfg);
            pj["items"] = items;
            body = dump(pj);
        } else {
            std::ostringstream os;
            os << "# " << one_line(cfg) << "\nletter,level";
            for (int l = 0; l < L.s.size(); l++)
                os << ",w" << l;
            os << ",x\n";
            for (auto const& it : patch.items) {
                os << it.letter + 1 << ',' << it.w.level;
                for (auto c : it.w.base)
                    os << ',' << c;
                os << ",\"" << it.x.to_string() << "\"\n";
            }
            body = os.str();
        }
        write_file(cfg.out, "patch." + cfg.format, body);
        j["artifacts"] = {"tile.json", "patch." + cfg.format};
    }
    return j;
}

Json coincide(JobConfig const& cfg)
{
    require_format(cfg, {"json"});
    Lab L = build_lab(load_substitution(cfg.sub), lab_options(cfg));
    if (cfg.kmax < 0)
        fail(ErrorKind::parse, "kmax must be nonnegative");
    auto ws = strong_coincidence(L.s, cfg.kmax);
    Json j = header(cfg);
    j["substitution"] = L.s.to_string();
    j["fixed_point"] = fixed_point_json(L.s);
    Json pairs = Json::array();
    bool all = true;
    int kworst = 0;
    for (auto const& w : ws) {
        Json p{{"a", w.a + 1}, {"b", w.b + 1}, {"resolved", w.resolved}};
        if (w.resolved) {
            p["k"] = w.k;
            p["letter"] = w.letter + 1;
            p["prefix"] = w.prefix;
            p["pos_a"] = w.pos_a;
            p["pos_b"] = w.pos_b;
            kworst = std::max(kworst, w.k);
        } else {
            p["status"] = "unresolved at k_max = " + std::to_string(cfg.kmax);
        }
        all = all && w.resolved;
        pairs.push_back(p);
    }
    j["pairs"] = pairs;
    j["all_resolved"] = all;
    j["max_k"] = kworst;
    if (cfg.kmax == 0)
        j["notice"] = "k_max = 0: no level searched, cap reached immediately";
    return j;
}

Json simulate(JobConfig const& cfg)
{
    require_format(cfg, {"json"});
    std::string text = load_substitution(cfg.sub);
    Substitution s0 = parse_substitution(text);
    int power = 1;
    bool has_fixed = false;
    for (int a = 0; a < s0.size(); a++)
        has_fixed = has_fixed || s0.image(a).front() == a;
    if (!has_fixed) {
        power = fixed_point_window(s0, 1).q;
        text = s0.power(power).to_string();
    }
    Lab L = build_lab(text, lab_options(cfg));
    Fractal const& fr = *L.fr;
    auto cb = coefficient_bound(fr, lattice_vectors(L.Z0));
    auto cyl = special_cylinder(fr, cb.M, L.prim.N);
    int Ls = cfg.lshort < 0 ? L.prim.N + 1 : cfg.lshort;
    auto sc = plain_cylinder(fr, L.prim.N, Ls);

    Json j = header(cfg);
    j["seeds"]["reference_path"] = cfg.seed + 1;
    j["substitution"] = L.s.to_string();
    j["fixed_point"] = fixed_point_json(s0);
    j["analysis_power"] = power;
    j["field"] = {{"char_poly", to_string(L.chi)}, {"alpha", L.K->perron().center.real()},
                  {"places", places_json(L.ps)}};
    j["M"] = {{"value", zj(cb.M)}, {"prefix_part", zj(cb.prefix_part)}, {"w_part", zj(cb.w_part)}};
    j["N"] = L.prim.N;
    j["cylinder"] = {{"I", cyl.I}, {"u0", cyl.u0 + 1}, {"L", cyl.L}, {"lhs", cyl.lhs}};
    Json radii = Json::array();
    for (int d = 0; d <= 4; d++) {
        auto r = neighborhood_radii(fr, cb.M, d);
        radii.push_back({{"d", d}, {"R", r.lo}});
    }
    j["radii"] = radii;

    auto gf = garsia_fuzz(fr, cfg.garsia_trials, 10, 5, cfg.seed, cfg.threads);
    j["garsia"] = {{"trials", gf.trials}, {"violations", gf.violations}, {"worst_ratio", gf.worst_ratio},
                   {"max_degree", 10}, {"max_coeff", 5}};

    auto ec = either_corpus(fr, L.chain, cb.M, cyl, L.Z0, cfg.pairs, 24, cfg.seed, cfg.threads);
    j["either"] = {{"pairs", ec.pairs},
                   {"verdicts",
                    {{"poly-vanishes", ec.poly_vanishes},
                     {"escapes-neighborhood", ec.escapes},
                     {"indeterminate", ec.indeterminate},
                     {"VIOLATION", ec.violations}}},
                   {"indeterminate_rate", ec.indeterminate_rate()},
                   {"vanishing_cases", {{"I", ec.case1}, {"II_or_III", ec.case_other}}},
                   {"coincidence_violations", ec.coincidence_violations}};

    auto ex = tau2_distribution(L.chain, sc, cfg.tau_kmax);
    double total = ex.tail;
    for (double x : ex.pmf)
        total += x;
    auto em = tau2_sample(L.chain, sc, cfg.samples, cfg.horizon, cfg.seed, cfg.threads);
    auto cmp = tau2_compare(ex, em, cfg.bins);
    Json head = Json::array();
    for (int k = 0; k < std::min<int>(50, static_cast<int>(ex.pmf.size())); k++)
        head.push_back(ex.pmf[k]);
    j["tau2"] = {{"L", Ls},
                 {"m_cyl", ex.m_cyl},
                 {"k_max", cfg.tau_kmax},
                 {"tail", ex.tail},
                 {"sum_minus_one", total - 1.0},
                 {"exact_pmf_head", head},
                 {"bins", cmp.edges},
                 {"exact_binned", cmp.exact},
                 {"empirical_binned", cmp.empirical},
                 {"tv", cmp.tv},
                 {"samples", em.samples},
                 {"horizon", cfg.horizon},
                 {"not_found", em.not_found},
                 {"not_found_rate", double(em.not_found) / std::max(1, em.samples)}};

    auto es = sample_entry_series(L.chain, sc, cfg.jmax, 2 * (L.prim.N + 1), cfg.seed);
    auto y = sample_path(L.chain, static_cast<std::size_t>(es.N0) + 1, cfg.seed + 1);
    auto z = reference_path(L.a, sc, y, es.N0);
    auto ss = b_counts_and_s(L.chain, L.a, sc, es, cfg.jmax, 12, z);
    Json bs = Json::array();
    for (size_t k = 0; k < std::min<size_t>(13, ss.b.size()); k++)
        bs.push_back(ss.b[k].get_str());
    double mean_gap = es.times.size() > 1
                          ? double(es.times.back() - es.times.front()) / double(es.times.size() - 1)
                          : 0.0;
    j["s_series"] = {{"L", Ls},
                     {"N0", es.N0},
                     {"entries", es.times.size()},
                     {"last_entry", es.times.empty() ? 0 : es.times.back()},
                     {"mean_gap", mean_gap},
                     {"inverse_m_cyl", 1.0 / ex.m_cyl},
                     {"b_head", bs},
                     {"dp_checked", ss.dp_checked.size()},
                     {"E", ss.E},
                     {"values", ss.ratio},
                     {"ratio", ss.ratio.empty() ? 0.0 : ss.ratio.back()},
                     {"gap", ss.final_gap()}};
    return j;
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    JobConfig flags;
    std::string config_path;
    CLI::App app{"pisot-lab: substitution tilings, Rauzy fractals and ergodic checks"};
    app.set_version_flag("--version", std::string(PISOT_VERSION));
    app.require_subcommand(1);

    struct Opt {
        CLI::Option* o;
        std::string key;
    };
    std::vector<Opt> opts;
    std::vector<CLI::App*> subs;
    for (auto [name, help] : {std::pair{"analyze", "field, automaton, Parry and spectral report"},
                              std::pair{"render", "subtile clouds as SVG or PPM plus CSV"},
                              std::pair{"tile", "covering statistics, patch export, Delone radii"},
                              std::pair{"coincide", "strong coincidence witnesses"},
                              std::pair{"simulate", "Garsia, either, tau2 and s_j checks"}}) {
        CLI::App* s = app.add_subcommand(name, help);
        subs.push_back(s);
        auto add = [&](char const* flag, auto& field, char const* key, char const* h) {
            opts.push_back({s->add_option(flag, field, h), key});
        };
        add("--sub", flags.sub, "sub", "substitution text, or @file");
        add("--depth", flags.depth, "depth", "cloud depth m (render 16, tile 14)");
        add("--levels", flags.levels, "levels", "level cap i_max for translation sets");
        add("--samples", flags.samples, "samples", "Monte Carlo samples (tile 1000, simulate 100000)");
        add("--seed", flags.seed, "seed", "master seed");
        add("--precision-bits", flags.precision_bits, "precision_bits", "starting root precision");
        add("--out", flags.out, "out", "output directory; stdout when absent");
        add("--format", flags.format, "format", "json|csv|svg|ppm");
        add("--threads", flags.threads, "threads", "worker threads, 0 = all cores");
        add("--resolution", flags.resolution, "resolution", "render width in pixels");
        add("--kmax", flags.kmax, "kmax", "coincide: largest power searched");
        add("--region-scale", flags.region_scale, "region_scale", "tile: patch region multiplier");
        add("--garsia-trials", flags.garsia_trials, "garsia_trials", "simulate: random polynomials");
        add("--pairs", flags.pairs, "pairs", "simulate: co-visiting pairs");
        add("--horizon", flags.horizon, "horizon", "simulate: tau2 horizon");
        add("--tau-kmax", flags.tau_kmax, "tau_kmax", "simulate: exact tau2 range");
        add("--bins", flags.bins, "bins", "simulate: tau2 comparison bins");
        add("--jmax", flags.jmax, "jmax", "simulate: entries in the s_j series");
        add("--lshort", flags.lshort, "lshort", "simulate: L for tau2 and s_j (N+1 when negative)");
        s->add_option("--config", config_path, "JSON config overriding defaults");
    }

    std::vector<char const*> argv{"pisot-lab"};
    for (auto const& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::ParseError const& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<CLI::CallForVersion const*>(&e) ? std::string(PISOT_VERSION) + "\n"
                                                                 : app.help());
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::parse);
    }

    try {
        JobConfig cfg;
        for (auto* s : subs)
            if (s->parsed())
                cfg.command = s->get_name();
        Json set = Json::object();
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f)
                fail(ErrorKind::parse, "cannot read " + config_path);
            Json c;
            try {
                c = Json::parse(f);
            } catch (Json::exception const& e) {
                fail(ErrorKind::parse, std::string("config: ") + e.what());
            }
            cfg.apply(c);
        }
        Json given = flags.to_json();
        for (auto const& o : opts)
            if (o.o->count() > 0)
                set[o.key] = given[o.key];
        cfg.apply(set);

        bool img = cfg.command == "render";
        if (cfg.format.empty())
            cfg.format = img ? "svg" : "json";
        if (cfg.depth < 0 && cfg.command != "tile")
            cfg.depth = 16;
        if (cfg.depth < 0)
            cfg.depth = 14;
        if (cfg.samples < 0)
            cfg.samples = cfg.command == "simulate" ? 100000 : 1000;
        if (cfg.samples <= 0 || cfg.resolution <= 0 || cfg.garsia_trials <= 0 || cfg.pairs <= 0 ||
            cfg.horizon < 0 || cfg.tau_kmax < 0 || cfg.bins <= 0 || cfg.jmax <= 0)
            fail(ErrorKind::parse, "caps and sample counts must be positive");

        Json report;
        std::string image;
        if (cfg.command == "analyze")
            report = analyze(cfg);
        else if (cfg.command == "render")
            report = render(cfg, &image);
        else if (cfg.command == "tile")
            report = tile(cfg);
        else if (cfg.command == "coincide")
            report = coincide(cfg);
        else
            report = simulate(cfg);

        if (cfg.out.empty()) {
            if (img)
                out << image;
            else
                out << dump(report);
        } else {
            write_file(cfg.out, cfg.command + ".json", dump(report));
            out << (std::filesystem::path(cfg.out) / (cfg.command + ".json")).string() << "\n";
        }
        return 0;
    } catch (Error const& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ErrorKind::internal);
    }
}

} // namespace pisot::cli
