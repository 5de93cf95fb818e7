// vslab — command-line front end for the version-space laboratory.
//
// Subcommands mirror the library modules: classes (generators and files),
// measure (combinatorial and distribution-dependent complexity measures),
// simulate (learning processes), bound (closed-form evaluators), validate
// (Monte Carlo bound validation), lowerbound (adversarial constructions).
//
// Exit codes: 0 success, 2 parameter/parse error, 3 work budget exceeded,
// 4 validation verdict FAIL. Every seeded JSON output records the RNG id.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vslab/bounds.hpp"
#include "vslab/concept_core.hpp"
#include "vslab/errors.hpp"
#include "vslab/harness.hpp"
#include "vslab/learners.hpp"
#include "vslab/measures.hpp"
#include "vslab/noise.hpp"
#include "vslab/rng.hpp"
#include "vslab/version_space.hpp"

using namespace vslab;
using nlohmann::ordered_json;

namespace {

struct GlobalFlags {
    std::uint64_t seed = 0;
    int trials = 2000;
    std::string delta = "0.1";
    std::string out;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ParameterError(std::string(what) + ": '" + cell + "' is not an integer");
        }
    }
    if (out.empty()) throw ParameterError(std::string(what) + ": empty list");
    return out;
}

// "x:+,y:-" or "x:+1,y:-1" into a labeled sample.
LabeledSample parse_sample(const std::string& text) {
    LabeledSample sample;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        const auto colon = cell.find(':');
        if (colon == std::string::npos)
            throw ParameterError("sample: '" + cell + "' is not point:label");
        int point = 0;
        try {
            point = std::stoi(cell.substr(0, colon));
        } catch (const std::exception&) {
            throw ParameterError("sample: '" + cell + "' has a bad point index");
        }
        const std::string lab = cell.substr(colon + 1);
        int label = 0;
        if (lab == "+" || lab == "+1" || lab == "1")
            label = +1;
        else if (lab == "-" || lab == "-1")
            label = -1;
        else
            throw ParameterError("sample: label '" + lab + "' must be + or -");
        sample.push(point, label);
    }
    return sample;
}

Distribution resolve_dist(const ConceptClass& c, const std::string& inline_decimals,
                          const std::string& file) {
    if (!inline_decimals.empty() && !file.empty())
        throw ParameterError("give at most one of --dist and --dist-file");
    Distribution d;
    if (!file.empty())
        d = load_distribution(file);
    else if (!inline_decimals.empty()) {
        std::vector<std::string> decimals;
        std::istringstream in(inline_decimals);
        std::string cell;
        while (std::getline(in, cell, ',')) decimals.push_back(cell);
        d = Distribution::from_decimals(decimals);
    } else {
        d = Distribution::uniform(c.n());
    }
    if (d.n() != c.n())
        throw ParameterError("distribution has " + std::to_string(d.n()) + " masses but " +
                             c.name + " has " + std::to_string(c.n()) + " points");
    d.validate();
    return d;
}

const Hypothesis& resolve_target(const ConceptClass& c, int target) {
    if (target < 0 || target >= c.size())
        throw ParameterError("target index " + std::to_string(target) + " out of range for |C| = " +
                             std::to_string(c.size()));
    return c.hypotheses[target];
}

std::string labeling_string(const BitVec& pos) {
    std::string s;
    for (int i = 0; i < pos.size(); ++i) s += pos.get(i) ? '+' : '-';
    return s;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// Seeded run outputs: rng id and seed first, then the record's own fields.
void emit_seeded(std::uint64_t seed, const std::string& record_json) {
    ordered_json env;
    env["rng"] = rng_id();
    env["seed"] = seed;
    const ordered_json rec = ordered_json::parse(record_json);
    for (const auto& [key, value] : rec.items()) env[key] = value;
    emit(env);
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write '" + path + "'");
    out << body;
}

ordered_json measure_header(const char* measure, const ConceptClass& c) {
    ordered_json j;
    j["measure"] = measure;
    j["class"] = c.name;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vslab: version-space learning bounds laboratory"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--seed", g.seed, "master RNG seed (streams derive per trial)");
    app.add_option("--trials", g.trials, "Monte Carlo trial count")->check(CLI::PositiveNumber);
    app.add_option("--delta", g.delta, "confidence parameter, exact rational text");
    app.add_option("--out", g.out, "output path (or prefix for multi-file reports)");

    int exit_code = 0; // 4 is set by FAIL verdicts below

    // ---------------------------------------------------------------- classes
    auto* classes = app.add_subcommand("classes", "concept-class generators and files");
    classes->require_subcommand(1);

    auto* cls_list = classes->add_subcommand("list", "list generator descriptors");
    cls_list->fallthrough();
    cls_list->callback([] {
        std::cout << "thresholds(n)            n collinear points; the n+1 threshold labelings\n"
                  << "intervals(n)             n collinear points; all [i,j] intervals plus empty\n"
                  << "singletons(n)            n points; the n one-positive labelings\n"
                  << "star(k)                  k points; all-negative center plus k singletons\n"
                  << "powerset(n)              n points (n <= 20); every labeling\n"
                  << "conjunctions(p)          p boolean variables (p <= 12); literal conjunctions\n"
                  << "axis_rectangles(WxH)     W*H grid (W*H <= 24); axis-aligned rectangles\n"
                  << "at_most_d_positive(n,d)  n points; labelings with at most d positives\n"
                  << "from_file(path)          vslab-class v1 file\n";
    });

    static std::string show_spec;
    auto* cls_show = classes->add_subcommand("show", "print a class (optionally save it)");
    cls_show->fallthrough();
    cls_show->add_option("spec", show_spec, "class descriptor")->required();
    cls_show->callback([&] {
        const ConceptClass c = make_class(show_spec);
        ordered_json j;
        j["name"] = c.name;
        j["n"] = c.n();
        j["size"] = c.size();
        j["points"] = c.space.points;
        ordered_json hyps = ordered_json::array();
        for (const Hypothesis& h : c.hypotheses) hyps.push_back(labeling_string(h.pos));
        j["hypotheses"] = hyps;
        emit(j);
        if (!g.out.empty()) save_class(c, g.out);
    });

    // ---------------------------------------------------------------- measure
    auto* measure = app.add_subcommand("measure", "complexity measures");
    measure->require_subcommand(1);

    static std::string m_spec, m_dist, m_dist_file, m_r0, m_c, m_eta, m_mode = "real";
    static std::string m_points, m_sample, m_centers = "all-labelings";
    static int m_target = 0, m_cap = -1, m_m = 0;
    static std::uint64_t m_budget = 10'000'000;

    auto add_measure_common = [&](CLI::App* sub, bool needs_dist, bool needs_target) {
        sub->fallthrough();
        sub->add_option("spec", m_spec, "class descriptor")->required();
        if (needs_dist) {
            sub->add_option("--dist", m_dist, "comma-separated decimal masses (default uniform)");
            sub->add_option("--dist-file", m_dist_file, "vslab-dist v1 file");
        }
        if (needs_target) sub->add_option("--target", m_target, "target hypothesis index")->required();
    };

    auto* mv = measure->add_subcommand("vc", "exact VC dimension");
    add_measure_common(mv, false, false);
    mv->callback([&] {
        const ConceptClass c = make_class(m_spec);
        ordered_json j = measure_header("vc", c);
        j["value"] = vc_dimension(c);
        emit(j);
    });

    auto* ms = measure->add_subcommand("star", "exact star number");
    add_measure_common(ms, false, false);
    ms->add_option("--cap", m_cap, "search cap (default: exact, cap = n)");
    ms->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const StarNumber s = star_number(c, m_cap);
        ordered_json j = measure_header("star", c);
        j["value"] = s.value;
        j["exact"] = !s.exceeds_cap;
        if (m_cap >= 0) j["cap"] = m_cap;
        emit(j);
    });

    auto* mn = measure->add_subcommand("nhat", "version-space compression set size");
    add_measure_common(mn, true, true);
    mn->add_option("--points", m_points, "explicit point sequence, e.g. 0,3,2");
    mn->add_option("--m", m_m, "sample this many points instead (uses --seed)");
    mn->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const Hypothesis& target = resolve_target(c, m_target);
        std::vector<int> pts;
        const bool sampled = m_points.empty();
        if (!sampled) {
            pts = parse_int_list(m_points, "--points");
        } else {
            if (m_m < 1) throw ParameterError("measure nhat: give --points or --m >= 1");
            const Distribution d = resolve_dist(c, m_dist, m_dist_file);
            RngStream rng(g.seed);
            const PointSampler points(d);
            const LabelSampler labels(target);
            for (int i = 0; i < m_m; ++i) {
                const int x = points.draw(rng);
                (void)labels.draw(x, rng);
                pts.push_back(x);
            }
        }
        LabeledSample sample;
        for (int x : pts) {
            if (x < 0 || x >= c.n())
                throw ParameterError("point index " + std::to_string(x) + " out of range");
            sample.push(x, target.label(x));
        }
        const CompressionResult full = compression_set_size(c, sample);
        ordered_json j = measure_header("nhat", c);
        if (sampled) {
            j["rng"] = rng_id();
            j["seed"] = g.seed;
        }
        j["target"] = m_target;
        j["points"] = pts;
        j["nhat"] = full.nhat;
        j["nhat_prefix_max"] = prefix_max_nhat(c, pts, target);
        ordered_json wit = ordered_json::array();
        for (const auto& [x, y] : full.witness.pairs) wit.push_back(ordered_json::array({x, y}));
        j["witness"] = wit;
        emit(j);
    });

    auto* mt = measure->add_subcommand("theta", "disagreement coefficient theta(r0)");
    add_measure_common(mt, true, true);
    mt->add_option("--r0", m_r0, "rational r0 >= 0")->required();
    mt->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const Distribution d = resolve_dist(c, m_dist, m_dist_file);
        const Hypothesis& target = resolve_target(c, m_target);
        ordered_json j = measure_header("theta", c);
        j["target"] = m_target;
        j["r0"] = m_r0;
        j["value"] = format_rational(disagreement_coefficient(c, d, target, parse_rational(m_r0)));
        emit(j);
    });

    auto* mp = measure->add_subcommand("phi", "LP quantity Phi(view, eta)");
    add_measure_common(mp, true, false);
    mp->add_option("--eta", m_eta, "rational eta >= 0")->required();
    mp->add_option("--sample", m_sample, "constraints x:+,y:- defining the view (default: full class)");
    mp->add_option("--mode", m_mode, "real | binary")->check(CLI::IsMember({"real", "binary"}));
    mp->add_option("--budget", m_budget, "branch-and-bound node budget");
    mp->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const Distribution d = resolve_dist(c, m_dist, m_dist_file);
        const LabeledSample sample = m_sample.empty() ? LabeledSample{} : parse_sample(m_sample);
        const VersionSpaceView view = version_space(c, sample);
        if (view.empty()) throw ParameterError("measure phi: the sample empties the version space");
        const Rational eta = parse_rational(m_eta);
        const PhiMode mode = m_mode == "binary" ? PhiMode::binary : PhiMode::real;
        const PhiResult r = phi(view, d, eta, mode, m_budget);
        ordered_json j = measure_header("phi", c);
        j["eta"] = m_eta;
        j["mode"] = m_mode;
        j["view_size"] = view.count();
        j["value"] = format_rational(r.value);
        j["certificate_verified"] = verify_certificate(view, d, eta, r.cert, r.value);
        emit(j);
    });

    auto* mpc = measure->add_subcommand("phic", "Definition zc quantity phi_c(r0)");
    add_measure_common(mpc, true, true);
    mpc->add_option("--r0", m_r0, "rational r0 in [0,1)")->required();
    mpc->add_option("--c", m_c, "rational c > 1")->required();
    mpc->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const Distribution d = resolve_dist(c, m_dist, m_dist_file);
        const Hypothesis& target = resolve_target(c, m_target);
        ordered_json j = measure_header("phic", c);
        j["target"] = m_target;
        j["r0"] = m_r0;
        j["c"] = m_c;
        j["value"] =
            format_rational(phi_c(c, d, target, parse_rational(m_r0), parse_rational(m_c)));
        emit(j);
    });

    auto* md = measure->add_subcommand("doubling", "doubling dimension D(r0)");
    add_measure_common(md, true, true);
    md->add_option("--r0", m_r0, "rational r0 > 0")->required();
    md->add_option("--centers", m_centers, "covering centers: all-labelings (faithful, n <= 20) | members (upper bound)")
        ->check(CLI::IsMember({"all-labelings", "members"}));
    md->add_option("--budget", m_budget, "set-cover node budget");
    md->callback([&] {
        const ConceptClass c = make_class(m_spec);
        const Distribution d = resolve_dist(c, m_dist, m_dist_file);
        const Hypothesis& target = resolve_target(c, m_target);
        const CenterMode centers =
            m_centers == "members" ? CenterMode::members : CenterMode::all_labelings;
        ordered_json j = measure_header("doubling", c);
        j["target"] = m_target;
        j["r0"] = m_r0;
        j["centers"] = m_centers; // recorded: the definition permits arbitrary centers
        j["value"] = doubling_dimension(c, d, target, parse_rational(m_r0), centers, m_budget);
        emit(j);
    });

    // --------------------------------------------------------------- simulate
    auto* simulate = app.add_subcommand("simulate", "seeded learning-process runs");
    simulate->require_subcommand(1);

    static std::string s_spec, s_dist, s_dist_file, s_rule = "dis", s_a = "1", s_alpha = "1";
    static std::string s_beta = "0", s_flip, s_c0 = "2";
    static int s_target = 0, s_m = 0, s_budget_n = 0;
    static std::int64_t s_m64 = 0;

    auto add_sim_common = [&](CLI::App* sub) {
        sub->fallthrough();
        sub->add_option("spec", s_spec, "class descriptor")->required();
        sub->add_option("--target", s_target, "target hypothesis index")->required();
        sub->add_option("--dist", s_dist, "comma-separated decimal masses (default uniform)");
        sub->add_option("--dist-file", s_dist_file, "vslab-dist v1 file");
    };

    auto run_rule = [&](MonotoneRule rule) {
        const ConceptClass c = make_class(s_spec);
        const Distribution d = resolve_dist(c, s_dist, s_dist_file);
        const Hypothesis& target = resolve_target(c, s_target);
        if (s_m < 1) throw ParameterError("simulate: --m must be >= 1");
        const MonotoneRuleTrace trace = run_monotone_rule(rule, c, d, target, s_m, g.seed);
        const std::string csv = trace_csv(trace);
        if (g.out.empty()) {
            std::cout << csv;
        } else {
            write_text(g.out, csv);
            ordered_json j;
            j["rng"] = rng_id();
            j["seed"] = g.seed;
            j["rule"] = rule == MonotoneRule::closure_error_region ? "closure" : "dis";
            j["m"] = s_m;
            j["final_mass"] = format_rational(trace.final_mass);
            j["out"] = g.out;
            emit(j);
        }
    };

    auto* sc = simulate->add_subcommand("closure", "Closure-algorithm error region trace");
    add_sim_common(sc);
    sc->add_option("--m", s_m, "sample size")->required();
    sc->callback([&] { run_rule(MonotoneRule::closure_error_region); });

    auto* smn = simulate->add_subcommand("monotone", "monotone error-region rule trace");
    add_sim_common(smn);
    smn->add_option("--m", s_m, "sample size")->required();
    smn->add_option("--rule", s_rule, "closure | dis")->check(CLI::IsMember({"closure", "dis"}));
    smn->callback([&] {
        run_rule(s_rule == "closure" ? MonotoneRule::closure_error_region
                                     : MonotoneRule::dis_version_space);
    });

    auto* sca = simulate->add_subcommand("cal", "CAL active learner run");
    add_sim_common(sca);
    sca->add_option("--budget", s_budget_n, "label budget n")->required();
    sca->callback([&] {
        const ConceptClass c = make_class(s_spec);
        const Distribution d = resolve_dist(c, s_dist, s_dist_file);
        resolve_target(c, s_target);
        const CalRunRecord rec = run_cal(c, d, c.hypotheses[s_target], s_budget_n, g.seed);
        emit_seeded(g.seed, to_json(rec));
    });

    auto* sa1 = simulate->add_subcommand("algorithm1", "Algorithm 1 under bounded noise");
    add_sim_common(sa1);
    sa1->add_option("--m", s_m64, "sample size budget")->required();
    sa1->add_option("--a", s_a, "Bernstein a >= 1 (rational)");
    sa1->add_option("--alpha", s_alpha, "Bernstein alpha in (0,1] (rational)");
    sa1->add_option("--c0", s_c0, "envelope constant c0 > 1 (rational)");
    sa1->add_option("--beta", s_beta, "bounded-noise rate in [0,1/2) (rational)");
    sa1->add_option("--flip", s_flip, "noisy points, e.g. 0,1,2 (default: all)");
    sa1->callback([&] {
        const ConceptClass c = make_class(s_spec);
        const Distribution d = resolve_dist(c, s_dist, s_dist_file);
        const Hypothesis& target = resolve_target(c, s_target);
        std::vector<int> flip;
        if (!s_flip.empty())
            flip = parse_int_list(s_flip, "--flip");
        else
            for (int i = 0; i < c.n(); ++i) flip.push_back(i);
        const NoiseModel noise = bounded_noise_from(target, parse_rational(s_beta), flip);
        const Algo1RunRecord rec =
            run_algorithm1(c, d, noise, s_m64, to_double(parse_rational(g.delta)),
                           parse_rational(s_a), to_double(parse_rational(s_alpha)),
                           to_double(parse_rational(s_c0)), g.seed);
        emit_seeded(g.seed, to_json(rec));
    });

    // ------------------------------------------------------------------ bound
    static std::string b_name;
    static std::vector<std::string> b_params;
    auto* bound = app.add_subcommand("bound", "evaluate a closed-form bound");
    bound->fallthrough();
    bound->add_option("name", b_name, "bound name (acceptance runs use constant=1 for erm_star "
                                      "and gk_dist_free unless stated otherwise)")
        ->required();
    bound->add_option("--param", b_params, "k=v with v rational, repeatable");
    bound->callback([&] {
        BoundParams params;
        for (const std::string& kv : b_params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ParameterError("bound: '--param " + kv + "' is not k=v");
            params[kv.substr(0, eq)] = parse_rational(kv.substr(eq + 1));
        }
        const BoundResult r = evaluate_bound(b_name, params);
        ordered_json j;
        j["name"] = r.name;
        ordered_json p;
        for (const auto& [key, value] : r.params) p[key] = format_rational(value);
        j["params"] = p;
        j["value"] = r.value;
        j["clamped"] = r.clamped;
        std::cout << j.dump() << "\n"; // single line
    });

    // --------------------------------------------------------------- validate
    static std::string v_config;
    static int v_workers = 1;
    auto* validate = app.add_subcommand("validate", "Monte Carlo bound validation");
    validate->fallthrough();
    validate->add_option("--config", v_config, "ExperimentConfig JSON file")->required();
    validate->add_option("--workers", v_workers, "worker threads (outputs are identical for any "
                                                 "count)")
        ->check(CLI::PositiveNumber);
    validate->callback([&] {
        ExperimentConfig config = load_config(v_config);
        if (!g.out.empty()) config.out = g.out; // CLI override
        const ValidationReport report = run_validation(config, v_workers);
        write_validation_outputs(report);
        std::cout << to_json(report);
        if (!report.pass) exit_code = 4;
    });

    // -------------------------------------------------------------- lowerbound
    static std::string lb_spec, lb_eps, lb_zeta = "0", lb_beta = "0", lb_grid, lb_scenario_out;
    static int lb_k = 0, lb_t = 1;

    auto* lower = app.add_subcommand("lowerbound", "adversarial lower-bound scenarios");
    lower->require_subcommand(1);

    auto run_lb = [&](const std::string& kind, const LowerBoundParams& params) {
        const ConceptClass c = make_class(lb_spec);
        const LowerBoundScenario s = lower_bound_construction(kind, c, params);
        if (!lb_scenario_out.empty()) save_scenario(s, lb_scenario_out);
        const LowerBoundReport report =
            run_lower_bound(s, parse_int_list(lb_grid, "--m-grid"), g.trials, g.seed);
        const std::string json = to_json(report);
        std::cout << json;
        if (!g.out.empty()) write_text(g.out, json);
        for (const LowerBoundRow& row : report.rows)
            if (row.verdict == "FAIL") exit_code = 4;
    };

    auto* lbr = lower->add_subcommand("realizable", "Theorem erm-lb coupon-collector scenario");
    lbr->fallthrough();
    lbr->add_option("spec", lb_spec, "class descriptor")->required();
    lbr->add_option("--epsilon", lb_eps, "rational eps in (0, 1/48)")->required();
    lbr->add_option("--m-grid", lb_grid, "comma-separated sample sizes")->required();
    lbr->add_option("--save-scenario", lb_scenario_out, "write vslab-scenario v1 file");
    lbr->callback([&] {
        LowerBoundParams params;
        params.epsilon = parse_rational(lb_eps);
        run_lb("realizable_star", params);
    });

    auto* lbn = lower->add_subcommand("noisy", "bounded-noise star scenario (Appendix P_{k,zeta,t})");
    lbn->fallthrough();
    lbn->add_option("spec", lb_spec, "class descriptor")->required();
    lbn->add_option("--k", lb_k, "star points carrying noise (k >= 2)")->required();
    lbn->add_option("--zeta", lb_zeta, "per-point mass zeta (rational)")->required();
    lbn->add_option("--beta", lb_beta, "noise rate beta in (0,1/2) (rational)")->required();
    lbn->add_option("--t", lb_t, "index of the optimal h_t, 1-based");
    lbn->add_option("--m-grid", lb_grid, "comma-separated sample sizes")->required();
    lbn->add_option("--save-scenario", lb_scenario_out, "write vslab-scenario v1 file");
    lbn->callback([&] {
        LowerBoundParams params;
        params.k = lb_k;
        params.zeta = parse_rational(lb_zeta);
        params.beta = parse_rational(lb_beta);
        params.t = lb_t;
        run_lb("noisy_star", params);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // --help and --version are successes
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
