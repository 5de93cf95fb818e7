#include "vslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vslab/errors.hpp"
#include "vslab/learners.hpp"
#include "vslab/measures.hpp"
#include "vslab/rng.hpp"

namespace vslab {

namespace {

using nlohmann::ordered_json;

const std::vector<std::string>& known_quantities() {
    static const std::vector<std::string> names = {"sup_er", "pdis", "closure_er", "nhat1m",
                                                   "erm_excess"};
    return names;
}

bool known_quantity(const std::string& q) {
    const auto& names = known_quantities();
    return std::find(names.begin(), names.end(), q) != names.end();
}

// Which parameter of a bound, if any, is the compression size the harness
// measures per trial.
const char* nhat_key(const std::string& bound) {
    if (bound == "compression_lemma" || bound == "monotone_compression") return "n";
    if (bound == "pdis_nhat" || bound == "erm_nhat") return "nhat";
    return nullptr;
}

// Pull "key" out of evaluate_bound's "missing required parameter 'key'"
// message (the catalog's own wording; kept in one place here).
std::string missing_param(const std::string& what) {
    const std::string tag = "missing required parameter '";
    auto at = what.find(tag);
    if (at == std::string::npos) return {};
    auto from = at + tag.size();
    auto to = what.find('\'', from);
    if (to == std::string::npos) return {};
    return what.substr(from, to - from);
}

// A check with every data-independent parameter pinned per grid point; only
// the n̂ slot (when auto-measured) is filled per trial.
struct ResolvedCheck {
    BoundCheck spec;
    std::vector<BoundParams> static_params; // one per m-grid entry
    bool auto_nhat = false;
    std::string nhat_param;                  // "n" or "nhat" when auto_nhat
    std::vector<double> expectation_bounds;  // one per m; empty unless requested
};

struct SharedState {
    const ExperimentConfig* config = nullptr;
    ConceptClass cls;
    Distribution dist;
    NoiseModel noise; // empty when realizable
    ClassIndex idx;
    std::vector<std::string> columns;
    std::vector<ResolvedCheck> checks;
    bool need_sup = false, need_pdis = false, need_closure = false;
    bool need_nhat = false, need_erm = false;
    std::vector<Rational> risk;  // exact er(h) (noisy, or distance to target)
    Rational best_risk;
    bool realizable = true;
};

bool wants(const std::vector<std::string>& columns, const char* q) {
    return std::find(columns.begin(), columns.end(), q) != columns.end();
}

// Resolves one check against the bound catalog by probing: evaluate, fill the
// parameter the catalog reports missing if the harness can compute it, repeat.
ResolvedCheck resolve_check(const BoundCheck& spec, const SharedState& st, int& vc_cache,
                            int& star_cache) {
    const ExperimentConfig& config = *st.config;
    ResolvedCheck rc;
    rc.spec = spec;

    auto vc_of = [&]() {
        if (vc_cache < 0) vc_cache = vc_dimension(st.cls);
        return vc_cache;
    };
    auto star_of = [&]() {
        if (star_cache < 0) star_cache = star_number(st.cls).value;
        return star_cache;
    };

    BoundParams base = spec.params;
    base.erase("phi_c_c"); // harness-only selector, never a bound parameter
    bool fill_phi_c = false, fill_phi_hat = false, fill_theta = false;

    // Probe at the first grid point until the formula evaluates; per-m values
    // are substituted afterwards.
    BoundParams probe = base;
    probe["m"] = Rational(config.m_grid.front());
    if (!probe.count("delta")) probe["delta"] = config.delta;
    if (config.has_noise && !probe.count("beta")) probe["beta"] = config.noise_beta;
    for (int guard = 0;; ++guard) {
        if (guard > 24)
            throw ParameterError("check " + spec.quantity + " <= " + spec.bound +
                                 ": parameter resolution did not converge");
        try {
            evaluate_bound(spec.bound, probe);
            break;
        } catch (const ParameterError& e) {
            const std::string key = missing_param(e.what());
            if (key == "vc" || key == "dim" || key == "s") {
                probe[key] = Rational(key == "s" ? star_of() : vc_of());
            } else if (nhat_key(spec.bound) && key == nhat_key(spec.bound)) {
                rc.auto_nhat = true;
                rc.nhat_param = key;
                probe[key] = Rational(0); // per-trial slot; 0 keeps probing valid
            } else if (key == "phi_c") {
                if (!spec.params.count("phi_c_c"))
                    throw ParameterError("check " + spec.quantity + " <= " + spec.bound +
                                         ": add a 'phi_c_c' param naming c so the harness can "
                                         "compute phi_c, or supply 'phi_c' directly");
                fill_phi_c = true;
                probe[key] = Rational(1);
            } else if (key == "phi_hat" || key == "theta") {
                if (!probe.count("a") || !probe.count("alpha"))
                    throw ParameterError("check " + spec.quantity + " <= " + spec.bound +
                                         ": auto-computing '" + key +
                                         "' needs explicit 'a' and 'alpha' params");
                (key == "phi_hat" ? fill_phi_hat : fill_theta) = true;
                probe[key] = Rational(1);
            } else if (!key.empty()) {
                throw ParameterError("check " + spec.quantity + " <= " + spec.bound + ": " +
                                     e.what() + " (supply it in the check's params)");
            } else {
                throw; // not a missing-parameter complaint; surface verbatim
            }
        }
    }

    const Hypothesis& target = st.cls.hypotheses[config.target];
    rc.static_params.reserve(config.m_grid.size());
    for (int m : config.m_grid) {
        BoundParams p = probe;
        p["m"] = Rational(m);
        if (rc.auto_nhat) p.erase(rc.nhat_param);
        if (fill_phi_c) {
            // Theorem vc-erm-subregion evaluates φ_c at r0 = d/m.
            p["phi_c"] = phi_c(st.cls, st.dist, target, Rational(vc_of(), m),
                               spec.params.at("phi_c_c"));
        }
        if (fill_phi_hat || fill_theta) {
            const double r0 = zc_noise_r0(to_double(probe.at("a")), to_double(probe.at("alpha")),
                                          vc_of(), m);
            if (fill_phi_hat)
                p["phi_hat"] = phi_hat_noise(st.cls, st.dist, probe.at("a"),
                                             to_double(probe.at("alpha")),
                                             Rational(std::min(r0, 1.0)), Rational(128));
            if (fill_theta)
                p["theta"] = disagreement_coefficient(st.cls, st.dist, target,
                                                      Rational(std::min(r0, 1.0)));
        }
        rc.static_params.push_back(std::move(p));
    }

    if (spec.expectation) {
        if (rc.auto_nhat)
            throw ParameterError("check " + spec.quantity + " <= " + spec.bound +
                                 "-expectation: the expectation form needs a data-independent '" +
                                 rc.nhat_param + "'; fix it in the check's params");
        rc.expectation_bounds.reserve(config.m_grid.size());
        for (const BoundParams& p : rc.static_params)
            rc.expectation_bounds.push_back(evaluate_bound(spec.bound + "-expectation", p).value);
    }
    return rc;
}

// One Monte Carlo trial: draw the longest prefix once, evaluating every
// requested quantity and bound at each grid point along the way.
TrialRecord run_trial(const SharedState& st, int trial) {
    const ExperimentConfig& config = *st.config;
    const ConceptClass& cls = st.cls;
    const Hypothesis& target = cls.hypotheses[config.target];

    TrialRecord rec;
    rec.trial = trial;
    rec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(trial));
    RngStream rng(rec.seed);
    PointSampler points(st.dist);
    LabelSampler labels = st.realizable ? LabelSampler(target) : LabelSampler(st.noise);

    BitVec members = st.idx.all;
    NhatTracker tracker(cls, st.idx, target);
    std::vector<long long> mistakes(st.need_erm ? cls.size() : 0, 0);

    int drawn = 0;
    for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
        for (; drawn < config.m_grid[mi]; ++drawn) {
            const int x = points.draw(rng);
            const int y = labels.draw(x, rng);
            if (st.realizable) {
                if (y == +1)
                    members &= st.idx.pos[x];
                else
                    members &= ~st.idx.pos[x];
                if (st.need_nhat) tracker.push(x);
            }
            if (st.need_erm)
                for (int h = 0; h < cls.size(); ++h)
                    if (cls.hypotheses[h].label(x) != y) ++mistakes[h];
        }

        VersionSpaceView view{&cls, members};
        std::map<std::string, Rational> vals;
        if (st.need_sup) vals["sup_er"] = worst_consistent_error(view, st.dist, target);
        if (st.need_pdis) vals["pdis"] = region_mass(st.dist, disagreement_region(view));
        if (st.need_closure) {
            BitVec pos(cls.n(), true);
            for (int h = members.find_first(); h >= 0; h = members.find_next(h))
                pos &= cls.hypotheses[h].pos;
            vals["closure_er"] = point_distance(st.dist, pos, target.pos);
        }
        if (st.need_nhat) vals["nhat1m"] = Rational(tracker.running_max());
        if (st.need_erm) {
            const auto best =
                std::min_element(mistakes.begin(), mistakes.end()) - mistakes.begin();
            vals["erm_excess"] = st.risk[best] - st.best_risk;
        }

        std::vector<double> bounds(st.checks.size(), 0.0);
        for (std::size_t k = 0; k < st.checks.size(); ++k) {
            const ResolvedCheck& rc = st.checks[k];
            BoundParams p = rc.static_params[mi];
            if (rc.auto_nhat) p[rc.nhat_param] = Rational(tracker.running_max());
            bounds[k] = evaluate_bound(rc.spec.bound, p).value;
        }
        rec.values.push_back(std::move(vals));
        rec.bound_values.push_back(std::move(bounds));
    }
    return rec;
}

std::string quantity_noise_error(const std::string& q) {
    return "validate: quantity '" + q +
           "' is defined for realizable labels only; remove the noise model or the quantity";
}

ordered_json config_json(const ExperimentConfig& config, const std::vector<std::string>& columns) {
    ordered_json j;
    j["class"] = config.class_spec;
    if (config.dist_decimals.empty())
        j["dist"] = "uniform";
    else
        j["dist"] = config.dist_decimals;
    j["target"] = config.target;
    if (config.has_noise) {
        ordered_json n;
        n["beta"] = format_rational(config.noise_beta);
        n["flip"] = config.noise_flip; // empty = every point
        j["noise"] = n;
    } else {
        j["noise"] = nullptr;
    }
    j["m_grid"] = config.m_grid;
    j["delta"] = format_rational(config.delta);
    j["trials"] = config.trials;
    j["seed"] = config.seed;
    j["quantities"] = columns;
    ordered_json checks = ordered_json::array();
    for (const BoundCheck& ck : config.checks) {
        ordered_json c;
        c["quantity"] = ck.quantity;
        c["bound"] = ck.bound;
        ordered_json params;
        for (const auto& [key, value] : ck.params) params[key] = format_rational(value);
        c["params"] = params;
        c["expectation"] = ck.expectation;
        checks.push_back(c);
    }
    j["checks"] = checks;
    j["out"] = config.out;
    return j;
}

} // namespace

void ExperimentConfig::validate() const {
    if (class_spec.empty()) throw ParameterError("config: 'class' is required");
    if (target < 0) throw ParameterError("config: 'target' must be a hypothesis index >= 0");
    if (m_grid.empty()) throw ParameterError("config: 'm_grid' must be nonempty");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] < 1) throw ParameterError("config: every m in 'm_grid' must be >= 1");
        if (i > 0 && m_grid[i] <= m_grid[i - 1])
            throw ParameterError("config: 'm_grid' must be strictly increasing");
    }
    if (delta <= 0 || delta >= 1) throw ParameterError("config: 'delta' must be in (0,1)");
    if (trials < 1) throw ParameterError("config: 'trials' must be >= 1");
    if (has_noise && (noise_beta < 0 || noise_beta >= Rational(1, 2)))
        throw ParameterError("config: noise 'beta' must be in [0, 1/2)");
    for (const std::string& q : quantities)
        if (!known_quantity(q)) throw ParameterError("config: unknown quantity '" + q + "'");
    for (const BoundCheck& ck : checks) {
        if (!known_quantity(ck.quantity))
            throw ParameterError("config: unknown check quantity '" + ck.quantity + "'");
        if (ck.bound.empty()) throw ParameterError("config: a check is missing its 'bound'");
    }
}

ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: not valid JSON: ") + e.what());
    }
    ExperimentConfig config;
    try {
        config.class_spec = j.at("class").get<std::string>();
        if (j.contains("dist") && !j["dist"].is_null() && j["dist"] != "uniform")
            config.dist_decimals = j["dist"].get<std::vector<std::string>>();
        config.target = j.at("target").get<int>();
        if (j.contains("noise") && !j["noise"].is_null()) {
            config.has_noise = true;
            config.noise_beta = parse_rational(j["noise"].at("beta").get<std::string>());
            if (j["noise"].contains("flip"))
                config.noise_flip = j["noise"]["flip"].get<std::vector<int>>();
        }
        config.m_grid = j.at("m_grid").get<std::vector<int>>();
        config.delta = parse_rational(j.at("delta").get<std::string>());
        config.trials = j.at("trials").get<int>();
        config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("quantities"))
            config.quantities = j["quantities"].get<std::vector<std::string>>();
        for (const auto& c : j.at("checks")) {
            BoundCheck ck;
            ck.quantity = c.at("quantity").get<std::string>();
            ck.bound = c.at("bound").get<std::string>();
            if (c.contains("params"))
                for (const auto& [key, value] : c["params"].items())
                    ck.params[key] = parse_rational(value.get<std::string>());
            if (c.contains("expectation")) ck.expectation = c["expectation"].get<bool>();
            config.checks.push_back(std::move(ck));
        }
        if (j.contains("out")) config.out = j["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config: ") + e.what());
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

ValidationReport run_validation(const ExperimentConfig& config, int workers) {
    config.validate();

    SharedState st;
    st.config = &config;
    st.cls = make_class(config.class_spec);
    st.dist = config.dist_decimals.empty() ? Distribution::uniform(st.cls.n())
                                           : Distribution::from_decimals(config.dist_decimals);
    if (st.dist.n() != st.cls.n())
        throw ParameterError("validate: distribution size " + std::to_string(st.dist.n()) +
                             " != instance space size " + std::to_string(st.cls.n()));
    st.dist.validate();
    if (config.target >= st.cls.size())
        throw ParameterError("validate: target index " + std::to_string(config.target) +
                             " out of range for |C| = " + std::to_string(st.cls.size()));
    const Hypothesis& target = st.cls.hypotheses[config.target];
    st.realizable = !config.has_noise;
    if (config.has_noise) {
        std::vector<int> flip = config.noise_flip;
        if (flip.empty()) {
            flip.resize(st.cls.n());
            std::iota(flip.begin(), flip.end(), 0);
        }
        st.noise = bounded_noise_from(target, config.noise_beta, flip);
    }
    st.idx = ClassIndex::build(st.cls);

    // Column order: the config's list, then check quantities, then nhat1m if
    // any check measures it — so the CSV carries every verdict input.
    st.columns = config.quantities;
    auto ensure = [&](const std::string& q) {
        if (!wants(st.columns, q.c_str())) st.columns.push_back(q);
    };
    for (const BoundCheck& ck : config.checks) ensure(ck.quantity);

    int vc_cache = -1, star_cache = -1;
    for (const BoundCheck& ck : config.checks) {
        st.checks.push_back(resolve_check(ck, st, vc_cache, star_cache));
        if (st.checks.back().auto_nhat) ensure("nhat1m");
    }

    st.need_sup = wants(st.columns, "sup_er");
    st.need_pdis = wants(st.columns, "pdis");
    st.need_closure = wants(st.columns, "closure_er");
    st.need_nhat = wants(st.columns, "nhat1m");
    st.need_erm = wants(st.columns, "erm_excess");
    if (!st.realizable && (st.need_sup || st.need_pdis || st.need_closure || st.need_nhat)) {
        for (const char* q : {"sup_er", "pdis", "closure_er", "nhat1m"})
            if (wants(st.columns, q)) throw ParameterError(quantity_noise_error(q));
    }
    if (st.need_closure && !is_intersection_closed(st.cls))
        throw ParameterError("validate: quantity 'closure_er' requires an intersection-closed "
                             "class; " + st.cls.name + " is not");
    if (st.need_erm) {
        st.risk.reserve(st.cls.size());
        for (const Hypothesis& h : st.cls.hypotheses)
            st.risk.push_back(st.realizable ? point_distance(st.dist, h.pos, target.pos)
                                            : noisy_error(st.dist, st.noise, h));
        st.best_risk = *std::min_element(st.risk.begin(), st.risk.end());
    }

    // Trials are embarrassingly parallel; records land at their own index, so
    // aggregation order (and every output byte) is worker-count independent.
    // The lowest-index failure wins, also independent of scheduling.
    ValidationReport report;
    report.config = config;
    report.columns = st.columns;
    report.trial_records.resize(config.trials);
    {
        std::atomic<int> next{0};
        std::mutex err_mu;
        int err_trial = std::numeric_limits<int>::max(), err_kind = 0;
        std::string err_what;
        auto record_error = [&](int trial, int kind, const char* what) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (trial < err_trial) {
                err_trial = trial;
                err_kind = kind;
                err_what = what;
            }
        };
        auto work = [&]() {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= config.trials) break;
                try {
                    report.trial_records[t] = run_trial(st, t);
                } catch (const BudgetExceeded& e) {
                    record_error(t, 3, e.what());
                } catch (const ParameterError& e) {
                    record_error(t, 2, e.what());
                } catch (const std::exception& e) {
                    record_error(t, 1, e.what());
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 1; w < std::max(1, workers); ++w) pool.emplace_back(work);
        work();
        for (std::thread& th : pool) th.join();
        if (err_trial != std::numeric_limits<int>::max()) {
            const std::string msg = "trial " + std::to_string(err_trial) + ": " + err_what;
            if (err_kind == 3) throw BudgetExceeded(msg);
            if (err_kind == 2) throw ParameterError(msg);
            throw std::runtime_error(msg);
        }
    }

    // Per-trial CSV, one row per (trial, m).
    std::ostringstream csv;
    csv << "trial,seed,m";
    for (const std::string& q : st.columns) csv << ',' << q;
    for (std::size_t k = 0; k < st.checks.size(); ++k)
        csv << ",check" << k + 1 << ':' << st.checks[k].spec.bound;
    csv << '\n';
    for (const TrialRecord& rec : report.trial_records)
        for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
            csv << rec.trial << ',' << rec.seed << ',' << config.m_grid[mi];
            for (const std::string& q : st.columns)
                csv << ',' << format_rational(rec.values[mi].at(q));
            for (double b : rec.bound_values[mi]) csv << ',' << format_double(b);
            csv << '\n';
        }
    report.csv = csv.str();

    // Aggregate verdicts, check-major.
    const double delta_d = to_double(config.delta);
    const double t_count = config.trials;
    for (std::size_t k = 0; k < st.checks.size(); ++k) {
        const ResolvedCheck& rc = st.checks[k];
        for (std::size_t mi = 0; mi < config.m_grid.size(); ++mi) {
            CheckRow row;
            row.quantity = rc.spec.quantity;
            row.bound = rc.spec.bound;
            row.m = config.m_grid[mi];
            row.trials = config.trials;
            Rational q_sum = 0;
            double b_sum = 0;
            for (const TrialRecord& rec : report.trial_records) {
                const Rational& q = rec.values[mi].at(rc.spec.quantity);
                const double b = rec.bound_values[mi][k];
                // Exact comparison: the double bound value, converted exactly
                // to a rational, against the exact quantity.
                if (q > Rational(b)) ++row.violations;
                q_sum += q;
                b_sum += b;
            }
            row.rate = row.violations / t_count;
            const BinomialCi ci = clopper_pearson(row.violations, config.trials);
            row.ci_lo = ci.lo;
            row.ci_hi = ci.hi;
            row.quantile_pass = row.ci_lo <= delta_d;
            const Rational q_mean = q_sum / config.trials;
            row.mean_quantity = to_double(q_mean);
            row.mean_bound = b_sum / t_count;
            if (rc.spec.expectation) {
                row.has_expectation = true;
                row.expectation_bound = rc.expectation_bounds[mi];
                Rational var = 0;
                for (const TrialRecord& rec : report.trial_records) {
                    const Rational d = rec.values[mi].at(rc.spec.quantity) - q_mean;
                    var += d * d;
                }
                const double sd =
                    config.trials > 1 ? std::sqrt(to_double(var) / (t_count - 1)) : 0.0;
                row.expectation_se = sd / std::sqrt(t_count);
                row.expectation_pass =
                    row.mean_quantity <= row.expectation_bound + 3 * row.expectation_se;
            }
            report.pass = report.pass && row.quantile_pass && row.expectation_pass;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string to_json(const ValidationReport& report) {
    ordered_json j;
    j["report"] = "vslab-validation v1";
    j["rng"] = rng_id();
    j["config"] = config_json(report.config, report.columns);
    j["pass"] = report.pass;
    ordered_json rows = ordered_json::array();
    for (const CheckRow& row : report.rows) {
        ordered_json r;
        r["quantity"] = row.quantity;
        r["bound"] = row.bound;
        r["m"] = row.m;
        r["violations"] = row.violations;
        r["trials"] = row.trials;
        r["rate"] = row.rate;
        r["ci_lo"] = row.ci_lo;
        r["ci_hi"] = row.ci_hi;
        r["quantile_pass"] = row.quantile_pass;
        r["mean_quantity"] = row.mean_quantity;
        r["mean_bound"] = row.mean_bound;
        if (row.has_expectation) {
            ordered_json e;
            e["bound"] = row.expectation_bound;
            e["se"] = row.expectation_se;
            e["pass"] = row.expectation_pass;
            r["expectation"] = e;
        } else {
            r["expectation"] = nullptr;
        }
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

void write_validation_outputs(const ValidationReport& report) {
    if (report.config.out.empty()) return;
    const std::string csv_path = report.config.out + ".csv";
    const std::string json_path = report.config.out + ".json";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw ParameterError("validate: cannot write '" + csv_path + "'");
    csv << report.csv;
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw ParameterError("validate: cannot write '" + json_path + "'");
    js << to_json(report);
}

BinomialCi clopper_pearson(int successes, int trials, double confidence) {
    if (trials < 1) throw ParameterError("clopper_pearson: trials must be >= 1");
    if (successes < 0 || successes > trials)
        throw ParameterError("clopper_pearson: successes must be in [0, trials]");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ParameterError("clopper_pearson: confidence must be in (0,1)");
    const int n = trials, k = successes;
    const double a2 = (1.0 - confidence) / 2.0;

    std::vector<double> lchoose(n + 1);
    for (int i = 0; i <= n; ++i)
        lchoose[i] = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
    // P(X <= j | p), summed on whichever tail has fewer terms.
    auto cdf = [&](int j, double p) {
        if (p <= 0.0) return 1.0;
        if (p >= 1.0) return j >= n ? 1.0 : 0.0;
        auto mass = [&](int lo, int hi) {
            double s = 0.0;
            for (int i = lo; i <= hi; ++i)
                s += std::exp(lchoose[i] + i * std::log(p) + (n - i) * std::log1p(-p));
            return s;
        };
        const double s = j + 1 <= n - j ? mass(0, j) : 1.0 - mass(j + 1, n);
        return std::min(std::max(s, 0.0), 1.0);
    };
    // f increasing on [0,1] with a sign change; plain bisection.
    auto solve = [&](auto&& f) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    BinomialCi ci;
    // Lower: largest p with P(X >= k | p) <= a2; P(X >= k) increases in p.
    ci.lo = k == 0 ? 0.0 : solve([&](double p) { return (1.0 - cdf(k - 1, p)) - a2; });
    // Upper: smallest p with P(X <= k | p) <= a2; P(X <= k) decreases in p.
    ci.hi = k == n ? 1.0 : solve([&](double p) { return a2 - cdf(k, p); });
    return ci;
}

MEstimate estimate_M(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                     const Rational& eps, const Rational& delta, int trials, std::uint64_t seed,
                     int m_cap) {
    if (eps <= 0 || eps > 1) throw ParameterError("estimate_M: eps must be in (0,1]");
    if (delta <= 0 || delta >= 1) throw ParameterError("estimate_M: delta must be in (0,1)");
    if (trials < 1) throw ParameterError("estimate_M: trials must be >= 1");
    if (m_cap < 1) throw ParameterError("estimate_M: m_cap must be >= 1");
    if (dist.n() != c.n()) throw ParameterError("estimate_M: distribution/class size mismatch");
    dist.validate();
    const ClassIndex idx = ClassIndex::build(c);
    const PointSampler points(dist);
    const LabelSampler labels(target);

    // sup_{h in V} er(h) maintained as a pointer into the hypotheses sorted by
    // distance from the target (descending): the first surviving one is the sup.
    std::vector<Rational> d_target(c.size());
    for (int h = 0; h < c.size(); ++h)
        d_target[h] = point_distance(dist, c.hypotheses[h].pos, target.pos);
    std::vector<int> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return d_target[a] > d_target[b]; });

    // Per-trial first m >= 1 with sup er(V_m) <= eps; m_cap+1 when censored.
    // The event is monotone in m along one stream (V_m only shrinks), which is
    // what makes the bisection below well defined.
    std::vector<int> first_m(trials, m_cap + 1);
    for (int t = 0; t < trials; ++t) {
        RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
        BitVec members = idx.all;
        std::size_t ptr = 0;
        // Once P(DIS(V)) = 0 no positive-mass draw can shrink V, so a sup
        // still above eps is frozen there forever: censor immediately instead
        // of spinning to m_cap. Recomputed only when V actually shrinks.
        auto dis_free = [&]() {
            VersionSpaceView view{&c, members};
            return region_mass(dist, disagreement_region(view)) == 0;
        };
        if (dis_free()) {
            if (d_target[order[ptr]] <= eps) first_m[t] = 1;
            continue;
        }
        int count = members.count();
        for (int m = 1; m <= m_cap; ++m) {
            const int x = points.draw(rng);
            (void)labels.draw(x, rng); // realizable; keep the stream layout
            if (target.pos.get(x))
                members &= idx.pos[x];
            else
                members &= ~idx.pos[x];
            while (!members.get(order[ptr])) ++ptr;
            if (d_target[order[ptr]] <= eps) {
                first_m[t] = m;
                break;
            }
            const int now = members.count();
            if (now < count) {
                count = now;
                if (dis_free()) break; // censored: sup er frozen above eps
            }
        }
    }

    std::vector<int> sorted = first_m;
    std::sort(sorted.begin(), sorted.end());
    // Smallest m with #{trials: first_m <= m} >= ceil((1 - delta/2)*T).
    const Rational need_q = (Rational(1) - delta / 2) * trials;
    const BigInt need_i = (boost::multiprecision::numerator(need_q) +
                           boost::multiprecision::denominator(need_q) - 1) /
                          boost::multiprecision::denominator(need_q);
    const int need = need_i.convert_to<int>();
    if (sorted[need - 1] > m_cap)
        throw BudgetExceeded("estimate_M: the (1 - delta/2) quantile exceeds m_cap = " +
                             std::to_string(m_cap));

    MEstimate est;
    auto freq = [&](int m) {
        return static_cast<int>(std::upper_bound(sorted.begin(), sorted.end(), m) -
                                sorted.begin());
    };
    auto probe = [&](int m) {
        MProbe p;
        p.m = m;
        p.successes = freq(m);
        p.trials = trials;
        const BinomialCi ci = clopper_pearson(p.successes, trials);
        p.ci_lo = ci.lo;
        p.ci_hi = ci.hi;
        est.probes.push_back(p);
        return p.successes >= need;
    };
    // Doubling until the frequency qualifies, then bisection on (lo, hi].
    int lo = 0, hi = 1;
    while (!probe(hi)) {
        lo = hi;
        hi = hi >= m_cap / 2 ? m_cap : 2 * hi;
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (probe(mid) ? hi : lo) = mid;
    }
    est.value = hi;
    return est;
}

QuantileNhat quantile_nhat(const ConceptClass& c, const Distribution& dist,
                           const Hypothesis& target, int m, const Rational& delta, int trials,
                           std::uint64_t seed) {
    if (m < 1) throw ParameterError("quantile_nhat: m must be >= 1");
    if (delta <= 0 || delta >= 1) throw ParameterError("quantile_nhat: delta must be in (0,1)");
    if (trials < 1) throw ParameterError("quantile_nhat: trials must be >= 1");
    if (dist.n() != c.n()) throw ParameterError("quantile_nhat: distribution/class size mismatch");
    dist.validate();
    const ClassIndex idx = ClassIndex::build(c);
    const PointSampler points(dist);
    const LabelSampler labels(target);

    QuantileNhat result;
    result.values.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
        NhatTracker tracker(c, idx, target);
        for (int j = 0; j < m; ++j) {
            const int x = points.draw(rng);
            (void)labels.draw(x, rng); // keep the stream layout
            tracker.push(x);
        }
        result.values.push_back(tracker.running_max());
    }
    std::sort(result.values.begin(), result.values.end());
    // Definition td-hat: min{b : P(nhat <= b) >= 1-delta} — the k-th order
    // statistic with k = ceil((1-delta)*T).
    const Rational need_q = (Rational(1) - delta) * trials;
    const BigInt need_i = (boost::multiprecision::numerator(need_q) +
                           boost::multiprecision::denominator(need_q) - 1) /
                          boost::multiprecision::denominator(need_q);
    const int k = std::max(1, need_i.convert_to<int>());
    result.value = result.values[k - 1];
    return result;
}

CalCurve cal_curve(const ConceptClass& c, const Distribution& dist, const Hypothesis& target,
                   const std::vector<int>& budgets, int trials, std::uint64_t seed) {
    if (budgets.empty()) throw ParameterError("cal_curve: budgets must be nonempty");
    if (trials < 1) throw ParameterError("cal_curve: trials must be >= 1");
    CalCurve curve;
    for (int budget : budgets) {
        CalCurveRow row;
        row.budget = budget;
        Rational labels = 0, error = 0, dis = 0;
        // Trial seeds are shared across budgets, so rows are coupled runs of
        // the same streams with growing budgets.
        for (int t = 0; t < trials; ++t) {
            const CalRunRecord rec =
                run_cal(c, dist, target, budget, derive_seed(seed, static_cast<std::uint64_t>(t)));
            labels += rec.labels;
            error += point_distance(dist, c.hypotheses[rec.final_hyp].pos, target.pos);
            dis += rec.dis_mass.back();
        }
        row.mean_labels = labels / trials;
        row.mean_error = error / trials;
        row.mean_dis = dis / trials;
        row.coverage = 1 - row.mean_dis;
        curve.rows.push_back(std::move(row));
    }
    return curve;
}

std::string to_csv(const CalCurve& curve) {
    std::ostringstream out;
    out << "budget,mean_labels,mean_error,mean_dis,coverage\n";
    for (const CalCurveRow& row : curve.rows)
        out << row.budget << ',' << format_rational(row.mean_labels) << ','
            << format_rational(row.mean_error) << ',' << format_rational(row.mean_dis) << ','
            << format_rational(row.coverage) << '\n';
    return out.str();
}

LowerBoundReport run_lower_bound(const LowerBoundScenario& s, const std::vector<int>& m_grid,
                                 int trials, std::uint64_t seed) {
    if (!s.cls) throw ParameterError("run_lower_bound: scenario has no class bound");
    if (m_grid.empty()) throw ParameterError("run_lower_bound: m_grid must be nonempty");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] < 1) throw ParameterError("run_lower_bound: every m must be >= 1");
        if (i > 0 && m_grid[i] <= m_grid[i - 1])
            throw ParameterError("run_lower_bound: m_grid must be strictly increasing");
    }
    if (trials < 1) throw ParameterError("run_lower_bound: trials must be >= 1");
    const bool realizable = s.kind == "realizable_star";
    const ConceptClass& c = *s.cls;
    const Hypothesis& target = c.hypotheses[s.target];
    const ClassIndex idx = ClassIndex::build(c);
    const PointSampler points(s.dist);
    const LabelSampler labels = realizable ? LabelSampler(target) : LabelSampler(s.noise);

    std::vector<Rational> risk;
    Rational best_risk = 0;
    if (!realizable) {
        risk.reserve(c.size());
        for (const Hypothesis& h : c.hypotheses) risk.push_back(noisy_error(s.dist, s.noise, h));
        best_risk = *std::min_element(risk.begin(), risk.end());
    }

    std::vector<int> hits(m_grid.size(), 0);
    for (int t = 0; t < trials; ++t) {
        RngStream rng = derive_stream(seed, static_cast<std::uint64_t>(t));
        BitVec members = idx.all;
        std::vector<long long> mistakes(realizable ? 0 : c.size(), 0);
        int drawn = 0;
        for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
            for (; drawn < m_grid[mi]; ++drawn) {
                const int x = points.draw(rng);
                const int y = labels.draw(x, rng);
                if (realizable) {
                    if (y == +1)
                        members &= idx.pos[x];
                    else
                        members &= ~idx.pos[x];
                } else {
                    for (int h = 0; h < c.size(); ++h)
                        if (c.hypotheses[h].label(x) != y) ++mistakes[h];
                }
            }
            Rational quantity;
            if (realizable) {
                VersionSpaceView view{&c, members};
                quantity = worst_consistent_error(view, s.dist, target);
            } else {
                const auto best =
                    std::min_element(mistakes.begin(), mistakes.end()) - mistakes.begin();
                quantity = risk[best] - best_risk;
            }
            if (quantity >= s.threshold) ++hits[mi];
        }
    }

    LowerBoundReport report;
    report.kind = s.kind;
    report.regime = lower_bound_regime(s);
    report.threshold = s.threshold;
    for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
        LowerBoundRow row;
        row.m = m_grid[mi];
        row.hits = hits[mi];
        row.trials = trials;
        row.rate = static_cast<double>(hits[mi]) / trials;
        const BinomialCi ci = clopper_pearson(hits[mi], trials);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
        if (row.m >= report.regime) {
            row.verdict = "n/a";
        } else if (realizable) {
            row.verdict = row.ci_lo > 0.5 ? "PASS" : "FAIL";
        } else {
            // Refutation-style: the >= 1/4 claim stands unless the CI lies
            // wholly below 1/4.
            row.verdict = row.ci_hi < 0.25 ? "FAIL" : "PASS";
        }
        report.rows.push_back(row);
    }
    return report;
}

std::string to_json(const LowerBoundReport& report) {
    ordered_json j;
    j["report"] = "vslab-lowerbound v1";
    j["rng"] = rng_id();
    j["kind"] = report.kind;
    j["regime"] = report.regime;
    j["threshold"] = format_rational(report.threshold);
    ordered_json rows = ordered_json::array();
    for (const LowerBoundRow& row : report.rows) {
        ordered_json r;
        r["m"] = row.m;
        r["hits"] = row.hits;
        r["trials"] = row.trials;
        r["rate"] = row.rate;
        r["ci_lo"] = row.ci_lo;
        r["ci_hi"] = row.ci_hi;
        r["verdict"] = row.verdict;
        rows.push_back(r);
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

} // namespace vslab
