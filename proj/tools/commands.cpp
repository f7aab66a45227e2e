#include "commands.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "scrambling/circuit.hpp"
#include "scrambling/clifford_group.hpp"
#include "scrambling/hitting.hpp"
#include "scrambling/moment_gap.hpp"
#include "scrambling/pauli.hpp"
#include "scrambling/stabilizer.hpp"
#include "scrambling/subset_chain.hpp"
#include "scrambling/tableau.hpp"
#include "scrambling/weight_chain.hpp"

namespace scrambling::cli {
namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

uint64_t default_matching_depth(uint32_t n) { return static_cast<uint64_t>(std::ceil(10.0 * std::log2(n))); }

uint64_t default_sequential_gates(uint32_t n) {
    const double l = std::log(static_cast<double>(n));
    return static_cast<uint64_t>(std::ceil(3.0 * n * l * l));
}

uint32_t lattice_side_for(uint32_t n, uint32_t d) {
    require(d >= 1 && d <= 3, "d must lie in [1, 3]");
    const auto side = static_cast<uint32_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
    uint64_t total = 1;
    for (uint32_t k = 0; k < d; ++k) {
        total *= side;
    }
    require(total == n, "n=" + std::to_string(n) + " is not a perfect " + std::to_string(d) + "-th power");
    return side;
}

using Sampler = std::function<LayeredCircuit(RandomSource&)>;

// Circuit family on n qubits selected by model, depth, t, d, c.
Sampler circuit_sampler(const ExperimentConfig& c, uint32_t n) {
    if (c.model == "matching") {
        const uint64_t depth = c.depth ? c.depth : default_matching_depth(n);
        return [n, depth](RandomSource& rng) { return sample_matching_circuit(n, depth, rng); };
    }
    if (c.model == "sequential") {
        const uint64_t t = c.t ? c.t : default_sequential_gates(n);
        const auto graph = InteractionGraph::complete(n);
        return [n, t, graph](RandomSource& rng) { return parallelize(sample_sequential_circuit(graph, t, rng), n); };
    }
    if (c.model == "lattice") {
        CoarseGraining cg;
        cg.d = c.d;
        cg.side = lattice_side_for(n, c.d);
        const uint32_t want = std::max<uint32_t>(2, default_cell_side(n, c.d, c.c > 0 ? c.c : 2.0));
        cg.cell_side = 0;
        for (uint32_t s = want; s <= cg.side; ++s) {
            if (cg.side % s == 0) {
                cg.cell_side = s;
                break;
            }
        }
        require(cg.cell_side != 0, "no cell side >= " + std::to_string(want) + " divides lattice side " +
                                       std::to_string(cg.side));
        cg.validate();
        const uint64_t steps = c.depth ? c.depth : static_cast<uint64_t>(std::ceil(std::log2(n)));
        const uint64_t per_step = c.t ? c.t : default_gates_per_coarse_step(n);
        return [cg, steps, per_step](RandomSource& rng) {
            return sample_coarse_lattice_circuit(cg, steps, per_step, rng);
        };
    }
    throw std::invalid_argument("model must be matching, sequential or lattice, got '" + c.model + "'");
}

std::optional<unsigned> lattice_dim(const ExperimentConfig& c) {
    return c.model == "lattice" ? std::optional<unsigned>(c.d) : std::nullopt;
}

bool is_number(const Value& v) {
    return std::holds_alternative<int64_t>(v) || std::holds_alternative<uint64_t>(v) ||
           std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
    if (const auto* x = std::get_if<int64_t>(&v)) return static_cast<double>(*x);
    if (const auto* x = std::get_if<uint64_t>(&v)) return static_cast<double>(*x);
    if (const auto* x = std::get_if<double>(&v)) return *x;
    if (const auto* x = std::get_if<bool>(&v)) return *x ? 1.0 : 0.0;
    return std::nan("");
}

std::vector<double> column(const std::vector<Record>& rows, const std::string& key) {
    std::vector<double> out;
    for (const auto& r : rows) {
        if (const Value* v = r.find(key); v && !std::holds_alternative<std::monostate>(*v)) {
            out.push_back(as_double(*v));
        }
    }
    return out;
}

// Numeric columns become means, boolean columns "all true", strings are kept
// when every row agrees.
Record mean_summary(const std::vector<Record>& rows, const std::vector<std::string>& keys) {
    Record s;
    for (const auto& key : keys) {
        std::vector<const Value*> vals;
        for (const auto& r : rows) {
            if (const Value* v = r.find(key); v && !std::holds_alternative<std::monostate>(*v)) {
                vals.push_back(v);
            }
        }
        if (vals.empty()) {
            s.add(key, std::monostate{});
        } else if (std::all_of(vals.begin(), vals.end(), [](const Value* v) { return is_number(*v); })) {
            double sum = 0;
            for (const Value* v : vals) sum += as_double(*v);
            s.add(key, sum / static_cast<double>(vals.size()));
        } else if (std::all_of(vals.begin(), vals.end(),
                               [](const Value* v) { return std::holds_alternative<bool>(*v); })) {
            s.add(key, std::all_of(vals.begin(), vals.end(), [](const Value* v) { return std::get<bool>(*v); }));
        } else if (std::all_of(vals.begin(), vals.end(), [&](const Value* v) { return *v == *vals.front(); })) {
            s.add(key, *vals.front());
        } else {
            s.add(key, std::monostate{});
        }
    }
    return s;
}

void append(Record& into, const Record& from) {
    for (const auto& f : from.fields) {
        into.fields.push_back(f);
    }
}

struct Plan {
    std::vector<std::string> columns;
    uint64_t trials = 0;  // 0: a single aggregate record
    std::function<Record(RandomSource&)> trial;
    std::function<Record(const std::vector<Record>&)> summary;
};

void require_trials(const ExperimentConfig& c) { require(c.trials >= 1, "trials must be >= 1"); }

Plan scramble_plan(const ExperimentConfig& c) {
    require(c.n >= 2, "scramble needs n >= 2");
    require_trials(c);
    require(c.samples >= 1, "samples must be >= 1");
    const uint32_t n = c.n;
    const Sampler sampler = circuit_sampler(c, n);
    const auto dim = lattice_dim(c);
    Plan p;
    p.columns = {"model", "n", "depth", "gates", "excess_purity_1", "excess_purity_2", "excess_purity_3",
                 "pauli_weight", "lightcone_ok"};
    p.trials = c.trials;
    const std::string model = c.model;
    const uint32_t samples = c.samples;
    p.trial = [=](RandomSource& rng) {
        const LayeredCircuit circuit = sampler(rng);
        StabilizerTableau t(n);
        t.apply(circuit);
        Record r;
        r.add("model", model).add("n", uint64_t{n}).add("depth", uint64_t{circuit.depth()});
        r.add("gates", uint64_t{circuit.gate_count()});
        for (uint32_t s = 1; s <= 3; ++s) {
            const std::string key = "excess_purity_" + std::to_string(s);
            if (s >= n) {
                r.add(key, std::monostate{});
                continue;
            }
            double sum = 0;
            for (uint32_t k = 0; k < samples; ++k) {
                const auto subset = random_subset(n, s, rng);
                sum += std::ldexp(subsystem_purity(t, subset), static_cast<int>(s)) - 1.0;
            }
            r.add(key, sum / samples);
        }
        const auto cone = lightcone_check(circuit, 0, dim);
        r.add("pauli_weight", uint64_t{cone.pauli_support.back()}).add("lightcone_ok", cone.holds);
        return r;
    };
    p.summary = [cols = p.columns](const std::vector<Record>& rows) { return mean_summary(rows, cols); };
    return p;
}

Plan parallelize_plan(const ExperimentConfig& c) {
    require(c.n >= 2, "parallelize needs n >= 2");
    require_trials(c);
    const uint32_t n = c.n;
    const uint64_t t = c.t ? c.t : static_cast<uint64_t>(std::ceil(n * std::log2(n)));
    const double log2n = std::log2(n);
    Plan p;
    p.columns = {"n", "t", "depth", "depth_over_log2n", "p50", "p90", "p99", "max"};
    p.trials = c.trials;
    p.trial = [=, graph = InteractionGraph::complete(n)](RandomSource& rng) {
        const auto depth = parallelize(sample_sequential_circuit(graph, t, rng), n).depth();
        Record r;
        r.add("n", uint64_t{n}).add("t", t).add("depth", uint64_t{depth});
        r.add("depth_over_log2n", static_cast<double>(depth) / log2n);
        return r;
    };
    p.summary = [cols = p.columns](const std::vector<Record>& rows) {
        Record s = mean_summary(rows, {"n", "t", "depth", "depth_over_log2n"});
        const auto depths = column(rows, "depth");
        s.add("p50", quantile(depths, 0.5)).add("p90", quantile(depths, 0.9)).add("p99", quantile(depths, 0.99));
        s.add("max", *std::max_element(depths.begin(), depths.end()));
        return s;
    };
    return p;
}

Plan subset_plan(const ExperimentConfig& c) {
    require(c.n >= 2, "subset needs n >= 2");
    require_trials(c);
    require(c.f > 0 && c.f < 1, "f must lie in (0, 1)");
    require(c.c >= 0 && c.c == std::floor(c.c) && c.c <= c.n, "c must be an integer in [0, n]");
    const uint32_t n = c.n;
    const uint64_t depth = c.depth ? c.depth : default_matching_depth(n);
    const unsigned threshold = weight_threshold(n, c.f);
    const auto coupons = static_cast<uint32_t>(c.c);
    const double f = c.f;
    Plan p;
    p.columns = {"n", "depth", "final_size", "below_threshold", "coupon_conditional",
                 "survival", "wilson_lower", "wilson_upper", "coupon_reference"};
    p.trials = c.trials;
    p.trial = [=](RandomSource& rng) {
        const auto sizes = simulate_growth(n, depth, rng);
        const uint64_t size = sizes.back();
        Record r;
        r.add("n", uint64_t{n}).add("depth", depth).add("final_size", size).add("below_threshold", size <= threshold);
        if (coupons > 0) {
            // C(n - |S|, c) / C(n, c) as a product of ratios.
            double q = 1.0;
            for (uint32_t i = 0; i < coupons; ++i) {
                q *= size + i > n ? 0.0 : static_cast<double>(n - size - i) / static_cast<double>(n - i);
            }
            r.add("coupon_conditional", q);
        } else {
            r.add("coupon_conditional", std::monostate{});
        }
        return r;
    };
    p.summary = [=](const std::vector<Record>& rows) {
        Record s = mean_summary(rows, {"n", "depth", "final_size"});
        s.add("below_threshold", std::monostate{});
        s.add("coupon_conditional", coupons > 0 ? Value(mean_summary(rows, {"coupon_conditional"}).fields[0].second)
                                                : Value(std::monostate{}));
        const auto below = column(rows, "below_threshold");
        const auto hits = static_cast<uint64_t>(std::accumulate(below.begin(), below.end(), 0.0));
        const auto w = wilson_interval(hits, rows.size());
        s.add("survival", w.estimate).add("wilson_lower", w.lower).add("wilson_upper", w.upper);
        s.add("coupon_reference", coupons > 0 ? Value(std::pow(1.0 - f, coupons)) : Value(std::monostate{}));
        return s;
    };
    return p;
}

Plan single(Record r) {
    Plan p;
    for (const auto& [k, v] : r.fields) {
        p.columns.push_back(k);
    }
    p.summary = [r](const std::vector<Record>&) { return r; };
    return p;
}

Plan gap_plan(const ExperimentConfig& c) {
    require(c.n >= 2 && c.n <= kMaxMomentChainQubits,
            "gap needs n in [2, " + std::to_string(kMaxMomentChainQubits) + "]");
    InteractionGraph graph = InteractionGraph::complete(c.n);
    if (c.graph == "line") {
        graph = InteractionGraph::lattice(1, c.n);
    } else if (c.graph == "lattice") {
        graph = InteractionGraph::lattice(c.d, lattice_side_for(c.n, c.d));
    } else {
        require(c.graph == "complete", "graph must be complete, line or lattice, got '" + c.graph + "'");
    }
    const auto report = spectral_gap(PauliChain::build(graph));
    Record r;
    r.add("n", uint64_t{c.n}).add("graph", graph.name()).add("gap", report.gap).add("lambda2", report.lambda2);
    r.add("n_times_gap", report.gap * c.n).add("solver", report.solver).add("solver_residual", report.residual);
    return single(r);
}

Plan hitting_plan(const ExperimentConfig& c) {
    Record r;
    if (c.n > 0) {
        require(c.from >= 1 && c.from <= c.n / 2, "from must lie in [1, floor(n/2)]");
        require(c.m >= 1 && c.m <= c.from, "m (target weight) must lie in [1, from]");
        const auto d = chain_descent_probability(c.n, c.from, c.m);
        r.add("n", uint64_t{c.n}).add("start", uint64_t{c.from}).add("target", uint64_t{c.m});
        r.add("bound", d.bound).add("log_bound", d.log_bound);
        r.add("exact", d.exact ? Value(*d.exact) : Value(std::monostate{}));
        if (d.exact) {
            r.add("within_bound", *d.exact <= d.bound);
        }
        return single(r);
    }
    const WalkSpec spec = WalkSpec::uniform(c.a, c.p_minus, c.p_plus);
    spec.validate();
    const double exact = hitting_probability(spec);
    r.add("a", uint64_t{c.a}).add("p_minus", c.p_minus).add("p_plus", c.p_plus).add("exact", exact);
    if (c.trials > 1) {
        RandomSource rng(c.seed);
        const auto mc = simulate_hitting(spec, c.trials, rng);
        const double sigma = mc.sigma(exact);
        r.add("walks", mc.trials).add("estimate", mc.estimate()).add("sigma", sigma);
        r.add("z_score", sigma > 0 ? (mc.estimate() - exact) / sigma : 0.0);
    }
    return single(r);
}

Plan decouple_plan(const ExperimentConfig& c) {
    require_trials(c);
    DecouplingSetup setup;
    setup.n = c.n;
    setup.m = c.m;
    require(c.mode == "entangled" || c.mode == "pure", "mode must be entangled or pure, got '" + c.mode + "'");
    setup.mode = c.mode == "pure" ? DecouplingSetup::Mode::PureAncilla : DecouplingSetup::Mode::EntangledAncilla;
    setup.validate();
    const uint32_t size = c.subset ? c.subset : weight_threshold(c.n, c.f);
    require(size <= c.n, "subset size exceeds n");
    const Sampler sampler = circuit_sampler(c, c.n);
    const bool regime = setup.in_theorem_regime(size);
    const auto dim = lattice_dim(c);
    Plan p;
    p.columns = {"n", "m", "mode", "subset_size", "in_regime", "depth", "distance", "p50", "p90", "max"};
    p.trials = c.trials;
    p.trial = [=](RandomSource& rng) {
        const LayeredCircuit circuit = sampler(rng);
        const bool cone_ok = circuit.depth() == 0 || lightcone_check(circuit, 0, dim).holds;
        if (!cone_ok) {
            throw std::logic_error("circuit violated the light-cone envelope");
        }
        const auto subset = random_subset(setup.n, size, rng);
        Record r;
        r.add("n", uint64_t{setup.n}).add("m", uint64_t{setup.m}).add("mode", c.mode);
        r.add("subset_size", uint64_t{size}).add("in_regime", regime).add("depth", uint64_t{circuit.depth()});
        r.add("distance", decoupling_distance(setup, circuit, subset));
        return r;
    };
    p.summary = [](const std::vector<Record>& rows) {
        Record s = mean_summary(rows, {"n", "m", "mode", "subset_size", "in_regime", "depth", "distance"});
        const auto d = column(rows, "distance");
        s.add("p50", quantile(d, 0.5)).add("p90", quantile(d, 0.9));
        s.add("max", *std::max_element(d.begin(), d.end()));
        return s;
    };
    return p;
}

Plan code_distance_plan(const ExperimentConfig& c) {
    require_trials(c);
    require(c.n >= 2 && c.n <= kMaxCodeDistanceQubits,
            "code-distance needs n in [2, " + std::to_string(kMaxCodeDistanceQubits) + "]");
    require(c.m >= 1 && c.m <= c.n, "m must lie in [1, n]");
    const uint32_t n = c.n;
    const uint32_t m = c.m;
    const Sampler sampler = circuit_sampler(c, n);
    Plan p;
    p.columns = {"n", "m", "depth", "distance", "min", "max"};
    p.trials = c.trials;
    p.trial = [=](RandomSource& rng) {
        const LayeredCircuit circuit = sampler(rng);
        StabilizerTableau t(n);
        t.apply(circuit);
        Record r;
        r.add("n", uint64_t{n}).add("m", uint64_t{m}).add("depth", uint64_t{circuit.depth()});
        r.add("distance", uint64_t{code_distance(t, m)});
        return r;
    };
    p.summary = [](const std::vector<Record>& rows) {
        Record s = mean_summary(rows, {"n", "m", "depth", "distance"});
        const auto d = column(rows, "distance");
        s.add("min", *std::min_element(d.begin(), d.end())).add("max", *std::max_element(d.begin(), d.end()));
        return s;
    };
    return p;
}

Plan weightchain_plan(const ExperimentConfig& c) {
    require(c.n >= 1, "weightchain needs n >= 1");
    require(c.from >= 1 && c.from <= c.n, "from must lie in [1, n]");
    require(c.f > 0 && c.f < 1, "f must lie in (0, 1)");
    const unsigned threshold = weight_threshold(c.n, c.f);
    const TheoremBound bound{c.n, c.from, c.f, 1};
    const auto pi = stationary(c.n);
    double stationary_tail = 0;
    for (unsigned k = 1; k <= threshold; ++k) {
        stationary_tail += pi.at(k);
    }
    Record r;
    r.add("n", uint64_t{c.n}).add("from", uint64_t{c.from}).add("t", c.t).add("f", c.f);
    r.add("threshold", uint64_t{threshold}).add("tail_probability", tail_probability(c.n, c.from, c.t, c.f));
    r.add("first_term", bound.first_term()).add("second_term", bound.second_term()).add("bound", bound.total());
    r.add("valid_regime", bound.valid_regime()).add("stationary_tail", stationary_tail);
    return single(r);
}

Plan make_plan(const ExperimentConfig& c) {
    require(c.threads >= 1, "threads must be >= 1");
    if (c.command == "scramble") return scramble_plan(c);
    if (c.command == "parallelize") return parallelize_plan(c);
    if (c.command == "subset") return subset_plan(c);
    if (c.command == "gap") return gap_plan(c);
    if (c.command == "hitting") return hitting_plan(c);
    if (c.command == "decouple") return decouple_plan(c);
    if (c.command == "code-distance") return code_distance_plan(c);
    if (c.command == "weightchain") return weightchain_plan(c);
    throw std::invalid_argument("unknown command '" + c.command + "'");
}

}  // namespace

const std::vector<CommandInfo>& experiment_commands() {
    static const std::vector<CommandInfo> commands = {
        {"scramble", "Excess subsystem purity of random Clifford circuits from |0...0>",
         {"model", "n", "depth", "t", "d", "c", "trials", "samples", "seed"}},
        {"parallelize", "Depth of greedily parallelized sequential circuits", {"n", "t", "trials", "seed"}},
        {"subset", "Support growth of the subset chain under random matchings",
         {"n", "depth", "f", "c", "trials", "seed"}},
        {"gap", "Spectral gap of the second-moment Pauli chain (n <= 8)", {"n", "graph", "d"}},
        {"hitting", "Biased-walk hitting probability, or weight-chain descent when n is set",
         {"a", "p-minus", "p-plus", "n", "from", "m", "trials", "seed"}},
        {"decouple", "Decoupling trace distance of the message from a subset of the output",
         {"model", "n", "m", "mode", "subset", "f", "depth", "t", "d", "c", "trials", "seed"}},
        {"code-distance", "Distance of codes encoded by random circuits (n <= 16)",
         {"model", "n", "m", "depth", "t", "d", "c", "trials", "seed"}},
        {"weightchain", "Tail probability of the lumped weight chain against the bound",
         {"n", "from", "t", "f"}},
    };
    return commands;
}

void run_experiment(const ExperimentConfig& config, std::ostream& stdout_stream) {
    const auto start = std::chrono::steady_clock::now();
    const Plan plan = make_plan(config);
    const std::string path = resolve_output_path(config.out);
    const auto format = resolve_format(config, path);
    const std::string hash = config.hash();

    std::vector<std::string> columns = {"experiment", "config_hash", "seed"};
    if (plan.trials) {
        columns.insert(columns.end(), {"trial", "trial_seed"});
    }
    columns.insert(columns.end(), plan.columns.begin(), plan.columns.end());
    columns.insert(columns.end(), {"wall_time_s", "code_version"});

    auto prefix = [&](Value trial, Value trial_seed) {
        Record r;
        r.add("experiment", config.command).add("config_hash", hash).add("seed", config.seed);
        if (plan.trials) {
            r.add("trial", std::move(trial)).add("trial_seed", std::move(trial_seed));
        }
        return r;
    };

    RecordWriter writer(format, columns, path, stdout_stream);
    try {
        const RandomSource master(config.seed);
        std::vector<Record> rows;
        if (plan.trials) {
            run_ordered(
                plan.trials, config.threads,
                [&](uint64_t k) {
                    RandomSource rng = master.split(k);
                    Record r = prefix(k, rng.seed());
                    append(r, plan.trial(rng));
                    return r;
                },
                [&](const Record& r) {
                    writer.write(r);
                    rows.push_back(r);
                });
        }
        Record s = prefix(std::string("summary"), std::monostate{});
        append(s, plan.summary(rows));
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        s.add("wall_time_s", wall).add("code_version", code_version());
        writer.write(s);
        writer.finish();
    } catch (const std::exception& e) {
        writer.abort(e.what());
        throw;
    }
}

namespace {

struct Check {
    std::string name;
    bool full_only;
    // Returns a detail string; sets ok.
    std::function<std::string(bool& ok)> body;
};

double chi_square_stat(const std::vector<uint64_t>& counts, const std::vector<double>& probs, uint64_t total) {
    double x = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
        const double e = probs[i] * static_cast<double>(total);
        x += (counts[i] - e) * (counts[i] - e) / e;
    }
    return x;
}

double chi_square_critical(size_t dof, double alpha) {
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, alpha));
}

std::string chi_detail(double x, double crit, bool& ok) {
    ok = x <= crit;
    std::ostringstream s;
    s << "chi2=" << x << " critical=" << crit;
    return s.str();
}

std::vector<Check> checks(const VerifyOptions& options) {
    std::vector<Check> list;
    list.push_back({"clifford-table-transition-uniform", false, [](bool& ok) {
                        const auto& table = TwoQubitCliffordTable::instance();
                        ok = table.size() == kTwoQubitCliffordCount;
                        for (LocalPauli v = 1; v < 16; ++v) {
                            std::array<uint32_t, 16> counts{};
                            for (uint32_t id = 0; id < table.size(); ++id) {
                                ++counts[table[id].image[v]];
                            }
                            ok = ok && counts[0] == 0;
                            for (int w = 1; w < 16; ++w) {
                                ok = ok && counts[w] == kTwoQubitCliffordCount / 15;
                            }
                        }
                        return "each of 15 inputs maps to every non-identity pair 768 times";
                    }});
    list.push_back({"tableau-invariants", false, [](bool& ok) {
                        RandomSource rng(101);
                        ok = true;
                        for (uint32_t n = 2; n <= 12; ++n) {
                            StabilizerTableau t(n);
                            for (const auto& g : sample_sequential_circuit(InteractionGraph::complete(n), 20 * n, rng)) {
                                t.apply(g);
                                ok = ok && t.check_invariants();
                            }
                        }
                        return "symplectic basis preserved after every gate, n = 2..12";
                    }});
    list.push_back({"weightchain-stationarity", false, [&options](bool& ok) {
                        double worst = 0;
                        for (unsigned n = 2; n <= 64; ++n) {
                            const WeightChain chain =
                                options.mutate_transition
                                    ? WeightChain(n,
                                                  [](unsigned n, unsigned x) {
                                                      auto r = transition_row(n, x);
                                                      r.forward *= 1.01;
                                                      r.stay = 1.0 - r.back - r.forward;
                                                      return r;
                                                  })
                                    : WeightChain(n);
                            auto mass = stationary(n).mass;
                            const auto before = mass;
                            std::vector<double> scratch(n);
                            chain.step(mass, scratch);
                            for (unsigned k = 0; k < n; ++k) {
                                worst = std::max(worst, std::abs(mass[k] - before[k]));
                            }
                        }
                        ok = worst < 1e-13;
                        std::ostringstream s;
                        s << "max |pi P - pi| = " << worst << " over n = 2..64";
                        return s.str();
                    }});
    list.push_back({"weightchain-rational-oracle", false, [](bool& ok) {
                        const unsigned n = 8;
                        std::vector<Rational> exact(n, 0);
                        exact[0] = 1;
                        exact = evolve_rational(n, exact, 40);
                        const auto approx = evolve_exact(WeightDistribution::point_mass(n, 1), 40);
                        double worst = 0;
                        for (unsigned k = 0; k < n; ++k) {
                            worst = std::max(worst, std::abs(approx.mass[k] - static_cast<double>(exact[k])));
                        }
                        ok = worst < 1e-14;
                        std::ostringstream s;
                        s << "n=8, t=40: max deviation " << worst;
                        return s.str();
                    }});
    list.push_back({"hitting-recurrence-vs-linear-solve", false, [](bool& ok) {
                        double worst = 0;
                        for (unsigned a : {1u, 2u, 5u, 17u}) {
                            for (double pm : {0.2, 0.5, 0.7}) {
                                for (double pp : {0.3, 0.5, 0.8}) {
                                    const auto spec = WalkSpec::uniform(a, pm, pp);
                                    // h(i) = Pr[absorb at -1 | start i], i = 0..a-1, h(a) = 0.
                                    std::vector<double> lo(a, 0), di(a, 1), up(a, 0), rhs(a, 0);
                                    up[0] = -pm;
                                    rhs[0] = 1 - pm;
                                    for (unsigned i = 1; i < a; ++i) {
                                        lo[i] = -(1 - pp);
                                        up[i] = -pp;
                                    }
                                    const auto h = solve_tridiagonal(lo, di, up, rhs);
                                    worst = std::max(worst, std::abs(h[0] - hitting_probability(spec)));
                                }
                            }
                        }
                        ok = worst < 1e-12;
                        std::ostringstream s;
                        s << "max deviation " << worst;
                        return s.str();
                    }});
    list.push_back({"descent-small-chain", false, [](bool& ok) {
                        const auto d = chain_descent_probability(4, 2, 1);
                        ok = d.exact && std::abs(*d.exact - 1.0 / 7.0) < 1e-15 && *d.exact <= d.bound;
                        return "n=4 from 2 to 1: exact 1/7";
                    }});
    list.push_back({"stabilizer-ghz-examples", false, [](bool& ok) {
                        const auto ghz = StabilizerTableau::from_stabilizers({PauliString::from_string("XXX"),
                                                                              PauliString::from_string("ZZI"),
                                                                              PauliString::from_string("IZZ")});
                        const std::vector<uint32_t> one{0}, two{0, 1};
                        const auto mass = weight_mass_spectrum(ghz);
                        ok = subsystem_purity(ghz, one) == 0.5 && subsystem_purity(ghz, two) == 0.5 &&
                             trace_distance_to_mixed(ghz, one) == 0.0 && trace_distance_to_mixed(ghz, two) == 1.0 &&
                             mass == std::vector<uint64_t>{1, 0, 3, 4};
                        return "purities, trace distances and weight spectrum of GHZ3";
                    }});
    list.push_back({"purity-complementarity", false, [](bool& ok) {
                        RandomSource rng(102);
                        ok = true;
                        for (int trial = 0; trial < 200; ++trial) {
                            const uint32_t n = 2 + static_cast<uint32_t>(rng.uniform_below(40));
                            StabilizerTableau t(n);
                            t.apply(sample_matching_circuit(n, 1 + rng.uniform_below(6), rng));
                            const uint32_t k = 1 + static_cast<uint32_t>(rng.uniform_below(n - 1));
                            const auto s = random_subset(n, k, rng);
                            std::vector<uint32_t> comp;
                            for (uint32_t q = 0; q < n; ++q) {
                                if (!std::binary_search(s.begin(), s.end(), q)) comp.push_back(q);
                            }
                            ok = ok && subsystem_purity(t, s) == subsystem_purity(t, comp);
                        }
                        return "tr rho_S^2 = tr rho_{S^c}^2 on 200 random pure states";
                    }});
    list.push_back({"moment-gap-small-lines", false, [](bool& ok) {
                        const double g3 = spectral_gap(PauliChain::build(InteractionGraph::lattice(1, 3))).gap;
                        const double g5 = spectral_gap(PauliChain::build(InteractionGraph::lattice(1, 5))).gap;
                        const double e5 = (4.0 - std::sqrt(5.0)) / 20.0;
                        ok = std::abs(g3 - 0.3) < 1e-12 && std::abs(g5 - e5) < 1e-12;
                        std::ostringstream s;
                        s << "line n=3 gap " << g3 << ", n=5 gap " << g5;
                        return s.str();
                    }});
    list.push_back({"lumped-chain-spectrum", false, [](bool& ok) {
                        const auto g = chain_spectral_gap(3);
                        const std::vector<double> want{1.0 / 15.0, 0.6, 1.0};
                        ok = g.eigenvalues.size() == 3;
                        for (size_t i = 0; ok && i < 3; ++i) {
                            ok = std::abs(g.eigenvalues[i] - want[i]) < 1e-12;
                        }
                        return "n=3 eigenvalues {1/15, 3/5, 1}";
                    }});
    list.push_back({"matchings-and-leveling-valid", false, [](bool& ok) {
                        RandomSource rng(103);
                        ok = true;
                        for (uint32_t n = 2; n <= 40; ++n) {
                            validate_matching(n, sample_matching(n, rng));
                        }
                        for (uint32_t n = 2; n <= 30; ++n) {
                            const auto gates = sample_sequential_circuit(InteractionGraph::complete(n), 10 * n, rng);
                            const auto layered = parallelize(gates, n);
                            layered.validate();
                            ok = ok && layered.flatten() == gates;
                        }
                        return "matchings are maximum; leveling keeps gate order";
                    }});
    list.push_back({"circuit-serialization-roundtrip", false, [](bool& ok) {
                        RandomSource rng(104);
                        CircuitFile file{sample_matching_circuit(9, 7, rng), "matching", 104};
                        std::stringstream buf;
                        write_circuit(buf, file);
                        const auto back = read_circuit(buf);
                        ok = back.circuit == file.circuit && back.model == file.model && back.seed == file.seed;
                        return "write then read reproduces the circuit";
                    }});
    list.push_back({"lightcone-envelope", false, [](bool& ok) {
                        RandomSource rng(105);
                        ok = lightcone_check(sample_matching_circuit(256, 12, rng), 0).holds;
                        CoarseGraining cg{2, 8, 2};
                        ok = ok && lightcone_check(sample_coarse_lattice_circuit(cg, 3, 4, rng), 0, 2u).holds;
                        return "support stays within the envelope";
                    }});
    list.push_back({"five-qubit-code-distance", false, [](bool& ok) {
                        std::vector<PauliString> code;
                        for (const char* s : {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}) {
                            code.push_back(PauliString::from_string(s));
                        }
                        const auto d = code_distance(code);
                        ok = d == 3;
                        return "distance " + std::to_string(d);
                    }});

    list.push_back({"sampled-pair-transition-chi2", true, [](bool& ok) {
                        RandomSource rng(201);
                        const uint64_t total = 150000;
                        std::vector<uint64_t> counts(15, 0);
                        for (uint64_t i = 0; i < total; ++i) {
                            ++counts[gate_transition(PauliPair{Letter::X, Letter::I}, rng).index() - 1];
                        }
                        return chi_detail(chi_square_stat(counts, std::vector<double>(15, 1.0 / 15), total),
                                          chi_square_critical(14, 1e-3), ok);
                    }});
    list.push_back({"hitting-monte-carlo", true, [](bool& ok) {
                        RandomSource rng(202);
                        const auto spec = WalkSpec::uniform(6, 0.6, 0.7);
                        const double exact = hitting_probability(spec);
                        const auto mc = simulate_hitting(spec, 200000, rng);
                        const double z = (mc.estimate() - exact) / mc.sigma(exact);
                        ok = std::abs(z) < 4;
                        std::ostringstream s;
                        s << "estimate " << mc.estimate() << " exact " << exact << " z=" << z;
                        return s.str();
                    }});
    list.push_back({"weightchain-trajectories-chi2", true, [](bool& ok) {
                        RandomSource rng(203);
                        const unsigned n = 12;
                        const uint64_t t = 30, paths = 40000;
                        const auto exact = evolve_exact(WeightDistribution::point_mass(n, 1), t);
                        std::vector<uint64_t> counts(n, 0);
                        for (uint64_t i = 0; i < paths; ++i) {
                            ++counts[simulate_trajectory(n, 1, t, rng).back() - 1];
                        }
                        // Pool weights with small expected counts into their neighbors.
                        std::vector<uint64_t> c;
                        std::vector<double> p;
                        uint64_t acc = 0;
                        double pacc = 0;
                        for (unsigned k = 0; k < n; ++k) {
                            acc += counts[k];
                            pacc += exact.mass[k];
                            if (pacc * paths >= 20 || k + 1 == n) {
                                c.push_back(acc);
                                p.push_back(pacc);
                                acc = 0;
                                pacc = 0;
                            }
                        }
                        return chi_detail(chi_square_stat(c, p, paths), chi_square_critical(c.size() - 1, 1e-3), ok);
                    }});
    list.push_back({"matching-uniform-n6-chi2", true, [](bool& ok) {
                        RandomSource rng(204);
                        const uint64_t total = 45000;
                        std::map<std::vector<Edge>, uint64_t> seen;
                        for (uint64_t i = 0; i < total; ++i) {
                            auto m = sample_matching(6, rng);
                            for (auto& e : m) {
                                if (e.first > e.second) std::swap(e.first, e.second);
                            }
                            std::sort(m.begin(), m.end());
                            ++seen[m];
                        }
                        std::vector<uint64_t> counts;
                        for (const auto& [m, k] : seen) counts.push_back(k);
                        if (counts.size() != 15) {
                            ok = false;
                            return "saw " + std::to_string(counts.size()) + " of 15 matchings";
                        }
                        return chi_detail(chi_square_stat(counts, std::vector<double>(15, 1.0 / 15), total),
                                          chi_square_critical(14, 1e-3), ok);
                    }});
    list.push_back({"subset-step-law-chi2", true, [](bool& ok) {
                        RandomSource rng(205);
                        const uint64_t total = 60000;
                        const std::vector<Edge> pair{{0, 1}};
                        std::vector<uint64_t> counts(3, 0);  // {0}, {1}, {0,1}
                        for (uint64_t i = 0; i < total; ++i) {
                            const auto s = step(SupportState::singleton(2, 0), pair, rng);
                            ++counts[s.size() == 2 ? 2 : (s.contains(0) ? 0 : 1)];
                        }
                        return chi_detail(chi_square_stat(counts, {0.2, 0.2, 0.6}, total),
                                          chi_square_critical(2, 1e-3), ok);
                    }});
    return list;
}

}  // namespace

int run_verify(const VerifyOptions& options, std::ostream& out) {
    if (options.suite != "fast" && options.suite != "full") {
        throw std::invalid_argument("suite must be fast or full, got '" + options.suite + "'");
    }
    const bool full = options.suite == "full";
    int failures = 0, run = 0;
    for (const auto& check : checks(options)) {
        if (check.full_only && !full) {
            continue;
        }
        ++run;
        bool ok = false;
        std::string detail;
        try {
            detail = check.body(ok);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("threw: ") + e.what();
        }
        failures += ok ? 0 : 1;
        out << (ok ? "PASS " : "FAIL ") << check.name << ": " << detail << '\n';
    }
    out << (failures ? "FAILED " : "OK ") << failures << " of " << run << " checks failed (suite " << options.suite
        << (options.mutate_transition ? ", mutated transition" : "") << ")\n";
    return failures;
}

}  // namespace scrambling::cli
