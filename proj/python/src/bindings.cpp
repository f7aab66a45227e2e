#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scrambling/circuit.hpp"
#include "scrambling/hitting.hpp"
#include "scrambling/moment_gap.hpp"
#include "scrambling/pauli.hpp"
#include "scrambling/stabilizer.hpp"
#include "scrambling/subset_chain.hpp"
#include "scrambling/tableau.hpp"
#include "scrambling/weight_chain.hpp"

namespace py = pybind11;
using namespace scrambling;

namespace {

py::dict proportion(const ProportionEstimate& p) {
    py::dict d;
    d["successes"] = p.successes;
    d["trials"] = p.trials;
    d["estimate"] = p.estimate;
    d["lower"] = p.lower;
    d["upper"] = p.upper;
    return d;
}

InteractionGraph graph_by_name(const std::string& name, uint32_t n, unsigned d) {
    if (name == "complete") return InteractionGraph::complete(n);
    if (name == "line") return InteractionGraph::lattice(1, n);
    if (name == "lattice") {
        const auto side = static_cast<uint32_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
        return InteractionGraph::lattice(d, side);
    }
    throw std::invalid_argument("graph must be complete, line or lattice");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random Clifford circuit scrambling: weight chains, stabilizer simulation, moment gaps";

    py::class_<RandomSource>(m, "RandomSource")
        .def(py::init<uint64_t>(), py::arg("seed"))
        .def_property_readonly("seed", &RandomSource::seed)
        .def("split", &RandomSource::split, py::arg("index"))
        .def("next_u64", &RandomSource::next_u64)
        .def("uniform_below", &RandomSource::uniform_below, py::arg("bound"))
        .def("uniform01", &RandomSource::uniform01);

    py::class_<PauliString>(m, "PauliString")
        .def(py::init(&PauliString::from_string), py::arg("letters"))
        .def_property_readonly("num_qubits", &PauliString::num_qubits)
        .def("weight", &PauliString::weight)
        .def("support", &PauliString::support)
        .def("commutes", &PauliString::commutes)
        .def("__str__", &PauliString::str)
        .def("__repr__", [](const PauliString& p) { return "PauliString('" + p.str() + "')"; })
        .def("__eq__", [](const PauliString& a, const PauliString& b) { return a == b; });

    py::class_<Gate>(m, "Gate")
        .def(py::init([](uint32_t q0, uint32_t q1, uint32_t id) { return Gate{q0, q1, id}; }), py::arg("q0"),
             py::arg("q1"), py::arg("clifford_id"))
        .def_readonly("q0", &Gate::q0)
        .def_readonly("q1", &Gate::q1)
        .def_readonly("clifford_id", &Gate::clifford_id)
        .def("__eq__", [](const Gate& a, const Gate& b) { return a == b; });

    py::class_<LayeredCircuit>(m, "LayeredCircuit")
        .def_readonly("num_qubits", &LayeredCircuit::num_qubits)
        .def_readonly("levels", &LayeredCircuit::levels)
        .def("depth", &LayeredCircuit::depth)
        .def("gate_count", &LayeredCircuit::gate_count)
        .def("flatten", &LayeredCircuit::flatten)
        .def("validate", &LayeredCircuit::validate);

    m.def("sample_matching_circuit", &sample_matching_circuit, py::arg("n"), py::arg("depth"), py::arg("rng"));
    m.def(
        "sample_sequential_circuit",
        [](uint32_t n, uint64_t t, RandomSource& rng, const std::string& graph, unsigned d) {
            return sample_sequential_circuit(graph_by_name(graph, n, d), t, rng);
        },
        py::arg("n"), py::arg("t"), py::arg("rng"), py::arg("graph") = "complete", py::arg("d") = 1);
    m.def("parallelize", &parallelize, py::arg("gates"), py::arg("num_qubits") = 0);
    m.def(
        "depth_statistics",
        [](uint32_t n, uint64_t t, uint64_t trials, RandomSource& rng) {
            const auto s = depth_statistics(n, t, trials, rng);
            py::dict d;
            d["mean"] = s.mean;
            d["p50"] = s.p50;
            d["p90"] = s.p90;
            d["p99"] = s.p99;
            d["min"] = s.min;
            d["max"] = s.max;
            d["depths"] = s.depths;
            return d;
        },
        py::arg("n"), py::arg("t"), py::arg("trials"), py::arg("rng"));

    m.def(
        "transition_row",
        [](unsigned n, unsigned x) {
            const auto r = transition_row(n, x);
            return py::make_tuple(r.back, r.stay, r.forward);
        },
        py::arg("n"), py::arg("x"), "(back, stay, forward) probabilities of the weight chain at weight x");
    m.def(
        "stationary", [](unsigned n) { return stationary(n).mass; }, py::arg("n"));
    m.def(
        "evolve", [](unsigned n, unsigned start, uint64_t t) {
            return evolve_exact(WeightDistribution::point_mass(n, start), t).mass;
        },
        py::arg("n"), py::arg("start"), py::arg("t"));
    m.def("tail_probability", &tail_probability, py::arg("n"), py::arg("start"), py::arg("t"), py::arg("f"));
    m.def(
        "tail_curve",
        [](unsigned n, unsigned start, const std::vector<uint64_t>& times, double f) {
            return tail_curve(n, start, times, f);
        },
        py::arg("n"), py::arg("start"), py::arg("times"), py::arg("f"));
    m.def("theorem_bound_first_term", &theorem_bound_first_term, py::arg("n"), py::arg("f"));
    m.def(
        "chain_spectral_gap",
        [](unsigned n) {
            const auto g = chain_spectral_gap(n);
            py::dict d;
            d["gap"] = g.gap;
            d["slem"] = g.slem;
            d["eigenvalues"] = g.eigenvalues;
            return d;
        },
        py::arg("n"));

    m.def(
        "hitting_probability",
        [](unsigned a, double p_minus, double p_plus) {
            return hitting_probability(WalkSpec::uniform(a, p_minus, p_plus));
        },
        py::arg("a"), py::arg("p_minus"), py::arg("p_plus"));
    m.def(
        "simulate_hitting",
        [](unsigned a, double p_minus, double p_plus, uint64_t walks, RandomSource& rng) {
            const auto mc = simulate_hitting(WalkSpec::uniform(a, p_minus, p_plus), walks, rng);
            return py::make_tuple(mc.successes, mc.trials);
        },
        py::arg("a"), py::arg("p_minus"), py::arg("p_plus"), py::arg("walks"), py::arg("rng"));
    m.def(
        "chain_descent_probability",
        [](unsigned n, unsigned start, unsigned target) {
            const auto r = chain_descent_probability(n, start, target);
            py::dict d;
            d["bound"] = r.bound;
            d["log_bound"] = r.log_bound;
            d["exact"] = r.exact ? py::cast(*r.exact) : py::none();
            return d;
        },
        py::arg("n"), py::arg("start"), py::arg("target"));

    m.def("simulate_growth",
          py::overload_cast<uint32_t, uint64_t, RandomSource&>(&simulate_growth), py::arg("n"), py::arg("depth"),
          py::arg("rng"));
    m.def(
        "survival_probability",
        [](uint32_t n, double f, uint64_t depth, uint64_t trials, RandomSource& rng) {
            return proportion(survival_probability(n, f, depth, trials, rng));
        },
        py::arg("n"), py::arg("f"), py::arg("depth"), py::arg("trials"), py::arg("rng"));

    py::class_<StabilizerTableau>(m, "StabilizerTableau")
        .def(py::init<uint32_t>(), py::arg("n"))
        .def_static("bell_pairs", py::overload_cast<uint32_t, uint32_t>(&StabilizerTableau::bell_pairs),
                    py::arg("n"), py::arg("m"))
        .def_static(
            "from_stabilizers",
            [](const std::vector<PauliString>& gens) { return StabilizerTableau::from_stabilizers(gens); },
            py::arg("generators"))
        .def_property_readonly("num_qubits", &StabilizerTableau::num_qubits)
        .def("apply", py::overload_cast<const Gate&>(&StabilizerTableau::apply))
        .def("apply", py::overload_cast<const GateList&>(&StabilizerTableau::apply))
        .def("apply", py::overload_cast<const LayeredCircuit&>(&StabilizerTableau::apply))
        .def("stabilizers", &StabilizerTableau::stabilizers)
        .def("check_invariants", &StabilizerTableau::check_invariants)
        .def("dump", py::overload_cast<>(&StabilizerTableau::dump, py::const_))
        .def_static("parse", py::overload_cast<const std::string&>(&StabilizerTableau::parse));

    m.def(
        "subsystem_purity",
        [](const StabilizerTableau& t, const std::vector<uint32_t>& s) { return subsystem_purity(t, s); },
        py::arg("tableau"), py::arg("subset"));
    m.def(
        "trace_distance_to_mixed",
        [](const StabilizerTableau& t, const std::vector<uint32_t>& s) { return trace_distance_to_mixed(t, s); },
        py::arg("tableau"), py::arg("subset"));
    m.def(
        "weight_mass_spectrum",
        [](const StabilizerTableau& t, std::optional<std::vector<uint32_t>> restrict) {
            if (restrict) return weight_mass_spectrum(t, std::span<const uint32_t>(*restrict));
            return weight_mass_spectrum(t);
        },
        py::arg("tableau"), py::arg("restrict") = py::none());
    m.def("code_distance", py::overload_cast<const StabilizerTableau&, uint32_t>(&code_distance),
          py::arg("encoded"), py::arg("logical_qubits"));
    m.def("random_subset", &random_subset, py::arg("n"), py::arg("k"), py::arg("rng"));

    m.def(
        "spectral_gap",
        [](uint32_t n, const std::string& graph, unsigned d) {
            const auto r = spectral_gap(PauliChain::build(graph_by_name(graph, n, d)));
            py::dict out;
            out["gap"] = r.gap;
            out["lambda2"] = r.lambda2;
            out["residual"] = r.residual;
            out["solver"] = r.solver;
            return out;
        },
        py::arg("n"), py::arg("graph") = "complete", py::arg("d") = 1);
}
