#include "scrambling/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "scrambling/clifford_group.hpp"

namespace scrambling {

InteractionGraph InteractionGraph::complete(uint32_t n) {
    InteractionGraph g;
    g.kind_ = Kind::Complete;
    g.n_ = n;
    return g;
}

InteractionGraph InteractionGraph::lattice(unsigned d, uint32_t side) {
    if (d < 1) {
        throw std::invalid_argument("lattice dimension must be >= 1");
    }
    InteractionGraph g;
    g.kind_ = Kind::Lattice;
    g.d_ = d;
    g.side_ = side;
    uint64_t n = 1;
    for (unsigned k = 0; k < d; ++k) {
        n *= side;
    }
    if (n > UINT32_MAX) {
        throw std::invalid_argument("lattice too large");
    }
    g.n_ = static_cast<uint32_t>(n);
    uint64_t stride = 1;
    for (unsigned k = 0; k < d; ++k) {
        for (uint32_t site = 0; site < g.n_; ++site) {
            if ((site / stride) % side + 1 < side) {
                g.edges_.emplace_back(site, static_cast<uint32_t>(site + stride));
            }
        }
        stride *= side;
    }
    g.weights_.assign(g.edges_.size(), g.edges_.empty() ? 0.0 : 1.0 / g.edges_.size());
    return g;
}

InteractionGraph InteractionGraph::explicit_edges(uint32_t n, std::vector<Edge> edges, std::vector<double> weights) {
    for (const auto& [i, j] : edges) {
        if (i == j || i >= n || j >= n) {
            throw std::invalid_argument("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") invalid for n=" + std::to_string(n));
        }
    }
    if (weights.empty()) {
        weights.assign(edges.size(), 1.0);
    }
    if (weights.size() != edges.size()) {
        throw std::invalid_argument("one weight per edge required");
    }
    double total = 0;
    for (double w : weights) {
        if (!(w > 0.0)) {
            throw std::invalid_argument("edge weights must be positive");
        }
        total += w;
    }
    InteractionGraph g;
    g.kind_ = Kind::Explicit;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.weights_ = std::move(weights);
    for (auto& w : g.weights_) {
        w /= total;
    }
    g.cumulative_.resize(g.weights_.size());
    std::partial_sum(g.weights_.begin(), g.weights_.end(), g.cumulative_.begin());
    return g;
}

std::string InteractionGraph::name() const {
    switch (kind_) {
        case Kind::Complete:
            return "complete";
        case Kind::Lattice:
            return d_ == 1 ? "line" : "lattice" + std::to_string(d_) + "d";
        case Kind::Explicit:
            return "explicit";
    }
    return "unknown";
}

uint64_t InteractionGraph::num_edges() const {
    if (kind_ == Kind::Complete) {
        return static_cast<uint64_t>(n_) * (n_ - (n_ > 0)) / 2;
    }
    return edges_.size();
}

std::vector<Edge> InteractionGraph::edges() const {
    if (kind_ != Kind::Complete) {
        return edges_;
    }
    std::vector<Edge> out;
    for (uint32_t i = 0; i < n_; ++i) {
        for (uint32_t j = i + 1; j < n_; ++j) {
            out.emplace_back(i, j);
        }
    }
    return out;
}

std::vector<double> InteractionGraph::edge_weights() const {
    if (kind_ != Kind::Complete) {
        return weights_;
    }
    const uint64_t m = num_edges();
    return std::vector<double>(m, m ? 1.0 / m : 0.0);
}

Edge InteractionGraph::sample_edge(RandomSource& rng) const {
    if (num_edges() == 0) {
        throw std::invalid_argument("interaction graph has no edges");
    }
    switch (kind_) {
        case Kind::Complete: {
            auto i = static_cast<uint32_t>(rng.uniform_below(n_));
            auto j = static_cast<uint32_t>(rng.uniform_below(n_ - 1));
            j += j >= i;
            return {i, j};
        }
        case Kind::Lattice:
            return edges_[rng.uniform_below(edges_.size())];
        case Kind::Explicit: {
            const double u = rng.uniform01();
            auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            size_t k = std::min<size_t>(it - cumulative_.begin(), edges_.size() - 1);
            return edges_[k];
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<uint32_t> lattice_coordinates(uint32_t site, unsigned d, uint32_t side) {
    std::vector<uint32_t> c(d);
    for (unsigned k = 0; k < d; ++k) {
        c[k] = site % side;
        site /= side;
    }
    return c;
}

uint32_t lattice_site(const std::vector<uint32_t>& coords, uint32_t side) {
    uint32_t site = 0;
    for (size_t k = coords.size(); k-- > 0;) {
        site = site * side + coords[k];
    }
    return site;
}

void propagate(PauliString& p, const Gate& gate) {
    const auto& act = TwoQubitCliffordTable::instance()[gate.clifford_id];
    const unsigned v = p.x(gate.q0) | (p.z(gate.q0) << 1) | (p.x(gate.q1) << 2) | (p.z(gate.q1) << 3);
    const LocalPauli w = act.image[v];
    p.set(gate.q0, letter_from_bits(w & 1, (w >> 1) & 1));
    p.set(gate.q1, letter_from_bits((w >> 2) & 1, (w >> 3) & 1));
}

size_t LayeredCircuit::gate_count() const {
    size_t total = 0;
    for (const auto& level : levels) {
        total += level.size();
    }
    return total;
}

GateList LayeredCircuit::flatten() const {
    GateList out;
    out.reserve(gate_count());
    for (const auto& level : levels) {
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

void LayeredCircuit::validate() const {
    std::vector<size_t> last_level(num_qubits, SIZE_MAX);
    for (size_t l = 0; l < levels.size(); ++l) {
        for (const auto& g : levels[l]) {
            if (g.q0 >= num_qubits || g.q1 >= num_qubits || g.q0 == g.q1) {
                throw std::invalid_argument("gate (" + std::to_string(g.q0) + "," + std::to_string(g.q1) +
                                            ") invalid for n=" + std::to_string(num_qubits));
            }
            if (g.clifford_id >= kTwoQubitCliffordCount) {
                throw std::invalid_argument("clifford_id out of range");
            }
            for (uint32_t q : {g.q0, g.q1}) {
                if (last_level[q] == l) {
                    throw std::invalid_argument("level " + std::to_string(l) + " uses qubit " + std::to_string(q) +
                                                " twice");
                }
                last_level[q] = l;
            }
        }
    }
}

GateList sample_sequential_circuit(const InteractionGraph& graph, uint64_t t, RandomSource& rng) {
    if (graph.num_edges() == 0) {
        throw std::invalid_argument("interaction graph has no edges");
    }
    GateList gates;
    gates.reserve(t);
    for (uint64_t s = 0; s < t; ++s) {
        auto [i, j] = graph.sample_edge(rng);
        gates.push_back({i, j, static_cast<uint32_t>(rng.uniform_below(kTwoQubitCliffordCount))});
    }
    return gates;
}

void sample_matching(uint32_t n, RandomSource& rng, std::vector<uint32_t>& pool, std::vector<Edge>& out) {
    if (n < 2) {
        throw std::invalid_argument("matching needs n >= 2");
    }
    if (pool.size() != n) {
        pool.resize(n);
        std::iota(pool.begin(), pool.end(), 0);
    }
    out.clear();
    uint32_t r = n;
    if (r % 2 == 1) {
        std::swap(pool[rng.uniform_below32(r)], pool[r - 1]);
        --r;
    }
    // Pair the last unmatched qubit with a uniform partner: (n-1)!! equally likely outcomes.
    while (r >= 2) {
        const uint32_t j = rng.uniform_below32(r - 1);
        std::swap(pool[j], pool[r - 2]);
        out.emplace_back(pool[r - 1], pool[r - 2]);
        r -= 2;
    }
}

std::vector<Edge> sample_matching(uint32_t n, RandomSource& rng) {
    std::vector<uint32_t> pool;
    std::vector<Edge> pairs;
    sample_matching(n, rng, pool, pairs);
    return pairs;
}

LayeredCircuit sample_matching_circuit(uint32_t n, uint64_t depth, RandomSource& rng) {
    if (n < 2) {
        throw std::invalid_argument("matching circuit needs n >= 2");
    }
    LayeredCircuit c{n, {}};
    c.levels.reserve(depth);
    for (uint64_t l = 0; l < depth; ++l) {
        std::vector<Gate> level;
        for (auto [i, j] : sample_matching(n, rng)) {
            level.push_back({i, j, static_cast<uint32_t>(rng.uniform_below(kTwoQubitCliffordCount))});
        }
        c.levels.push_back(std::move(level));
    }
    return c;
}

void CoarseGraining::validate() const {
    if (d < 1) {
        throw std::invalid_argument("coarse graining needs d >= 1");
    }
    if (cell_side < 2) {
        throw std::invalid_argument("cell_side must be >= 2");
    }
    if (side % cell_side != 0) {
        throw std::invalid_argument("cell_side " + std::to_string(cell_side) + " does not divide side " +
                                    std::to_string(side));
    }
}

uint32_t CoarseGraining::num_qubits() const {
    uint64_t n = 1;
    for (unsigned k = 0; k < d; ++k) {
        n *= side;
    }
    return static_cast<uint32_t>(n);
}

std::vector<std::vector<uint32_t>> CoarseGraining::cells(Parity parity) const {
    validate();
    const uint32_t offset = parity == Parity::Type1 ? 0 : cell_side / 2;
    const uint32_t blocks = (side + offset + cell_side - 1) / cell_side;
    std::map<uint64_t, std::vector<uint32_t>> by_cell;
    const uint32_t n = num_qubits();
    for (uint32_t site = 0; site < n; ++site) {
        auto coords = lattice_coordinates(site, d, side);
        uint64_t cell = 0;
        for (size_t k = coords.size(); k-- > 0;) {
            const uint32_t shifted = offset == 0 ? coords[k] : coords[k] + cell_side - offset;
            cell = cell * (blocks + 1) + shifted / cell_side;
        }
        by_cell[cell].push_back(site);
    }
    std::vector<std::vector<uint32_t>> out;
    out.reserve(by_cell.size());
    for (auto& [key, sites] : by_cell) {
        out.push_back(std::move(sites));
    }
    return out;
}

std::vector<std::vector<Edge>> CoarseGraining::cell_edges(Parity parity) const {
    std::vector<std::vector<Edge>> out;
    const auto all = cells(parity);
    for (const auto& sites : all) {
        std::vector<Edge> edges;
        for (uint32_t u : sites) {
            uint64_t stride = 1;
            auto cu = lattice_coordinates(u, d, side);
            for (unsigned k = 0; k < d; ++k) {
                if (cu[k] + 1 < side) {
                    const auto v = static_cast<uint32_t>(u + stride);
                    if (std::binary_search(sites.begin(), sites.end(), v)) {
                        edges.emplace_back(u, v);
                    }
                }
                stride *= side;
            }
        }
        if (!edges.empty()) {
            out.push_back(std::move(edges));
        }
    }
    return out;
}

uint32_t default_cell_side(uint32_t n, unsigned d, double c) {
    return static_cast<uint32_t>(std::ceil(std::pow(c * std::log(static_cast<double>(n)), 1.0 / d)));
}

uint64_t default_gates_per_coarse_step(uint32_t n, double c) {
    const double ln = std::log(static_cast<double>(n));
    return static_cast<uint64_t>(std::ceil(c * ln * ln));
}

LayeredCircuit sample_coarse_lattice_circuit(const CoarseGraining& cg, uint64_t coarse_steps,
                                             uint64_t gates_per_coarse_step, RandomSource& rng) {
    cg.validate();
    if (coarse_steps < 1) {
        throw std::invalid_argument("coarse_steps must be >= 1");
    }
    const std::vector<std::vector<Edge>> edges[2] = {cg.cell_edges(CoarseGraining::Parity::Type1),
                                                    cg.cell_edges(CoarseGraining::Parity::Type2)};
    LayeredCircuit c{cg.num_qubits(), {}};
    for (uint64_t s = 0; s < coarse_steps; ++s) {
        const auto& cells = edges[s % 2];
        if (cells.empty()) {
            continue;
        }
        for (uint64_t k = 0; k < gates_per_coarse_step; ++k) {
            std::vector<Gate> level;
            level.reserve(cells.size());
            for (const auto& cell : cells) {
                const auto [i, j] = cell[rng.uniform_below(cell.size())];
                level.push_back({i, j, static_cast<uint32_t>(rng.uniform_below(kTwoQubitCliffordCount))});
            }
            c.levels.push_back(std::move(level));
        }
    }
    return c;
}

LayeredCircuit parallelize(const GateList& gates, uint32_t num_qubits) {
    for (const auto& g : gates) {
        num_qubits = std::max({num_qubits, g.q0 + 1, g.q1 + 1});
    }
    LayeredCircuit c{num_qubits, {}};
    // Stamp of the level that last touched each qubit; the current level is c.levels.size().
    std::vector<size_t> used(num_qubits, 0);
    for (const auto& g : gates) {
        if (c.levels.empty() || used[g.q0] == c.levels.size() || used[g.q1] == c.levels.size()) {
            c.levels.emplace_back();
        }
        c.levels.back().push_back(g);
        used[g.q0] = used[g.q1] = c.levels.size();
    }
    return c;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile of empty sample");
    }
    std::sort(values.begin(), values.end());
    auto rank = static_cast<size_t>(std::ceil(q * values.size()));
    rank = std::clamp<size_t>(rank, 1, values.size());
    return values[rank - 1];
}

DepthSummary depth_statistics(uint32_t n, uint64_t t, uint64_t trials, RandomSource& rng) {
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    const auto graph = InteractionGraph::complete(n);
    DepthSummary s;
    s.depths.reserve(trials);
    for (uint64_t k = 0; k < trials; ++k) {
        RandomSource trial_rng = rng.split(k);
        s.depths.push_back(parallelize(sample_sequential_circuit(graph, t, trial_rng), n).depth());
    }
    std::vector<double> as_double(s.depths.begin(), s.depths.end());
    s.mean = std::accumulate(as_double.begin(), as_double.end(), 0.0) / trials;
    s.p50 = quantile(as_double, 0.5);
    s.p90 = quantile(as_double, 0.9);
    s.p99 = quantile(as_double, 0.99);
    s.min = *std::min_element(s.depths.begin(), s.depths.end());
    s.max = *std::max_element(s.depths.begin(), s.depths.end());
    return s;
}

std::vector<uint64_t> lightcone_envelope(size_t depth, uint32_t n, std::optional<unsigned> lattice_dim) {
    std::vector<uint64_t> env(depth + 1);
    for (size_t t = 0; t <= depth; ++t) {
        uint64_t bound = t < 63 ? (uint64_t{1} << t) : UINT64_MAX;
        if (lattice_dim && t > 0) {
            const double geometric = std::pow(2.0 * static_cast<double>(t), *lattice_dim);
            if (geometric < static_cast<double>(bound)) {
                bound = static_cast<uint64_t>(geometric);
            }
        }
        env[t] = std::min<uint64_t>(bound, std::max<uint32_t>(n, 1));
    }
    return env;
}

bool within_lightcone(const std::vector<uint64_t>& sizes, uint64_t initial_weight, uint32_t n,
                      std::optional<unsigned> lattice_dim) {
    if (sizes.empty()) {
        return true;
    }
    const auto env = lightcone_envelope(sizes.size() - 1, n, lattice_dim);
    for (size_t t = 0; t < sizes.size(); ++t) {
        const uint64_t cap = std::min<uint64_t>(n, env[t] > UINT64_MAX / initial_weight ? UINT64_MAX
                                                                                         : env[t] * initial_weight);
        if (sizes[t] > cap) {
            return false;
        }
    }
    return true;
}

LightconeReport lightcone_check(const LayeredCircuit& circuit, uint32_t start_qubit,
                                std::optional<unsigned> lattice_dim) {
    circuit.validate();
    if (start_qubit >= circuit.num_qubits) {
        throw std::out_of_range("start qubit outside circuit");
    }
    LightconeReport r;
    r.envelope = lightcone_envelope(circuit.depth(), circuit.num_qubits, lattice_dim);
    std::vector<char> cone(circuit.num_qubits, 0);
    cone[start_qubit] = 1;
    uint64_t cone_size = 1;
    PauliString op(circuit.num_qubits);
    op.set(start_qubit, Letter::Z);
    r.causal_cone.push_back(cone_size);
    r.pauli_support.push_back(op.weight());
    for (const auto& level : circuit.levels) {
        for (const auto& g : level) {
            if (cone[g.q0] != cone[g.q1]) {
                cone[g.q0] = cone[g.q1] = 1;
                ++cone_size;
            }
            propagate(op, g);
        }
        r.causal_cone.push_back(cone_size);
        r.pauli_support.push_back(op.weight());
    }
    for (size_t t = 0; t < r.envelope.size(); ++t) {
        r.holds = r.holds && r.causal_cone[t] <= r.envelope[t] && r.pauli_support[t] <= r.causal_cone[t];
    }
    return r;
}

void write_circuit(std::ostream& out, const CircuitFile& file) {
    out << "n=" << file.circuit.num_qubits << " model=" << file.model << " seed=" << file.seed << "\n";
    for (size_t l = 0; l < file.circuit.levels.size(); ++l) {
        for (const auto& g : file.circuit.levels[l]) {
            out << l << " " << g.q0 << " " << g.q1 << " " << g.clifford_id << "\n";
        }
    }
}

CircuitFile read_circuit(std::istream& in) {
    CircuitFile file;
    std::string header;
    if (!std::getline(in, header)) {
        throw std::invalid_argument("circuit file: missing header");
    }
    std::istringstream hs(header);
    std::string field;
    bool have_n = false;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("circuit file: malformed header field '" + field + "'");
        }
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "n") {
            file.circuit.num_qubits = static_cast<uint32_t>(std::stoul(value));
            have_n = true;
        } else if (key == "model") {
            file.model = value;
        } else if (key == "seed") {
            file.seed = std::stoull(value);
        } else {
            throw std::invalid_argument("circuit file: unknown header field '" + key + "'");
        }
    }
    if (!have_n) {
        throw std::invalid_argument("circuit file: header lacks n=");
    }
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        uint64_t level;
        Gate g;
        if (!(ls >> level >> g.q0 >> g.q1 >> g.clifford_id)) {
            throw std::invalid_argument("circuit file: malformed gate on line " + std::to_string(line_no));
        }
        if (level + 1 < file.circuit.levels.size()) {
            throw std::invalid_argument("circuit file: levels out of order on line " + std::to_string(line_no));
        }
        if (level >= file.circuit.levels.size()) {
            file.circuit.levels.resize(level + 1);
        }
        file.circuit.levels[level].push_back(g);
    }
    file.circuit.validate();
    return file;
}

}  // namespace scrambling
