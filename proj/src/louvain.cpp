#include "narrnet/louvain.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "narrnet/common.hpp"

namespace narrnet {

void WeightedGraph::add_edge(std::size_t a, std::size_t b, double w) {
    auto bump = [&](std::size_t from, std::size_t to) {
        for (auto& arc : adj_[from])
            if (arc.to == to) {
                arc.weight += w;
                return;
            }
        adj_[from].push_back({to, w});
    };
    bump(a, b);
    if (a != b) bump(b, a);
}

double WeightedGraph::degree(std::size_t i) const {
    double d = 0.0;
    for (const auto& arc : adj_[i]) d += arc.to == i ? 2.0 * arc.weight : arc.weight;
    return d;
}

double WeightedGraph::total_weight() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < adj_.size(); ++i)
        for (const auto& arc : adj_[i])
            if (arc.to >= i) sum += arc.weight;
    return sum;
}

std::size_t WeightedGraph::edge_count() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < adj_.size(); ++i)
        for (const auto& arc : adj_[i])
            if (arc.to >= i) ++count;
    return count;
}

double WeightedGraph::weight(std::size_t a, std::size_t b) const {
    for (const auto& arc : adj_[a])
        if (arc.to == b) return arc.weight;
    return 0.0;
}

double modularity(const WeightedGraph& graph, const Partition& partition) {
    const double m = graph.total_weight();
    if (m <= 0.0) return 0.0;
    std::map<std::size_t, double> internal;
    std::map<std::size_t, double> degree;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        degree[partition[i]] += graph.degree(i);
        for (const auto& arc : graph.neighbors(i))
            if (arc.to >= i && partition[arc.to] == partition[i]) internal[partition[i]] += arc.weight;
    }
    double q = 0.0;
    for (const auto& [c, d] : degree) {
        double frac = d / (2.0 * m);
        q += internal[c] / m - frac * frac;
    }
    return q;
}

Partition canonical_partition(const Partition& partition) {
    std::map<std::size_t, std::size_t> relabel;
    Partition out(partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i) {
        auto [it, _] = relabel.try_emplace(partition[i], relabel.size());
        out[i] = it->second;
    }
    return out;
}

namespace {

// One level of local moving. Returns true if any node changed community.
bool local_moving(const WeightedGraph& g, Partition& community, Rng& rng) {
    const std::size_t n = g.size();
    const double m2 = 2.0 * g.total_weight();
    std::vector<double> k(n);
    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        k[i] = g.degree(i);
        tot[community[i]] += k[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i : order) {
            const std::size_t own = community[i];
            touched.clear();
            for (const auto& arc : g.neighbors(i)) {
                if (arc.to == i) continue;
                std::size_t c = community[arc.to];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += arc.weight;
            }
            tot[own] -= k[i];
            // Gain of joining c, up to terms shared by every candidate.
            auto gain = [&](std::size_t c) { return link[c] - tot[c] * k[i] / m2; };
            std::size_t best = own;
            double best_gain = gain(own);
            std::size_t ties = 1;
            for (std::size_t c : touched) {
                if (c == own) continue;
                double gc = gain(c);
                const double eps = 1e-12 * (1.0 + std::abs(best_gain));
                if (gc > best_gain + eps) {
                    best = c;
                    best_gain = gc;
                    ties = 1;
                } else if (best != own && gc >= best_gain - eps) {
                    // Reservoir choice among equally good foreign communities;
                    // staying put always wins a tie, so moves strictly gain.
                    ++ties;
                    if (rng.index(ties) == 0) best = c;
                }
            }
            tot[best] += k[i];
            if (best != own) {
                community[i] = best;
                improved = true;
                any_move = true;
            }
            for (std::size_t c : touched) link[c] = 0.0;
        }
    }
    return any_move;
}

WeightedGraph aggregate(const WeightedGraph& g, const Partition& community, std::size_t count) {
    WeightedGraph out(count);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& arc : g.neighbors(i))
            if (arc.to >= i) out.add_edge(community[i], community[arc.to], arc.weight);
    return out;
}

}  // namespace

LouvainResult louvain_once(const WeightedGraph& graph, std::uint64_t seed) {
    LouvainResult result;
    const std::size_t n = graph.size();
    result.partition.resize(n);
    std::iota(result.partition.begin(), result.partition.end(), 0);
    result.pass_modularity.push_back(modularity(graph, result.partition));
    if (graph.total_weight() <= 0.0) {
        result.modularity = 0.0;
        return result;
    }

    Rng rng(seed);
    WeightedGraph level = graph;
    Partition node_to_level(n);
    std::iota(node_to_level.begin(), node_to_level.end(), 0);

    while (true) {
        Partition community(level.size());
        std::iota(community.begin(), community.end(), 0);
        if (!local_moving(level, community, rng)) break;

        community = canonical_partition(community);
        std::size_t count = *std::max_element(community.begin(), community.end()) + 1;
        for (auto& c : node_to_level) c = community[c];
        Partition full = canonical_partition(node_to_level);
        double q = modularity(graph, full);
        // Floating-point noise can make a no-op pass look like a tiny loss.
        if (q < result.pass_modularity.back() - 1e-12) break;
        result.partition = std::move(full);
        result.pass_modularity.push_back(q);
        if (count == level.size()) break;
        level = aggregate(level, community, count);
    }
    result.partition = canonical_partition(result.partition);
    result.modularity = modularity(graph, result.partition);
    return result;
}

}  // namespace narrnet
