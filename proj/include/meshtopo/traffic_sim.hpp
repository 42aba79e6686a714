#pragma once

// Slotted packet simulator with p-persistent carrier sense.
//
// Per slot: every flow source injects one packet if its queue has room.
// Nodes are then visited in a seeded random order. A node with a queued
// packet defers if a node already committed this slot lies within its
// transmission range; otherwise it transmits with probability p. A
// transmission u -> v succeeds when v is silent and no other committed
// transmitter covers v. Successful packets leave u before any arrivals are
// queued; an arrival at a full relay queue is dropped.

#include "meshtopo/interference.hpp"
#include "meshtopo/rng.hpp"
#include "meshtopo/topology.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>
#include <vector>

namespace meshtopo {

struct Flow {
    NodeId source = 0;
    NodeId destination = 0;

    friend bool operator==(const Flow&, const Flow&) = default;
    friend auto operator<=>(const Flow&, const Flow&) = default;
};

struct SimParams {
    double slot_s = 0.008;            // one 1000-byte packet at 1 Mb/s
    double duration_s = 60.0;
    std::size_t queue_capacity = 50;  // packets per node
    double transmit_prob = 0.5;
    std::uint64_t seed = 1;
    std::size_t packet_bits = 8000;

    void validate() const
    {
        if (!(slot_s > 0) || !(duration_s > 0)) throw Error("slot and duration must be positive");
        if (queue_capacity == 0 || packet_bits == 0) throw Error("queue capacity and packet size must be positive");
        if (!(transmit_prob > 0) || transmit_prob > 1) throw Error("transmit probability must be in (0, 1]");
    }
};

struct FlowStats {
    Flow flow;
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    double throughput_bps = 0.0;
    double mean_delay_s = 0.0;
};

struct SimReport {
    double throughput_bps = 0.0;
    double loss_rate = 0.0;
    double mean_delay_s = 0.0;
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_queue = 0;
    std::uint64_t slots = 0;
    std::vector<FlowStats> flows;
};

/// Connected components as a label per node index.
inline std::vector<std::size_t> component_labels(const Topology& topo)
{
    const std::size_t n = topo.node_count();
    std::vector<std::size_t> label(n, n);
    std::size_t next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] != n) continue;
        std::vector<std::size_t> stack{s};
        label[s] = next;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (NodeId v : topo.neighbors(topo.nodes()[u].id)) {
                const std::size_t iv = topo.index_of(v);
                if (label[iv] == n) {
                    label[iv] = next;
                    stack.push_back(iv);
                }
            }
        }
        ++next;
    }
    return label;
}

/// `count` distinct ordered (source, destination) pairs, uniform over pairs
/// in the same connected component.
inline std::vector<Flow> generate_flows(const Topology& topo, std::size_t count, std::uint64_t seed)
{
    if (count == 0) return {};
    const std::size_t n = topo.node_count();
    const std::vector<std::size_t> label = component_labels(topo);
    std::vector<std::uint64_t> size(n, 0);
    for (std::size_t l : label) ++size[l];
    std::uint64_t available = 0;
    for (std::uint64_t s : size) available += s * (s - (s > 0 ? 1 : 0));
    if (count > available) {
        throw Error("requested " + std::to_string(count) + " flows but only " + std::to_string(available) +
                    " connected ordered pairs exist");
    }
    Rng rng(seed);
    const auto nodes = topo.nodes();
    std::vector<Flow> out;
    if (2 * count > available) {
        // Dense request: enumerate and take a prefix of a shuffle.
        std::vector<Flow> all;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j && label[i] == label[j]) all.push_back(Flow{nodes[i].id, nodes[j].id});
            }
        }
        rng.shuffle(std::span<Flow>(all));
        all.resize(count);
        return all;
    }
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    while (out.size() < count) {
        const std::size_t i = rng.below(n);
        const std::size_t j = rng.below(n);
        if (i == j || label[i] != label[j]) continue;
        if (!chosen.emplace(i, j).second) continue;
        out.push_back(Flow{nodes[i].id, nodes[j].id});
    }
    return out;
}

/// Minimum-hop next hops toward a set of destinations; ties go to the
/// smaller next-hop id.
class RoutingTable {
public:
    static constexpr std::uint32_t kUnreachable = 0xffffffffu;

    RoutingTable(const Topology& topo, std::span<const NodeId> destinations) : topo_(&topo)
    {
        const std::size_t n = topo.node_count();
        for (NodeId d : destinations) {
            if (column_.contains(d)) continue;
            const std::size_t col = column_.size();
            column_.emplace(d, col);
            hops_.emplace_back(n, kUnreachable);
            next_.emplace_back(n, kUnreachable);
            std::vector<std::uint32_t>& h = hops_.back();
            std::vector<std::uint32_t>& nx = next_.back();
            const std::size_t di = topo.index_of(d);
            h[di] = 0;
            std::vector<std::size_t> layer{di};
            while (!layer.empty()) {
                std::vector<std::size_t> next_layer;
                for (std::size_t u : layer) {
                    for (NodeId v : topo.neighbors(topo.nodes()[u].id)) {
                        const std::size_t iv = topo.index_of(v);
                        if (h[iv] == kUnreachable) {
                            h[iv] = h[u] + 1;
                            next_layer.push_back(iv);
                        }
                    }
                }
                layer = std::move(next_layer);
            }
            for (std::size_t u = 0; u < n; ++u) {
                if (h[u] == kUnreachable || h[u] == 0) continue;
                NodeId best = 0;
                bool found = false;
                for (NodeId v : topo.neighbors(topo.nodes()[u].id)) {
                    if (h[topo.index_of(v)] + 1 == h[u] && (!found || v < best)) {
                        best = v;
                        found = true;
                    }
                }
                nx[u] = static_cast<std::uint32_t>(topo.index_of(best));
            }
        }
    }

    /// Table over every destination (n^2 entries).
    static RoutingTable all_pairs(const Topology& topo)
    {
        std::vector<NodeId> ids;
        for (const Node& n : topo.nodes()) ids.push_back(n.id);
        return RoutingTable(topo, ids);
    }

    bool reachable(NodeId from, NodeId to) const { return hop_count(from, to).has_value(); }

    std::optional<std::size_t> hop_count(NodeId from, NodeId to) const
    {
        const std::uint32_t h = hops_[col(to)][topo_->index_of(from)];
        if (h == kUnreachable) return std::nullopt;
        return h;
    }

    /// Next node on the route, or nullopt when unreachable or already there.
    std::optional<NodeId> next_hop(NodeId from, NodeId to) const
    {
        const std::uint32_t v = next_[col(to)][topo_->index_of(from)];
        if (v == kUnreachable) return std::nullopt;
        return topo_->nodes()[v].id;
    }

    // Index-based access for the simulator.
    std::uint32_t next_index(std::size_t from, std::size_t dest_col) const { return next_[dest_col][from]; }
    std::size_t column(NodeId dest) const { return col(dest); }

private:
    std::size_t col(NodeId d) const
    {
        const auto it = column_.find(d);
        if (it == column_.end()) throw Error("no routes computed toward node " + std::to_string(d));
        return it->second;
    }

    const Topology* topo_;
    std::unordered_map<NodeId, std::size_t> column_;
    std::vector<std::vector<std::uint32_t>> hops_;
    std::vector<std::vector<std::uint32_t>> next_;
};

inline RoutingTable shortest_paths(const Topology& topo) { return RoutingTable::all_pairs(topo); }

inline SimReport run_sim(const Topology& topo, std::span<const Flow> flows, const SimParams& params)
{
    params.validate();
    const std::size_t n = topo.node_count();
    const auto nodes = topo.nodes();
    for (const Flow& f : flows) {
        if (f.source == f.destination) throw Error("flow source and destination must differ");
        (void)topo.index_of(f.source);
        (void)topo.index_of(f.destination);
    }

    std::vector<NodeId> dests;
    for (const Flow& f : flows) dests.push_back(f.destination);
    const RoutingTable routes(topo, dests);

    std::vector<i128> range2(n);
    for (std::size_t i = 0; i < n; ++i) range2[i] = squared_transmission_range(topo, nodes[i].id);

    struct Packet {
        std::uint32_t flow;
        std::uint64_t injected_slot;
    };
    struct FlowState {
        std::size_t src;
        std::size_t dst;
        std::size_t col;
        bool routable;
    };
    std::vector<FlowState> fs;
    for (const Flow& f : flows) {
        const std::size_t col = routes.column(f.destination);
        const std::size_t src = topo.index_of(f.source);
        fs.push_back({src, topo.index_of(f.destination), col, routes.next_index(src, col) != RoutingTable::kUnreachable});
    }

    SimReport rep;
    rep.flows.resize(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) rep.flows[i].flow = flows[i];
    std::vector<double> delay_sum(flows.size(), 0.0);

    std::vector<std::deque<Packet>> queue(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<char> transmitting(n, 0);
    std::vector<std::size_t> committed;
    std::vector<std::pair<std::size_t, std::size_t>> sends;  // (from, to)
    Rng rng(params.seed);

    const auto total_slots = static_cast<std::uint64_t>(std::llround(params.duration_s / params.slot_s));
    rep.slots = total_slots;
    for (std::uint64_t slot = 0; slot < total_slots; ++slot) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (!fs[i].routable || queue[fs[i].src].size() >= params.queue_capacity) continue;
            queue[fs[i].src].push_back(Packet{static_cast<std::uint32_t>(i), slot});
            ++rep.flows[i].injected;
        }

        rng.shuffle(std::span<std::size_t>(order));
        committed.clear();
        sends.clear();
        for (std::size_t u : order) {
            if (queue[u].empty()) continue;
            bool busy = false;
            for (std::size_t w : committed) {
                if (squared_distance(nodes[u].pos, nodes[w].pos) <= range2[u]) {
                    busy = true;
                    break;
                }
            }
            if (busy || !rng.bernoulli(params.transmit_prob)) continue;
            committed.push_back(u);
            transmitting[u] = 1;
            const FlowState& f = fs[queue[u].front().flow];
            sends.emplace_back(u, routes.next_index(u, f.col));
        }

        std::vector<std::pair<std::size_t, Packet>> arrivals;
        for (const auto& [u, v] : sends) {
            bool ok = !transmitting[v];
            for (std::size_t w : committed) {
                if (!ok) break;
                if (w != u && squared_distance(nodes[w].pos, nodes[v].pos) <= range2[w]) ok = false;
            }
            if (!ok) continue;
            arrivals.emplace_back(v, queue[u].front());
            queue[u].pop_front();
        }
        for (std::size_t u : committed) transmitting[u] = 0;

        for (const auto& [v, pkt] : arrivals) {
            FlowStats& st = rep.flows[pkt.flow];
            if (v == fs[pkt.flow].dst) {
                ++st.delivered;
                delay_sum[pkt.flow] += static_cast<double>(slot + 1 - pkt.injected_slot) * params.slot_s;
            } else if (queue[v].size() >= params.queue_capacity) {
                ++st.dropped;
            } else {
                queue[v].push_back(pkt);
            }
        }
    }

    const double duration = static_cast<double>(total_slots) * params.slot_s;
    double total_delay = 0.0;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        FlowStats& st = rep.flows[i];
        rep.injected += st.injected;
        rep.delivered += st.delivered;
        rep.dropped += st.dropped;
        total_delay += delay_sum[i];
        st.throughput_bps = duration > 0 ? static_cast<double>(st.delivered * params.packet_bits) / duration : 0.0;
        st.mean_delay_s = st.delivered > 0 ? delay_sum[i] / static_cast<double>(st.delivered) : 0.0;
    }
    for (const auto& q : queue) rep.in_queue += q.size();
    rep.throughput_bps = duration > 0 ? static_cast<double>(rep.delivered * params.packet_bits) / duration : 0.0;
    rep.loss_rate = rep.injected > 0 ? static_cast<double>(rep.dropped) / static_cast<double>(rep.injected) : 0.0;
    rep.mean_delay_s = rep.delivered > 0 ? total_delay / static_cast<double>(rep.delivered) : 0.0;
    return rep;
}

}  // namespace meshtopo
