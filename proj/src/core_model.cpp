#include "replica/core_model.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "replica/errors.hpp"

namespace replica {

namespace {

template <typename Vec, typename Pred>
auto find_ptr(Vec& v, Pred pred) -> decltype(&v.front()) {
    auto it = std::find_if(v.begin(), v.end(), pred);
    return it == v.end() ? nullptr : &*it;
}

}  // namespace

NodeState* ClusterState::find_node(NodeId id) {
    return find_ptr(nodes, [id](const NodeState& n) { return n.spec.id == id; });
}

const NodeState* ClusterState::find_node(NodeId id) const {
    return find_ptr(nodes, [id](const NodeState& n) { return n.spec.id == id; });
}

const Block* ClusterState::find_block(BlockId id) const {
    return find_ptr(blocks, [id](const Block& b) { return b.id == id; });
}

BlockPlacement* ClusterState::find_placement(BlockId id) {
    return find_ptr(placements, [id](const BlockPlacement& p) { return p.block_id == id; });
}

const BlockPlacement* ClusterState::find_placement(BlockId id) const {
    return find_ptr(placements, [id](const BlockPlacement& p) { return p.block_id == id; });
}

void ClusterState::add_node(NodeSpec spec) {
    if (spec.capacity_bytes <= 0) {
        throw DomainError(fmt::format("node {}: capacity must be positive", spec.id));
    }
    if (!(spec.failure_probability >= 0.0 && spec.failure_probability < 1.0)) {
        throw DomainError(fmt::format("node {}: failure probability {} outside [0, 1)", spec.id,
                                      spec.failure_probability));
    }
    if (find_node(spec.id) != nullptr) {
        throw DomainError(fmt::format("duplicate node id {}", spec.id));
    }
    nodes.push_back(NodeState{std::move(spec), 0, true});
}

void ClusterState::commit(const Block& block, std::span<const NodeId> holders) {
    if (find_block(block.id) != nullptr) {
        throw DomainError(fmt::format("block {} already committed", block.id));
    }
    if (block.size_bytes <= 0 || block.size_bytes > block_size_bytes) {
        throw DomainError(fmt::format("block {}: size {} outside (0, {}]", block.id,
                                      block.size_bytes, block_size_bytes));
    }
    std::set<NodeId> seen;
    for (NodeId id : holders) {
        const NodeState* node = find_node(id);
        if (node == nullptr) {
            throw DomainError(fmt::format("block {}: unknown node {}", block.id, id));
        }
        if (!node->alive) {
            throw DomainError(fmt::format("block {}: node {} is dead", block.id, id));
        }
        if (node->free_bytes() < block.size_bytes) {
            throw DomainError(fmt::format("block {}: node {} lacks space", block.id, id));
        }
        if (!seen.insert(id).second) {
            throw DomainError(fmt::format("block {}: node {} listed twice", block.id, id));
        }
    }
    for (NodeId id : holders) {
        find_node(id)->used_bytes += block.size_bytes;
    }
    blocks.push_back(block);
    placements.push_back(BlockPlacement{block.id, {holders.begin(), holders.end()}});
}

void ClusterState::add_replica(BlockId block_id, NodeId node_id) {
    const Block* block = find_block(block_id);
    BlockPlacement* placement = find_placement(block_id);
    if (block == nullptr || placement == nullptr) {
        throw DomainError(fmt::format("unknown block {}", block_id));
    }
    NodeState* node = find_node(node_id);
    if (node == nullptr) {
        throw DomainError(fmt::format("block {}: unknown node {}", block_id, node_id));
    }
    if (!node->alive) {
        throw DomainError(fmt::format("block {}: node {} is dead", block_id, node_id));
    }
    if (node->free_bytes() < block->size_bytes) {
        throw DomainError(fmt::format("block {}: node {} lacks space", block_id, node_id));
    }
    auto& holders = placement->holder_node_ids;
    if (std::find(holders.begin(), holders.end(), node_id) != holders.end()) {
        throw DomainError(fmt::format("block {} already held by node {}", block_id, node_id));
    }
    holders.push_back(node_id);
    node->used_bytes += block->size_bytes;
}

void ClusterState::set_alive(NodeId node_id, bool alive) {
    NodeState* node = find_node(node_id);
    if (node == nullptr) {
        throw DomainError(fmt::format("unknown node {}", node_id));
    }
    node->alive = alive;
}

std::size_t ClusterState::alive_node_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const NodeState& n) { return n.alive; }));
}

std::size_t ClusterState::alive_holder_count(const BlockPlacement& placement) const {
    std::size_t count = 0;
    for (NodeId id : placement.holder_node_ids) {
        const NodeState* node = find_node(id);
        if (node != nullptr && node->alive) ++count;
    }
    return count;
}

ClusterState make_cluster(std::vector<NodeSpec> specs, Bytes block_size_bytes,
                          double availability_target) {
    if (block_size_bytes <= 0) {
        throw DomainError("block size must be positive");
    }
    if (!(availability_target >= 0.0 && availability_target < 1.0)) {
        throw DomainError(fmt::format("availability target {} outside [0, 1)", availability_target));
    }
    ClusterState state;
    state.block_size_bytes = block_size_bytes;
    state.availability_target = availability_target;
    for (auto& spec : specs) state.add_node(std::move(spec));
    return state;
}

std::vector<std::string> validate_cluster(const ClusterState& state) {
    std::vector<std::string> out;

    if (state.block_size_bytes <= 0) {
        out.push_back(fmt::format("cluster: block size {} is not positive", state.block_size_bytes));
    }
    if (!(state.availability_target >= 0.0 && state.availability_target < 1.0)) {
        out.push_back(fmt::format("cluster: availability target {} outside [0, 1)",
                                  state.availability_target));
    }

    std::set<NodeId> node_ids;
    for (const auto& node : state.nodes) {
        const auto& s = node.spec;
        if (!node_ids.insert(s.id).second) {
            out.push_back(fmt::format("node {}: duplicate id", s.id));
        }
        if (s.capacity_bytes <= 0) {
            out.push_back(fmt::format("node {}: capacity {} is not positive", s.id, s.capacity_bytes));
        }
        if (!(s.failure_probability >= 0.0 && s.failure_probability < 1.0)) {
            out.push_back(fmt::format("node {}: failure probability {} outside [0, 1)", s.id,
                                      s.failure_probability));
        }
        if (node.used_bytes < 0 || node.used_bytes > s.capacity_bytes) {
            out.push_back(fmt::format("node {}: used bytes {} outside [0, {}]", s.id, node.used_bytes,
                                      s.capacity_bytes));
        }
    }

    std::map<BlockId, Bytes> block_sizes;
    for (const auto& block : state.blocks) {
        if (!block_sizes.emplace(block.id, block.size_bytes).second) {
            out.push_back(fmt::format("block {}: duplicate id", block.id));
        }
        if (block.size_bytes <= 0 || block.size_bytes > state.block_size_bytes) {
            out.push_back(fmt::format("block {}: size {} outside (0, {}]", block.id, block.size_bytes,
                                      state.block_size_bytes));
        }
    }

    std::map<NodeId, Bytes> expected_used;
    std::set<BlockId> placed;
    for (const auto& placement : state.placements) {
        const BlockId bid = placement.block_id;
        if (!placed.insert(bid).second) {
            out.push_back(fmt::format("block {}: more than one placement", bid));
        }
        auto size_it = block_sizes.find(bid);
        if (size_it == block_sizes.end()) {
            out.push_back(fmt::format("placement references missing block {}", bid));
        }
        std::set<NodeId> holders;
        for (NodeId nid : placement.holder_node_ids) {
            if (!holders.insert(nid).second) {
                out.push_back(fmt::format("block {}: node {} listed twice", bid, nid));
                continue;
            }
            if (node_ids.count(nid) == 0) {
                out.push_back(fmt::format("block {}: placement references missing node {}", bid, nid));
                continue;
            }
            if (size_it != block_sizes.end()) expected_used[nid] += size_it->second;
        }
    }

    for (const auto& node : state.nodes) {
        const Bytes expected = expected_used[node.spec.id];
        if (node.used_bytes != expected) {
            out.push_back(fmt::format("node {}: used bytes {} != {} held by its blocks", node.spec.id,
                                      node.used_bytes, expected));
        }
    }
    return out;
}

}  // namespace replica
