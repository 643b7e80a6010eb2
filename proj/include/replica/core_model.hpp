#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replica/units.hpp"

namespace replica {

struct NodeSpec {
    NodeId id = 0;
    Bytes capacity_bytes = 0;
    double failure_probability = 0.0;
    std::string label;

    bool operator==(const NodeSpec&) const = default;
};

struct NodeState {
    NodeSpec spec;
    Bytes used_bytes = 0;
    bool alive = true;

    Bytes free_bytes() const { return spec.capacity_bytes - used_bytes; }

    bool operator==(const NodeState&) const = default;
};

struct Block {
    BlockId id = 0;
    FileId file_id = 0;
    Bytes size_bytes = 0;

    bool operator==(const Block&) const = default;
};

struct BlockPlacement {
    BlockId block_id = 0;
    std::vector<NodeId> holder_node_ids;  // selection order

    bool operator==(const BlockPlacement&) const = default;
};

// Placement score basis. Free space is the default; total capacity is kept
// for comparison runs.
enum class WeightBasis { kFreeSpace, kTotalCapacity };

/// A flat cluster of heterogeneous data nodes and the blocks stored on them.
///
/// Fields are public so that tests and loaders can build arbitrary (possibly
/// invalid) states; validate_cluster() reports what is wrong with them. The
/// mutating members keep the accounting invariants and throw on misuse.
struct ClusterState {
    std::vector<NodeState> nodes;
    std::vector<Block> blocks;
    std::vector<BlockPlacement> placements;
    Bytes block_size_bytes = kDefaultBlockSize;
    double availability_target = 0.99;
    WeightBasis weight_basis = WeightBasis::kFreeSpace;

    bool operator==(const ClusterState&) const = default;

    NodeState* find_node(NodeId id);
    const NodeState* find_node(NodeId id) const;
    const Block* find_block(BlockId id) const;
    BlockPlacement* find_placement(BlockId id);
    const BlockPlacement* find_placement(BlockId id) const;

    void add_node(NodeSpec spec);

    // Records a new block with the given holders and charges its size to each
    // holder. Throws DomainError if the block id exists, a holder is unknown,
    // dead, duplicated or lacks space.
    void commit(const Block& block, std::span<const NodeId> holders);

    // Adds one more holder to an existing block.
    void add_replica(BlockId block_id, NodeId node_id);

    void set_alive(NodeId node_id, bool alive);

    std::size_t alive_node_count() const;
    std::size_t alive_holder_count(const BlockPlacement& placement) const;
};

ClusterState make_cluster(std::vector<NodeSpec> specs,
                          Bytes block_size_bytes = kDefaultBlockSize,
                          double availability_target = 0.99);

/// Checks every type invariant; returns one human-readable line per violation
/// (empty when the state is consistent).
std::vector<std::string> validate_cluster(const ClusterState& state);

}  // namespace replica
