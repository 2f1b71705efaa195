#pragma once

#include "tracesim/netgen.hpp"

#include <cstdint>
#include <vector>

namespace tracesim {

struct QueueEntry {
    NodeId node = 0;
    int enqueue_day = 0;
    /// Day of the most recent positive that implicated this node.
    int source_positive_day = 0;
    /// Global insertion counter; FIFO order is ascending seq.
    std::uint64_t seq = 0;
};

/// Contacts waiting to be tested. Holds each node at most once; removal is
/// O(1) and entries are compacted lazily.
class TracingQueue {
public:
    explicit TracingQueue(std::size_t node_count = 0) : slot_(node_count, npos) {}

    /// Returns true if `node` was newly added. A node already queued keeps its
    /// FIFO position but adopts the newer source day.
    bool enqueue(NodeId node, int day, int source_positive_day);
    bool remove(NodeId node);
    bool contains(NodeId node) const { return slot_[node] != npos; }
    std::size_t size() const { return live_; }
    bool empty() const { return live_ == 0; }
    void clear();

    /// Live entries in FIFO order.
    std::vector<QueueEntry> entries() const;
    const QueueEntry* find(NodeId node) const
    {
        return contains(node) ? &entries_[slot_[node]] : nullptr;
    }

private:
    static constexpr std::uint32_t npos = UINT32_MAX;

    void compact();

    std::vector<QueueEntry> entries_;
    std::vector<std::uint8_t> dead_flags_;
    std::vector<std::uint32_t> slot_;
    std::size_t live_ = 0;
    std::uint64_t next_seq_ = 0;
};

} // namespace tracesim
