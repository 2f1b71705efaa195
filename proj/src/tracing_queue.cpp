#include "tracesim/tracing_queue.hpp"

namespace tracesim {

bool TracingQueue::enqueue(NodeId node, int day, int source_positive_day)
{
    if (slot_[node] != npos) {
        auto& e = entries_[slot_[node]];
        if (source_positive_day > e.source_positive_day)
            e.source_positive_day = source_positive_day;
        return false;
    }
    if (entries_.size() > 64 && entries_.size() > 2 * live_)
        compact();
    slot_[node] = static_cast<std::uint32_t>(entries_.size());
    entries_.push_back({node, day, source_positive_day, next_seq_++});
    dead_flags_.push_back(0);
    ++live_;
    return true;
}

bool TracingQueue::remove(NodeId node)
{
    const auto s = slot_[node];
    if (s == npos)
        return false;
    dead_flags_[s] = 1;
    slot_[node] = npos;
    --live_;
    return true;
}

void TracingQueue::clear()
{
    for (const auto& e : entries_)
        slot_[e.node] = npos;
    entries_.clear();
    dead_flags_.clear();
    live_ = 0;
}

void TracingQueue::compact()
{
    std::size_t w = 0;
    for (std::size_t r = 0; r < entries_.size(); ++r) {
        if (dead_flags_[r])
            continue;
        entries_[w] = entries_[r];
        slot_[entries_[w].node] = static_cast<std::uint32_t>(w);
        ++w;
    }
    entries_.resize(w);
    dead_flags_.assign(w, 0);
}

std::vector<QueueEntry> TracingQueue::entries() const
{
    std::vector<QueueEntry> out;
    out.reserve(live_);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (!dead_flags_[i])
            out.push_back(entries_[i]);
    return out;
}

} // namespace tracesim
