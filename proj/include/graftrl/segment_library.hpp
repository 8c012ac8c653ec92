#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <unordered_map>
#include <vector>

#include "graftrl/core_math.hpp"
#include "graftrl/experience.hpp"

namespace graftrl {

struct BinKey {
    std::vector<std::int64_t> coords;
    bool operator==(const BinKey&) const = default;
};

struct BinKeyHash {
    std::size_t operator()(const BinKey& k) const noexcept;
};

// Per-dimension floor division of the state into grid cells.
BinKey quantize(const StateVec& s, double bin_size);

// Shared view of the tail [offset, parent->size()) of a stored segment.
// Entries alias their source trajectory instead of copying it.
struct SegmentRef {
    std::shared_ptr<const Segment> parent;
    std::size_t offset = 0;

    std::size_t size() const { return parent->size() - offset; }
    const Transition& at(std::size_t i) const { return (*parent)[offset + i]; }
    Segment materialize() const {
        return Segment(parent->begin() + static_cast<std::ptrdiff_t>(offset), parent->end());
    }
};

// Grid-indexed store of tail segments keyed by their initial state. Lookup is
// restricted to the single bin containing the query; keys near a bin boundary
// are not found from the neighboring bin. Bins evict FIFO at capacity.
//
// Keys are binned in raw state space while the epsilon filter uses the
// normalized-space distance; the two spaces are intentionally different.
class SegmentLibrary {
public:
    struct Entry {
        StateVec key_state;
        SegmentRef segment;
        double segment_quality;  // reward sum of the tail, cached at insert
    };

    SegmentLibrary(double bin_size, std::size_t bin_capacity);

    // Stores a copy of `seg` keyed by `key_state`, which must equal the first
    // transition's state.
    void insert(const StateVec& key_state, const Segment& seg);

    // Same contract, but shares ownership of an existing segment.
    void insert_ref(const StateVec& key_state, SegmentRef seg);

    // Segments in the query's bin whose key state lies strictly within eps of
    // the query, in insertion order.
    std::vector<Segment> get(const StateVec& query, double eps) const;

    struct Match {
        const Entry* entry;
        double distance;
    };
    std::vector<Match> get_entries(const StateVec& query, double eps) const;

    std::size_t total_segments() const { return total_; }
    std::size_t bin_count() const { return bins_.size(); }
    double bin_size() const { return bin_size_; }
    std::size_t bin_capacity() const { return bin_capacity_; }

    // One row per bin: coords (';'-separated), occupancy.
    void write_stats_csv(std::ostream& out) const;

private:
    double bin_size_;
    std::size_t bin_capacity_;
    std::size_t total_ = 0;
    std::unordered_map<BinKey, std::deque<Entry>, BinKeyHash> bins_;
};

}  // namespace graftrl
