#include "graftrl/segment_library.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace graftrl {

std::size_t BinKeyHash::operator()(const BinKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t c : k.coords) {
        std::uint64_t z = h ^ static_cast<std::uint64_t>(c);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        h = z ^ (z >> 31);
    }
    return static_cast<std::size_t>(h);
}

BinKey quantize(const StateVec& s, double bin_size) {
    if (!(bin_size > 0.0)) {
        throw std::invalid_argument("quantize: bin_size must be positive");
    }
    BinKey key;
    key.coords.reserve(s.size());
    for (double v : s) {
        key.coords.push_back(static_cast<std::int64_t>(std::floor(v / bin_size)));
    }
    return key;
}

SegmentLibrary::SegmentLibrary(double bin_size, std::size_t bin_capacity)
    : bin_size_(bin_size), bin_capacity_(bin_capacity) {
    if (!(bin_size_ > 0.0)) {
        throw std::invalid_argument("SegmentLibrary: bin_size must be positive");
    }
    if (bin_capacity_ == 0) {
        throw std::invalid_argument("SegmentLibrary: bin_capacity must be positive");
    }
}

void SegmentLibrary::insert(const StateVec& key_state, const Segment& seg) {
    auto parent = std::make_shared<const Segment>(seg);
    insert_ref(key_state, SegmentRef{std::move(parent), 0});
}

void SegmentLibrary::insert_ref(const StateVec& key_state, SegmentRef seg) {
    if (seg.size() == 0) {
        throw std::invalid_argument("SegmentLibrary::insert: empty segment");
    }
    if (seg.at(0).s != key_state) {
        throw std::invalid_argument(
            "SegmentLibrary::insert: key state must equal the segment's first state");
    }
    double seg_quality = 0.0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        seg_quality += seg.at(i).r;
    }
    std::deque<Entry>& bin = bins_[quantize(key_state, bin_size_)];
    if (bin.size() == bin_capacity_) {
        bin.pop_front();
        --total_;
    }
    bin.push_back(Entry{key_state, std::move(seg), seg_quality});
    ++total_;
}

std::vector<SegmentLibrary::Match> SegmentLibrary::get_entries(const StateVec& query,
                                                               double eps) const {
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("SegmentLibrary::get: eps must be non-negative");
    }
    std::vector<Match> out;
    auto it = bins_.find(quantize(query, bin_size_));
    if (it == bins_.end()) {
        return out;
    }
    for (const Entry& entry : it->second) {
        const double d = state_distance(query, entry.key_state);
        if (d < eps) {
            out.push_back(Match{&entry, d});
        }
    }
    return out;
}

std::vector<Segment> SegmentLibrary::get(const StateVec& query, double eps) const {
    std::vector<Segment> out;
    for (const Match& m : get_entries(query, eps)) {
        out.push_back(m.entry->segment.materialize());
    }
    return out;
}

void SegmentLibrary::write_stats_csv(std::ostream& out) const {
    out << "bin,occupancy\n";
    // Sorted for a stable dump; the map itself is unordered.
    std::map<std::vector<std::int64_t>, std::size_t> rows;
    for (const auto& [key, bin] : bins_) {
        rows[key.coords] = bin.size();
    }
    for (const auto& [coords, occupancy] : rows) {
        std::string row;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            if (i > 0) {
                row += ';';
            }
            row += std::to_string(coords[i]);
        }
        out << row << ',' << occupancy << '\n';
    }
}

}  // namespace graftrl
