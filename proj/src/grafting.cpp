#include "graftrl/grafting.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "graftrl/rng.hpp"

namespace graftrl {

double grafting_error(const Segment& head, const Segment& tail) {
    if (head.empty() || tail.empty()) {
        throw std::invalid_argument("grafting_error: empty segment");
    }
    return state_distance(head.back().s_next, tail.front().s);
}

namespace {

void append_retagged(Segment& out, const Transition& t) {
    Transition copy = t;
    copy.provenance = Provenance::Synthetic;
    out.push_back(std::move(copy));
}

}  // namespace

std::optional<SyntheticTrajectory> unite(const Segment& head, const Segment& tail, double eps) {
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("unite: eps must be non-negative");
    }
    const double err = grafting_error(head, tail);
    if (!(err < eps)) {
        return std::nullopt;
    }
    SyntheticTrajectory out;
    out.head_length = head.size();
    out.junction_error = err;
    out.quality = quality(head) + quality(tail);
    out.transitions.reserve(head.size() + tail.size());
    for (const Transition& t : head) {
        append_retagged(out.transitions, t);
    }
    for (const Transition& t : tail) {
        append_retagged(out.transitions, t);
    }
    return out;
}

std::vector<SyntheticTrajectory> select_top(const Trajectory& authentic,
                                            std::vector<SyntheticTrajectory> candidates,
                                            std::size_t theta) {
    const double bar = quality(authentic.transitions);
    std::vector<SyntheticTrajectory> qualified;
    for (SyntheticTrajectory& c : candidates) {
        if (c.quality >= bar) {
            qualified.push_back(std::move(c));
        }
    }
    if (qualified.size() > theta) {
        std::stable_sort(qualified.begin(), qualified.end(),
                         [](const SyntheticTrajectory& a, const SyntheticTrajectory& b) {
                             return a.quality > b.quality;
                         });
        qualified.resize(theta);
    }
    return qualified;
}

namespace {

// A candidate splice kept as a view until selection: the head is the
// authentic prefix [0, q] and the tail is a library entry. Materializing
// only the selected few avoids copying full tails for the whole pool.
struct Candidate {
    std::size_t q;
    const SegmentLibrary::Entry* entry;
    double junction_error;
    double quality;
};

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    return z ^ (z >> 27);
}

std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
    for (double x : v) {
        h = mix(h, std::bit_cast<std::uint64_t>(x));
    }
    return h;
}

std::uint64_t hash_transition(std::uint64_t h, const Transition& t) {
    h = hash_doubles(h, t.s);
    h = hash_doubles(h, t.a);
    h = mix(h, std::bit_cast<std::uint64_t>(t.r));
    h = hash_doubles(h, t.s_next);
    h = mix(h, t.terminal ? 1u : 0u);
    return h;
}

std::uint64_t candidate_hash(const Candidate& c, const Segment& authentic) {
    std::uint64_t h = 0x2545f4914f6cdd1dull;
    for (std::size_t i = 0; i <= c.q; ++i) {
        h = hash_transition(h, authentic[i]);
    }
    const SegmentRef& tail = c.entry->segment;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        h = hash_transition(h, tail.at(i));
    }
    return h;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
            return false;
        }
    }
    return true;
}

bool transitions_bit_identical(const Transition& x, const Transition& y) {
    return bits_equal(x.s, y.s) && bits_equal(x.a, y.a) &&
           std::bit_cast<std::uint64_t>(x.r) == std::bit_cast<std::uint64_t>(y.r) &&
           bits_equal(x.s_next, y.s_next) && x.terminal == y.terminal;
}

const Transition& candidate_at(const Candidate& c, const Segment& authentic, std::size_t i) {
    return i <= c.q ? authentic[i] : c.entry->segment.at(i - c.q - 1);
}

std::size_t candidate_size(const Candidate& c) { return c.q + 1 + c.entry->segment.size(); }

bool candidates_equal(const Candidate& a, const Candidate& b, const Segment& authentic) {
    const std::size_t n = candidate_size(a);
    if (n != candidate_size(b)) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!transitions_bit_identical(candidate_at(a, authentic, i),
                                       candidate_at(b, authentic, i))) {
            return false;
        }
    }
    return true;
}

// True when the splice reproduces the authentic trajectory bit for bit.
bool reconstructs_authentic(const Candidate& c, const Segment& authentic) {
    if (candidate_size(c) != authentic.size()) {
        return false;
    }
    const SegmentRef& tail = c.entry->segment;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        if (!transitions_bit_identical(tail.at(i), authentic[c.q + 1 + i])) {
            return false;
        }
    }
    return true;
}

SyntheticTrajectory materialize(const Candidate& c, const Segment& authentic) {
    SyntheticTrajectory out;
    out.head_length = c.q + 1;
    out.junction_error = c.junction_error;
    out.quality = c.quality;
    const SegmentRef& tail = c.entry->segment;
    out.transitions.reserve(out.head_length + tail.size());
    for (std::size_t i = 0; i <= c.q; ++i) {
        append_retagged(out.transitions, authentic[i]);
    }
    for (std::size_t i = 0; i < tail.size(); ++i) {
        append_retagged(out.transitions, tail.at(i));
    }
    return out;
}

}  // namespace

std::vector<SyntheticTrajectory> graft(const GraftConfig& cfg, const Trajectory& authentic,
                                       SegmentLibrary& lib, Rng& rng, GraftStats* stats) {
    const Segment& tr = authentic.transitions;
    if (tr.empty()) {
        throw std::invalid_argument("graft: empty trajectory");
    }

    // Prefix reward sums; prefix[q] is the quality of the head [0, q].
    std::vector<double> prefix(tr.size());
    double running = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        running += tr[i].r;
        prefix[i] = running;
    }
    const double authentic_quality = prefix.back();

    // Phase 1: extraction. Tail slices share one copy of the trajectory.
    if (cfg.n_ext > 0) {
        auto parent = std::make_shared<const Segment>(tr);
        for (std::size_t i = 0; i < cfg.n_ext; ++i) {
            const std::size_t p = rng.uniform_index(tr.size());
            lib.insert_ref(tr[p].s, SegmentRef{parent, p});
        }
    }

    // Phase 2: synthesis. The pool is a content set in generation order.
    std::vector<Candidate> pool;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < cfg.n_gft; ++i) {
        const std::size_t q = rng.uniform_index(tr.size());
        const StateVec& query = tr[q].s_next;
        for (const SegmentLibrary::Match& m : lib.get_entries(query, cfg.eps)) {
            Candidate c{q, m.entry, m.distance, prefix[q] + m.entry->segment_quality};
            if (reconstructs_authentic(c, tr)) {
                continue;
            }
            const std::uint64_t h = candidate_hash(c, tr);
            auto& bucket = seen[h];
            const bool duplicate =
                std::any_of(bucket.begin(), bucket.end(), [&](std::size_t idx) {
                    return candidates_equal(pool[idx], c, tr);
                });
            if (duplicate) {
                continue;
            }
            bucket.push_back(pool.size());
            pool.push_back(c);
        }
    }

    // Selection, mirroring select_top on the candidate views.
    std::vector<const Candidate*> qualified;
    for (const Candidate& c : pool) {
        if (c.quality >= authentic_quality) {
            qualified.push_back(&c);
        }
    }
    const std::size_t n_qualified = qualified.size();
    if (qualified.size() > cfg.theta) {
        std::stable_sort(qualified.begin(), qualified.end(),
                         [](const Candidate* a, const Candidate* b) {
                             return a->quality > b->quality;
                         });
        qualified.resize(cfg.theta);
    }

    std::vector<SyntheticTrajectory> out;
    out.reserve(qualified.size());
    for (const Candidate* c : qualified) {
        out.push_back(materialize(*c, tr));
    }
    if (stats) {
        stats->candidates_found = pool.size();
        stats->candidates_qualified = n_qualified;
        stats->returned = out.size();
    }
    return out;
}

}  // namespace graftrl
