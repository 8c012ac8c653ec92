#include "graftrl/experience.hpp"

#include <ostream>
#include <stdexcept>

#include "graftrl/csv.hpp"
#include "graftrl/rng.hpp"

namespace graftrl {

bool same_experience(const Transition& x, const Transition& y) {
    return x.s == y.s && x.a == y.a && x.r == y.r && x.s_next == y.s_next &&
           x.terminal == y.terminal;
}

double quality(const Segment& seg) {
    if (seg.empty()) {
        throw std::invalid_argument("quality: empty segment");
    }
    double sum = 0.0;
    for (const Transition& t : seg) {
        sum += t.r;
    }
    return sum;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t warmup)
    : capacity_(capacity), warmup_(warmup) {
    if (capacity_ == 0) {
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }
    if (warmup_ == 0) {
        throw std::invalid_argument("ReplayBuffer: warmup must be positive");
    }
}

void ReplayBuffer::push(const Transition& t) {
    if (store_.size() == capacity_) {
        if (store_.front().provenance == Provenance::Synthetic) {
            --synthetic_count_;
        }
        store_.pop_front();
    }
    store_.push_back(t);
    if (t.provenance == Provenance::Synthetic) {
        ++synthetic_count_;
    }
}

std::optional<std::vector<Transition>> ReplayBuffer::sample_minibatch(std::size_t n,
                                                                      Rng& rng) const {
    if (!ready()) {
        return std::nullopt;
    }
    std::vector<Transition> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        batch.push_back(store_[rng.uniform_index(store_.size())]);
    }
    return batch;
}

std::size_t ReplayBuffer::remove_synthetic() {
    if (synthetic_count_ == 0) {
        return 0;
    }
    std::deque<Transition> kept;
    std::size_t removed = 0;
    for (Transition& t : store_) {
        if (t.provenance == Provenance::Synthetic) {
            ++removed;
        } else {
            kept.push_back(std::move(t));
        }
    }
    store_ = std::move(kept);
    synthetic_count_ = 0;
    return removed;
}

double ReplayBuffer::synthetic_ratio() const {
    if (store_.empty()) {
        return 0.0;
    }
    return static_cast<double>(synthetic_count_) / static_cast<double>(store_.size());
}

namespace {

void append_vector(std::string& row, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) {
            row += ';';
        }
        row += csv::format_double(v[i]);
    }
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& episodes) {
    out << "episode_id,step,s,a,r,s_next,provenance\n";
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        const Segment& seg = episodes[e].transitions;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            const Transition& t = seg[i];
            std::string row;
            row += std::to_string(e + 1);
            row += ',';
            row += std::to_string(i + 1);
            row += ',';
            append_vector(row, t.s);
            row += ',';
            append_vector(row, t.a);
            row += ',';
            row += csv::format_double(t.r);
            row += ',';
            append_vector(row, t.s_next);
            row += ',';
            row += t.provenance == Provenance::Synthetic ? "synthetic" : "authentic";
            row += '\n';
            out << row;
        }
    }
}

}  // namespace graftrl
