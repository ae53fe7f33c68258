#include "ergo/map_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

namespace ergo {

namespace {

constexpr Index kNone = std::numeric_limits<Index>::max();

// Maximum matching on the proximity graph. Targets are the grid points
// sorted by coordinate; each source y may use targets strictly within
// delta of images[y]. Two stages:
//   1. For sources whose admissible set is a single coordinate interval,
//      an earliest-deadline sweep (sort by right endpoint, take the lowest
//      free target): exact maximum on interval bigraphs.
//   2. Kuhn augmentation for everything left (wrapped circle arcs,
//      symbolic balls, leftovers). Augmenting from each still-free source
//      once yields a maximum matching from any starting matching.
class ProximityMatcher {
public:
    ProximityMatcher(std::span<const double> points, std::span<const double> images,
                     double delta, const Metric& metric)
        : pts_(points), images_(images), delta_(delta), metric_(metric),
          m_(points.size()) {
        order_.resize(m_);
        for (Index i = 0; i < m_; ++i) order_[i] = i;
        std::sort(order_.begin(), order_.end(), [&](Index a, Index b) {
            if (pts_[a] != pts_[b]) return pts_[a] < pts_[b];
            return a < b;
        });
        coords_.resize(m_);
        for (Index r = 0; r < m_; ++r) coords_[r] = pts_[order_[r]];
        match_source_.assign(m_, kNone);
        match_target_.assign(m_, kNone);
    }

    Perm run() {
        std::vector<Index> pending;
        if (metric_.kind == MetricKind::symbolic) {
            pending.resize(m_);
            for (Index i = 0; i < m_; ++i) pending[i] = i;
        } else {
            pending = sweep_intervals();
        }
        augment_all(pending);
        return complete();
    }

private:
    struct Window {
        double lo, hi;  // admits coords with lo < c < hi
    };

    bool wraps(Index s) const {
        if (metric_.kind != MetricKind::circle) return false;
        double c = wrap_unit(images_[s]);
        return c - delta_ < 0.0 || c + delta_ > 1.0;
    }

    bool admissible(Index s, Index rank) const {
        return metric_(images_[s], coords_[rank]) < delta_;
    }

    // first rank whose coordinate exceeds x
    Index rank_above(double x) const {
        return static_cast<Index>(
            std::upper_bound(coords_.begin(), coords_.end(), x) - coords_.begin());
    }

    // Stage 1. Returns the sources still unmatched afterwards.
    std::vector<Index> sweep_intervals() {
        std::vector<Index> pending;
        std::vector<std::pair<double, Index>> by_deadline;
        by_deadline.reserve(m_);
        for (Index s = 0; s < m_; ++s) {
            if (wraps(s)) {
                pending.push_back(s);
                continue;
            }
            double c = metric_.kind == MetricKind::circle ? wrap_unit(images_[s])
                                                          : images_[s];
            by_deadline.emplace_back(c + delta_, s);
        }
        std::sort(by_deadline.begin(), by_deadline.end());

        // next_free_[r]: smallest free rank >= r, path-compressed
        next_free_.resize(m_ + 1);
        for (Index r = 0; r <= m_; ++r) next_free_[r] = r;

        for (auto [deadline, s] : by_deadline) {
            double c = metric_.kind == MetricKind::circle ? wrap_unit(images_[s])
                                                          : images_[s];
            Index r = find_free(rank_above(c - delta_));
            if (r < m_ && coords_[r] < c + delta_ && admissible(s, r)) {
                match_source_[s] = r;
                match_target_[r] = s;
                next_free_[r] = r + 1;
            } else {
                pending.push_back(s);
            }
        }
        std::sort(pending.begin(), pending.end());
        return pending;
    }

    Index find_free(Index r) {
        if (r > m_) r = m_;
        while (next_free_[r] != r) {
            next_free_[r] = next_free_[next_free_[r]];
            r = next_free_[r];
        }
        return r;
    }

    // Stage 2: iterative augmenting search from each free source.
    void augment_all(const std::vector<Index>& pending) {
        avail_.clear();
        for (Index r = 0; r < m_; ++r) avail_.insert(r);
        for (Index s : pending) {
            if (match_source_[s] != kNone) continue;
            try_augment(s);
        }
    }

    std::optional<Index> next_candidate(Index s) {
        if (metric_.kind == MetricKind::symbolic) {
            for (Index r : avail_)
                if (admissible(s, r)) return r;
            return std::nullopt;
        }
        double c = metric_.kind == MetricKind::circle ? wrap_unit(images_[s])
                                                      : images_[s];
        Window windows[2];
        int n_windows = 1;
        if (wraps(s)) {
            if (2.0 * delta_ >= 1.0) {
                windows[0] = {-1.0, 2.0};
            } else {
                windows[0] = {-1.0, wrap_unit(c + delta_)};
                windows[1] = {wrap_unit(c - delta_), 2.0};
                n_windows = 2;
            }
        } else {
            windows[0] = {c - delta_, c + delta_};
        }
        for (int w = 0; w < n_windows; ++w) {
            auto it = avail_.lower_bound(rank_above(windows[w].lo));
            while (it != avail_.end() && coords_[*it] < windows[w].hi) {
                if (admissible(s, *it)) return *it;
                ++it;  // boundary rounding can exclude a coordinate-window member
            }
        }
        return std::nullopt;
    }

    void try_augment(Index s0) {
        struct Frame {
            Index source;
            Index chosen;
        };
        std::vector<Frame> path{{s0, kNone}};
        std::vector<Index> visited;

        while (!path.empty()) {
            Index s = path.back().source;
            auto cand = next_candidate(s);
            if (!cand) {
                path.pop_back();
                continue;
            }
            avail_.erase(*cand);
            visited.push_back(*cand);
            path.back().chosen = *cand;
            Index owner = match_target_[*cand];
            if (owner == kNone) {
                for (const Frame& f : path) {
                    match_source_[f.source] = f.chosen;
                    match_target_[f.chosen] = f.source;
                }
                break;
            }
            path.push_back({owner, kNone});
        }
        for (Index r : visited) avail_.insert(r);
    }

    // Pair leftover sources with leftover targets in index order.
    Perm complete() {
        Perm perm(m_, kNone);
        std::vector<bool> target_used(m_, false);
        for (Index s = 0; s < m_; ++s) {
            if (match_source_[s] == kNone) continue;
            Index t = order_[match_source_[s]];
            perm[s] = t;
            target_used[t] = true;
        }
        std::vector<Index> free_targets;
        for (Index t = 0; t < m_; ++t)
            if (!target_used[t]) free_targets.push_back(t);
        Index next = 0;
        for (Index s = 0; s < m_; ++s)
            if (perm[s] == kNone) perm[s] = free_targets[next++];
        return perm;
    }

    std::span<const double> pts_;
    std::span<const double> images_;
    double delta_;
    Metric metric_;
    Index m_;
    std::vector<Index> order_;    // rank -> point index
    std::vector<double> coords_;  // rank -> coordinate
    std::vector<Index> match_source_;  // source -> rank
    std::vector<Index> match_target_;  // rank -> source
    std::vector<Index> next_free_;
    std::set<Index> avail_;
};

}  // namespace

MatchResult match_permutation(std::span<const double> points,
                              std::span<const double> images, double delta,
                              const Metric& metric) {
    if (delta <= 0.0) throw std::invalid_argument("match_permutation: delta must be positive");
    if (points.size() != images.size())
        throw std::invalid_argument("match_permutation: |images| must equal |Y|");
    if (points.empty()) throw std::invalid_argument("match_permutation: empty grid");

    ProximityMatcher matcher(points, images, delta, metric);
    MatchResult result;
    result.perm = matcher.run();
    result.delta = delta;
    for (Index s = 0; s < points.size(); ++s)
        if (metric(images[s], points[result.perm[s]]) < delta) ++result.matched_count;
    result.matched_fraction =
        static_cast<double>(result.matched_count) / static_cast<double>(points.size());
    return result;
}

TransitivizeResult transitivize(const Perm& perm) {
    CycleDecomposition dec = cycle_decompose(perm);
    const Index b = dec.cycle_count();
    TransitivizeResult out;
    out.perm.assign(perm.size(), 0);
    for (Index i = 0; i < b; ++i) {
        const auto& cyc = dec.cycles[i];
        for (Index j = 0; j + 1 < cyc.size(); ++j) out.perm[cyc[j]] = cyc[j + 1];
        const auto& next = dec.cycles[(i + 1) % b];
        out.perm[cyc.back()] = next.front();
    }
    for (Index y = 0; y < perm.size(); ++y)
        if (out.perm[y] != perm[y]) ++out.mismatch_count;
    return out;
}

PeriodizeResult periodize(const Perm& perm, Index n) {
    if (n == 0) throw std::invalid_argument("periodize: n must be positive");
    CycleDecomposition dec = cycle_decompose(perm);

    PeriodizeResult out;
    std::vector<std::vector<Index>> blocks;
    for (const auto& cyc : dec.cycles) {
        Index keep = cyc.size() - cyc.size() % n;
        out.trimmed_count += cyc.size() - keep;
        for (Index start = 0; start < keep; start += n)
            blocks.emplace_back(cyc.begin() + start, cyc.begin() + start + n);
        out.kept.insert(out.kept.end(), cyc.begin(), cyc.begin() + keep);
    }
    std::sort(out.kept.begin(), out.kept.end());

    std::vector<Index> rank_of(perm.size(), kNone);
    for (Index r = 0; r < out.kept.size(); ++r) rank_of[out.kept[r]] = r;
    out.perm.assign(out.kept.size(), 0);
    for (const auto& block : blocks) {
        for (Index j = 0; j + 1 < block.size(); ++j)
            out.perm[rank_of[block[j]]] = rank_of[block[j + 1]];
        out.perm[rank_of[block.back()]] = rank_of[block.front()];
    }
    return out;
}

double approx_error(const FiniteSystem& system, const MapSpec& map, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("approx_error: epsilon must be positive");
    if (!system.has_embedding())
        throw std::domain_error("approx_error: system carries no embedding");
    const Metric rho = system.ambient_metric();
    Index count = 0;
    for (Index y = 0; y < system.size(); ++y) {
        double image = map.evaluator(system.coordinate(y));
        if (rho(system.coordinate(system.perm[y]), image) > epsilon) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(system.size());
}

ApproximateResult approximate_system(const MapSpec& map, std::vector<double> points,
                                     double delta, bool transitive, MetricKind metric) {
    std::vector<double> images(points.size());
    for (Index i = 0; i < points.size(); ++i) {
        images[i] = map.evaluator(points[i]);
        if (metric == MetricKind::circle) images[i] = wrap_unit(images[i]);
    }
    MatchResult match = match_permutation(points, images, delta, Metric{metric, {}});

    BuildLog log;
    log.delta = delta;
    log.matched_fraction = match.matched_fraction;
    log.matched_count = match.matched_count;
    log.cycle_count = cycle_decompose(match.perm).cycle_count();
    log.transitivized = transitive;

    Perm final_perm = std::move(match.perm);
    if (transitive) {
        TransitivizeResult tr = transitivize(final_perm);
        final_perm = std::move(tr.perm);
        log.mismatch_count = tr.mismatch_count;
    }
    return {FiniteSystem(std::move(final_perm), std::move(points), metric), log};
}

}  // namespace ergo
