#include "ngsp/training_data.hpp"

#include <algorithm>
#include <cmath>

#include "ngsp/errors.hpp"

namespace ngsp {

std::string_view neg_strategy_name(NegStrategy s) {
    switch (s) {
        case NegStrategy::Perturb: return "perturb";
        case NegStrategy::AddRegions: return "add_regions";
        case NegStrategy::RemoveRegions: return "remove_regions";
        case NegStrategy::OtherParts: return "other_parts";
        case NegStrategy::OtherShape: return "other_shape";
        case NegStrategy::ChildLabels: return "child_labels";
    }
    return "unknown";
}

NegStrategy parse_neg_strategy(std::string_view name) {
    for (int i = 0; i < 6; ++i) {
        auto s = static_cast<NegStrategy>(i);
        if (neg_strategy_name(s) == name) return s;
    }
    throw DataError("unknown negative strategy: '" + std::string(name) + "'");
}

NegativeSpec NegativeSpec::geometry() {
    NegativeSpec spec;
    spec.mixture = {0.50, 0.15, 0.15, 0.15, 0.05, 0.00};
    return spec;
}

NegativeSpec NegativeSpec::layout() {
    NegativeSpec spec;
    spec.mixture = {0.50, 0.075, 0.075, 0.075, 0.025, 0.25};
    return spec;
}

std::vector<PositiveExample> extract_positives(const Grammar& g, const Dataset& dataset,
                                               LabelId l) {
    std::vector<PositiveExample> out;
    const bool terminal = g.is_terminal(l);
    for (int si = 0; si < dataset.size(); ++si) {
        const LabeledShape& item = dataset.at(si);
        PositiveExample ex;
        ex.shape_index = si;
        for (int r = 0; r < item.shape.region_count(); ++r) {
            LabelId t = item.ground_truth.label(r);
            if (t == l || g.is_ancestor(l, t)) {
                ex.regions.push_back(r);
                if (!terminal) ex.child_tags.push_back(g.child_on_path(l, t));
            }
        }
        if (!ex.regions.empty()) out.push_back(std::move(ex));
    }
    return out;
}

LabelAssignment perturb_assignment(const Grammar& g, const LabelAssignment& gt, int num_changes,
                                   Rng& rng, double proximity_base) {
    const int n = gt.region_count();
    if (n == 0) throw DataError("cannot perturb an empty assignment");
    if (g.terminals().size() < 2)
        throw DataError("perturbation needs at least two terminal labels");
    num_changes = std::clamp(num_changes, 1, n);

    // Partial Fisher-Yates: choose num_changes distinct regions.
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < num_changes; ++i) {
        int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }

    LabelAssignment out = gt;
    const auto& terminals = g.terminals();
    std::vector<double> weights(terminals.size());
    for (int c = 0; c < num_changes; ++c) {
        int region = idx[static_cast<std::size_t>(c)];
        LabelId old = gt.label(region);
        for (std::size_t t = 0; t < terminals.size(); ++t) {
            weights[t] = terminals[t] == old
                             ? 0.0
                             : std::pow(proximity_base,
                                        -static_cast<double>(g.tree_distance(old, terminals[t])));
        }
        out.set(region, terminals[rng.weighted_pick(weights)]);
    }
    return out;
}

std::vector<int> perturbation_bucket_counts() {
    return {100, 200, 300, 400, 500, 500, 1000, 1500, 2000, 2500, 999};
}

int schedule_bucket_changes(int bucket, int n_regions) {
    static const int fixed[5] = {1, 2, 3, 4, 5};
    static const double pct[5] = {0.10, 0.20, 0.30, 0.40, 0.50};
    if (bucket < 5) return std::min(fixed[bucket], n_regions);
    if (bucket < 10) {
        int m = static_cast<int>(
            std::floor(pct[bucket - 5] * static_cast<double>(n_regions) + 0.5));
        return std::clamp(m, 1, n_regions);
    }
    return n_regions; // all labels changed
}

std::vector<LabelAssignment> perturbation_schedule(const Grammar& g, const LabelAssignment& gt,
                                                   std::uint64_t seed, double proximity_base) {
    const int n = gt.region_count();
    if (n == 0) throw DataError("cannot build a perturbation schedule for zero regions");
    Rng rng(seed);
    std::vector<LabelAssignment> out;
    out.reserve(9999);
    const auto counts = perturbation_bucket_counts();
    for (std::size_t b = 0; b < counts.size(); ++b) {
        const int changes = schedule_bucket_changes(static_cast<int>(b), n);
        for (int i = 0; i < counts[b]; ++i)
            out.push_back(perturb_assignment(g, gt, changes, rng, proximity_base));
    }
    return out;
}

namespace {

struct Candidate {
    int shape_index;
    std::vector<int> regions;
    std::vector<LabelId> child_tags;
    double unchanged_area;
    bool valid = false;
};

// Distinct sample of `count` elements from pool (order normalized ascending).
std::vector<int> sample_distinct(const std::vector<int>& pool, int count, Rng& rng) {
    std::vector<int> copy = pool;
    for (int i = 0; i < count; ++i) {
        int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(copy.size() - i)));
        std::swap(copy[static_cast<std::size_t>(i)], copy[static_cast<std::size_t>(j)]);
    }
    copy.resize(static_cast<std::size_t>(count));
    std::sort(copy.begin(), copy.end());
    return copy;
}

LabelId random_child(const Grammar& g, LabelId parent, Rng& rng, LabelId exclude = kNoLabel) {
    const auto& kids = g.children(parent);
    if (kids.empty()) throw DataError("label has no children");
    if (exclude == kNoLabel) return kids[rng.next_below(kids.size())];
    std::vector<LabelId> options;
    for (LabelId c : kids)
        if (c != exclude) options.push_back(c);
    if (options.empty()) throw DataError("no alternative child label available");
    return options[rng.next_below(options.size())];
}

// Area-weighted unchanged fraction between the positive example and a
// candidate group: a region counts as changed when its membership flips or,
// for layout examples, when its child tag flips.
double unchanged_between(const Shape& s, const std::vector<int>& pos_regions,
                         const std::vector<LabelId>& pos_tags, const Candidate& cand,
                         int positive_shape_index) {
    if (cand.shape_index != positive_shape_index) return 0.0;
    double changed = 0.0;
    std::size_t pi = 0, ci = 0;
    while (pi < pos_regions.size() || ci < cand.regions.size()) {
        if (ci == cand.regions.size() ||
            (pi < pos_regions.size() && pos_regions[pi] < cand.regions[ci])) {
            changed += s.regions[static_cast<std::size_t>(pos_regions[pi])].area;
            ++pi;
        } else if (pi == pos_regions.size() || cand.regions[ci] < pos_regions[pi]) {
            changed += s.regions[static_cast<std::size_t>(cand.regions[ci])].area;
            ++ci;
        } else {
            const bool tags_differ = !pos_tags.empty() && !cand.child_tags.empty() &&
                                     pos_tags[pi] != cand.child_tags[ci];
            if (tags_differ) changed += s.regions[static_cast<std::size_t>(pos_regions[pi])].area;
            ++pi;
            ++ci;
        }
    }
    return 1.0 - changed;
}

} // namespace

NegativeExample sample_negative(const NegativeSpec& spec, ScorerKind kind, const Grammar& g,
                                const Dataset& dataset, int shape_index, LabelId l,
                                std::uint64_t seed) {
    if (kind == ScorerKind::Geometry && spec.mixture[static_cast<int>(NegStrategy::ChildLabels)] > 0.0)
        throw DataError("child_labels strategy is layout-only");

    const LabeledShape& item = dataset.at(shape_index);
    const Shape& shape = item.shape;
    const LabelAssignment& gt = item.ground_truth;
    const bool layout = kind == ScorerKind::Layout;
    const bool terminal = g.is_terminal(l);

    // The positive example this negative corrupts.
    std::vector<int> pos_regions;
    std::vector<LabelId> pos_tags;
    for (int r = 0; r < shape.region_count(); ++r) {
        LabelId t = gt.label(r);
        if (t == l || g.is_ancestor(l, t)) {
            pos_regions.push_back(r);
            if (layout && !terminal) pos_tags.push_back(g.child_on_path(l, t));
        }
    }
    if (pos_regions.empty())
        throw DataError("no positive example for label '" + g.label_name(l) + "' in shape '" +
                        shape.id + "'");

    std::vector<int> complement;
    for (int r = 0; r < shape.region_count(); ++r)
        if (!std::binary_search(pos_regions.begin(), pos_regions.end(), r))
            complement.push_back(r);

    std::vector<int> foreign_shapes; // shapes where l never occurs
    for (int si = 0; si < dataset.size(); ++si) {
        if (si == shape_index) continue;
        const LabeledShape& other = dataset.at(si);
        bool occurs = false;
        for (int r = 0; r < other.shape.region_count() && !occurs; ++r) {
            LabelId t = other.ground_truth.label(r);
            occurs = (t == l || g.is_ancestor(l, t));
        }
        if (!occurs) foreign_shapes.push_back(si);
    }

    // Zero out strategies this (shape, label) cannot structurally support.
    std::array<double, 6> weights = spec.mixture;
    if (g.terminals().size() < 2) weights[static_cast<int>(NegStrategy::Perturb)] = 0.0;
    if (complement.empty()) {
        weights[static_cast<int>(NegStrategy::AddRegions)] = 0.0;
        weights[static_cast<int>(NegStrategy::OtherParts)] = 0.0;
    }
    if (foreign_shapes.empty()) weights[static_cast<int>(NegStrategy::OtherShape)] = 0.0;
    if (!layout || terminal || g.children(l).size() < 2)
        weights[static_cast<int>(NegStrategy::ChildLabels)] = 0.0;
    double weight_sum = 0.0;
    for (double w : weights) weight_sum += w;
    if (weight_sum <= 0.0)
        throw DataError("no applicable negative strategy for label '" + g.label_name(l) + "'");

    Rng rng(seed);
    const auto strategy = static_cast<NegStrategy>(rng.weighted_pick(weights));
    const auto bucket_counts = perturbation_bucket_counts();
    std::vector<double> bucket_weights(bucket_counts.begin(), bucket_counts.end());

    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        Candidate cand;
        cand.shape_index = shape_index;
        switch (strategy) {
            case NegStrategy::Perturb: {
                int bucket = static_cast<int>(rng.weighted_pick(bucket_weights));
                int changes = schedule_bucket_changes(bucket, shape.region_count());
                LabelAssignment perturbed =
                    perturb_assignment(g, gt, changes, rng, spec.proximity_base);
                for (int r = 0; r < shape.region_count(); ++r) {
                    LabelId t = perturbed.label(r);
                    if (t == l || g.is_ancestor(l, t)) {
                        cand.regions.push_back(r);
                        if (layout && !terminal) cand.child_tags.push_back(g.child_on_path(l, t));
                    }
                }
                break;
            }
            case NegStrategy::AddRegions: {
                int count = 1 + static_cast<int>(rng.next_below(complement.size()));
                auto added = sample_distinct(complement, count, rng);
                cand.regions = pos_regions;
                cand.regions.insert(cand.regions.end(), added.begin(), added.end());
                std::sort(cand.regions.begin(), cand.regions.end());
                if (layout && !terminal) {
                    for (int r : cand.regions) {
                        auto it = std::lower_bound(pos_regions.begin(), pos_regions.end(), r);
                        if (it != pos_regions.end() && *it == r)
                            cand.child_tags.push_back(
                                pos_tags[static_cast<std::size_t>(it - pos_regions.begin())]);
                        else
                            cand.child_tags.push_back(random_child(g, l, rng));
                    }
                }
                break;
            }
            case NegStrategy::RemoveRegions: {
                int count = 1 + static_cast<int>(rng.next_below(pos_regions.size()));
                auto removed = sample_distinct(pos_regions, count, rng);
                for (std::size_t i = 0; i < pos_regions.size(); ++i) {
                    if (std::binary_search(removed.begin(), removed.end(), pos_regions[i]))
                        continue;
                    cand.regions.push_back(pos_regions[i]);
                    if (layout && !terminal) cand.child_tags.push_back(pos_tags[i]);
                }
                break;
            }
            case NegStrategy::OtherParts: {
                int count = 1 + static_cast<int>(rng.next_below(complement.size()));
                cand.regions = sample_distinct(complement, count, rng);
                if (layout && !terminal)
                    for (std::size_t i = 0; i < cand.regions.size(); ++i)
                        cand.child_tags.push_back(random_child(g, l, rng));
                break;
            }
            case NegStrategy::OtherShape: {
                int other = foreign_shapes[rng.next_below(foreign_shapes.size())];
                const Shape& os = dataset.at(other).shape;
                std::vector<int> pool(static_cast<std::size_t>(os.region_count()));
                for (int r = 0; r < os.region_count(); ++r) pool[static_cast<std::size_t>(r)] = r;
                int count = 1 + static_cast<int>(rng.next_below(pool.size()));
                cand.shape_index = other;
                cand.regions = sample_distinct(pool, count, rng);
                if (layout && !terminal)
                    for (std::size_t i = 0; i < cand.regions.size(); ++i)
                        cand.child_tags.push_back(random_child(g, l, rng));
                break;
            }
            case NegStrategy::ChildLabels: {
                cand.regions = pos_regions;
                cand.child_tags = pos_tags;
                std::vector<std::size_t> flipped;
                for (std::size_t i = 0; i < cand.child_tags.size(); ++i) {
                    if (rng.bernoulli(0.5)) {
                        cand.child_tags[i] = random_child(g, l, rng, cand.child_tags[i]);
                        flipped.push_back(i);
                    }
                }
                if (flipped.empty()) {
                    std::size_t i = rng.next_below(cand.child_tags.size());
                    cand.child_tags[i] = random_child(g, l, rng, cand.child_tags[i]);
                }
                break;
            }
        }

        if (cand.regions.empty()) continue;
        cand.unchanged_area =
            unchanged_between(shape, pos_regions, pos_tags, cand, shape_index);
        if (cand.unchanged_area > spec.similarity_threshold) continue;

        NegativeExample out;
        out.strategy = strategy;
        out.shape_index = cand.shape_index;
        out.regions = std::move(cand.regions);
        out.child_tags = std::move(cand.child_tags);
        out.unchanged_area = cand.unchanged_area;
        return out;
    }
    throw DataError("NegativeSamplingExhausted: no negative for label '" + g.label_name(l) +
                    "' in shape '" + shape.id + "' within " +
                    std::to_string(spec.max_attempts) + " attempts");
}

} // namespace ngsp
