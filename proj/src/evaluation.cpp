#include "ngsp/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "ngsp/errors.hpp"
#include "ngsp/parallel.hpp"

namespace ngsp {

namespace {

struct LabelCounters {
    std::vector<double> intersection;
    std::vector<double> union_count;
    explicit LabelCounters(int n) : intersection(static_cast<std::size_t>(n), 0.0),
                                    union_count(static_cast<std::size_t>(n), 0.0) {}
};

void accumulate_shape(const Grammar& g, const LabeledShape& item, const LabelAssignment& pred,
                      LabelCounters& counters) {
    const int n_labels = g.label_count();
    std::vector<char> in_pred(static_cast<std::size_t>(n_labels));
    std::vector<char> in_gt(static_cast<std::size_t>(n_labels));
    for (int r = 0; r < item.shape.region_count(); ++r) {
        const double np = static_cast<double>(item.shape.regions[static_cast<std::size_t>(r)].points.size());
        std::fill(in_pred.begin(), in_pred.end(), 0);
        std::fill(in_gt.begin(), in_gt.end(), 0);
        for (LabelId l = pred.label(r); l != kNoLabel; l = g.parent(l))
            in_pred[static_cast<std::size_t>(l)] = 1;
        for (LabelId l = item.ground_truth.label(r); l != kNoLabel; l = g.parent(l))
            in_gt[static_cast<std::size_t>(l)] = 1;
        for (int l = 0; l < n_labels; ++l) {
            if (in_pred[static_cast<std::size_t>(l)] && in_gt[static_cast<std::size_t>(l)])
                counters.intersection[static_cast<std::size_t>(l)] += np;
            if (in_pred[static_cast<std::size_t>(l)] || in_gt[static_cast<std::size_t>(l)])
                counters.union_count[static_cast<std::size_t>(l)] += np;
        }
    }
}

double mean_over_labels(const Grammar& g, const LabelCounters& counters,
                        const MiouOptions& opts) {
    double sum = 0.0;
    int count = 0;
    for (LabelId l = 0; l < g.label_count(); ++l) {
        if (opts.terminals_only && !g.is_terminal(l)) continue;
        const double u = counters.union_count[static_cast<std::size_t>(l)];
        if (u <= 0.0) {
            if (opts.zero_union_counts_as_zero) ++count;
            continue;
        }
        sum += counters.intersection[static_cast<std::size_t>(l)] / u;
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace

IouReport miou(const Grammar& g, std::span<const LabeledShape> test,
               std::span<const LabelAssignment> predictions, const MiouOptions& opts) {
    if (test.size() != predictions.size())
        throw DataError("prediction count does not match test set size");
    for (std::size_t i = 0; i < test.size(); ++i)
        if (predictions[i].region_count() != test[i].shape.region_count())
            throw DataError("prediction does not cover shape '" + test[i].shape.id + "'");

    LabelCounters pooled(g.label_count());
    double per_shape_sum = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (opts.per_shape) {
            LabelCounters local(g.label_count());
            accumulate_shape(g, test[i], predictions[i], local);
            per_shape_sum += mean_over_labels(g, local, opts);
            accumulate_shape(g, test[i], predictions[i], pooled);
        } else {
            accumulate_shape(g, test[i], predictions[i], pooled);
        }
    }

    IouReport report;
    for (LabelId l = 0; l < g.label_count(); ++l) {
        if (opts.terminals_only && !g.is_terminal(l)) continue;
        IouRow row;
        row.label = l;
        row.intersection = pooled.intersection[static_cast<std::size_t>(l)];
        row.union_count = pooled.union_count[static_cast<std::size_t>(l)];
        row.iou = row.union_count > 0 ? row.intersection / row.union_count : 0.0;
        report.rows.push_back(row);
    }
    report.mean_miou = opts.per_shape
                           ? 100.0 * per_shape_sum / static_cast<double>(test.size())
                           : 100.0 * mean_over_labels(g, pooled, opts);
    return report;
}

SplitResult build_splits(const Grammar& g, const Dataset& dataset, int max_per_set,
                         int min_per_set, std::uint64_t seed) {
    (void)seed; // ordering is fully determined; ties resolve by shape id
    const int n = dataset.size();
    if (n < 3 * min_per_set)
        throw DataError("dataset too small to split: " + std::to_string(n) + " shapes, need " +
                        std::to_string(3 * min_per_set));
    const int target = std::clamp(n / 3, min_per_set, max_per_set);

    // Shape -> terminals present; global frequency per terminal.
    const int n_labels = g.label_count();
    std::vector<std::vector<LabelId>> present(static_cast<std::size_t>(n));
    std::vector<int> freq(static_cast<std::size_t>(n_labels), 0);
    for (int i = 0; i < n; ++i) {
        std::vector<char> seen(static_cast<std::size_t>(n_labels), 0);
        const auto& gt = dataset.at(i).ground_truth;
        for (int r = 0; r < gt.region_count(); ++r) seen[static_cast<std::size_t>(gt.label(r))] = 1;
        for (LabelId l = 0; l < n_labels; ++l)
            if (seen[static_cast<std::size_t>(l)]) {
                present[static_cast<std::size_t>(i)].push_back(l);
                ++freq[static_cast<std::size_t>(l)];
            }
    }
    auto rarest = [&](int i) {
        LabelId best = present[static_cast<std::size_t>(i)].front();
        for (LabelId l : present[static_cast<std::size_t>(i)])
            if (freq[static_cast<std::size_t>(l)] < freq[static_cast<std::size_t>(best)]) best = l;
        return best;
    };

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        int fa = freq[static_cast<std::size_t>(rarest(a))];
        int fb = freq[static_cast<std::size_t>(rarest(b))];
        if (fa != fb) return fa < fb;
        return dataset.at(a).shape.id < dataset.at(b).shape.id;
    });

    // Per-set, per-label quota proportional to the global frequency.
    std::vector<std::vector<double>> count(3, std::vector<double>(static_cast<std::size_t>(n_labels), 0.0));
    std::vector<std::vector<int>> sets(3);
    for (int idx : order) {
        LabelId key = rarest(idx);
        const double quota =
            static_cast<double>(freq[static_cast<std::size_t>(key)]) * target / n;
        int best_set = -1;
        double best_deficit = -1e300;
        for (int s = 0; s < 3; ++s) {
            if (static_cast<int>(sets[static_cast<std::size_t>(s)].size()) >= target) continue;
            double deficit = quota - count[static_cast<std::size_t>(s)][static_cast<std::size_t>(key)];
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best_set = s;
            }
        }
        if (best_set < 0) continue; // all sets full
        sets[static_cast<std::size_t>(best_set)].push_back(idx);
        for (LabelId l : present[static_cast<std::size_t>(idx)])
            count[static_cast<std::size_t>(best_set)][static_cast<std::size_t>(l)] += 1.0;
    }

    SplitResult result;
    result.train = std::move(sets[0]);
    result.val = std::move(sets[1]);
    result.test = std::move(sets[2]);
    std::sort(result.train.begin(), result.train.end());
    std::sort(result.val.begin(), result.val.end());
    std::sort(result.test.begin(), result.test.end());
    return result;
}

std::vector<AblationRow> ablation_sweep(const LikelihoodConfig& base_cfg, const ScorerBank& bank,
                                        const Grammar& g, std::span<const LabeledShape> test,
                                        std::span<const GuideDistribution> guides, int jobs) {
    if (test.size() != guides.size())
        throw DataError("ablation sweep needs one guide distribution per test shape");

    struct Config {
        std::string name;
        LikelihoodConfig cfg;
        bool uniform_guide = false;
    };
    std::vector<Config> configs;
    configs.reserve(6);
    auto push = [&](std::string name, bool geom, bool layout, bool region, bool uniform,
                    std::int64_t k_override = 0) {
        LikelihoodConfig cfg = base_cfg;
        cfg.use_geom = geom;
        cfg.use_layout = layout;
        cfg.use_region = region;
        if (k_override > 0) cfg.k = k_override;
        configs.push_back({std::move(name), cfg, uniform});
    };
    push("full", true, true, true, false);
    push("no-geom", false, true, true, false);
    push("no-layout", true, false, true, false);
    push("no-region", true, true, false, false);
    // With every term disabled the rank-1 guide proposal wins outright.
    push("no-L", false, false, false, false, 1);
    push("no-guide", true, true, true, true);

    std::vector<AblationRow> rows;
    for (const auto& config : configs) {
        std::vector<LabelAssignment> preds(test.size());
        parallel_for(static_cast<int>(test.size()), jobs, [&](int i) {
            const GuideDistribution& guide =
                config.uniform_guide
                    ? GuideDistribution::uniform(g, test[static_cast<std::size_t>(i)].shape.region_count())
                    : guides[static_cast<std::size_t>(i)];
            auto best = infer(config.cfg, bank, g, guide, test[static_cast<std::size_t>(i)].shape);
            preds[static_cast<std::size_t>(i)] = std::move(best.assignment);
        });
        auto report = miou(g, test, preds);
        rows.push_back({config.name, report.mean_miou});
    }
    return rows;
}

} // namespace ngsp
