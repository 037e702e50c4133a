#include "ngsp/train.hpp"

#include <algorithm>
#include <map>

#include "ngsp/errors.hpp"
#include "ngsp/features.hpp"
#include "ngsp/rng.hpp"

namespace ngsp {

namespace {

std::uint64_t example_seed(std::uint64_t base, const std::string& shape_id,
                           const std::string& label_name, int draw) {
    return mix_seed(mix_seed(mix_seed(base, hash_str(shape_id)), hash_str(label_name)),
                    static_cast<std::uint64_t>(draw));
}

} // namespace

ScorerBank train_builtin_scorers(const Grammar& g, const Dataset& train_set,
                                 const TrainOptions& opts) {
    if (train_set.size() == 0) throw DataError("empty training set");

    ScorerBank bank;
    bank.backend = ScorerBackend::Builtin;

    std::vector<ShapeStats> stats;
    stats.reserve(static_cast<std::size_t>(train_set.size()));
    for (int i = 0; i < train_set.size(); ++i)
        stats.push_back(compute_shape_stats(train_set.at(i).shape));

    const NegativeSpec geom_spec = NegativeSpec::geometry();
    const NegativeSpec layout_spec = NegativeSpec::layout();

    // Geometry scorers: binary classifiers per non-root label.
    for (LabelId l = 0; l < g.label_count(); ++l) {
        if (l == g.root()) continue;
        auto positives = extract_positives(g, train_set, l);
        if (positives.empty()) continue;

        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (const auto& pos : positives) {
            x.push_back(group_features(stats[static_cast<std::size_t>(pos.shape_index)].regions,
                                       pos.regions));
            y.push_back(1);
            const std::string& sid = train_set.at(pos.shape_index).shape.id;
            for (int k = 0; k < opts.negatives_per_positive; ++k) {
                try {
                    auto neg = sample_negative(geom_spec, ScorerKind::Geometry, g, train_set,
                                               pos.shape_index, l,
                                               example_seed(opts.seed, sid, g.label_name(l), k));
                    x.push_back(group_features(
                        stats[static_cast<std::size_t>(neg.shape_index)].regions, neg.regions));
                    y.push_back(0);
                } catch (const DataError&) {
                    // Degenerate (shape, label) pairs may exhaust the budget.
                }
            }
        }
        if (std::count(y.begin(), y.end(), 0) == 0) continue;
        LogisticModel model;
        model.train(x, y, opts.hyper);
        bank.geometry.emplace(l, std::move(model));
    }

    // Layout scorers: per non-terminal label, tagged with child labels.
    for (LabelId l : g.nonterminals()) {
        auto positives = extract_positives(g, train_set, l);
        if (positives.empty()) continue;

        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (const auto& pos : positives) {
            x.push_back(layout_features(g, l,
                                        stats[static_cast<std::size_t>(pos.shape_index)].regions,
                                        pos.regions, pos.child_tags));
            y.push_back(1);
            const std::string& sid = train_set.at(pos.shape_index).shape.id;
            for (int k = 0; k < opts.negatives_per_positive; ++k) {
                try {
                    auto neg = sample_negative(layout_spec, ScorerKind::Layout, g, train_set,
                                               pos.shape_index, l,
                                               example_seed(opts.seed ^ 0x4c41594fULL, sid,
                                                            g.label_name(l), k));
                    x.push_back(layout_features(
                        g, l, stats[static_cast<std::size_t>(neg.shape_index)].regions,
                        neg.regions, neg.child_tags));
                    y.push_back(0);
                } catch (const DataError&) {
                }
            }
        }
        if (std::count(y.begin(), y.end(), 0) == 0) continue;
        LogisticModel model;
        model.train(x, y, opts.layout_hyper);
        bank.layout.emplace(l, std::move(model));
    }

    // Region label head: a multinomial over ground-truth groups plus sampled
    // corrupted groups labelled by their area-majority terminal, so that
    // off-distribution (polluted, merged) groups are calibrated too.
    {
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (int si = 0; si < train_set.size(); ++si) {
            const LabeledShape& item = train_set.at(si);
            const auto groups = compute_assignment_groups(g, item.ground_truth);
            for (std::size_t gi = 0; gi < groups.occupied.size(); ++gi) {
                LabelId l = groups.occupied[gi];
                if (!g.is_terminal(l)) continue;
                x.push_back(group_features(stats[static_cast<std::size_t>(si)].regions,
                                           groups.groups[gi]));
                y.push_back(g.terminal_index(l));

                for (int k = 0; k < 2; ++k) {
                    NegativeExample neg;
                    try {
                        neg = sample_negative(geom_spec, ScorerKind::Geometry, g, train_set, si,
                                              l,
                                              example_seed(opts.seed ^ 0x4d414a4fULL,
                                                           item.shape.id, g.label_name(l), k));
                    } catch (const DataError&) {
                        continue;
                    }
                    const LabeledShape& source = train_set.at(neg.shape_index);
                    std::map<LabelId, double> area_by_label;
                    for (int r : neg.regions)
                        area_by_label[source.ground_truth.label(r)] +=
                            source.shape.regions[static_cast<std::size_t>(r)].area;
                    LabelId majority = kNoLabel;
                    double best_area = 0;
                    for (const auto& [lab, area] : area_by_label)
                        if (area > best_area) {
                            best_area = area;
                            majority = lab;
                        }
                    if (majority == kNoLabel) continue;
                    x.push_back(group_features(
                        stats[static_cast<std::size_t>(neg.shape_index)].regions, neg.regions));
                    y.push_back(g.terminal_index(majority));
                }
            }
        }
        if (!x.empty())
            bank.region_label.train(x, y, static_cast<int>(g.terminals().size()), opts.hyper);
    }

    // Region area heads: ground-truth groups score 1; perturbed groups carry
    // their true-label area fraction.
    for (LabelId l : g.terminals()) {
        std::vector<std::vector<double>> x;
        std::vector<double> targets;
        for (int si = 0; si < train_set.size(); ++si) {
            const LabeledShape& item = train_set.at(si);
            std::vector<int> gt_group;
            for (int r = 0; r < item.shape.region_count(); ++r)
                if (item.ground_truth.label(r) == l) gt_group.push_back(r);
            if (gt_group.empty()) continue;
            x.push_back(group_features(stats[static_cast<std::size_t>(si)].regions, gt_group));
            targets.push_back(1.0);

            Rng rng(example_seed(opts.seed ^ 0x41524541ULL, item.shape.id, g.label_name(l), 0));
            const auto bucket_counts = perturbation_bucket_counts();
            std::vector<double> bucket_weights(bucket_counts.begin(), bucket_counts.end());
            for (int k = 0; k < opts.area_samples_per_positive; ++k) {
                int bucket = static_cast<int>(rng.weighted_pick(bucket_weights));
                int changes = schedule_bucket_changes(bucket, item.shape.region_count());
                LabelAssignment perturbed = perturb_assignment(g, item.ground_truth, changes, rng);
                std::vector<int> group;
                double total = 0, correct = 0;
                for (int r = 0; r < item.shape.region_count(); ++r) {
                    if (perturbed.label(r) != l) continue;
                    group.push_back(r);
                    double a = item.shape.regions[static_cast<std::size_t>(r)].area;
                    total += a;
                    if (item.ground_truth.label(r) == l) correct += a;
                }
                if (group.empty() || total <= 0) continue;
                x.push_back(group_features(stats[static_cast<std::size_t>(si)].regions, group));
                targets.push_back(correct / total);
            }

            // Structured corruptions (added/removed/replaced regions) with
            // exact area targets; random perturbations alone rarely produce
            // them.
            for (int k = 0; k < opts.area_samples_per_positive; ++k) {
                NegativeExample neg;
                try {
                    neg = sample_negative(geom_spec, ScorerKind::Geometry, g, train_set, si, l,
                                          example_seed(opts.seed ^ 0x41525354ULL, item.shape.id,
                                                       g.label_name(l), k));
                } catch (const DataError&) {
                    continue;
                }
                const LabeledShape& source = train_set.at(neg.shape_index);
                double total = 0, correct = 0;
                for (int r : neg.regions) {
                    double a = source.shape.regions[static_cast<std::size_t>(r)].area;
                    total += a;
                    if (source.ground_truth.label(r) == l) correct += a;
                }
                if (neg.regions.empty() || total <= 0) continue;
                x.push_back(group_features(
                    stats[static_cast<std::size_t>(neg.shape_index)].regions, neg.regions));
                targets.push_back(correct / total);
            }
        }
        if (x.empty()) continue;
        BoundedLinearModel model;
        model.train(x, targets, opts.hyper);
        bank.region_area.emplace(l, std::move(model));
    }

    // Guide head: per-region terminal classifier.
    {
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (int si = 0; si < train_set.size(); ++si) {
            const LabeledShape& item = train_set.at(si);
            for (int r = 0; r < item.shape.region_count(); ++r) {
                x.push_back(guide_features(stats[static_cast<std::size_t>(si)], r));
                y.push_back(g.terminal_index(item.ground_truth.label(r)));
            }
        }
        bank.guide.train(x, y, static_cast<int>(g.terminals().size()), opts.hyper);
    }

    return bank;
}

} // namespace ngsp
