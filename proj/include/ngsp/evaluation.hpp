#ifndef NGSP_EVALUATION_HPP
#define NGSP_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ngsp/dataset.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/likelihood.hpp"

namespace ngsp {

struct MiouOptions {
    bool terminals_only = false;
    bool zero_union_counts_as_zero = false; // default: skip zero-union labels
    bool per_shape = false;                 // mean of per-shape mIoU instead of pooled
};

struct IouRow {
    LabelId label;
    double intersection = 0; // point counts
    double union_count = 0;
    double iou = 0;
};

struct IouReport {
    std::vector<IouRow> rows; // pooled counters, one per label in the universe
    double mean_miou = 0;     // mean over labels x 100
};

// Per-point IoU with region labels lifted to all ancestors. Points inherit
// their region's terminal label; labels with zero union are excluded from the
// mean unless configured otherwise.
IouReport miou(const Grammar& g, std::span<const LabeledShape> test,
               std::span<const LabelAssignment> predictions, const MiouOptions& opts = {});

struct SplitResult {
    std::vector<int> train, val, test; // dataset indices, ascending
};

// Greedy label-balanced splitting: shapes are processed rarest-terminal
// first and assigned to the eligible set furthest below its per-label quota.
// Sizes are bounded by [min_per_set, max_per_set]; surplus shapes go unused.
SplitResult build_splits(const Grammar& g, const Dataset& dataset, int max_per_set = 400,
                         int min_per_set = 50, std::uint64_t seed = 0);

struct AblationRow {
    std::string name;
    double mean_miou = 0;
};

// Runs infer over the test set once per configuration: full, no-geom,
// no-layout, no-region, no-L (guide argmax) and no-guide (uniform-prior
// proposals scored by the full likelihood).
std::vector<AblationRow> ablation_sweep(const LikelihoodConfig& base_cfg, const ScorerBank& bank,
                                        const Grammar& g,
                                        std::span<const LabeledShape> test,
                                        std::span<const GuideDistribution> guides, int jobs = 1);

} // namespace ngsp

#endif
