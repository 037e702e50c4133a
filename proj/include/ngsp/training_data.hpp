#ifndef NGSP_TRAINING_DATA_HPP
#define NGSP_TRAINING_DATA_HPP

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ngsp/dataset.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

enum class NegStrategy : int {
    Perturb = 0,
    AddRegions = 1,
    RemoveRegions = 2,
    OtherParts = 3,
    OtherShape = 4,
    ChildLabels = 5,
};

std::string_view neg_strategy_name(NegStrategy s);
NegStrategy parse_neg_strategy(std::string_view name);

enum class ScorerKind { Geometry, Layout };

struct NegativeSpec {
    std::array<double, 6> mixture{};
    double similarity_threshold = 0.95;
    double proximity_base = 2.0; // replacement weight = base^-tree_distance
    int max_attempts = 50;

    static NegativeSpec geometry(); // (.50, .15, .15, .15, .05, .00)
    static NegativeSpec layout();   // (.50, .075, .075, .075, .025, .25)
};

struct PositiveExample {
    int shape_index = -1;
    std::vector<int> regions;         // sorted ascending
    std::vector<LabelId> child_tags;  // parallel; empty when l is terminal
};

// One positive per training shape whose ground truth occupies l.
std::vector<PositiveExample> extract_positives(const Grammar& g, const Dataset& dataset,
                                               LabelId l);

// Perturbed copy of gt with exactly num_changes regions reassigned;
// replacement terminals drawn with hierarchy-proximity bias.
LabelAssignment perturb_assignment(const Grammar& g, const LabelAssignment& gt, int num_changes,
                                   Rng& rng, double proximity_base = 2.0);

// The full 9999-assignment perturbation schedule:
// 100x1, 200x2, 300x3, 400x4, 500x5 changes; 500x10%, 1000x20%, 1500x30%,
// 2000x40%, 2500x50% of regions; 999 with all labels changed.
std::vector<LabelAssignment> perturbation_schedule(const Grammar& g, const LabelAssignment& gt,
                                                   std::uint64_t seed,
                                                   double proximity_base = 2.0);

// Bucket sizes of the schedule in order; sums to 9999.
std::vector<int> perturbation_bucket_counts();

// Change count for a schedule bucket at the given region count; percentages
// round half-up and floor at one change.
int schedule_bucket_changes(int bucket, int n_regions);

struct NegativeExample {
    NegStrategy strategy = NegStrategy::Perturb;
    int shape_index = -1;            // other_shape negatives reference that shape
    std::vector<int> regions;        // sorted ascending
    std::vector<LabelId> child_tags; // layout kind only
    double unchanged_area = 0.0;     // vs. the positive, membership- and tag-sensitive
};

// Draws one strategy from the mixture (structurally inapplicable strategies
// are excluded before the draw), then retries that strategy until a candidate
// passes the similarity filter or the attempt budget is exhausted.
NegativeExample sample_negative(const NegativeSpec& spec, ScorerKind kind, const Grammar& g,
                                const Dataset& dataset, int shape_index, LabelId l,
                                std::uint64_t seed);

} // namespace ngsp

#endif
