#ifndef NGSP_TRAIN_HPP
#define NGSP_TRAIN_HPP

#include <cstdint>

#include "ngsp/dataset.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/likelihood.hpp"
#include "ngsp/training_data.hpp"

namespace ngsp {

struct TrainOptions {
    TrainHyper hyper;             // lr 5e-2, 2000 epochs, L2 1e-4, full batch
    // Layout heads train shorter: a linear scorer over child-area histograms
    // turns monotone in composition when pushed hard, which rewards vacating
    // whole labels during re-ranking.
    TrainHyper layout_hyper{5e-2, 400, 1e-4};
    int negatives_per_positive = 16;
    int area_samples_per_positive = 8;
    std::uint64_t seed = 0;
};

// Trains the full builtin bank: per-label geometry and layout logistic
// scorers, the region label and area heads, and the per-region guide head.
// Deterministic given the seed; labels never seen keep a constant-0.5 scorer.
ScorerBank train_builtin_scorers(const Grammar& g, const Dataset& train_set,
                                 const TrainOptions& opts = {});

} // namespace ngsp

#endif
