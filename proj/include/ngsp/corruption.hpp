#ifndef NGSP_CORRUPTION_HPP
#define NGSP_CORRUPTION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "ngsp/shape.hpp"

namespace ngsp {

// Splits one region in two by farthest-face clustering: sample a face f0,
// take f1 = farthest face from f0, f2 = farthest face from f1, then assign
// every face to the nearer of f1/f2 (ties to f1). Points follow their nearest
// face centroid. Requires at least two faces and two points.
std::pair<Region, Region> split_region(const Region& r, std::uint64_t seed);

struct CorruptedShape {
    Shape shape;
    LabelAssignment labels;
    std::vector<int> parent_of; // new region id -> original region id
};

// Level 1 is the identity; level 2 applies one split pass; level 4 applies
// the pass twice. Single-face regions pass through unsplit. Ground-truth
// labels propagate to sub-regions and ids are re-compacted.
CorruptedShape corrupt_shape(const Shape& s, const LabelAssignment& gt, int level,
                             std::uint64_t seed);

} // namespace ngsp

#endif
