#ifndef NGSP_FEATURES_HPP
#define NGSP_FEATURES_HPP

#include <array>
#include <span>
#include <vector>

#include "ngsp/grammar.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

// Sufficient statistics of one region's point sample. Feature vectors for any
// region group combine these in O(regions) without touching points again.
struct RegionStats {
    long long point_count = 0;
    Vec3 sum{};                       // Σ p
    double sxx = 0, sxy = 0, sxz = 0; // Σ p pᵀ (upper triangle)
    double syy = 0, syz = 0, szz = 0;
    Vec3 min{}, max{};
    Vec3 centroid{};
    double area = 0;
};

RegionStats compute_region_stats(const Region& r);

struct ShapeStats {
    std::vector<RegionStats> regions;
    Vec3 min{}, max{}; // shape bounding box over all points
};

ShapeStats compute_shape_stats(const Shape& s);

// Eigenvalues of a symmetric 3x3 matrix, descending.
std::array<double, 3> sym3_eigenvalues(double xx, double xy, double xz, double yy, double yz,
                                       double zz);

inline constexpr int kGroupFeatureDim = 12;
inline constexpr int kGuideFeatureDim = 18;

enum class FeatureKind { Geometry, Layout, Group };

// 12 entries: centroid (3), bbox extents (3), point-covariance eigenvalues
// descending (3), total area fraction (1), region count (1), mean pairwise
// region-centroid distance (1).
std::vector<double> group_features(std::span<const RegionStats> stats,
                                   std::span<const int> region_ids);

// Group features plus the per-child area composition of the group under the
// given child tags, zero-padded to the grammar's max fan-out.
std::vector<double> layout_features(const Grammar& g, LabelId label,
                                    std::span<const RegionStats> stats,
                                    std::span<const int> region_ids,
                                    std::span<const LabelId> child_tags);

// Single-region features for the builtin guide head: group features of the
// region plus its centroid and extents relative to the shape bounding box.
std::vector<double> guide_features(const ShapeStats& stats, int region_id);

// Convenience wrapper matching the spec operation; recomputes stats from the
// shape. label is only consulted for FeatureKind::Layout.
std::vector<double> extract_features(FeatureKind kind, const Grammar& g, const Shape& s,
                                     std::span<const int> region_ids,
                                     std::span<const LabelId> child_tags, LabelId label = kNoLabel);

} // namespace ngsp

#endif
