#include "ngsp/features.hpp"

#include <algorithm>
#include <cmath>

#include "ngsp/errors.hpp"

namespace ngsp {

RegionStats compute_region_stats(const Region& r) {
    if (r.points.empty()) throw DataError("region " + std::to_string(r.id) + " has no points");
    RegionStats st;
    st.point_count = static_cast<long long>(r.points.size());
    st.min = st.max = r.points.front();
    for (const Vec3& p : r.points) {
        st.sum = st.sum + p;
        st.sxx += p.x * p.x;
        st.sxy += p.x * p.y;
        st.sxz += p.x * p.z;
        st.syy += p.y * p.y;
        st.syz += p.y * p.z;
        st.szz += p.z * p.z;
        st.min.x = std::min(st.min.x, p.x);
        st.min.y = std::min(st.min.y, p.y);
        st.min.z = std::min(st.min.z, p.z);
        st.max.x = std::max(st.max.x, p.x);
        st.max.y = std::max(st.max.y, p.y);
        st.max.z = std::max(st.max.z, p.z);
    }
    st.centroid = st.sum * (1.0 / static_cast<double>(st.point_count));
    st.area = r.area;
    return st;
}

ShapeStats compute_shape_stats(const Shape& s) {
    ShapeStats st;
    st.regions.reserve(s.regions.size());
    for (const auto& r : s.regions) st.regions.push_back(compute_region_stats(r));
    st.min = st.regions.front().min;
    st.max = st.regions.front().max;
    for (const auto& r : st.regions) {
        st.min.x = std::min(st.min.x, r.min.x);
        st.min.y = std::min(st.min.y, r.min.y);
        st.min.z = std::min(st.min.z, r.min.z);
        st.max.x = std::max(st.max.x, r.max.x);
        st.max.y = std::max(st.max.y, r.max.y);
        st.max.z = std::max(st.max.z, r.max.z);
    }
    return st;
}

// Analytic eigenvalues for a symmetric 3x3 matrix (trigonometric form).
std::array<double, 3> sym3_eigenvalues(double xx, double xy, double xz, double yy, double yz,
                                       double zz) {
    const double q = (xx + yy + zz) / 3.0;
    const double axx = xx - q, ayy = yy - q, azz = zz - q;
    const double p2 = axx * axx + ayy * ayy + azz * azz + 2.0 * (xy * xy + xz * xz + yz * yz);
    if (p2 <= 0.0) return {q, q, q};
    const double p = std::sqrt(p2 / 6.0);
    // det(A - qI) / p^3
    const double bxx = axx / p, byy = ayy / p, bzz = azz / p;
    const double bxy = xy / p, bxz = xz / p, byz = yz / p;
    double detb = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                  bxz * (bxy * byz - byy * bxz);
    double r = detb / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> out{e1, e2, e3};
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

std::vector<double> group_features(std::span<const RegionStats> stats,
                                   std::span<const int> region_ids) {
    if (region_ids.empty()) throw DataError("feature extraction over an empty region set");

    long long count = 0;
    Vec3 sum{};
    double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
    Vec3 mn{}, mx{};
    double area = 0;
    bool first = true;
    for (int id : region_ids) {
        const RegionStats& r = stats[static_cast<std::size_t>(id)];
        count += r.point_count;
        sum = sum + r.sum;
        sxx += r.sxx;
        sxy += r.sxy;
        sxz += r.sxz;
        syy += r.syy;
        syz += r.syz;
        szz += r.szz;
        area += r.area;
        if (first) {
            mn = r.min;
            mx = r.max;
            first = false;
        } else {
            mn.x = std::min(mn.x, r.min.x);
            mn.y = std::min(mn.y, r.min.y);
            mn.z = std::min(mn.z, r.min.z);
            mx.x = std::max(mx.x, r.max.x);
            mx.y = std::max(mx.y, r.max.y);
            mx.z = std::max(mx.z, r.max.z);
        }
    }
    const double n = static_cast<double>(count);
    const Vec3 mean = sum * (1.0 / n);
    // Population covariance from raw moments.
    const double cxx = sxx / n - mean.x * mean.x;
    const double cxy = sxy / n - mean.x * mean.y;
    const double cxz = sxz / n - mean.x * mean.z;
    const double cyy = syy / n - mean.y * mean.y;
    const double cyz = syz / n - mean.y * mean.z;
    const double czz = szz / n - mean.z * mean.z;
    const auto eig = sym3_eigenvalues(cxx, cxy, cxz, cyy, cyz, czz);

    double pair_dist = 0.0;
    if (region_ids.size() > 1) {
        long long pairs = 0;
        for (std::size_t i = 0; i < region_ids.size(); ++i) {
            for (std::size_t j = i + 1; j < region_ids.size(); ++j) {
                pair_dist += distance(stats[static_cast<std::size_t>(region_ids[i])].centroid,
                                      stats[static_cast<std::size_t>(region_ids[j])].centroid);
                ++pairs;
            }
        }
        pair_dist /= static_cast<double>(pairs);
    }

    return {mean.x,  mean.y,  mean.z,  mx.x - mn.x, mx.y - mn.y,
            mx.z - mn.z, eig[0],  eig[1],  eig[2],  area,
            static_cast<double>(region_ids.size()), pair_dist};
}

std::vector<double> layout_features(const Grammar& g, LabelId label,
                                    std::span<const RegionStats> stats,
                                    std::span<const int> region_ids,
                                    std::span<const LabelId> child_tags) {
    if (child_tags.size() != region_ids.size())
        throw DataError("layout features need one child tag per region");
    std::vector<double> out = group_features(stats, region_ids);

    const auto& children = g.children(label);
    std::vector<double> hist(static_cast<std::size_t>(g.max_fanout()), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < region_ids.size(); ++i) {
        double a = stats[static_cast<std::size_t>(region_ids[i])].area;
        total += a;
        auto it = std::find(children.begin(), children.end(), child_tags[i]);
        if (it == children.end())
            throw DataError("child tag '" + g.label_name(child_tags[i]) +
                            "' is not a child of '" + g.label_name(label) + "'");
        hist[static_cast<std::size_t>(it - children.begin())] += a;
    }
    if (total > 0)
        for (double& h : hist) h /= total;
    out.insert(out.end(), hist.begin(), hist.end());
    return out;
}

std::vector<double> guide_features(const ShapeStats& stats, int region_id) {
    const int ids[1] = {region_id};
    std::vector<double> out = group_features(stats.regions, ids);
    const RegionStats& r = stats.regions[static_cast<std::size_t>(region_id)];
    const Vec3 shape_extent = stats.max - stats.min;
    auto safe = [](double v) { return v > 0 ? v : 1.0; };
    out.push_back((r.centroid.x - stats.min.x) / safe(shape_extent.x));
    out.push_back((r.centroid.y - stats.min.y) / safe(shape_extent.y));
    out.push_back((r.centroid.z - stats.min.z) / safe(shape_extent.z));
    out.push_back((r.max.x - r.min.x) / safe(shape_extent.x));
    out.push_back((r.max.y - r.min.y) / safe(shape_extent.y));
    out.push_back((r.max.z - r.min.z) / safe(shape_extent.z));
    return out;
}

std::vector<double> extract_features(FeatureKind kind, const Grammar& g, const Shape& s,
                                     std::span<const int> region_ids,
                                     std::span<const LabelId> child_tags, LabelId label) {
    std::vector<RegionStats> stats;
    stats.reserve(s.regions.size());
    for (const auto& r : s.regions) stats.push_back(compute_region_stats(r));
    switch (kind) {
        case FeatureKind::Layout:
            return layout_features(g, label, stats, region_ids, child_tags);
        case FeatureKind::Geometry:
        case FeatureKind::Group:
        default:
            return group_features(stats, region_ids);
    }
}

} // namespace ngsp
