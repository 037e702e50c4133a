#include "ngsp/corruption.hpp"

#include <algorithm>
#include <limits>

#include "ngsp/errors.hpp"
#include "ngsp/rng.hpp"

namespace ngsp {

namespace {

// Farthest face from the given centroid; ties resolve to the lowest index.
std::size_t farthest_face(const std::vector<Face>& faces, const Vec3& from) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        double d = distance(faces[i].centroid, from);
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

} // namespace

std::pair<Region, Region> split_region(const Region& r, std::uint64_t seed) {
    if (r.faces.size() < 2)
        throw DataError("cannot split region " + std::to_string(r.id) +
                        ": needs at least two faces");
    if (r.points.size() < 2)
        throw DataError("cannot split region " + std::to_string(r.id) +
                        ": needs at least two points");

    Rng rng(seed);
    const std::size_t f0 = rng.next_below(r.faces.size());
    const std::size_t f1 = farthest_face(r.faces, r.faces[f0].centroid);
    const std::size_t f2 = farthest_face(r.faces, r.faces[f1].centroid);

    // Face membership: true -> f1 cluster. Equidistant faces join f1.
    std::vector<bool> to_first(r.faces.size());
    for (std::size_t i = 0; i < r.faces.size(); ++i) {
        double d1 = distance(r.faces[i].centroid, r.faces[f1].centroid);
        double d2 = distance(r.faces[i].centroid, r.faces[f2].centroid);
        to_first[i] = d1 <= d2;
    }
    // f1 != f2 whenever the faces are not all coincident, so both clusters
    // are non-empty; if every centroid coincides, force a 1 / rest split.
    if (std::all_of(to_first.begin(), to_first.end(), [](bool b) { return b; })) {
        to_first[f2 == f1 ? (f1 == 0 ? 1 : 0) : f2] = false;
    }

    Region a, b;
    a.id = 0;
    b.id = 1;
    std::vector<int> face_owner(r.faces.size()); // 0 -> a, 1 -> b
    for (std::size_t i = 0; i < r.faces.size(); ++i) {
        if (to_first[i]) {
            face_owner[i] = 0;
            a.faces.push_back(r.faces[i]);
            a.area += r.faces[i].area;
        } else {
            face_owner[i] = 1;
            b.faces.push_back(r.faces[i]);
            b.area += r.faces[i].area;
        }
    }

    // Points follow their nearest face centroid (ties to the lowest index).
    for (const Vec3& p : r.points) {
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < r.faces.size(); ++i) {
            double d = distance(p, r.faces[i].centroid);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        (face_owner[nearest] == 0 ? a : b).points.push_back(p);
    }

    // A sub-region must keep at least one point; move the point nearest to
    // the starving side's first face centroid.
    auto rebalance = [](Region& empty, Region& donor) {
        std::size_t pick = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < donor.points.size(); ++i) {
            double d = distance(donor.points[i], empty.faces.front().centroid);
            if (d < best) {
                best = d;
                pick = i;
            }
        }
        empty.points.push_back(donor.points[pick]);
        donor.points.erase(donor.points.begin() + static_cast<std::ptrdiff_t>(pick));
    };
    if (a.points.empty()) rebalance(a, b);
    if (b.points.empty()) rebalance(b, a);

    return {std::move(a), std::move(b)};
}

namespace {

CorruptedShape split_pass(const Shape& s, const LabelAssignment& gt, std::uint64_t seed) {
    CorruptedShape out;
    out.shape.id = s.id;
    std::vector<LabelId> labels;
    for (const Region& r : s.regions) {
        const std::uint64_t region_seed = mix_seed(mix_seed(seed, hash_str(s.id)),
                                                   static_cast<std::uint64_t>(r.id));
        if (r.faces.empty())
            throw DataError("region " + std::to_string(r.id) + " of shape '" + s.id +
                            "' has no face data; corruption needs faces");
        if (r.faces.size() < 2 || r.points.size() < 2) {
            Region copy = r;
            copy.id = static_cast<int>(out.shape.regions.size());
            copy.area = 0.0;
            for (const Face& f : copy.faces) copy.area += f.area;
            out.shape.regions.push_back(std::move(copy));
            out.parent_of.push_back(r.id);
            labels.push_back(gt.label(r.id));
            continue;
        }
        // split_region emits the f1 cluster first; that order fixes new ids.
        auto [first, second] = split_region(r, region_seed);
        first.id = static_cast<int>(out.shape.regions.size());
        out.shape.regions.push_back(std::move(first));
        out.parent_of.push_back(r.id);
        labels.push_back(gt.label(r.id));
        second.id = static_cast<int>(out.shape.regions.size());
        out.shape.regions.push_back(std::move(second));
        out.parent_of.push_back(r.id);
        labels.push_back(gt.label(r.id));
    }
    // Region areas become face-area sums, renormalized at shape level.
    double total = 0.0;
    for (const Region& r : out.shape.regions) total += r.area;
    if (total > 0)
        for (Region& r : out.shape.regions) r.area /= total;
    out.labels = LabelAssignment(std::move(labels));
    return out;
}

} // namespace

CorruptedShape corrupt_shape(const Shape& s, const LabelAssignment& gt, int level,
                             std::uint64_t seed) {
    if (level != 1 && level != 2 && level != 4)
        throw DataError("corruption level must be 1, 2 or 4");
    CorruptedShape out;
    out.shape = s;
    out.labels = gt;
    out.parent_of.resize(static_cast<std::size_t>(s.region_count()));
    for (int i = 0; i < s.region_count(); ++i) out.parent_of[static_cast<std::size_t>(i)] = i;

    const int passes = level == 1 ? 0 : (level == 2 ? 1 : 2);
    for (int pass = 0; pass < passes; ++pass) {
        CorruptedShape next = split_pass(out.shape, out.labels, mix_seed(seed, pass));
        // Compose provenance back to the original region ids.
        for (int& parent : next.parent_of) parent = out.parent_of[static_cast<std::size_t>(parent)];
        out = std::move(next);
    }
    return out;
}

} // namespace ngsp
