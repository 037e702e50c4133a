#ifndef NGSP_SHAPE_HPP
#define NGSP_SHAPE_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "ngsp/grammar.hpp"

namespace ngsp {

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

struct Face {
    Vec3 centroid;
    double area = 0;
};

// An atomic over-segment of a shape: the unit to which labels are assigned.
struct Region {
    int id = 0;
    std::vector<Vec3> points;
    double area = 0;              // fraction of total shape surface area
    std::vector<Face> faces;      // optional; consumed by the corruption pass
};

struct Shape {
    std::string id;
    std::vector<Region> regions;  // ids 0..n-1 contiguous

    int region_count() const { return static_cast<int>(regions.size()); }

    static Shape parse(std::string_view text, std::string_view source_name = "<string>");
    static Shape load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
    std::string serialize() const;
};

// Map region id -> terminal label, dense over 0..n-1.
class LabelAssignment {
public:
    LabelAssignment() = default;
    explicit LabelAssignment(std::vector<LabelId> labels) : labels_(std::move(labels)) {}

    int region_count() const { return static_cast<int>(labels_.size()); }
    LabelId label(int region_id) const { return labels_[static_cast<std::size_t>(region_id)]; }
    void set(int region_id, LabelId l) { labels_[static_cast<std::size_t>(region_id)] = l; }
    const std::vector<LabelId>& labels() const { return labels_; }

    // Validates coverage and that every label is a terminal of g.
    static LabelAssignment parse(std::string_view text, const Grammar& g, int region_count,
                                 std::string_view source_name = "<string>");
    static LabelAssignment load(const std::filesystem::path& path, const Grammar& g,
                                int region_count);
    void save(const std::filesystem::path& path, const Grammar& g) const;
    std::string serialize(const Grammar& g) const;

    bool operator==(const LabelAssignment&) const = default;

private:
    std::vector<LabelId> labels_;
};

// Accept/reject decision: reject iff any region area < threshold.
bool passes_small_region_filter(const Shape& s, double threshold = 0.001);

// Region ids occupying label l under assignment a (lifted: a region assigned
// terminal t occupies every ancestor of t). Sorted ascending.
std::vector<int> region_group(const Grammar& g, const Shape& s, const LabelAssignment& a,
                              LabelId l);

// Labels with non-empty region group, i.e. the union of the root paths of all
// assigned terminals. Sorted by label id.
std::vector<LabelId> occupied_labels(const Grammar& g, const LabelAssignment& a);

// Total area of regions labelled identically by a and b.
double unchanged_area_fraction(const Shape& s, const LabelAssignment& a,
                               const LabelAssignment& b);

} // namespace ngsp

#endif
