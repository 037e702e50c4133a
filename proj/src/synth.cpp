#include "ngsp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ngsp/errors.hpp"
#include "ngsp/rng.hpp"

namespace ngsp {

namespace {

constexpr const char* kToychairGrammar =
    "root: chair\n"
    "chair -> back ; base ; seat\n"
    "back -> back_frame ; back_surface\n"
    "base -> leg ; stretcher\n";

constexpr const char* kGeneratorTable = R"(toychair generator, table version toychair-v1
axes: x = width, y = depth (back at negative y), z = up; one unit ~ chair width

per-shape draws
  width W            uniform [0.80, 1.20]
  depth D            uniform [0.80, 1.20]
  leg height         uniform [0.22, 0.78]
  leg thickness      uniform [0.05, 0.09]
  seat thickness     uniform [0.05, 0.09]
  seat overhang      uniform [0.95, 1.10] x (W, D)
  seat jitter        uniform [-0.05, 0.05] x W, [-0.08, 0.08] x D
  post thickness     uniform [0.07, 0.11]
  post height        uniform [0.50, 0.80]
  stretcher count    1 or 2 (bernoulli 0.50), cross-section uniform [0.06, 0.10]

parts (label: cuboid placement)
  leg (x4)           corners of (W - t, D - t) grid with +-0.02 jitter, z in [0, leg_h]
  seat               slab centered at origin, z in [leg_h, leg_h + seat_t]
  back_frame (x2)    posts at the back corners, z in [seat_top, seat_top + post_h]
  back_surface
    upright (0.65)   vertical panel at the back, thickness_y uniform [0.02, 0.04],
                     height uniform [0.50, 0.80] x post_h, raised 0.15 x post_h
    recliner (0.35)  near-horizontal slab mimicking the seat: extents
                     uniform [0.90, 1.15] x (W, D), thickness_z uniform [0.05, 0.09],
                     z gap above the seat uniform [0.05, 0.25],
                     centroid y offset uniform [-0.12, 0.08] x D
  stretcher (x1-2)   bar between the legs along x, z at uniform [0.15, 0.35] x leg_h

regions and sampling
  face grid          each cuboid face split 2x2 (24 cells per part)
  regions per part   slabs 1/2/3 with probabilities 0.45/0.35/0.20, bars
                     1 or 2 (bernoulli 0.35); axis-aligned cuts at
                     uniform [0.30, 0.70] of an extent-weighted axis
  merge guard        regions under 0.15% of shape area merge into their
                     largest sibling
  points per region  uniform integer [64, 256], cells weighted by area

the stacked back slab deliberately shares the seat's region-local feature
distribution; only group-level context separates the two, which is what the
likelihood re-ranking is for.
)";

// A rectangular cell on a cuboid face: axis is the fixed coordinate.
struct Cell {
    int axis;            // 0=x, 1=y, 2=z
    double fixed;        // coordinate along axis
    double u0, u1, v0, v1; // bounds along the two remaining axes
    double area() const { return (u1 - u0) * (v1 - v0); }
    Vec3 center() const {
        double u = 0.5 * (u0 + u1), v = 0.5 * (v0 + v1);
        switch (axis) {
            case 0: return {fixed, u, v};
            case 1: return {u, fixed, v};
            default: return {u, v, fixed};
        }
    }
    Vec3 sample(Rng& rng) const {
        double u = rng.uniform(u0, u1), v = rng.uniform(v0, v1);
        switch (axis) {
            case 0: return {fixed, u, v};
            case 1: return {u, fixed, v};
            default: return {u, v, fixed};
        }
    }
};

struct Box {
    Vec3 lo, hi;
    double extent(int axis) const {
        switch (axis) {
            case 0: return hi.x - lo.x;
            case 1: return hi.y - lo.y;
            default: return hi.z - lo.z;
        }
    }
};

struct Part {
    std::string label;
    Box box;
};

// 2x2 grid over each of the six faces.
std::vector<Cell> face_grid(const Box& b) {
    std::vector<Cell> cells;
    auto add_face = [&](int axis, double fixed, double u0, double u1, double v0, double v1) {
        const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
        cells.push_back({axis, fixed, u0, um, v0, vm});
        cells.push_back({axis, fixed, um, u1, v0, vm});
        cells.push_back({axis, fixed, u0, um, vm, v1});
        cells.push_back({axis, fixed, um, u1, vm, v1});
    };
    add_face(0, b.lo.x, b.lo.y, b.hi.y, b.lo.z, b.hi.z);
    add_face(0, b.hi.x, b.lo.y, b.hi.y, b.lo.z, b.hi.z);
    add_face(1, b.lo.y, b.lo.x, b.hi.x, b.lo.z, b.hi.z);
    add_face(1, b.hi.y, b.lo.x, b.hi.x, b.lo.z, b.hi.z);
    add_face(2, b.lo.z, b.lo.x, b.hi.x, b.lo.y, b.hi.y);
    add_face(2, b.hi.z, b.lo.x, b.hi.x, b.lo.y, b.hi.y);
    return cells;
}

double axis_coord(const Vec3& p, int axis) {
    switch (axis) {
        case 0: return p.x;
        case 1: return p.y;
        default: return p.z;
    }
}

std::vector<Part> build_parts(Rng& rng) {
    std::vector<Part> parts;
    const double W = rng.uniform(0.80, 1.20);
    const double D = rng.uniform(0.80, 1.20);
    const double leg_h = rng.uniform(0.22, 0.78);
    const double leg_t = rng.uniform(0.05, 0.09);
    const double seat_t = rng.uniform(0.05, 0.09);
    const double seat_sx = rng.uniform(0.95, 1.10);
    const double seat_sy = rng.uniform(0.95, 1.10);
    const double post_t = rng.uniform(0.07, 0.11);
    const double post_h = rng.uniform(0.50, 0.80);
    const int n_stretchers = rng.bernoulli(0.50) ? 2 : 1;

    // Legs at the four corners.
    for (int cx = 0; cx < 2; ++cx) {
        for (int cy = 0; cy < 2; ++cy) {
            double jx = rng.uniform(-0.02, 0.02);
            double jy = rng.uniform(-0.02, 0.02);
            double x0 = (cx == 0 ? -W / 2 : W / 2 - leg_t) + jx;
            double y0 = (cy == 0 ? -D / 2 : D / 2 - leg_t) + jy;
            parts.push_back({"leg", {{x0, y0, 0.0}, {x0 + leg_t, y0 + leg_t, leg_h}}});
        }
    }

    const double seat_top = leg_h + seat_t;
    const double seat_jx = rng.uniform(-0.05, 0.05) * W;
    const double seat_jy = rng.uniform(-0.08, 0.08) * D;
    parts.push_back({"seat",
                     {{seat_jx - W / 2 * seat_sx, seat_jy - D / 2 * seat_sy, leg_h},
                      {seat_jx + W / 2 * seat_sx, seat_jy + D / 2 * seat_sy, seat_top}}});

    // Back posts.
    for (int cx = 0; cx < 2; ++cx) {
        double x0 = cx == 0 ? -W / 2 : W / 2 - post_t;
        parts.push_back({"back_frame",
                         {{x0, -D / 2, seat_top}, {x0 + post_t, -D / 2 + post_t, seat_top + post_h}}});
    }

    {
        // The reclined back is a second slab drawn from the seat's own
        // distribution, stacked a small gap above it; region-local features
        // cannot tell the two apart, group context can.
        const double sx = rng.uniform(0.95, 1.10);
        const double sy = rng.uniform(0.95, 1.10);
        const double th = rng.uniform(0.05, 0.09);
        const double gap = rng.uniform(0.06, 0.18);
        const double jx = rng.uniform(-0.05, 0.05) * W;
        const double jy = rng.uniform(-0.08, 0.08) * D;
        const double z0 = seat_top + gap;
        parts.push_back({"back_surface",
                         {{jx - W / 2 * sx, jy - D / 2 * sy, z0},
                          {jx + W / 2 * sx, jy + D / 2 * sy, z0 + th}}});
    }

    for (int i = 0; i < n_stretchers; ++i) {
        const double cr = rng.uniform(0.07, 0.11);
        const double z0 = rng.uniform(0.15, 0.35) * leg_h;
        const double y0 = rng.uniform(-0.25, 0.25) * D - cr / 2;
        parts.push_back({"stretcher",
                         {{-W / 2 + leg_t, y0, z0}, {W / 2 - leg_t, y0 + cr, z0 + cr}}});
    }
    return parts;
}

struct RegionDraft {
    std::string label;
    std::vector<Cell> cells;
    double area = 0;
    int part_index = -1;
};

LabeledShape generate_shape(const Grammar& g, const std::string& id, std::uint64_t shape_seed) {
    Rng part_rng(mix_seed(shape_seed, 1));
    Rng cut_rng(mix_seed(shape_seed, 2));
    Rng point_rng(mix_seed(shape_seed, 3));

    const auto parts = build_parts(part_rng);

    // Regions per part: slab parts split 1-3, bar parts 1-2. The part list
    // is bounded so the shape always lands in [5, 24] regions.
    std::vector<int> splits(parts.size(), 1);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool slab = parts[i].label == "seat" || parts[i].label == "back_surface";
        if (slab) {
            const double weights[3] = {0.45, 0.35, 0.20};
            splits[i] = 1 + static_cast<int>(cut_rng.weighted_pick(weights));
        } else {
            splits[i] = cut_rng.bernoulli(0.35) ? 2 : 1;
        }
    }

    std::vector<RegionDraft> drafts;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const Part& part = parts[pi];
        auto cells = face_grid(part.box);

        // Cut planes along extent-weighted axes.
        std::vector<std::pair<int, double>> planes;
        for (int c = 1; c < splits[pi]; ++c) {
            double w[3] = {part.box.extent(0), part.box.extent(1), part.box.extent(2)};
            int axis = static_cast<int>(cut_rng.weighted_pick(w));
            double frac = cut_rng.uniform(0.30, 0.70);
            double coord = axis_coord(part.box.lo, axis) + frac * part.box.extent(axis);
            planes.emplace_back(axis, coord);
        }

        // Bucket cells by which side of each plane their centroid falls on.
        std::vector<RegionDraft> buckets(1u << planes.size());
        for (const Cell& cell : cells) {
            std::size_t key = 0;
            for (std::size_t p = 0; p < planes.size(); ++p)
                if (axis_coord(cell.center(), planes[p].first) >= planes[p].second)
                    key |= (1u << p);
            buckets[key].cells.push_back(cell);
        }
        for (auto& b : buckets) {
            if (b.cells.empty()) continue;
            b.label = part.label;
            b.part_index = static_cast<int>(pi);
            for (const Cell& c : b.cells) b.area += c.area();
            drafts.push_back(std::move(b));
        }
    }

    // Merge regions below 0.15% of the shape area into their largest sibling.
    double shape_area = 0;
    for (const auto& d : drafts) shape_area += d.area;
    for (bool merged = true; merged;) {
        merged = false;
        for (std::size_t i = 0; i < drafts.size(); ++i) {
            if (drafts[i].area >= 0.0015 * shape_area) continue;
            std::size_t best = i;
            for (std::size_t j = 0; j < drafts.size(); ++j) {
                if (j == i || drafts[j].part_index != drafts[i].part_index) continue;
                if (best == i || drafts[j].area > drafts[best].area) best = j;
            }
            if (best == i) continue; // single-region part; keep as-is
            auto& sink = drafts[best];
            sink.cells.insert(sink.cells.end(), drafts[i].cells.begin(), drafts[i].cells.end());
            sink.area += drafts[i].area;
            drafts.erase(drafts.begin() + static_cast<std::ptrdiff_t>(i));
            merged = true;
            break;
        }
    }

    LabeledShape out;
    out.shape.id = id;
    std::vector<LabelId> labels;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        RegionDraft& d = drafts[i];
        Region r;
        r.id = static_cast<int>(i);
        r.area = d.area;
        for (const Cell& c : d.cells) r.faces.push_back({c.center(), c.area()});

        const int n_points = 64 + static_cast<int>(point_rng.next_below(193));
        std::vector<double> cell_areas;
        cell_areas.reserve(d.cells.size());
        for (const Cell& c : d.cells) cell_areas.push_back(c.area());
        for (int p = 0; p < n_points; ++p) {
            std::size_t ci = point_rng.weighted_pick(cell_areas);
            r.points.push_back(d.cells[ci].sample(point_rng));
        }
        out.shape.regions.push_back(std::move(r));
        labels.push_back(g.require_label(d.label));
    }
    // Normalize areas the same way the loader does.
    double total_area = 0;
    for (const auto& r : out.shape.regions) total_area += r.area;
    for (auto& r : out.shape.regions) r.area /= total_area;

    out.ground_truth = LabelAssignment(std::move(labels));
    return out;
}

} // namespace

std::string builtin_grammar_text(const std::string& name) {
    if (name == "toychair") return kToychairGrammar;
    throw DataError("unknown bundled grammar: '" + name + "' (available: toychair)");
}

std::string describe_generator() { return kGeneratorTable; }

SynthResult generate_dataset(const SynthSpec& spec) {
    if (spec.count < 1) throw DataError("synth count must be >= 1");
    SynthResult result{Grammar::parse(builtin_grammar_text(spec.grammar_name)), {}};
    result.shapes.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        char id[64];
        std::snprintf(id, sizeof(id), "%s_%06d", spec.grammar_name.c_str(), i);
        result.shapes.push_back(
            generate_shape(result.grammar, id, mix_seed(spec.seed, static_cast<std::uint64_t>(i))));
    }
    return result;
}

} // namespace ngsp
