#include "ngsp/export.hpp"

#include <fstream>

#include "ngsp/errors.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

std::array<std::uint8_t, 3> label_color(const std::string& label_name,
                                        std::uint64_t palette_seed) {
    Rng rng(mix_seed(palette_seed, hash_str(label_name)));
    // Keep channels away from pure black so points stay visible.
    auto channel = [&] { return static_cast<std::uint8_t>(40 + rng.next_below(216)); };
    return {channel(), channel(), channel()};
}

void export_colored_ply(const Shape& s, const LabelAssignment& a, const Grammar& g,
                        const std::filesystem::path& path, std::uint64_t palette_seed) {
    if (a.region_count() != s.region_count())
        throw DataError("assignment does not cover shape '" + s.id + "'");

    std::size_t vertex_count = 0;
    for (const auto& r : s.regions) vertex_count += r.points.size();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write ply file: " + path.string());
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << vertex_count << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    for (const auto& r : s.regions) {
        const auto color = label_color(g.label_name(a.label(r.id)), palette_seed);
        for (const auto& p : r.points) {
            out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
                << ' ' << static_cast<int>(color[0]) << ' ' << static_cast<int>(color[1]) << ' '
                << static_cast<int>(color[2]) << "\n";
        }
    }
}

} // namespace ngsp
