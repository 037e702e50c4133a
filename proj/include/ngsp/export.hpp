#ifndef NGSP_EXPORT_HPP
#define NGSP_EXPORT_HPP

#include <array>
#include <cstdint>
#include <filesystem>

#include "ngsp/grammar.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

// Deterministic color for a terminal label: identical labels get identical
// colors across shapes.
std::array<std::uint8_t, 3> label_color(const std::string& label_name,
                                        std::uint64_t palette_seed);

// ASCII PLY point cloud with one colored vertex per region point.
void export_colored_ply(const Shape& s, const LabelAssignment& a, const Grammar& g,
                        const std::filesystem::path& path, std::uint64_t palette_seed = 0);

} // namespace ngsp

#endif
