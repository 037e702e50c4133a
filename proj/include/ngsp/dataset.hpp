#ifndef NGSP_DATASET_HPP
#define NGSP_DATASET_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ngsp/grammar.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

struct LabeledShape {
    Shape shape;
    LabelAssignment ground_truth;
};

// A collection of labeled shapes keyed by shape id.
struct Dataset {
    std::vector<LabeledShape> items;
    std::unordered_map<std::string, int> index;

    int size() const { return static_cast<int>(items.size()); }
    const LabeledShape& at(int i) const { return items[static_cast<std::size_t>(i)]; }
    int find(const std::string& id) const;
    void add(LabeledShape item);

    // Loads <id>.regs and <id>.labels pairs from a directory. When ids is
    // given, loads exactly those shapes in order; otherwise every *.regs in
    // the directory, sorted by filename.
    static Dataset load_dir(const std::filesystem::path& dir, const Grammar& g,
                            const std::vector<std::string>* ids = nullptr);
};

std::vector<std::string> read_id_list(const std::filesystem::path& path);
void write_id_list(const std::filesystem::path& path, const std::vector<std::string>& ids);

} // namespace ngsp

#endif
