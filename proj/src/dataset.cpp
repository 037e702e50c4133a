#include "ngsp/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "ngsp/errors.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

int Dataset::find(const std::string& id) const {
    auto it = index.find(id);
    return it == index.end() ? -1 : it->second;
}

void Dataset::add(LabeledShape item) {
    index.emplace(item.shape.id, static_cast<int>(items.size()));
    items.push_back(std::move(item));
}

Dataset Dataset::load_dir(const std::filesystem::path& dir, const Grammar& g,
                          const std::vector<std::string>* ids) {
    namespace fs = std::filesystem;
    std::vector<std::string> stems;
    if (ids) {
        stems = *ids;
    } else {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".regs") stems.push_back(entry.path().stem().string());
        std::sort(stems.begin(), stems.end());
    }

    Dataset ds;
    for (const auto& stem : stems) {
        fs::path regs = dir / (stem + ".regs");
        fs::path labels = dir / (stem + ".labels");
        LabeledShape item;
        item.shape = Shape::load(regs);
        item.ground_truth = LabelAssignment::load(labels, g, item.shape.region_count());
        if (item.shape.id != stem)
            throw DataError("shape id '" + item.shape.id + "' does not match filename stem '" +
                            stem + "'");
        ds.add(std::move(item));
    }
    if (ds.items.empty()) throw DataError("no shapes found under " + dir.string());
    return ds;
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open list file: " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (!t.empty()) ids.emplace_back(t);
    }
    return ids;
}

void write_id_list(const std::filesystem::path& path, const std::vector<std::string>& ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write list file: " + path.string());
    for (const auto& id : ids) out << id << "\n";
}

} // namespace ngsp
