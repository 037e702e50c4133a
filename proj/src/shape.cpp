#include "ngsp/shape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ngsp/errors.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

namespace {

class LineReader {
public:
    LineReader(std::string_view text, std::string_view source) : text_(text), source_(source) {}

    // Next non-empty line, trimmed; false at end of input.
    bool next(std::vector<std::string_view>& tokens) {
        while (pos_ <= text_.size()) {
            std::size_t eol = text_.find('\n', pos_);
            std::string_view raw = (eol == std::string_view::npos)
                                       ? text_.substr(pos_)
                                       : text_.substr(pos_, eol - pos_);
            pos_ = (eol == std::string_view::npos) ? text_.size() + 1 : eol + 1;
            ++line_no_;
            std::string_view line = trim(raw);
            if (line.empty()) continue;
            tokens = split_ws(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError(std::string(source_) + ":" + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::string_view text_;
    std::string_view source_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

} // namespace

Shape Shape::parse(std::string_view text, std::string_view source_name) {
    LineReader reader(text, source_name);
    std::vector<std::string_view> tok;

    if (!reader.next(tok) || tok.size() != 2 || tok[0] != "shape")
        reader.fail("malformed header: expected 'shape <id>'");
    Shape s;
    s.id = std::string(tok[1]);

    if (!reader.next(tok) || tok.size() != 2 || tok[0] != "num_regions")
        reader.fail("malformed header: expected 'num_regions <n>'");
    const long long declared = parse_int(tok[1], "num_regions");
    if (declared < 1) reader.fail("num_regions must be >= 1");

    std::vector<bool> seen(static_cast<std::size_t>(declared), false);
    double raw_total = 0.0;
    while (reader.next(tok)) {
        if (tok[0] != "region" || tok.size() != 4)
            reader.fail("expected 'region <id> <num_points> <raw_area>'");
        if (static_cast<long long>(s.regions.size()) >= declared)
            throw DataError("RegionCountMismatch: more region blocks than num_regions " +
                            std::to_string(declared) + " in " + std::string(source_name));
        Region r;
        r.id = static_cast<int>(parse_int(tok[1], "region id"));
        const long long npoints = parse_int(tok[2], "num_points");
        r.area = parse_double(tok[3], "raw_area");
        if (r.id < 0 || r.id >= declared)
            reader.fail("region id out of range: " + std::to_string(r.id));
        if (seen[static_cast<std::size_t>(r.id)])
            reader.fail("duplicate region id " + std::to_string(r.id));
        seen[static_cast<std::size_t>(r.id)] = true;
        if (npoints <= 0)
            reader.fail("region " + std::to_string(r.id) + " has zero points");
        if (!(r.area > 0.0))
            reader.fail("region " + std::to_string(r.id) + " has non-positive area");

        r.points.reserve(static_cast<std::size_t>(npoints));
        for (long long i = 0; i < npoints; ++i) {
            if (!reader.next(tok) || tok.size() != 3)
                reader.fail("expected point line 'x y z'");
            r.points.push_back({parse_double(tok[0], "x"), parse_double(tok[1], "y"),
                                parse_double(tok[2], "z")});
        }

        // Optional face block. Peek: a 'faces' line belongs to this region.
        std::vector<std::string_view> peek;
        LineReader probe = reader;
        if (probe.next(peek) && peek.size() == 2 && peek[0] == "faces") {
            reader.next(tok);
            const long long nfaces = parse_int(tok[1], "faces count");
            if (nfaces < 0) reader.fail("negative face count");
            r.faces.reserve(static_cast<std::size_t>(nfaces));
            for (long long i = 0; i < nfaces; ++i) {
                if (!reader.next(tok) || tok.size() != 4)
                    reader.fail("expected face line 'cx cy cz farea'");
                Face f;
                f.centroid = {parse_double(tok[0], "cx"), parse_double(tok[1], "cy"),
                              parse_double(tok[2], "cz")};
                f.area = parse_double(tok[3], "farea");
                r.faces.push_back(f);
            }
        }

        raw_total += r.area;
        s.regions.push_back(std::move(r));
    }
    if (static_cast<long long>(s.regions.size()) != declared)
        throw DataError("RegionCountMismatch: num_regions " + std::to_string(declared) +
                        " but found " + std::to_string(s.regions.size()) + " region blocks in " +
                        std::string(source_name));

    std::sort(s.regions.begin(), s.regions.end(),
              [](const Region& a, const Region& b) { return a.id < b.id; });
    for (auto& r : s.regions) r.area /= raw_total;
    return s;
}

Shape Shape::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open region file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::string Shape::serialize() const {
    std::string out;
    out += "shape " + id + "\n";
    out += "num_regions " + std::to_string(regions.size()) + "\n";
    for (const auto& r : regions) {
        out += "region " + std::to_string(r.id) + " " + std::to_string(r.points.size()) + " " +
               format_double(r.area) + "\n";
        for (const auto& p : r.points)
            out += format_double(p.x) + " " + format_double(p.y) + " " + format_double(p.z) + "\n";
        if (!r.faces.empty()) {
            out += "faces " + std::to_string(r.faces.size()) + "\n";
            for (const auto& f : r.faces)
                out += format_double(f.centroid.x) + " " + format_double(f.centroid.y) + " " +
                       format_double(f.centroid.z) + " " + format_double(f.area) + "\n";
        }
    }
    return out;
}

void Shape::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write region file: " + path.string());
    out << serialize();
}

LabelAssignment LabelAssignment::parse(std::string_view text, const Grammar& g, int region_count,
                                       std::string_view source_name) {
    std::vector<LabelId> labels(static_cast<std::size_t>(region_count), kNoLabel);
    LineReader reader(text, source_name);
    std::vector<std::string_view> tok;
    while (reader.next(tok)) {
        if (tok.size() != 2) reader.fail("expected '<region_id> <terminal_label>'");
        const long long rid = parse_int(tok[0], "region id");
        if (rid < 0 || rid >= region_count)
            reader.fail("region id out of range: " + std::to_string(rid));
        LabelId l = g.require_label(tok[1]);
        if (!g.is_terminal(l))
            reader.fail("label '" + std::string(tok[1]) + "' is not a terminal");
        if (labels[static_cast<std::size_t>(rid)] != kNoLabel)
            reader.fail("region " + std::to_string(rid) + " labelled twice");
        labels[static_cast<std::size_t>(rid)] = l;
    }
    for (int i = 0; i < region_count; ++i)
        if (labels[static_cast<std::size_t>(i)] == kNoLabel)
            throw DataError("assignment does not cover region " + std::to_string(i) + " in " +
                            std::string(source_name));
    return LabelAssignment(std::move(labels));
}

LabelAssignment LabelAssignment::load(const std::filesystem::path& path, const Grammar& g,
                                      int region_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open label file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), g, region_count, path.string());
}

std::string LabelAssignment::serialize(const Grammar& g) const {
    std::string out;
    for (int i = 0; i < region_count(); ++i)
        out += std::to_string(i) + " " + g.label_name(labels_[static_cast<std::size_t>(i)]) + "\n";
    return out;
}

void LabelAssignment::save(const std::filesystem::path& path, const Grammar& g) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write label file: " + path.string());
    out << serialize(g);
}

bool passes_small_region_filter(const Shape& s, double threshold) {
    for (const auto& r : s.regions)
        if (r.area < threshold) return false;
    return true;
}

std::vector<int> region_group(const Grammar& g, const Shape& s, const LabelAssignment& a,
                              LabelId l) {
    if (a.region_count() != s.region_count())
        throw DataError("assignment does not cover shape '" + s.id + "'");
    g.label_name(l); // validates
    std::vector<int> out;
    for (int i = 0; i < s.region_count(); ++i) {
        LabelId t = a.label(i);
        if (t == l || g.is_ancestor(l, t)) out.push_back(i);
    }
    return out;
}

std::vector<LabelId> occupied_labels(const Grammar& g, const LabelAssignment& a) {
    std::vector<bool> occupied(static_cast<std::size_t>(g.label_count()), false);
    for (int i = 0; i < a.region_count(); ++i)
        for (LabelId l = a.label(i); l != kNoLabel; l = g.parent(l))
            occupied[static_cast<std::size_t>(l)] = true;
    std::vector<LabelId> out;
    for (LabelId l = 0; l < g.label_count(); ++l)
        if (occupied[static_cast<std::size_t>(l)]) out.push_back(l);
    return out;
}

double unchanged_area_fraction(const Shape& s, const LabelAssignment& a,
                               const LabelAssignment& b) {
    if (a.region_count() != s.region_count() || b.region_count() != s.region_count())
        throw DataError("assignments do not cover shape '" + s.id + "'");
    double total = 0.0;
    for (int i = 0; i < s.region_count(); ++i)
        if (a.label(i) == b.label(i)) total += s.regions[static_cast<std::size_t>(i)].area;
    return total;
}

} // namespace ngsp
