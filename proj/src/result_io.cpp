#include "ngsp/result_io.hpp"

#include <fstream>
#include <sstream>

#include "ngsp/errors.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

void save_result(const std::filesystem::path& path, const ScoredProposal& p, std::int64_t k,
                 const Grammar& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write result file: " + path.string());
    out << "k " << k << "\n";
    out << "log_q " << format_double_sig9(p.log_q) << "\n";
    out << "log_geom " << format_double_sig9(p.log_geom) << "\n";
    out << "log_layout " << format_double_sig9(p.log_layout) << "\n";
    out << "log_region " << format_double_sig9(p.log_region) << "\n";
    out << "log_total " << format_double_sig9(p.log_total) << "\n";
    out << p.assignment.serialize(g);
}

ScoredProposal load_result(const std::filesystem::path& path, const Grammar& g, int region_count,
                           std::int64_t* k_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open result file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    ScoredProposal p;
    std::string assignment_lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string::npos)
                                   ? std::string_view(text).substr(pos)
                                   : std::string_view(text).substr(pos, eol - pos);
        pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        auto tok = split_ws(line);
        if (tok.size() != 2) throw DataError(path.string() + ": malformed result line");
        if (tok[0] == "k") {
            if (k_out) *k_out = parse_int(tok[1], "k");
        } else if (tok[0] == "log_q") {
            p.log_q = parse_double(tok[1], "log_q");
        } else if (tok[0] == "log_geom") {
            p.log_geom = parse_double(tok[1], "log_geom");
        } else if (tok[0] == "log_layout") {
            p.log_layout = parse_double(tok[1], "log_layout");
        } else if (tok[0] == "log_region") {
            p.log_region = parse_double(tok[1], "log_region");
        } else if (tok[0] == "log_total") {
            p.log_total = parse_double(tok[1], "log_total");
        } else {
            assignment_lines += std::string(line) + "\n";
        }
    }
    p.assignment = LabelAssignment::parse(assignment_lines, g, region_count, path.string());
    return p;
}

} // namespace ngsp
