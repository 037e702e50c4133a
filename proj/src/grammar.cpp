#include "ngsp/grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ngsp/errors.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

namespace {

bool valid_label_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';') return false;
    }
    return true;
}

} // namespace

LabelId Grammar::check(LabelId l) const {
    if (l < 0 || l >= label_count())
        throw GrammarError("UnknownLabel: id " + std::to_string(l) + " out of range");
    return l;
}

LabelId Grammar::find_label(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? kNoLabel : it->second;
}

LabelId Grammar::require_label(std::string_view name) const {
    LabelId l = find_label(name);
    if (l == kNoLabel)
        throw GrammarError("UnknownLabel: '" + std::string(name) + "'");
    return l;
}

LabelId Grammar::intern(std::string_view name) {
    if (!valid_label_name(name))
        throw GrammarError("BadLabelName: '" + std::string(name) + "'");
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    LabelId id = static_cast<LabelId>(names_.size());
    names_.emplace_back(name);
    index_.emplace(std::string(name), id);
    parent_.push_back(kNoLabel);
    production_of_.push_back(-1);
    return id;
}

Grammar Grammar::parse(std::string_view text) {
    Grammar g;
    std::size_t pos = 0;
    bool saw_root = false;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos)
                                   ? text.substr(pos)
                                   : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (!saw_root) {
            if (line.substr(0, 5) != "root:")
                throw GrammarError("MissingRoot: first declaration must be 'root: <label>' "
                                   "(line " + std::to_string(line_no) + ")");
            std::string_view name = trim(line.substr(5));
            if (name.empty())
                throw GrammarError("MissingRoot: empty root label");
            g.root_ = g.intern(name);
            saw_root = true;
            continue;
        }

        auto arrow = line.find("->");
        if (arrow == std::string_view::npos)
            throw GrammarError("BadProduction: expected '<parent> -> <child> ; ...' "
                               "(line " + std::to_string(line_no) + ")");
        std::string_view lhs = trim(line.substr(0, arrow));
        std::string_view rhs = trim(line.substr(arrow + 2));
        auto lhs_toks = split_ws(lhs);
        if (lhs_toks.size() != 1)
            throw GrammarError("BadProduction: left-hand side must be one label "
                               "(line " + std::to_string(line_no) + ")");
        LabelId parent = g.intern(lhs_toks[0]);
        if (g.production_of_[parent] >= 0)
            throw GrammarError("DuplicateProduction: label '" + std::string(lhs_toks[0]) +
                               "' has two productions");

        Production prod;
        prod.parent = parent;
        for (std::string_view part : split_char(rhs, ';')) {
            auto toks = split_ws(part);
            if (toks.size() != 1)
                throw GrammarError("BadProduction: each child must be one label "
                                   "(line " + std::to_string(line_no) + ")");
            LabelId child = g.intern(toks[0]);
            if (child == g.root_)
                throw GrammarError("RootOnRhs: root label '" + g.names_[child] +
                                   "' may not appear as a child");
            if (std::find(prod.children.begin(), prod.children.end(), child) != prod.children.end())
                throw GrammarError("DuplicateChild: label '" + g.names_[child] +
                                   "' repeated in one production");
            if (g.parent_[child] != kNoLabel)
                throw GrammarError("MultipleParents: label '" + g.names_[child] +
                                   "' appears on two right-hand sides");
            g.parent_[child] = parent;
            prod.children.push_back(child);
        }
        if (prod.children.empty())
            throw GrammarError("BadProduction: empty right-hand side (line " +
                               std::to_string(line_no) + ")");
        g.production_of_[parent] = static_cast<int>(g.productions_.size());
        g.productions_.push_back(std::move(prod));
    }
    if (!saw_root)
        throw GrammarError("MissingRoot: no 'root:' declaration found");

    g.validate();
    return g;
}

Grammar Grammar::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw GrammarError("cannot open grammar file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Grammar::validate() const {
    const int n = label_count();
    // Walk every label's parent chain; detect cycles and disconnection.
    const_cast<Grammar*>(this)->depth_.assign(n, -1);
    auto& depth = const_cast<Grammar*>(this)->depth_;
    depth[root_] = 0;
    for (LabelId l = 0; l < n; ++l) {
        std::vector<LabelId> chain;
        LabelId cur = l;
        while (depth[cur] < 0) {
            chain.push_back(cur);
            LabelId p = parent_[cur];
            if (p == kNoLabel)
                throw GrammarError("UnreachableLabel: '" + names_[cur] +
                                   "' is not reachable from the root");
            if (std::find(chain.begin(), chain.end(), p) != chain.end())
                throw GrammarError("Cycle: label '" + names_[p] +
                                   "' is its own ancestor");
            cur = p;
        }
        int d = depth[cur];
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) depth[*it] = ++d;
    }

    auto* self = const_cast<Grammar*>(this);
    self->terminals_.clear();
    self->nonterminals_.clear();
    self->terminal_index_.assign(n, -1);
    for (LabelId l = 0; l < n; ++l) {
        if (production_of_[l] < 0) {
            self->terminal_index_[l] = static_cast<int>(terminals_.size());
            self->terminals_.push_back(l);
        } else {
            self->nonterminals_.push_back(l);
        }
    }
    int fanout = 0;
    for (const auto& p : productions_)
        fanout = std::max(fanout, static_cast<int>(p.children.size()));
    self->max_fanout_ = fanout;
}

std::string Grammar::serialize() const {
    std::string out = "root: " + names_[root_] + "\n";
    for (const auto& prod : productions_) {
        out += names_[prod.parent];
        out += " ->";
        for (std::size_t i = 0; i < prod.children.size(); ++i) {
            out += (i == 0) ? " " : " ; ";
            out += names_[prod.children[i]];
        }
        out += "\n";
    }
    return out;
}

const std::vector<LabelId>& Grammar::children(LabelId l) const {
    static const std::vector<LabelId> kEmpty;
    int pi = production_of_[check(l)];
    return pi < 0 ? kEmpty : productions_[pi].children;
}

std::vector<LabelId> Grammar::path_to_root(LabelId l) const {
    check(l);
    std::vector<LabelId> path;
    for (LabelId cur = l; cur != kNoLabel; cur = parent_[cur]) path.push_back(cur);
    return path;
}

bool Grammar::is_ancestor(LabelId ancestor, LabelId descendant) const {
    check(ancestor);
    for (LabelId cur = check(descendant); cur != kNoLabel; cur = parent_[cur])
        if (cur == ancestor) return true;
    return false;
}

LabelId Grammar::child_on_path(LabelId ancestor, LabelId terminal) const {
    check(ancestor);
    LabelId prev = kNoLabel;
    for (LabelId cur = check(terminal); cur != kNoLabel; cur = parent_[cur]) {
        if (cur == ancestor) {
            if (prev == kNoLabel)
                throw GrammarError("NotStrictAncestor: '" + names_[ancestor] +
                                   "' equals the terminal '" + names_[terminal] + "'");
            return prev;
        }
        prev = cur;
    }
    throw GrammarError("NotAncestor: '" + names_[ancestor] + "' is not an ancestor of '" +
                       names_[terminal] + "'");
}

int Grammar::tree_distance(LabelId l1, LabelId l2) const {
    LabelId a = check(l1), b = check(l2);
    int da = depth_[a], db = depth_[b];
    int dist = 0;
    while (da > db) { a = parent_[a]; --da; ++dist; }
    while (db > da) { b = parent_[b]; --db; ++dist; }
    while (a != b) { a = parent_[a]; b = parent_[b]; dist += 2; }
    return dist;
}

bool Grammar::operator==(const Grammar& other) const {
    if (names_ != other.names_ || root_ != other.root_) return false;
    if (productions_.size() != other.productions_.size()) return false;
    for (std::size_t i = 0; i < productions_.size(); ++i) {
        if (productions_[i].parent != other.productions_[i].parent) return false;
        if (productions_[i].children != other.productions_[i].children) return false;
    }
    return true;
}

} // namespace ngsp
