#ifndef NGSP_GRAMMAR_HPP
#define NGSP_GRAMMAR_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ngsp {

using LabelId = int;
inline constexpr LabelId kNoLabel = -1;

// A semantic label grammar: a tree of labels rooted at the axiom, where
// terminals are the labels with no production. Immutable after construction;
// safe for concurrent reads.
class Grammar {
public:
    struct Production {
        LabelId parent;
        std::vector<LabelId> children;
    };

    static Grammar parse(std::string_view text);
    static Grammar parse_file(const std::filesystem::path& path);
    std::string serialize() const;

    int label_count() const { return static_cast<int>(names_.size()); }
    LabelId root() const { return root_; }
    const std::string& label_name(LabelId l) const { return names_[check(l)]; }

    // kNoLabel if unknown.
    LabelId find_label(std::string_view name) const;
    LabelId require_label(std::string_view name) const;

    bool is_terminal(LabelId l) const { return production_of_[check(l)] < 0; }
    const std::vector<LabelId>& terminals() const { return terminals_; }
    const std::vector<LabelId>& nonterminals() const { return nonterminals_; }
    const std::vector<Production>& productions() const { return productions_; }

    // Empty list for terminals.
    const std::vector<LabelId>& children(LabelId l) const;
    LabelId parent(LabelId l) const { return parent_[check(l)]; }
    int depth(LabelId l) const { return depth_[check(l)]; }

    // Position of l within terminals(), or -1.
    int terminal_index(LabelId l) const { return terminal_index_[check(l)]; }
    int max_fanout() const { return max_fanout_; }

    // [l, parent(l), ..., root].
    std::vector<LabelId> path_to_root(LabelId l) const;
    bool is_ancestor(LabelId ancestor, LabelId descendant) const;

    // The unique child of `ancestor` lying on the path root -> terminal.
    // `ancestor` must be a strict ancestor of `terminal`.
    LabelId child_on_path(LabelId ancestor, LabelId terminal) const;

    // Edge count of the path l1 -> LCA -> l2.
    int tree_distance(LabelId l1, LabelId l2) const;

    bool operator==(const Grammar& other) const;

private:
    LabelId check(LabelId l) const;
    LabelId intern(std::string_view name);
    void validate() const;

    std::vector<std::string> names_;              // canonical label order
    std::unordered_map<std::string, LabelId> index_;
    LabelId root_ = kNoLabel;
    std::vector<Production> productions_;         // document order
    std::vector<int> production_of_;              // label -> production index or -1
    std::vector<LabelId> parent_;                 // label -> parent or kNoLabel
    std::vector<int> depth_;                      // root = 0
    std::vector<LabelId> terminals_;              // canonical order restricted to terminals
    std::vector<LabelId> nonterminals_;
    std::vector<int> terminal_index_;
    int max_fanout_ = 0;
};

} // namespace ngsp

#endif
