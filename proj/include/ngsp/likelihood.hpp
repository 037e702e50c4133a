#ifndef NGSP_LIKELIHOOD_HPP
#define NGSP_LIKELIHOOD_HPP

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ngsp/features.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/scorers.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

enum class QueryKind : int { Geometry = 0, Layout = 1, RegionLabel = 2, RegionArea = 3 };

std::string_view query_kind_name(QueryKind k);

// One scorer evaluation request: a label and the region group proposed for
// it. Ordered so query batches serialize deterministically.
struct ScorerQuery {
    QueryKind kind;
    LabelId label;
    std::vector<int> regions;        // sorted ascending
    std::vector<LabelId> child_tags; // parallel to regions; layout queries only

    auto operator<=>(const ScorerQuery&) const = default;
};

struct LikelihoodConfig {
    bool use_geom = true;
    bool use_layout = true;
    bool use_region = true;
    std::int64_t k = 10000;
    double epsilon = 1e-9;
    bool include_guide_term = false;
};

enum class ScorerBackend { Builtin, External };

// All scorer heads behind the likelihood terms. Immutable after training or
// loading; safe for concurrent reads.
struct ScorerBank {
    ScorerBackend backend = ScorerBackend::Builtin;

    // Builtin heads. Labels without a trained model fall back to 0.5.
    std::map<LabelId, LogisticModel> geometry;       // every label except root
    std::map<LabelId, LogisticModel> layout;         // non-terminals
    MultinomialModel region_label;                   // distribution over terminals
    std::map<LabelId, BoundedLinearModel> region_area; // terminals
    MultinomialModel guide;                          // builtin per-region guide head

    // External backend.
    std::string external_command;
    double external_timeout_secs = 300.0;

    static ScorerBank external(std::string command);
    void save(const std::filesystem::path& path, const Grammar& g) const;
    static ScorerBank load(const std::filesystem::path& path, const Grammar& g);
};

// Region groups implied by one assignment, with per-group child tags for the
// lifted non-terminal labels.
struct AssignmentGroups {
    std::vector<LabelId> occupied;                // sorted by label id
    std::vector<std::vector<int>> groups;         // parallel to occupied
    std::vector<std::vector<LabelId>> child_tags; // parallel; empty for terminals
    int index_of(LabelId l) const;
};

AssignmentGroups compute_assignment_groups(const Grammar& g, const LabelAssignment& a);

// Per-shape scoring engine. Precomputes region statistics, memoizes scorer
// calls by query, and batches external invocations.
class LikelihoodEvaluator {
public:
    LikelihoodEvaluator(const ScorerBank& bank, const Grammar& g, const Shape& s,
                        std::filesystem::path regs_path = {});

    // Fills log_geom/log_layout/log_region/log_total on every proposal.
    void score(const LikelihoodConfig& cfg, std::vector<ScoredProposal>& proposals);

    double geometry(const LabelAssignment& a, double epsilon = 1e-9);
    double layout(const LabelAssignment& a, double epsilon = 1e-9);
    double region_groups(const LabelAssignment& a, double epsilon = 1e-9);

private:
    void collect(const LikelihoodConfig& cfg, const AssignmentGroups& groups,
                 std::map<ScorerQuery, double>& pending) const;
    void resolve(std::map<ScorerQuery, double>& pending);
    double resolve_builtin(const ScorerQuery& q) const;
    double term_geometry(const AssignmentGroups& gr, const std::map<ScorerQuery, double>& v,
                         double epsilon) const;
    double term_layout(const AssignmentGroups& gr, const std::map<ScorerQuery, double>& v,
                       double epsilon) const;
    double term_region(const AssignmentGroups& gr, const std::map<ScorerQuery, double>& v,
                       double epsilon) const;

    const ScorerBank& bank_;
    const Grammar& grammar_;
    const Shape& shape_;
    ShapeStats stats_;
    std::filesystem::path regs_path_;
    std::map<ScorerQuery, double> memo_;
};

// Spec-level single-term entry points.
double score_geometry(const ScorerBank& bank, const Grammar& g, const Shape& s,
                      const LabelAssignment& a);
double score_layout(const ScorerBank& bank, const Grammar& g, const Shape& s,
                    const LabelAssignment& a);
double score_region_groups(const ScorerBank& bank, const Grammar& g, const Shape& s,
                           const LabelAssignment& a);

// Sum of the enabled per-term logs (+ log_q when include_guide_term is set).
double combine(const LikelihoodConfig& cfg, const ScoredProposal& p);

// Scores the given proposals and returns the best under combine(); ties break
// to higher log_q, then lexicographically smaller signature.
ScoredProposal infer_proposals(const LikelihoodConfig& cfg, const ScorerBank& bank,
                               const Grammar& g, const Shape& s,
                               std::vector<ScoredProposal> proposals,
                               const std::filesystem::path& regs_path = {});

// Full pipeline: exact top-k proposals under d, then likelihood re-ranking.
ScoredProposal infer(const LikelihoodConfig& cfg, const ScorerBank& bank, const Grammar& g,
                     const GuideDistribution& d, const Shape& s,
                     const std::filesystem::path& regs_path = {});

// Per-region guide rows from the bank's builtin guide head.
GuideDistribution builtin_guide(const ScorerBank& bank, const Grammar& g, const Shape& s);

} // namespace ngsp

#endif
