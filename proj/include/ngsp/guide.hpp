#ifndef NGSP_GUIDE_HPP
#define NGSP_GUIDE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ngsp/grammar.hpp"
#include "ngsp/shape.hpp"

namespace ngsp {

inline constexpr double kProbabilityFloor = 1e-9;

// Per-region categorical over terminal labels. Rows are clamped to the
// probability floor and renormalized at construction so logs stay finite.
class GuideDistribution {
public:
    GuideDistribution() = default;
    GuideDistribution(std::vector<LabelId> terminal_order,
                      std::vector<std::vector<double>> rows);

    static GuideDistribution parse(std::string_view text, const Grammar& g,
                                   std::string_view source_name = "<string>");
    static GuideDistribution load(const std::filesystem::path& path, const Grammar& g);
    static GuideDistribution uniform(const Grammar& g, int region_count);
    std::string serialize(const Grammar& g) const;

    int region_count() const { return static_cast<int>(rows_.size()); }
    int terminal_count() const { return static_cast<int>(terminal_order_.size()); }
    const std::vector<LabelId>& terminal_order() const { return terminal_order_; }
    const std::vector<double>& row(int region_id) const {
        return rows_[static_cast<std::size_t>(region_id)];
    }
    // Index of label l within terminal_order, or -1.
    int index_of(LabelId l) const;

private:
    std::vector<LabelId> terminal_order_;
    std::vector<std::vector<double>> rows_;
    std::vector<int> label_to_index_; // LabelId -> column
};

// One candidate assignment with its per-term log-likelihoods.
struct ScoredProposal {
    LabelAssignment assignment;
    std::vector<std::uint16_t> signature; // per-region terminal_order index
    double log_q = 0.0;
    double log_geom = 0.0;
    double log_layout = 0.0;
    double log_region = 0.0;
    double log_total = 0.0;
};

// Sum over regions of log q_i(a_i).
double log_guide_prob(const GuideDistribution& d, const LabelAssignment& a);

// Exact top-k assignments in non-increasing log_q order; ties broken
// lexicographically by (region id, terminal_order index). Best-first frontier
// search over per-region rank vectors.
std::vector<ScoredProposal> top_k_assignments(const GuideDistribution& d, std::int64_t k);

// Full assignment space sorted by (-log_q, signature); guarded to 10^6 states.
// Testing oracle for top_k_assignments.
std::vector<ScoredProposal> brute_force_assignments(const GuideDistribution& d);

// Stochastic proposal mode: up to k distinct assignments sampled without
// replacement via repeated per-region categorical draws, returned sorted by
// (-log_q, signature).
std::vector<ScoredProposal> sample_assignments(const GuideDistribution& d, std::int64_t k,
                                               std::uint64_t seed);

} // namespace ngsp

#endif
