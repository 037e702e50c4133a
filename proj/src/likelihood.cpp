#include "ngsp/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ngsp/errors.hpp"
#include "ngsp/external.hpp"

namespace ngsp {

std::string_view query_kind_name(QueryKind k) {
    switch (k) {
        case QueryKind::Geometry: return "geom";
        case QueryKind::Layout: return "layout";
        case QueryKind::RegionLabel: return "region_label";
        case QueryKind::RegionArea: return "region_area";
    }
    return "unknown";
}

ScorerBank ScorerBank::external(std::string command) {
    ScorerBank bank;
    bank.backend = ScorerBackend::External;
    bank.external_command = std::move(command);
    return bank;
}

namespace {
constexpr char kModelMagic[6] = {'N', 'G', 'S', 'P', 'B', '1'};
}

void ScorerBank::save(const std::filesystem::path& path, const Grammar& g) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    out.write(kModelMagic, sizeof(kModelMagic));

    write_u32(out, static_cast<std::uint32_t>(g.label_count()));
    for (LabelId l = 0; l < g.label_count(); ++l) {
        const std::string& name = g.label_name(l);
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }

    auto write_logistic_map = [&](const std::map<LabelId, LogisticModel>& m) {
        write_u32(out, static_cast<std::uint32_t>(m.size()));
        for (const auto& [label, model] : m) {
            write_u32(out, static_cast<std::uint32_t>(label));
            write_logistic(out, model);
        }
    };
    write_logistic_map(geometry);
    write_logistic_map(layout);
    write_multinomial(out, region_label);
    write_u32(out, static_cast<std::uint32_t>(region_area.size()));
    for (const auto& [label, model] : region_area) {
        write_u32(out, static_cast<std::uint32_t>(label));
        write_bounded_linear(out, model);
    }
    write_multinomial(out, guide);
    if (!out) throw DataError("failed writing model file: " + path.string());
}

ScorerBank ScorerBank::load(const std::filesystem::path& path, const Grammar& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path.string());
    char magic[6];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw DataError("not a scorer model file (bad magic): " + path.string());

    std::uint32_t n_labels = read_u32(in);
    if (n_labels != static_cast<std::uint32_t>(g.label_count()))
        throw DataError("model was trained for a different grammar (label count mismatch)");
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        std::uint32_t len = read_u32(in);
        std::string name(len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(len));
        if (!in || name != g.label_name(static_cast<LabelId>(i)))
            throw DataError("model was trained for a different grammar (label '" + name + "')");
    }

    ScorerBank bank;
    auto read_logistic_map = [&](std::map<LabelId, LogisticModel>& m) {
        std::uint32_t count = read_u32(in);
        for (std::uint32_t i = 0; i < count; ++i) {
            LabelId l = static_cast<LabelId>(read_u32(in));
            m.emplace(l, read_logistic(in));
        }
    };
    read_logistic_map(bank.geometry);
    read_logistic_map(bank.layout);
    bank.region_label = read_multinomial(in);
    std::uint32_t count = read_u32(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        LabelId l = static_cast<LabelId>(read_u32(in));
        bank.region_area.emplace(l, read_bounded_linear(in));
    }
    bank.guide = read_multinomial(in);
    return bank;
}

int AssignmentGroups::index_of(LabelId l) const {
    auto it = std::lower_bound(occupied.begin(), occupied.end(), l);
    if (it == occupied.end() || *it != l) return -1;
    return static_cast<int>(it - occupied.begin());
}

AssignmentGroups compute_assignment_groups(const Grammar& g, const LabelAssignment& a) {
    const int n_labels = g.label_count();
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(n_labels));
    std::vector<std::vector<LabelId>> tags(static_cast<std::size_t>(n_labels));
    for (int i = 0; i < a.region_count(); ++i) {
        LabelId prev = kNoLabel;
        for (LabelId cur = a.label(i); cur != kNoLabel; cur = g.parent(cur)) {
            groups[static_cast<std::size_t>(cur)].push_back(i);
            if (prev != kNoLabel) tags[static_cast<std::size_t>(cur)].push_back(prev);
            prev = cur;
        }
    }
    AssignmentGroups out;
    for (LabelId l = 0; l < n_labels; ++l) {
        if (groups[static_cast<std::size_t>(l)].empty()) continue;
        out.occupied.push_back(l);
        out.groups.push_back(std::move(groups[static_cast<std::size_t>(l)]));
        out.child_tags.push_back(std::move(tags[static_cast<std::size_t>(l)]));
    }
    return out;
}

LikelihoodEvaluator::LikelihoodEvaluator(const ScorerBank& bank, const Grammar& g, const Shape& s,
                                         std::filesystem::path regs_path)
    : bank_(bank), grammar_(g), shape_(s), stats_(compute_shape_stats(s)),
      regs_path_(std::move(regs_path)) {}

void LikelihoodEvaluator::collect(const LikelihoodConfig& cfg, const AssignmentGroups& groups,
                                  std::map<ScorerQuery, double>& pending) const {
    for (std::size_t gi = 0; gi < groups.occupied.size(); ++gi) {
        LabelId l = groups.occupied[gi];
        const bool terminal = grammar_.is_terminal(l);
        if (cfg.use_geom && l != grammar_.root()) {
            ScorerQuery q{QueryKind::Geometry, l, groups.groups[gi], {}};
            if (!memo_.count(q)) pending.emplace(std::move(q), 0.0);
        }
        if (cfg.use_layout && !terminal) {
            ScorerQuery q{QueryKind::Layout, l, groups.groups[gi], groups.child_tags[gi]};
            if (!memo_.count(q)) pending.emplace(std::move(q), 0.0);
        }
        if (cfg.use_region && terminal) {
            ScorerQuery ql{QueryKind::RegionLabel, l, groups.groups[gi], {}};
            if (!memo_.count(ql)) pending.emplace(std::move(ql), 0.0);
            ScorerQuery qa{QueryKind::RegionArea, l, groups.groups[gi], {}};
            if (!memo_.count(qa)) pending.emplace(std::move(qa), 0.0);
        }
    }
}

double LikelihoodEvaluator::resolve_builtin(const ScorerQuery& q) const {
    switch (q.kind) {
        case QueryKind::Geometry: {
            auto it = bank_.geometry.find(q.label);
            if (it == bank_.geometry.end()) return 0.5;
            return it->second.predict(group_features(stats_.regions, q.regions));
        }
        case QueryKind::Layout: {
            auto it = bank_.layout.find(q.label);
            if (it == bank_.layout.end()) return 0.5;
            return it->second.predict(
                layout_features(grammar_, q.label, stats_.regions, q.regions, q.child_tags));
        }
        case QueryKind::RegionLabel: {
            if (bank_.region_label.classes <= 0) return 0.5;
            auto proba = bank_.region_label.predict_proba(group_features(stats_.regions, q.regions));
            int idx = grammar_.terminal_index(q.label);
            if (idx < 0) throw DataError("region-label query for non-terminal label");
            return proba[static_cast<std::size_t>(idx)];
        }
        case QueryKind::RegionArea: {
            auto it = bank_.region_area.find(q.label);
            if (it == bank_.region_area.end()) return 0.5;
            return it->second.predict(group_features(stats_.regions, q.regions));
        }
    }
    throw DataError("unknown query kind");
}

void LikelihoodEvaluator::resolve(std::map<ScorerQuery, double>& pending) {
    if (pending.empty()) return;
    if (bank_.backend == ScorerBackend::Builtin) {
        for (auto& [q, v] : pending) {
            v = resolve_builtin(q);
            if (!(v >= 0.0 && v <= 1.0))
                throw ScorerError("ScoreOutOfRange: builtin scorer returned " +
                                  std::to_string(v));
        }
    } else {
        std::vector<ScorerQuery> queries;
        queries.reserve(pending.size());
        for (const auto& [q, v] : pending) queries.push_back(q);
        auto values = run_external_scorer(bank_.external_command, bank_.external_timeout_secs,
                                          grammar_, shape_.id, regs_path_, queries);
        std::size_t i = 0;
        for (auto& [q, v] : pending) v = values[i++];
    }
    memo_.insert(pending.begin(), pending.end());
}

namespace {
double clamped_log(double v, double epsilon) {
    return std::log(std::max(v, epsilon));
}
} // namespace

double LikelihoodEvaluator::term_geometry(const AssignmentGroups& gr,
                                          const std::map<ScorerQuery, double>& v,
                                          double epsilon) const {
    double sum = 0.0;
    int count = 0;
    for (std::size_t gi = 0; gi < gr.occupied.size(); ++gi) {
        LabelId l = gr.occupied[gi];
        if (l == grammar_.root()) continue;
        auto it = v.find(ScorerQuery{QueryKind::Geometry, l, gr.groups[gi], {}});
        sum += clamped_log(it->second, epsilon);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double LikelihoodEvaluator::term_layout(const AssignmentGroups& gr,
                                        const std::map<ScorerQuery, double>& v,
                                        double epsilon) const {
    double sum = 0.0;
    int count = 0;
    for (std::size_t gi = 0; gi < gr.occupied.size(); ++gi) {
        LabelId l = gr.occupied[gi];
        if (grammar_.is_terminal(l)) continue;
        auto it = v.find(ScorerQuery{QueryKind::Layout, l, gr.groups[gi], gr.child_tags[gi]});
        sum += clamped_log(it->second, epsilon);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double LikelihoodEvaluator::term_region(const AssignmentGroups& gr,
                                        const std::map<ScorerQuery, double>& v,
                                        double epsilon) const {
    double sum = 0.0;
    int count = 0;
    for (std::size_t gi = 0; gi < gr.occupied.size(); ++gi) {
        LabelId l = gr.occupied[gi];
        if (!grammar_.is_terminal(l)) continue;
        auto lit = v.find(ScorerQuery{QueryKind::RegionLabel, l, gr.groups[gi], {}});
        auto ait = v.find(ScorerQuery{QueryKind::RegionArea, l, gr.groups[gi], {}});
        sum += clamped_log(lit->second, epsilon) + clamped_log(ait->second, epsilon);
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

void LikelihoodEvaluator::score(const LikelihoodConfig& cfg,
                                std::vector<ScoredProposal>& proposals) {
    std::vector<AssignmentGroups> groups;
    groups.reserve(proposals.size());
    std::map<ScorerQuery, double> pending;
    for (const auto& p : proposals) {
        groups.push_back(compute_assignment_groups(grammar_, p.assignment));
        collect(cfg, groups.back(), pending);
    }
    resolve(pending);
    for (std::size_t i = 0; i < proposals.size(); ++i) {
        auto& p = proposals[i];
        p.log_geom = cfg.use_geom ? term_geometry(groups[i], memo_, cfg.epsilon) : 0.0;
        p.log_layout = cfg.use_layout ? term_layout(groups[i], memo_, cfg.epsilon) : 0.0;
        p.log_region = cfg.use_region ? term_region(groups[i], memo_, cfg.epsilon) : 0.0;
        p.log_total = combine(cfg, p);
    }
}

double LikelihoodEvaluator::geometry(const LabelAssignment& a, double epsilon) {
    LikelihoodConfig cfg;
    cfg.use_geom = true;
    cfg.use_layout = cfg.use_region = false;
    cfg.epsilon = epsilon;
    auto gr = compute_assignment_groups(grammar_, a);
    std::map<ScorerQuery, double> pending;
    collect(cfg, gr, pending);
    resolve(pending);
    return term_geometry(gr, memo_, epsilon);
}

double LikelihoodEvaluator::layout(const LabelAssignment& a, double epsilon) {
    LikelihoodConfig cfg;
    cfg.use_layout = true;
    cfg.use_geom = cfg.use_region = false;
    cfg.epsilon = epsilon;
    auto gr = compute_assignment_groups(grammar_, a);
    std::map<ScorerQuery, double> pending;
    collect(cfg, gr, pending);
    resolve(pending);
    return term_layout(gr, memo_, epsilon);
}

double LikelihoodEvaluator::region_groups(const LabelAssignment& a, double epsilon) {
    LikelihoodConfig cfg;
    cfg.use_region = true;
    cfg.use_geom = cfg.use_layout = false;
    cfg.epsilon = epsilon;
    auto gr = compute_assignment_groups(grammar_, a);
    std::map<ScorerQuery, double> pending;
    collect(cfg, gr, pending);
    resolve(pending);
    return term_region(gr, memo_, epsilon);
}

double score_geometry(const ScorerBank& bank, const Grammar& g, const Shape& s,
                      const LabelAssignment& a) {
    LikelihoodEvaluator ev(bank, g, s);
    return ev.geometry(a);
}

double score_layout(const ScorerBank& bank, const Grammar& g, const Shape& s,
                    const LabelAssignment& a) {
    LikelihoodEvaluator ev(bank, g, s);
    return ev.layout(a);
}

double score_region_groups(const ScorerBank& bank, const Grammar& g, const Shape& s,
                           const LabelAssignment& a) {
    LikelihoodEvaluator ev(bank, g, s);
    return ev.region_groups(a);
}

double combine(const LikelihoodConfig& cfg, const ScoredProposal& p) {
    double total = 0.0;
    if (cfg.use_geom) total += p.log_geom;
    if (cfg.use_layout) total += p.log_layout;
    if (cfg.use_region) total += p.log_region;
    if (cfg.include_guide_term) total += p.log_q;
    return total;
}

namespace {
void validate_config(const LikelihoodConfig& cfg) {
    if (cfg.k < 1) throw DataError("likelihood config: k must be >= 1");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1e-3))
        throw DataError("likelihood config: epsilon must lie in (0, 1e-3]");
}
} // namespace

ScoredProposal infer_proposals(const LikelihoodConfig& cfg, const ScorerBank& bank,
                               const Grammar& g, const Shape& s,
                               std::vector<ScoredProposal> proposals,
                               const std::filesystem::path& regs_path) {
    validate_config(cfg);
    if (proposals.empty()) throw DataError("no proposals to score");
    LikelihoodEvaluator ev(bank, g, s, regs_path);
    ev.score(cfg, proposals);
    const ScoredProposal* best = &proposals.front();
    for (const auto& p : proposals) {
        if (p.log_total > best->log_total ||
            (p.log_total == best->log_total &&
             (p.log_q > best->log_q ||
              (p.log_q == best->log_q && p.signature < best->signature)))) {
            best = &p;
        }
    }
    return *best;
}

ScoredProposal infer(const LikelihoodConfig& cfg, const ScorerBank& bank, const Grammar& g,
                     const GuideDistribution& d, const Shape& s,
                     const std::filesystem::path& regs_path) {
    if (d.region_count() != s.region_count())
        throw DataError("guide distribution does not cover shape '" + s.id + "'");
    return infer_proposals(cfg, bank, g, s, top_k_assignments(d, cfg.k), regs_path);
}

GuideDistribution builtin_guide(const ScorerBank& bank, const Grammar& g, const Shape& s) {
    if (bank.guide.classes <= 0)
        throw DataError("scorer bank has no trained guide head");
    ShapeStats stats = compute_shape_stats(s);
    std::vector<std::vector<double>> rows;
    rows.reserve(s.regions.size());
    for (int i = 0; i < s.region_count(); ++i)
        rows.push_back(bank.guide.predict_proba(guide_features(stats, i)));
    return GuideDistribution(g.terminals(), std::move(rows));
}

} // namespace ngsp
