#include "ngsp/guide.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "ngsp/errors.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/text_io.hpp"

namespace ngsp {

GuideDistribution::GuideDistribution(std::vector<LabelId> terminal_order,
                                     std::vector<std::vector<double>> rows)
    : terminal_order_(std::move(terminal_order)), rows_(std::move(rows)) {
    if (terminal_order_.empty()) throw DataError("guide distribution has no terminals");
    LabelId max_label = *std::max_element(terminal_order_.begin(), terminal_order_.end());
    label_to_index_.assign(static_cast<std::size_t>(max_label) + 1, -1);
    for (std::size_t i = 0; i < terminal_order_.size(); ++i)
        label_to_index_[static_cast<std::size_t>(terminal_order_[i])] = static_cast<int>(i);

    for (auto& row : rows_) {
        if (row.size() != terminal_order_.size())
            throw DataError("guide row width does not match terminal count");
        double sum = 0.0;
        for (double& p : row) {
            if (p < 0.0) throw DataError("negative guide probability");
            if (p < kProbabilityFloor) p = kProbabilityFloor;
            sum += p;
        }
        for (double& p : row) p /= sum;
    }
}

int GuideDistribution::index_of(LabelId l) const {
    if (l < 0 || static_cast<std::size_t>(l) >= label_to_index_.size()) return -1;
    return label_to_index_[static_cast<std::size_t>(l)];
}

GuideDistribution GuideDistribution::parse(std::string_view text, const Grammar& g,
                                           std::string_view source_name) {
    std::vector<LabelId> order;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<int, std::vector<double>>> keyed_rows;

    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos) ? text.substr(pos)
                                                               : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto tok = split_ws(line);
        if (tok[0] == "terminals") {
            if (!order.empty())
                throw DataError(std::string(source_name) + ": duplicate terminals line");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                LabelId l = g.require_label(tok[i]);
                if (!g.is_terminal(l))
                    throw DataError(std::string(source_name) + ": '" + std::string(tok[i]) +
                                    "' is not a terminal");
                order.push_back(l);
            }
            if (order.size() != g.terminals().size())
                throw DataError(std::string(source_name) +
                                ": terminals line does not match grammar terminal set");
            std::vector<LabelId> sorted = order;
            std::sort(sorted.begin(), sorted.end());
            std::vector<LabelId> expected = g.terminals();
            std::sort(expected.begin(), expected.end());
            if (sorted != expected)
                throw DataError(std::string(source_name) +
                                ": terminals line does not match grammar terminal set");
        } else if (tok[0] == "row") {
            if (order.empty())
                throw DataError(std::string(source_name) + ": row before terminals line");
            if (tok.size() != order.size() + 2)
                throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                                ": row width mismatch");
            int rid = static_cast<int>(parse_int(tok[1], "region id"));
            std::vector<double> row;
            row.reserve(order.size());
            for (std::size_t i = 2; i < tok.size(); ++i)
                row.push_back(parse_double(tok[i], "probability"));
            keyed_rows.emplace_back(rid, std::move(row));
        } else {
            throw DataError(std::string(source_name) + ":" + std::to_string(line_no) +
                            ": expected 'terminals' or 'row'");
        }
    }
    if (keyed_rows.empty()) throw DataError(std::string(source_name) + ": empty guide file");

    rows.resize(keyed_rows.size());
    std::vector<bool> seen(keyed_rows.size(), false);
    for (auto& [rid, row] : keyed_rows) {
        if (rid < 0 || static_cast<std::size_t>(rid) >= rows.size())
            throw DataError(std::string(source_name) + ": region id " + std::to_string(rid) +
                            " outside 0..n-1");
        if (seen[static_cast<std::size_t>(rid)])
            throw DataError(std::string(source_name) + ": duplicate row for region " +
                            std::to_string(rid));
        seen[static_cast<std::size_t>(rid)] = true;
        rows[static_cast<std::size_t>(rid)] = std::move(row);
    }
    return GuideDistribution(std::move(order), std::move(rows));
}

GuideDistribution GuideDistribution::load(const std::filesystem::path& path, const Grammar& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open guide file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), g, path.string());
}

GuideDistribution GuideDistribution::uniform(const Grammar& g, int region_count) {
    const std::size_t t = g.terminals().size();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(region_count),
                                          std::vector<double>(t, 1.0 / static_cast<double>(t)));
    return GuideDistribution(g.terminals(), std::move(rows));
}

std::string GuideDistribution::serialize(const Grammar& g) const {
    std::string out = "terminals";
    for (LabelId l : terminal_order_) out += " " + g.label_name(l);
    out += "\n";
    for (int r = 0; r < region_count(); ++r) {
        out += "row " + std::to_string(r);
        for (double p : rows_[static_cast<std::size_t>(r)]) out += " " + format_double(p);
        out += "\n";
    }
    return out;
}

double log_guide_prob(const GuideDistribution& d, const LabelAssignment& a) {
    if (a.region_count() != d.region_count())
        throw DataError("assignment and guide distribution cover different region counts");
    double total = 0.0;
    for (int i = 0; i < a.region_count(); ++i) {
        int col = d.index_of(a.label(i));
        if (col < 0) throw DataError("assignment label missing from guide terminal order");
        total += std::log(d.row(i)[static_cast<std::size_t>(col)]);
    }
    return total;
}

namespace {

using Signature = std::vector<std::uint16_t>;

struct SignatureOrder {
    // (-log_q, signature) ascending, i.e. best first.
    static bool better(double lq_a, const Signature& sig_a, double lq_b, const Signature& sig_b) {
        if (lq_a != lq_b) return lq_a > lq_b;
        return sig_a < sig_b;
    }
};

ScoredProposal make_proposal(const GuideDistribution& d, Signature sig, double log_q) {
    std::vector<LabelId> labels(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) labels[i] = d.terminal_order()[sig[i]];
    ScoredProposal p;
    p.assignment = LabelAssignment(std::move(labels));
    p.signature = std::move(sig);
    p.log_q = log_q;
    return p;
}

// log_q summed in region order so that top-k and the brute-force oracle
// produce bit-identical doubles for the same assignment.
double signature_log_q(const GuideDistribution& d, const Signature& sig) {
    double total = 0.0;
    for (std::size_t i = 0; i < sig.size(); ++i)
        total += std::log(d.row(static_cast<int>(i))[sig[i]]);
    return total;
}

} // namespace

std::vector<ScoredProposal> top_k_assignments(const GuideDistribution& d, std::int64_t k) {
    if (k < 1) throw DataError("k must be >= 1");
    const int n = d.region_count();
    const int t = d.terminal_count();
    if (n == 0) throw DataError("empty guide distribution");

    // Per region: column indices sorted by (probability desc, column asc).
    // The rank-tie convention makes equal-probability successors
    // lexicographically later, which the frontier search relies on.
    std::vector<std::vector<std::uint16_t>> rank_to_col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& order = rank_to_col[static_cast<std::size_t>(i)];
        order.resize(static_cast<std::size_t>(t));
        for (int c = 0; c < t; ++c) order[static_cast<std::size_t>(c)] = static_cast<std::uint16_t>(c);
        const auto& row = d.row(i);
        std::stable_sort(order.begin(), order.end(), [&](std::uint16_t a, std::uint16_t b) {
            if (row[a] != row[b]) return row[a] > row[b];
            return a < b;
        });
    }

    struct State {
        double log_q;
        Signature sig;       // column indices per region
        std::vector<std::uint16_t> ranks;
        int frontier;        // successors may only degrade regions >= frontier
    };
    struct Worse {
        bool operator()(const State& a, const State& b) const {
            return SignatureOrder::better(b.log_q, b.sig, a.log_q, a.sig);
        }
    };

    std::priority_queue<State, std::vector<State>, Worse> heap;

    State best;
    best.ranks.assign(static_cast<std::size_t>(n), 0);
    best.sig.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) best.sig[static_cast<std::size_t>(i)] = rank_to_col[static_cast<std::size_t>(i)][0];
    best.log_q = signature_log_q(d, best.sig);
    best.frontier = 0;
    heap.push(std::move(best));

    std::vector<ScoredProposal> out;
    out.reserve(static_cast<std::size_t>(std::min<std::int64_t>(k, 1024)));
    while (!heap.empty() && static_cast<std::int64_t>(out.size()) < k) {
        State cur = heap.top();
        heap.pop();

        // Each assignment is reached along exactly one path: increments are
        // applied in non-decreasing region order.
        for (int i = cur.frontier; i < n; ++i) {
            int next_rank = cur.ranks[static_cast<std::size_t>(i)] + 1;
            if (next_rank >= t) continue;
            State succ;
            succ.ranks = cur.ranks;
            succ.ranks[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(next_rank);
            succ.sig = cur.sig;
            succ.sig[static_cast<std::size_t>(i)] =
                rank_to_col[static_cast<std::size_t>(i)][static_cast<std::size_t>(next_rank)];
            succ.log_q = signature_log_q(d, succ.sig);
            succ.frontier = i;
            heap.push(std::move(succ));
        }

        out.push_back(make_proposal(d, std::move(cur.sig), cur.log_q));
    }
    return out;
}

std::vector<ScoredProposal> brute_force_assignments(const GuideDistribution& d) {
    const int n = d.region_count();
    const int t = d.terminal_count();
    if (n == 0) throw DataError("empty guide distribution");
    double space = std::pow(static_cast<double>(t), static_cast<double>(n));
    if (space > 1e6) throw DataError("assignment space too large for brute force");

    std::vector<ScoredProposal> out;
    out.reserve(static_cast<std::size_t>(space));
    Signature sig(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.push_back(make_proposal(d, sig, signature_log_q(d, sig)));
        int i = n - 1;
        while (i >= 0 && sig[static_cast<std::size_t>(i)] + 1 == t) {
            sig[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++sig[static_cast<std::size_t>(i)];
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredProposal& a, const ScoredProposal& b) {
        return SignatureOrder::better(a.log_q, a.signature, b.log_q, b.signature);
    });
    return out;
}

std::vector<ScoredProposal> sample_assignments(const GuideDistribution& d, std::int64_t k,
                                               std::uint64_t seed) {
    if (k < 1) throw DataError("k must be >= 1");
    const int n = d.region_count();
    if (n == 0) throw DataError("empty guide distribution");

    struct SigHash {
        std::size_t operator()(const Signature& s) const {
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (std::uint16_t v : s) {
                h ^= v;
                h *= 0x100000001b3ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };

    Rng rng(seed);
    std::unordered_set<Signature, SigHash> seen;
    std::vector<ScoredProposal> out;
    const std::int64_t max_attempts = 100 * k + 100;
    for (std::int64_t attempt = 0;
         attempt < max_attempts && static_cast<std::int64_t>(out.size()) < k; ++attempt) {
        Signature sig(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto& row = d.row(i);
            double u = rng.next_double();
            double acc = 0.0;
            std::uint16_t pick = static_cast<std::uint16_t>(row.size() - 1);
            for (std::size_t c = 0; c < row.size(); ++c) {
                acc += row[c];
                if (u < acc) {
                    pick = static_cast<std::uint16_t>(c);
                    break;
                }
            }
            sig[static_cast<std::size_t>(i)] = pick;
        }
        if (!seen.insert(sig).second) continue;
        double lq = signature_log_q(d, sig);
        out.push_back(make_proposal(d, std::move(sig), lq));
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredProposal& a, const ScoredProposal& b) {
        return SignatureOrder::better(a.log_q, a.signature, b.log_q, b.signature);
    });
    return out;
}

} // namespace ngsp
