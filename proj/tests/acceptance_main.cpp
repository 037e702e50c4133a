// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// Criteria:
//   1. exact k-best enumeration vs. the brute-force oracle
//   2. likelihood algebra identities at 1e-12
//   3. mIoU vs. a per-point counting oracle
//   4. end-to-end trend on the toychair benchmark (400 train / 100 test)
//   5. negative sampler frequencies, filter and schedule
//   6. corruption invariants
//   7. single-shape inference throughput at k = 10000
//   8. byte-identical CLI pipeline reruns

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "ngsp/corruption.hpp"
#include "ngsp/dataset.hpp"
#include "ngsp/evaluation.hpp"
#include "ngsp/likelihood.hpp"
#include "ngsp/result_io.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/synth.hpp"
#include "ngsp/train.hpp"
#include "ngsp/training_data.hpp"
#include "test_helpers.hpp"

using namespace ngsp;
using namespace ngsp::testing;
namespace fs = std::filesystem;

#ifndef NGSP_CLI_PATH
#define NGSP_CLI_PATH "ngsp"
#endif

namespace {

constexpr std::uint64_t kBenchmarkSeed = 20240817;

struct Check {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool report(int number, const std::string& name, const Check& check, double secs) {
    std::printf("%s criterion %d: %s (%.1f s)%s%s\n", check.ok ? "PASS" : "FAIL", number,
                name.c_str(), secs, check.detail.empty() ? "" : " -- ",
                check.detail.c_str());
    std::fflush(stdout);
    return check.ok;
}

// ---------------------------------------------------------------- criterion 1

Check criterion_kbest() {
    Check c;
    std::vector<Grammar> grammars;
    grammars.push_back(Grammar::parse("root: r\nr -> t0 ; t1"));
    grammars.push_back(Grammar::parse("root: r\nr -> t0 ; t1 ; t2"));
    grammars.push_back(Grammar::parse("root: r\nr -> t0 ; t1 ; t2 ; t3"));
    Rng rng(kBenchmarkSeed);
    const auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const Grammar& g = grammars[rng.next_below(grammars.size())];
        int n = 1 + static_cast<int>(rng.next_below(6));
        auto d = random_guide(g, n, rng);
        auto oracle = brute_force_assignments(d);
        for (std::int64_t k :
             {std::int64_t{1}, std::int64_t{5}, static_cast<std::int64_t>(oracle.size())}) {
            auto got = top_k_assignments(d, k);
            std::size_t expect = std::min<std::size_t>(static_cast<std::size_t>(k), oracle.size());
            c.require(got.size() == expect, "top-k size mismatch");
            for (std::size_t i = 0; i < got.size() && c.ok; ++i) {
                c.require(got[i].signature == oracle[i].signature,
                          "order mismatch at trial " + std::to_string(trial));
                c.require(std::abs(got[i].log_q - oracle[i].log_q) <= 1e-12,
                          "log_q mismatch at trial " + std::to_string(trial));
            }
        }
    }
    c.require(seconds_since(start) < 5.0, "k-best exactness exceeded 5 s");
    return c;
}

// ---------------------------------------------------------------- criterion 2

Check criterion_likelihood_algebra() {
    Check c;
    const double tol = 1e-12;
    Grammar g = g1();
    Shape s = s1();

    // Geometric-mean collapse: every occupied label scoring 0.3.
    {
        ScorerBank bank = unit_bank(g);
        for (LabelId l = 0; l < g.label_count(); ++l)
            if (l != g.root()) bank.geometry[l] = constant_logistic(0.3, kGroupFeatureDim);
        const double expect = std::log(0.3);
        for (auto labels : {std::vector<std::string>{"B", "B", "B"},
                            std::vector<std::string>{"a1", "a1", "a1"},
                            std::vector<std::string>{"a1", "a2", "B"}}) {
            double v = score_geometry(bank, g, s, assign(g, labels));
            c.require(std::abs(v - expect) <= tol, "all-factors-c geometry identity");
        }
    }

    // Hand fixtures.
    {
        Grammar g2 = Grammar::parse("root: r\nr -> x ; y");
        Shape s2;
        s2.id = "s2";
        s2.regions = {s1().regions[0], s1().regions[1]};
        s2.regions[0].area = s2.regions[1].area = 0.5;
        ScorerBank bank = unit_bank(g2);
        bank.geometry[g2.require_label("x")] = constant_logistic(0.5, kGroupFeatureDim);
        bank.geometry[g2.require_label("y")] = constant_logistic(0.2, kGroupFeatureDim);
        double v = score_geometry(bank, g2, s2, assign(g2, {"x", "y"}));
        c.require(std::abs(v - 0.5 * std::log(0.1)) <= tol, "geometry 0.5/0.2 fixture");

        ScorerBank lbank = unit_bank(g);
        lbank.layout[g.root()] = constant_logistic(0.9, kGroupFeatureDim + g.max_fanout());
        lbank.layout[g.require_label("A")] =
            constant_logistic(0.4, kGroupFeatureDim + g.max_fanout());
        double lv = score_layout(lbank, g, s, assign(g, {"a1", "a2", "a1"}));
        c.require(std::abs(lv - std::log(0.6)) <= tol, "layout 0.9/0.4 fixture");

        ScorerBank rbank = unit_bank(g2);
        rbank.region_label = constant_multinomial({0.8, 0.2}, kGroupFeatureDim);
        rbank.region_area[g2.require_label("x")] = constant_area(0.5, kGroupFeatureDim);
        double rv = score_region_groups(rbank, g2, s2, assign(g2, {"x", "x"}));
        c.require(std::abs(rv - std::log(0.4)) <= 1e-10, "region 0.8*0.5 fixture");
    }

    // Ablation zeroing.
    {
        ScoredProposal p;
        p.log_geom = -1;
        p.log_layout = -2;
        p.log_region = -3;
        LikelihoodConfig cfg;
        c.require(std::abs(combine(cfg, p) + 6.0) <= tol, "combine all terms");
        cfg.use_layout = false;
        c.require(std::abs(combine(cfg, p) + 4.0) <= tol, "combine without layout");
        cfg.use_geom = cfg.use_region = false;
        c.require(combine(cfg, p) == 0.0, "combine all disabled");
    }

    // Permutation invariance.
    {
        ScorerBank bank = unit_bank(g);
        LogisticModel sensitive = constant_logistic(0.5, kGroupFeatureDim);
        sensitive.weights[10] = -1.3;
        sensitive.weights[9] = 0.7;
        bank.geometry[g.require_label("A")] = sensitive;
        Shape sp;
        sp.id = s.id;
        const int perm[3] = {2, 0, 1};
        for (int i = 0; i < 3; ++i) {
            Region r = s.regions[static_cast<std::size_t>(perm[i])];
            r.id = i;
            sp.regions.push_back(std::move(r));
        }
        double a = score_geometry(bank, g, s, assign(g, {"a1", "a2", "B"}));
        double b = score_geometry(bank, g, sp, assign(g, {"B", "a1", "a2"}));
        c.require(std::abs(a - b) <= tol, "permutation invariance");
    }

    // All terms disabled: infer returns the guide argmax.
    {
        Grammar g2 = Grammar::parse("root: r\nr -> x ; y");
        Shape s2;
        s2.id = "s2";
        s2.regions = {s1().regions[0], s1().regions[1]};
        s2.regions[0].area = s2.regions[1].area = 0.5;
        auto d = guide_from_rows(g2, {{0.3, 0.7}, {0.8, 0.2}});
        LikelihoodConfig cfg;
        cfg.use_geom = cfg.use_layout = cfg.use_region = false;
        cfg.k = 4;
        auto best = infer(cfg, unit_bank(g2), g2, d, s2);
        c.require(best.signature == std::vector<std::uint16_t>{1, 0},
                  "no-L returns the guide argmax");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 3

double miou_point_oracle(const Grammar& g, std::span<const LabeledShape> test,
                         std::span<const LabelAssignment> preds) {
    std::map<LabelId, long long> inter, uni;
    for (std::size_t si = 0; si < test.size(); ++si) {
        for (const Region& r : test[si].shape.regions) {
            std::set<LabelId> in_pred, in_gt;
            for (LabelId l : g.path_to_root(preds[si].label(r.id))) in_pred.insert(l);
            for (LabelId l : g.path_to_root(test[si].ground_truth.label(r.id))) in_gt.insert(l);
            for (std::size_t pi = 0; pi < r.points.size(); ++pi) {
                for (LabelId l = 0; l < g.label_count(); ++l) {
                    bool p = in_pred.count(l) > 0, t = in_gt.count(l) > 0;
                    if (p && t) ++inter[l];
                    if (p || t) ++uni[l];
                }
            }
        }
    }
    double sum = 0;
    int count = 0;
    for (LabelId l = 0; l < g.label_count(); ++l) {
        if (uni[l] == 0) continue;
        sum += static_cast<double>(inter[l]) / static_cast<double>(uni[l]);
        ++count;
    }
    // Same operation order as the implementation so the match is bit-exact.
    return count == 0 ? 0.0 : 100.0 * (sum / static_cast<double>(count));
}

Check criterion_miou_oracle() {
    Check c;
    Grammar g = Grammar::parse("root: r\nr -> A ; B\nA -> a1 ; a2\nB -> b1 ; b2 ; b3");
    Rng rng(kBenchmarkSeed + 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LabeledShape> test;
        std::vector<LabelAssignment> preds;
        int shapes = 1 + static_cast<int>(rng.next_below(3));
        for (int si = 0; si < shapes; ++si) {
            LabeledShape item;
            item.shape.id = "o" + std::to_string(si);
            int regions = 2 + static_cast<int>(rng.next_below(10));
            std::vector<LabelId> gt_labels, pred_labels;
            for (int i = 0; i < regions; ++i) {
                Region r;
                r.id = i;
                int points = 1 + static_cast<int>(rng.next_below(120));
                for (int p = 0; p < points; ++p)
                    r.points.push_back({rng.next_double(), rng.next_double(), rng.next_double()});
                r.area = 1.0 / regions;
                item.shape.regions.push_back(std::move(r));
                gt_labels.push_back(g.terminals()[rng.next_below(g.terminals().size())]);
                pred_labels.push_back(g.terminals()[rng.next_below(g.terminals().size())]);
            }
            item.ground_truth = LabelAssignment(gt_labels);
            test.push_back(std::move(item));
            preds.push_back(LabelAssignment(pred_labels));
        }
        auto report = miou(g, test, preds);
        double oracle = miou_point_oracle(g, test, preds);
        c.require(report.mean_miou == oracle,
                  "mIoU differs from the per-point oracle at trial " + std::to_string(trial));

        std::vector<LabelAssignment> exact;
        for (const auto& t : test) exact.push_back(t.ground_truth);
        c.require(miou(g, test, exact).mean_miou == 100.0,
                  "perfect prediction must score 100.0");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 4

struct Benchmark {
    Grammar grammar;
    std::vector<LabeledShape> shapes;
    ScorerBank bank;
    std::vector<LabeledShape> test_items;
    std::vector<GuideDistribution> guides;
};

Benchmark build_benchmark() {
    Benchmark b;
    SynthSpec spec;
    spec.grammar_name = "toychair";
    spec.count = 500;
    spec.seed = kBenchmarkSeed;
    auto synth = generate_dataset(spec);
    b.grammar = std::move(synth.grammar);
    b.shapes = std::move(synth.shapes);

    Dataset train;
    for (int i = 0; i < 400; ++i) train.add(b.shapes[static_cast<std::size_t>(i)]);
    TrainOptions opts;
    opts.seed = kBenchmarkSeed;
    b.bank = train_builtin_scorers(b.grammar, train, opts);

    for (int i = 400; i < 500; ++i) b.test_items.push_back(b.shapes[static_cast<std::size_t>(i)]);
    for (const auto& item : b.test_items)
        b.guides.push_back(builtin_guide(b.bank, b.grammar, item.shape));
    return b;
}

Check criterion_trend(const Benchmark& b, std::vector<AblationRow>& rows_out) {
    Check c;
    LikelihoodConfig cfg;
    cfg.k = 10000;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    rows_out = ablation_sweep(cfg, b.bank, b.grammar, b.test_items, b.guides, jobs);

    std::map<std::string, double> by_name;
    for (const auto& row : rows_out) by_name[row.name] = row.mean_miou;
    std::printf("    %-10s %7s\n", "config", "mIoU");
    for (const auto& row : rows_out) std::printf("    %-10s %7.2f\n", row.name.c_str(), row.mean_miou);

    c.require(by_name["full"] >= by_name["no-L"] + 2.0,
              "full NGSP must beat the guide argmax by >= 2.0 mIoU (got " +
                  std::to_string(by_name["full"] - by_name["no-L"]) + ")");
    for (const char* name : {"no-geom", "no-layout", "no-region"})
        c.require(by_name[name] <= by_name["full"] + 0.5,
                  std::string(name) + " exceeds full NGSP by more than 0.5");
    return c;
}

// ---------------------------------------------------------------- criterion 5

Check criterion_negatives() {
    Check c;
    // Schedule buckets.
    auto counts = perturbation_bucket_counts();
    c.require(counts == std::vector<int>{100, 200, 300, 400, 500, 500, 1000, 1500, 2000, 2500, 999},
              "schedule bucket counts");
    Grammar g = g1();
    LabelAssignment gt10 =
        assign(g, {"a1", "a2", "B", "B", "a1", "B", "a2", "a1", "B", "a2"});
    auto schedule = perturbation_schedule(g, gt10, kBenchmarkSeed);
    c.require(schedule.size() == 9999, "schedule size");
    std::size_t pos = 0;
    const int expected_changes[11] = {1, 2, 3, 4, 5, 1, 2, 3, 4, 5, 10};
    for (std::size_t bucket = 0; bucket < counts.size(); ++bucket) {
        for (int i = 0; i < counts[bucket]; ++i, ++pos) {
            int diff = 0;
            for (int r = 0; r < 10; ++r)
                diff += schedule[pos].label(r) != gt10.label(r);
            if (diff != expected_changes[bucket]) {
                c.require(false, "bucket " + std::to_string(bucket) + " change count");
                break;
            }
        }
    }

    // Frequency fixture: every strategy structurally applicable for label A.
    Dataset ds;
    auto add_shape = [&](const std::string& id, const std::vector<std::string>& labels) {
        LabeledShape item;
        item.shape.id = id;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            Region r;
            r.id = static_cast<int>(i);
            double base = static_cast<double>(i);
            r.points = {{base, 0, 0}, {base, 1, 0}};
            r.area = 1.0 / static_cast<double>(labels.size());
            item.shape.regions.push_back(std::move(r));
        }
        item.ground_truth = assign(g, labels);
        ds.add(std::move(item));
    };
    add_shape("main", {"a1", "a2", "a1", "a2", "B", "B", "B", "B"});
    add_shape("alt", {"a2", "a1", "B", "B", "a1", "B", "a2", "B"});
    add_shape("foreign1", {"B", "B", "B", "B"});
    add_shape("foreign2", {"B", "B", "B"});

    const LabelId a_label = g.require_label("A");
    for (ScorerKind kind : {ScorerKind::Geometry, ScorerKind::Layout}) {
        const NegativeSpec spec =
            kind == ScorerKind::Geometry ? NegativeSpec::geometry() : NegativeSpec::layout();
        std::array<int, 6> hist{};
        int violations = 0;

        // Positive for (main, A): regions {0,1,2,3} with tags a1,a2,a1,a2.
        const std::vector<int> pos_regions{0, 1, 2, 3};
        const std::vector<LabelId> pos_tags{g.require_label("a1"), g.require_label("a2"),
                                            g.require_label("a1"), g.require_label("a2")};
        const Shape& shape = ds.at(0).shape;
        for (int draw = 0; draw < 10000; ++draw) {
            auto neg = sample_negative(spec, kind, g, ds, 0, a_label,
                                       mix_seed(kBenchmarkSeed, static_cast<std::uint64_t>(draw)));
            ++hist[static_cast<std::size_t>(neg.strategy)];

            // Independent recomputation of the unchanged-area measure.
            double unchanged;
            if (neg.shape_index != 0) {
                unchanged = 0.0;
            } else {
                double changed = 0.0;
                std::size_t pi = 0, ci = 0;
                while (pi < pos_regions.size() || ci < neg.regions.size()) {
                    if (ci == neg.regions.size() ||
                        (pi < pos_regions.size() && pos_regions[pi] < neg.regions[ci])) {
                        changed += shape.regions[static_cast<std::size_t>(pos_regions[pi])].area;
                        ++pi;
                    } else if (pi == pos_regions.size() || neg.regions[ci] < pos_regions[pi]) {
                        changed += shape.regions[static_cast<std::size_t>(neg.regions[ci])].area;
                        ++ci;
                    } else {
                        if (kind == ScorerKind::Layout && !neg.child_tags.empty() &&
                            neg.child_tags[ci] != pos_tags[pi])
                            changed += shape.regions[static_cast<std::size_t>(pos_regions[pi])].area;
                        ++pi;
                        ++ci;
                    }
                }
                unchanged = 1.0 - changed;
            }
            if (unchanged > 0.95 + 1e-12) ++violations;
        }

        const std::array<double, 6>& mix =
            kind == ScorerKind::Geometry ? NegativeSpec::geometry().mixture
                                         : NegativeSpec::layout().mixture;
        const char* kind_name = kind == ScorerKind::Geometry ? "geom" : "layout";
        std::printf("    %s frequencies:", kind_name);
        for (int i = 0; i < 6; ++i) std::printf(" %.2f", hist[static_cast<std::size_t>(i)] / 100.0);
        std::printf(" (violations %d)\n", violations);
        for (int i = 0; i < 6; ++i) {
            double pct = static_cast<double>(hist[static_cast<std::size_t>(i)]) / 100.0;
            c.require(std::abs(pct - 100.0 * mix[static_cast<std::size_t>(i)]) <= 2.0,
                      std::string(kind_name) + " frequency of strategy " + std::to_string(i));
        }
        c.require(violations == 0, "similarity-filter violations");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 6

Check criterion_corruption() {
    Check c;
    SynthSpec spec;
    spec.count = 30;
    spec.seed = kBenchmarkSeed + 6;
    auto synth = generate_dataset(spec);
    for (const auto& item : synth.shapes) {
        int multi = 0, single = 0;
        for (const auto& r : item.shape.regions)
            (r.faces.size() >= 2 && r.points.size() >= 2 ? multi : single)++;
        auto corr = corrupt_shape(item.shape, item.ground_truth, 2, 77);
        c.require(corr.shape.region_count() == 2 * multi + single,
                  "level-2 corruption must double multi-face regions");

        std::multiset<std::tuple<double, double, double>> before, after;
        for (const auto& r : item.shape.regions)
            for (const auto& p : r.points) before.emplace(p.x, p.y, p.z);
        for (const auto& r : corr.shape.regions)
            for (const auto& p : r.points) after.emplace(p.x, p.y, p.z);
        c.require(before == after, "corruption must preserve every point");

        std::vector<LabeledShape> test{{corr.shape, corr.labels}};
        std::vector<LabelAssignment> preds{corr.labels};
        c.require(miou(synth.grammar, test, preds).mean_miou == 100.0,
                  "lifted ground truth must stay at 100 mIoU");
    }

    // Collinear fixture.
    Region r;
    r.id = 0;
    r.area = 1.0;
    for (double x : {0.0, 1.0, 2.0, 3.0}) {
        r.faces.push_back({{x, 0, 0}, 1.0});
        r.points.push_back({x, 0, 0});
    }
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto [a, b] = split_region(r, seed);
        std::set<double> xs_a, xs_b;
        for (const auto& f : a.faces) xs_a.insert(f.centroid.x);
        for (const auto& f : b.faces) xs_b.insert(f.centroid.x);
        if (*xs_a.begin() > *xs_b.begin()) std::swap(xs_a, xs_b);
        c.require(xs_a == std::set<double>{0.0, 1.0} && xs_b == std::set<double>{2.0, 3.0},
                  "collinear fixture must split {0,1}/{2,3}");
    }
    return c;
}

// ---------------------------------------------------------------- criterion 7

Check criterion_throughput(const Benchmark& b) {
    Check c;
    // Find a synthetic shape whose level-2 corruption has exactly 30 regions.
    LabeledShape shape30;
    bool found = false;
    for (std::uint64_t seed = 0; seed < 400 && !found; ++seed) {
        SynthSpec spec;
        spec.count = 1;
        spec.seed = kBenchmarkSeed + 1000 + seed;
        auto synth = generate_dataset(spec);
        auto corr = corrupt_shape(synth.shapes[0].shape, synth.shapes[0].ground_truth, 2, seed);
        if (corr.shape.region_count() == 30) {
            shape30.shape = std::move(corr.shape);
            shape30.ground_truth = std::move(corr.labels);
            found = true;
        }
    }
    c.require(found, "no 30-region synthetic shape found");
    if (!found) return c;

    auto guide = builtin_guide(b.bank, b.grammar, shape30.shape);
    LikelihoodConfig cfg;
    cfg.k = 10000;
    const auto start = std::chrono::steady_clock::now();
    auto best = infer(cfg, b.bank, b.grammar, guide, shape30.shape);
    const double secs = seconds_since(start);
    std::printf("    30-region shape, k=10000: %.2f s (single core)\n", secs);
    c.require(std::isfinite(best.log_total), "inference produced a non-finite score");
    c.require(secs <= 4.0, "inference took longer than 4 s");
    return c;
}

// ---------------------------------------------------------------- criterion 8

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check criterion_cli_determinism() {
    Check c;
    fs::path base = fs::temp_directory_path() / "ngsp_acceptance_cli";
    fs::remove_all(base);
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(NGSP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    for (int round = 0; round < 2; ++round) {
        fs::path dir = base / ("round" + std::to_string(round));
        fs::path data = dir / "data";
        fs::create_directories(dir);
        if (run("synth --grammar toychair --count 156 --seed 21 --out " + data.string()) != 0) {
            c.require(false, "synth failed");
            return c;
        }
        std::string grammar = (data / "toychair.grammar").string();
        if (run("split --data " + data.string() + " --grammar " + grammar + " --seed 21 --out " +
                dir.string()) != 0) {
            c.require(false, "split failed");
            return c;
        }
        if (run("train --data " + data.string() + " --grammar " + grammar + " --list " +
                (dir / "train.txt").string() + " --seed 21 --epochs 60 --out " +
                (dir / "model.ngsp").string()) != 0) {
            c.require(false, "train failed");
            return c;
        }
        if (run("infer --data " + data.string() + " --grammar " + grammar + " --list " +
                (dir / "test.txt").string() + " --scorer builtin:" +
                (dir / "model.ngsp").string() + " --k 300 --seed 21 --jobs 2 --out " +
                (dir / "results").string()) != 0) {
            c.require(false, "infer failed");
            return c;
        }
        if (run("evaluate --data " + data.string() + " --grammar " + grammar + " --list " +
                (dir / "test.txt").string() + " --pred " + (dir / "results").string() +
                " --out " + (dir / "report.tsv").string()) != 0) {
            c.require(false, "evaluate failed");
            return c;
        }
    }

    fs::path r0 = base / "round0", r1 = base / "round1";
    for (const char* name : {"train.txt", "val.txt", "test.txt", "model.ngsp", "report.tsv"})
        c.require(slurp(r0 / name) == slurp(r1 / name),
                  std::string(name) + " differs between reruns");
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(r0 / "results")) {
        c.require(slurp(entry.path()) == slurp(r1 / "results" / entry.path().filename()),
                  "result file differs: " + entry.path().filename().string());
        ++compared;
    }
    c.require(compared > 0, "no result files produced");
    for (const auto& entry : fs::directory_iterator(r0 / "data")) {
        c.require(slurp(entry.path()) == slurp(r1 / "data" / entry.path().filename()),
                  "synth output differs: " + entry.path().filename().string());
    }
    fs::remove_all(base);
    return c;
}

} // namespace

int main() {
    bool all = true;
    auto timed = [&](int number, const std::string& name, const std::function<Check()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        all &= report(number, name, c, seconds_since(start));
    };

    timed(1, "k-best exactness", criterion_kbest);
    timed(2, "likelihood algebra", criterion_likelihood_algebra);
    timed(3, "mIoU oracle", criterion_miou_oracle);

    Benchmark benchmark;
    const auto bench_start = std::chrono::steady_clock::now();
    bool bench_ok = true;
    try {
        benchmark = build_benchmark();
        std::printf("    benchmark build + training: %.1f s\n", seconds_since(bench_start));
    } catch (const std::exception& e) {
        bench_ok = false;
        Check c;
        c.ok = false;
        c.detail = std::string("benchmark build failed: ") + e.what();
        all &= report(4, "end-to-end trend", c, seconds_since(bench_start));
        all &= report(7, "inference throughput", c, 0.0);
    }
    if (bench_ok) {
        std::vector<AblationRow> rows;
        timed(4, "end-to-end trend", [&] { return criterion_trend(benchmark, rows); });
        timed(5, "negative sampler", criterion_negatives);
        timed(6, "corruption", criterion_corruption);
        timed(7, "inference throughput", [&] { return criterion_throughput(benchmark); });
    } else {
        timed(5, "negative sampler", criterion_negatives);
        timed(6, "corruption", criterion_corruption);
    }
    timed(8, "CLI pipeline determinism", criterion_cli_determinism);

    return all ? 0 : 1;
}
