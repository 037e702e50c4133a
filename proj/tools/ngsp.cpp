// ngsp: grammar-constrained MAP labeling of region-decomposed shapes.
//
// Subcommands: parse-grammar, synth, split, train, make-negatives, infer,
// evaluate, corrupt, export-colored. Exit codes: 0 success, 1 usage error,
// 2 data error, 3 external scorer error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "ngsp/corruption.hpp"
#include "ngsp/dataset.hpp"
#include "ngsp/errors.hpp"
#include "ngsp/evaluation.hpp"
#include "ngsp/export.hpp"
#include "ngsp/external.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/likelihood.hpp"
#include "ngsp/parallel.hpp"
#include "ngsp/result_io.hpp"
#include "ngsp/rng.hpp"
#include "ngsp/synth.hpp"
#include "ngsp/text_io.hpp"
#include "ngsp/train.hpp"
#include "ngsp/training_data.hpp"

namespace fs = std::filesystem;
using namespace ngsp;

namespace {

struct ScorerSpec {
    bool is_external = false;
    std::string payload; // model path or command line
};

ScorerSpec parse_scorer_spec(const std::string& arg) {
    auto colon = arg.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--scorer", "expected 'builtin:<model>' or 'external:<command>'");
    std::string kind = arg.substr(0, colon);
    ScorerSpec spec;
    spec.payload = arg.substr(colon + 1);
    if (kind == "builtin") {
        spec.is_external = false;
    } else if (kind == "external") {
        spec.is_external = true;
    } else {
        throw CLI::ValidationError("--scorer", "unknown scorer backend '" + kind + "'");
    }
    return spec;
}

ScorerBank load_bank(const ScorerSpec& spec, const Grammar& g) {
    if (spec.is_external) {
        ScorerBank bank = ScorerBank::external(spec.payload);
        if (const char* env = std::getenv("NGSP_SCORER_TIMEOUT_SECS"))
            bank.external_timeout_secs = parse_double(env, "NGSP_SCORER_TIMEOUT_SECS");
        return bank;
    }
    return ScorerBank::load(spec.payload, g);
}

void apply_disable_list(LikelihoodConfig& cfg, const std::string& disable) {
    for (auto part : split_char(disable, ',')) {
        auto t = trim(part);
        if (t.empty()) continue;
        if (t == "geom") cfg.use_geom = false;
        else if (t == "layout") cfg.use_layout = false;
        else if (t == "region") cfg.use_region = false;
        else throw CLI::ValidationError("--disable", "unknown term '" + std::string(t) + "'");
    }
}

std::vector<std::string> resolve_ids(const fs::path& data_dir, const std::string& list_path) {
    if (!list_path.empty()) return read_id_list(list_path);
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(data_dir))
        if (entry.path().extension() == ".regs") ids.push_back(entry.path().stem().string());
    std::sort(ids.begin(), ids.end());
    if (ids.empty()) throw DataError("no .regs files under " + data_dir.string());
    return ids;
}

int cmd_parse_grammar(const std::string& path) {
    Grammar g = Grammar::parse_file(path);
    std::cout << g.serialize();
    return 0;
}

int cmd_synth(const std::string& grammar_name, int count, std::uint64_t seed,
              const std::string& out_dir, bool describe) {
    if (describe) {
        std::cout << describe_generator();
        return 0;
    }
    SynthSpec spec;
    spec.grammar_name = grammar_name;
    spec.count = count;
    spec.seed = seed;
    SynthResult result = generate_dataset(spec);

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / (grammar_name + ".grammar"), std::ios::binary);
        out << builtin_grammar_text(grammar_name);
    }
    for (const auto& item : result.shapes) {
        item.shape.save(fs::path(out_dir) / (item.shape.id + ".regs"));
        item.ground_truth.save(fs::path(out_dir) / (item.shape.id + ".labels"), result.grammar);
    }
    std::cerr << "wrote " << result.shapes.size() << " shapes to " << out_dir << "\n";
    return 0;
}

int cmd_split(const std::string& data_dir, const std::string& grammar_path, int max_per_set,
              int min_per_set, std::uint64_t seed, const std::string& out_dir) {
    Grammar g = Grammar::parse_file(grammar_path);
    Dataset ds = Dataset::load_dir(data_dir, g);
    SplitResult split = build_splits(g, ds, max_per_set, min_per_set, seed);

    fs::create_directories(out_dir);
    auto write_set = [&](const char* name, const std::vector<int>& idxs) {
        std::vector<std::string> ids;
        ids.reserve(idxs.size());
        for (int i : idxs) ids.push_back(ds.at(i).shape.id);
        write_id_list(fs::path(out_dir) / name, ids);
    };
    write_set("train.txt", split.train);
    write_set("val.txt", split.val);
    write_set("test.txt", split.test);
    std::cerr << "split sizes: train=" << split.train.size() << " val=" << split.val.size()
              << " test=" << split.test.size() << "\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& grammar_path,
              const std::string& list_path, const std::string& out_path, std::uint64_t seed,
              int epochs, double lr, int negatives) {
    Grammar g = Grammar::parse_file(grammar_path);
    auto ids = resolve_ids(data_dir, list_path);
    Dataset ds = Dataset::load_dir(data_dir, g, &ids);

    TrainOptions opts;
    opts.seed = seed;
    opts.hyper.epochs = epochs;
    opts.hyper.learning_rate = lr;
    opts.negatives_per_positive = negatives;
    ScorerBank bank = train_builtin_scorers(g, ds, opts);
    bank.save(out_path, g);
    std::cerr << "trained builtin scorer bank on " << ds.size() << " shapes -> " << out_path
              << "\n";
    return 0;
}

int cmd_make_negatives(const std::string& data_dir, const std::string& grammar_path,
                       const std::string& list_path, const std::string& kind_name,
                       int per_positive, std::uint64_t seed, const std::string& out_path) {
    Grammar g = Grammar::parse_file(grammar_path);
    auto ids = resolve_ids(data_dir, list_path);
    Dataset ds = Dataset::load_dir(data_dir, g, &ids);

    const bool layout = kind_name == "layout";
    const ScorerKind kind = layout ? ScorerKind::Layout : ScorerKind::Geometry;
    const NegativeSpec spec = layout ? NegativeSpec::layout() : NegativeSpec::geometry();

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write negatives file: " + out_path);
    long long written = 0;
    for (int si = 0; si < ds.size(); ++si) {
        const LabeledShape& item = ds.at(si);
        auto groups = compute_assignment_groups(g, item.ground_truth);
        for (LabelId l : groups.occupied) {
            if (l == g.root() && !layout) continue;
            if (layout && g.is_terminal(l)) continue;
            for (int k = 0; k < per_positive; ++k) {
                std::uint64_t s = mix_seed(mix_seed(mix_seed(seed, hash_str(item.shape.id)),
                                                    hash_str(g.label_name(l))),
                                           static_cast<std::uint64_t>(k));
                NegativeExample neg;
                try {
                    neg = sample_negative(spec, kind, g, ds, si, l, s);
                } catch (const DataError&) {
                    continue;
                }
                out << ds.at(neg.shape_index).shape.id << '\t' << g.label_name(l) << '\t'
                    << (layout ? "layout" : "geom") << '\t' << neg_strategy_name(neg.strategy)
                    << '\t';
                for (std::size_t i = 0; i < neg.regions.size(); ++i)
                    out << (i ? "," : "") << neg.regions[i];
                out << '\t';
                if (neg.child_tags.empty()) {
                    out << '-';
                } else {
                    for (std::size_t i = 0; i < neg.child_tags.size(); ++i)
                        out << (i ? "," : "") << g.label_name(neg.child_tags[i]);
                }
                out << '\n';
                ++written;
            }
        }
    }
    std::cerr << "wrote " << written << " negatives to " << out_path << "\n";
    return 0;
}

struct InferFlags {
    std::int64_t k = 10000;
    std::string disable;
    bool no_guide = false;
    bool stochastic = false;
    bool include_guide_term = false;
    std::uint64_t seed = 0;
    int jobs = 0;
};

int cmd_infer(const std::string& data_dir, const std::string& grammar_path,
              const std::string& list_path, const std::string& scorer_arg,
              const std::string& guide_dir, const std::string& out_dir, const InferFlags& flags) {
    Grammar g = Grammar::parse_file(grammar_path);
    ScorerSpec scorer = parse_scorer_spec(scorer_arg);
    ScorerBank bank = load_bank(scorer, g);
    auto ids = resolve_ids(data_dir, list_path);

    LikelihoodConfig cfg;
    cfg.k = flags.k;
    cfg.include_guide_term = flags.include_guide_term;
    apply_disable_list(cfg, flags.disable);

    fs::create_directories(out_dir);
    int jobs = flags.jobs > 0 ? flags.jobs
                              : static_cast<int>(std::thread::hardware_concurrency());
    parallel_for(static_cast<int>(ids.size()), jobs, [&](int idx) {
        const std::string& id = ids[static_cast<std::size_t>(idx)];
        fs::path regs_path = fs::path(data_dir) / (id + ".regs");
        Shape shape = Shape::load(regs_path);

        GuideDistribution guide;
        if (flags.no_guide) {
            guide = GuideDistribution::uniform(g, shape.region_count());
        } else if (!guide_dir.empty()) {
            guide = GuideDistribution::load(fs::path(guide_dir) / (id + ".guide"), g);
        } else {
            if (scorer.is_external)
                throw DataError("external scorer needs --guide-dir or --no-guide "
                                "(no builtin guide head available)");
            guide = builtin_guide(bank, g, shape);
        }
        if (guide.region_count() != shape.region_count())
            throw DataError("guide for shape '" + id + "' covers " +
                            std::to_string(guide.region_count()) + " regions, shape has " +
                            std::to_string(shape.region_count()));

        std::vector<ScoredProposal> proposals =
            flags.stochastic
                ? sample_assignments(guide, cfg.k, mix_seed(flags.seed, hash_str(id)))
                : top_k_assignments(guide, cfg.k);
        ScoredProposal best = infer_proposals(cfg, bank, g, shape, std::move(proposals), regs_path);
        save_result(fs::path(out_dir) / (id + ".result"), best, cfg.k, g);
    });
    std::cerr << "inferred " << ids.size() << " shapes -> " << out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& data_dir, const std::string& grammar_path,
                 const std::string& list_path, const std::string& pred_dir,
                 const std::string& out_path, bool terminals_only, const std::string& zero_union,
                 bool per_shape) {
    Grammar g = Grammar::parse_file(grammar_path);
    auto ids = resolve_ids(data_dir, list_path);
    Dataset ds = Dataset::load_dir(data_dir, g, &ids);

    std::vector<LabelAssignment> preds;
    preds.reserve(ids.size());
    for (int i = 0; i < ds.size(); ++i) {
        const std::string& id = ds.at(i).shape.id;
        fs::path result_path = fs::path(pred_dir) / (id + ".result");
        fs::path labels_path = fs::path(pred_dir) / (id + ".labels");
        if (fs::exists(result_path)) {
            preds.push_back(
                load_result(result_path, g, ds.at(i).shape.region_count()).assignment);
        } else if (fs::exists(labels_path)) {
            preds.push_back(
                LabelAssignment::load(labels_path, g, ds.at(i).shape.region_count()));
        } else {
            throw DataError("no prediction for shape '" + id + "' under " + pred_dir);
        }
    }

    MiouOptions opts;
    opts.terminals_only = terminals_only;
    opts.zero_union_counts_as_zero = zero_union == "zero";
    opts.per_shape = per_shape;
    IouReport report = miou(g, ds.items, preds, opts);

    std::string table;
    for (const auto& row : report.rows) {
        table += g.label_name(row.label) + "\t" + format_double(row.intersection) + "\t" +
                 format_double(row.union_count) + "\t" + format_double_sig9(row.iou) + "\n";
    }
    table += "mean_miou\t" + format_double_sig9(report.mean_miou) + "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw DataError("cannot write report: " + out_path);
        out << table;
    }
    std::cout << table;
    return 0;
}

int cmd_corrupt(const std::string& data_dir, const std::string& list_path, int level,
                std::uint64_t seed, const std::string& out_dir, const std::string& grammar_path) {
    Grammar g = Grammar::parse_file(grammar_path);
    auto ids = resolve_ids(data_dir, list_path);
    Dataset ds = Dataset::load_dir(data_dir, g, &ids);

    fs::create_directories(out_dir);
    long long before = 0, after = 0;
    for (int i = 0; i < ds.size(); ++i) {
        const LabeledShape& item = ds.at(i);
        CorruptedShape c = corrupt_shape(item.shape, item.ground_truth, level, seed);
        before += item.shape.region_count();
        after += c.shape.region_count();
        c.shape.save(fs::path(out_dir) / (c.shape.id + ".regs"));
        c.labels.save(fs::path(out_dir) / (c.shape.id + ".labels"), g);
        std::ofstream prov(fs::path(out_dir) / (c.shape.id + ".parents"), std::ios::binary);
        for (std::size_t child = 0; child < c.parent_of.size(); ++child)
            prov << child << " " << c.parent_of[child] << "\n";
    }
    std::cerr << "corrupted " << ds.size() << " shapes at level " << level << " -> " << out_dir
              << " (realized region multiplier "
              << format_double_sig9(static_cast<double>(after) / static_cast<double>(before))
              << ")\n";
    return 0;
}

int cmd_export_colored(const std::string& regs_path, const std::string& labels_path,
                       const std::string& grammar_path, const std::string& out_path,
                       std::uint64_t palette_seed) {
    Grammar g = Grammar::parse_file(grammar_path);
    Shape shape = Shape::load(regs_path);
    LabelAssignment labels = LabelAssignment::load(labels_path, g, shape.region_count());
    export_colored_ply(shape, labels, g, out_path, palette_seed);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"NGSP: grammar-constrained MAP labeling of region-decomposed 3D shapes"};
    app.require_subcommand(1);

    // parse-grammar
    std::string pg_path;
    auto* pg = app.add_subcommand("parse-grammar", "validate a grammar file and print it back");
    pg->add_option("grammar", pg_path, "grammar file")->required();

    // synth
    std::string sy_grammar = "toychair", sy_out;
    int sy_count = 1;
    std::uint64_t sy_seed = 0;
    bool sy_describe = false;
    auto* sy = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    sy->add_option("--grammar", sy_grammar, "bundled grammar name");
    sy->add_option("--count", sy_count, "number of shapes");
    sy->add_option("--seed", sy_seed, "generation seed");
    sy->add_option("--out", sy_out, "output directory");
    sy->add_flag("--describe", sy_describe, "print the generator parameter table and exit");

    // split
    std::string sp_data, sp_grammar, sp_out;
    int sp_max = 400, sp_min = 50;
    std::uint64_t sp_seed = 0;
    auto* sp = app.add_subcommand("split", "build label-balanced train/val/test splits");
    sp->add_option("--data", sp_data, "dataset directory")->required();
    sp->add_option("--grammar", sp_grammar, "grammar file")->required();
    sp->add_option("--max", sp_max, "max shapes per set");
    sp->add_option("--min", sp_min, "min shapes per set");
    sp->add_option("--seed", sp_seed, "seed");
    sp->add_option("--out", sp_out, "output directory")->required();

    // train
    std::string tr_data, tr_grammar, tr_list, tr_out;
    std::uint64_t tr_seed = 0;
    int tr_epochs = 2000, tr_negs = 5;
    double tr_lr = 5e-2;
    auto* tr = app.add_subcommand("train", "train the builtin scorer bank");
    tr->add_option("--data", tr_data, "dataset directory")->required();
    tr->add_option("--grammar", tr_grammar, "grammar file")->required();
    tr->add_option("--list", tr_list, "train shape id list");
    tr->add_option("--out", tr_out, "model output path")->required();
    tr->add_option("--seed", tr_seed, "seed");
    tr->add_option("--epochs", tr_epochs, "training epochs");
    tr->add_option("--lr", tr_lr, "learning rate");
    tr->add_option("--negatives-per-positive", tr_negs, "negatives per positive example");

    // make-negatives
    std::string mn_data, mn_grammar, mn_list, mn_kind = "geom", mn_out;
    int mn_per = 5;
    std::uint64_t mn_seed = 0;
    auto* mn = app.add_subcommand("make-negatives", "emit a negatives file for scorer training");
    mn->add_option("--data", mn_data, "dataset directory")->required();
    mn->add_option("--grammar", mn_grammar, "grammar file")->required();
    mn->add_option("--list", mn_list, "shape id list");
    mn->add_option("--kind", mn_kind, "geom or layout")
        ->check(CLI::IsMember({"geom", "layout"}));
    mn->add_option("--per-positive", mn_per, "negatives per (shape, label)");
    mn->add_option("--seed", mn_seed, "seed");
    mn->add_option("--out", mn_out, "output .negs path")->required();

    // infer
    std::string in_data, in_grammar, in_list, in_scorer, in_guide_dir, in_out;
    InferFlags in_flags;
    auto* in = app.add_subcommand("infer", "run MAP inference over shapes");
    in->add_option("--data", in_data, "dataset directory with .regs files")->required();
    in->add_option("--grammar", in_grammar, "grammar file")->required();
    in->add_option("--list", in_list, "shape id list");
    in->add_option("--scorer", in_scorer, "builtin:<model> or external:<command>")->required();
    in->add_option("--guide-dir", in_guide_dir, "directory of .guide files");
    in->add_option("--out", in_out, "output directory for .result files")->required();
    in->add_option("--k", in_flags.k, "number of guide proposals");
    in->add_option("--disable", in_flags.disable, "comma list of terms: geom,layout,region");
    in->add_flag("--no-guide", in_flags.no_guide, "score proposals from a uniform prior");
    in->add_flag("--stochastic", in_flags.stochastic,
                 "sample proposals instead of exact top-k enumeration");
    in->add_flag("--include-guide-term", in_flags.include_guide_term,
                 "add log q to the combined score");
    in->add_option("--seed", in_flags.seed, "seed for stochastic proposals");
    in->add_option("--jobs", in_flags.jobs, "worker threads (default: logical cores)");

    // evaluate
    std::string ev_data, ev_grammar, ev_list, ev_pred, ev_out, ev_zero = "skip";
    bool ev_terminals = false, ev_per_shape = false;
    auto* ev = app.add_subcommand("evaluate", "compute mIoU of predictions against ground truth");
    ev->add_option("--data", ev_data, "dataset directory with ground truth")->required();
    ev->add_option("--grammar", ev_grammar, "grammar file")->required();
    ev->add_option("--list", ev_list, "shape id list");
    ev->add_option("--pred", ev_pred, "directory of .result or .labels predictions")->required();
    ev->add_option("--out", ev_out, "report output path");
    ev->add_flag("--terminals-only", ev_terminals, "average over terminal labels only");
    ev->add_option("--zero-union", ev_zero, "zero-union label handling")
        ->check(CLI::IsMember({"skip", "zero"}));
    ev->add_flag("--per-shape", ev_per_shape, "average per-shape mIoU instead of pooling");

    // corrupt
    std::string co_data, co_grammar, co_list, co_out;
    int co_level = 2;
    std::uint64_t co_seed = 0;
    auto* co = app.add_subcommand("corrupt", "split regions into sub-regions (2X/4X)");
    co->add_option("--data", co_data, "dataset directory")->required();
    co->add_option("--grammar", co_grammar, "grammar file")->required();
    co->add_option("--list", co_list, "shape id list");
    co->add_option("--level", co_level, "corruption level")->check(CLI::IsMember({1, 2, 4}));
    co->add_option("--seed", co_seed, "seed");
    co->add_option("--out", co_out, "output directory")->required();

    // export-colored
    std::string xc_regs, xc_labels, xc_grammar, xc_out;
    std::uint64_t xc_seed = 0;
    auto* xc = app.add_subcommand("export-colored", "write a label-colored ASCII PLY point cloud");
    xc->add_option("--regs", xc_regs, "region file")->required();
    xc->add_option("--labels", xc_labels, "assignment file")->required();
    xc->add_option("--grammar", xc_grammar, "grammar file")->required();
    xc->add_option("--out", xc_out, "output .ply path")->required();
    xc->add_option("--palette-seed", xc_seed, "palette seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (pg->parsed()) return cmd_parse_grammar(pg_path);
        if (sy->parsed()) {
            if (!sy_describe && sy_out.empty()) {
                std::cerr << "ngsp synth: --out is required\n";
                return 1;
            }
            return cmd_synth(sy_grammar, sy_count, sy_seed, sy_out, sy_describe);
        }
        if (sp->parsed()) return cmd_split(sp_data, sp_grammar, sp_max, sp_min, sp_seed, sp_out);
        if (tr->parsed())
            return cmd_train(tr_data, tr_grammar, tr_list, tr_out, tr_seed, tr_epochs, tr_lr,
                             tr_negs);
        if (mn->parsed())
            return cmd_make_negatives(mn_data, mn_grammar, mn_list, mn_kind, mn_per, mn_seed,
                                      mn_out);
        if (in->parsed())
            return cmd_infer(in_data, in_grammar, in_list, in_scorer, in_guide_dir, in_out,
                             in_flags);
        if (ev->parsed())
            return cmd_evaluate(ev_data, ev_grammar, ev_list, ev_pred, ev_out, ev_terminals,
                                ev_zero, ev_per_shape);
        if (co->parsed())
            return cmd_corrupt(co_data, co_list, co_level, co_seed, co_out, co_grammar);
        if (xc->parsed())
            return cmd_export_colored(xc_regs, xc_labels, xc_grammar, xc_out, xc_seed);
    } catch (const ScorerError& e) {
        std::cerr << "ngsp: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "ngsp: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ngsp: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
