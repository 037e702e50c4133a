#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "ngsp/corruption.hpp"
#include "ngsp/dataset.hpp"
#include "ngsp/errors.hpp"
#include "ngsp/evaluation.hpp"
#include "ngsp/export.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/guide.hpp"
#include "ngsp/likelihood.hpp"
#include "ngsp/result_io.hpp"
#include "ngsp/synth.hpp"
#include "ngsp/train.hpp"
#include "ngsp/training_data.hpp"

namespace py = pybind11;
using namespace ngsp;

namespace {

std::vector<std::string> assignment_names(const LabelAssignment& a, const Grammar& g) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(a.region_count()));
    for (int i = 0; i < a.region_count(); ++i) out.push_back(g.label_name(a.label(i)));
    return out;
}

LabelAssignment assignment_from_names(const Grammar& g, const std::vector<std::string>& names) {
    std::vector<LabelId> labels;
    labels.reserve(names.size());
    for (const auto& n : names) labels.push_back(g.require_label(n));
    return LabelAssignment(std::move(labels));
}

} // namespace

PYBIND11_MODULE(_ngsp, m) {
    m.doc() = "Grammar-constrained MAP labeling of region-decomposed 3D shapes";

    py::register_exception<GrammarError>(m, "GrammarError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<ScorerError>(m, "ScorerError");

    py::class_<Grammar>(m, "Grammar")
        .def_static("parse", &Grammar::parse, py::arg("text"))
        .def_static("parse_file", &Grammar::parse_file, py::arg("path"))
        .def("serialize", &Grammar::serialize)
        .def_property_readonly("label_count", &Grammar::label_count)
        .def_property_readonly("root", [](const Grammar& g) { return g.label_name(g.root()); })
        .def_property_readonly("labels",
                               [](const Grammar& g) {
                                   std::vector<std::string> out;
                                   for (LabelId l = 0; l < g.label_count(); ++l)
                                       out.push_back(g.label_name(l));
                                   return out;
                               })
        .def_property_readonly("terminals",
                               [](const Grammar& g) {
                                   std::vector<std::string> out;
                                   for (LabelId l : g.terminals()) out.push_back(g.label_name(l));
                                   return out;
                               })
        .def("is_terminal",
             [](const Grammar& g, const std::string& l) { return g.is_terminal(g.require_label(l)); })
        .def("children",
             [](const Grammar& g, const std::string& l) {
                 std::vector<std::string> out;
                 for (LabelId c : g.children(g.require_label(l))) out.push_back(g.label_name(c));
                 return out;
             })
        .def("parent",
             [](const Grammar& g, const std::string& l) -> py::object {
                 LabelId p = g.parent(g.require_label(l));
                 if (p == kNoLabel) return py::none();
                 return py::cast(g.label_name(p));
             })
        .def("path_to_root",
             [](const Grammar& g, const std::string& l) {
                 std::vector<std::string> out;
                 for (LabelId x : g.path_to_root(g.require_label(l)))
                     out.push_back(g.label_name(x));
                 return out;
             })
        .def("child_on_path",
             [](const Grammar& g, const std::string& anc, const std::string& term) {
                 return g.label_name(g.child_on_path(g.require_label(anc), g.require_label(term)));
             })
        .def("tree_distance", [](const Grammar& g, const std::string& a, const std::string& b) {
            return g.tree_distance(g.require_label(a), g.require_label(b));
        });

    py::class_<Shape>(m, "Shape")
        .def_static("load", &Shape::load, py::arg("path"))
        .def_static("parse", [](const std::string& text) { return Shape::parse(text); },
                    py::arg("text"))
        .def("save", &Shape::save, py::arg("path"))
        .def("serialize", &Shape::serialize)
        .def_readonly("id", &Shape::id)
        .def_property_readonly("region_count", &Shape::region_count)
        .def("region_areas",
             [](const Shape& s) {
                 std::vector<double> out;
                 for (const auto& r : s.regions) out.push_back(r.area);
                 return out;
             })
        .def("region_points", [](const Shape& s, int region_id) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : s.regions.at(static_cast<std::size_t>(region_id)).points)
                out.emplace_back(p.x, p.y, p.z);
            return out;
        });

    py::class_<GuideDistribution>(m, "GuideDistribution")
        .def_static("load", &GuideDistribution::load, py::arg("path"), py::arg("grammar"))
        .def_static(
            "from_rows",
            [](const Grammar& g, const std::vector<std::string>& terminal_order,
               const std::vector<std::vector<double>>& rows) {
                std::vector<LabelId> order;
                for (const auto& n : terminal_order) order.push_back(g.require_label(n));
                return GuideDistribution(std::move(order), rows);
            },
            py::arg("grammar"), py::arg("terminal_order"), py::arg("rows"))
        .def_static("uniform", &GuideDistribution::uniform, py::arg("grammar"),
                    py::arg("region_count"))
        .def_property_readonly("region_count", &GuideDistribution::region_count)
        .def("row", &GuideDistribution::row, py::arg("region_id"));

    py::class_<ScoredProposal>(m, "ScoredProposal")
        .def_readonly("log_q", &ScoredProposal::log_q)
        .def_readonly("log_geom", &ScoredProposal::log_geom)
        .def_readonly("log_layout", &ScoredProposal::log_layout)
        .def_readonly("log_region", &ScoredProposal::log_region)
        .def_readonly("log_total", &ScoredProposal::log_total)
        .def("labels", [](const ScoredProposal& p, const Grammar& g) {
            return assignment_names(p.assignment, g);
        });

    m.def(
        "log_guide_prob",
        [](const GuideDistribution& d, const Grammar& g, const std::vector<std::string>& labels) {
            return log_guide_prob(d, assignment_from_names(g, labels));
        },
        py::arg("guide"), py::arg("grammar"), py::arg("labels"));
    m.def("top_k_assignments", &top_k_assignments, py::arg("guide"), py::arg("k"));
    m.def("brute_force_assignments", &brute_force_assignments, py::arg("guide"));
    m.def("sample_assignments", &sample_assignments, py::arg("guide"), py::arg("k"),
          py::arg("seed"));

    py::class_<LikelihoodConfig>(m, "LikelihoodConfig")
        .def(py::init<>())
        .def_readwrite("use_geom", &LikelihoodConfig::use_geom)
        .def_readwrite("use_layout", &LikelihoodConfig::use_layout)
        .def_readwrite("use_region", &LikelihoodConfig::use_region)
        .def_readwrite("k", &LikelihoodConfig::k)
        .def_readwrite("epsilon", &LikelihoodConfig::epsilon)
        .def_readwrite("include_guide_term", &LikelihoodConfig::include_guide_term);

    py::class_<ScorerBank>(m, "ScorerBank")
        .def_static("load", &ScorerBank::load, py::arg("path"), py::arg("grammar"))
        .def_static("external", &ScorerBank::external, py::arg("command"))
        .def("save", &ScorerBank::save, py::arg("path"), py::arg("grammar"));

    m.def(
        "score_geometry",
        [](const ScorerBank& bank, const Grammar& g, const Shape& s,
           const std::vector<std::string>& labels) {
            return score_geometry(bank, g, s, assignment_from_names(g, labels));
        },
        py::arg("bank"), py::arg("grammar"), py::arg("shape"), py::arg("labels"));
    m.def(
        "score_layout",
        [](const ScorerBank& bank, const Grammar& g, const Shape& s,
           const std::vector<std::string>& labels) {
            return score_layout(bank, g, s, assignment_from_names(g, labels));
        },
        py::arg("bank"), py::arg("grammar"), py::arg("shape"), py::arg("labels"));
    m.def(
        "score_region_groups",
        [](const ScorerBank& bank, const Grammar& g, const Shape& s,
           const std::vector<std::string>& labels) {
            return score_region_groups(bank, g, s, assignment_from_names(g, labels));
        },
        py::arg("bank"), py::arg("grammar"), py::arg("shape"), py::arg("labels"));
    m.def("infer", &infer, py::arg("config"), py::arg("bank"), py::arg("grammar"),
          py::arg("guide"), py::arg("shape"), py::arg("regs_path") = std::filesystem::path{});
    m.def("builtin_guide", &builtin_guide, py::arg("bank"), py::arg("grammar"), py::arg("shape"));

    m.def(
        "train_builtin_scorers",
        [](const Grammar& g, const std::string& data_dir, const std::vector<std::string>& ids,
           std::uint64_t seed, int epochs, double lr) {
            Dataset ds = Dataset::load_dir(data_dir, g, ids.empty() ? nullptr : &ids);
            TrainOptions opts;
            opts.seed = seed;
            opts.hyper.epochs = epochs;
            opts.hyper.learning_rate = lr;
            return train_builtin_scorers(g, ds, opts);
        },
        py::arg("grammar"), py::arg("data_dir"), py::arg("ids") = std::vector<std::string>{},
        py::arg("seed") = 0, py::arg("epochs") = 200, py::arg("lr") = 1e-2);

    m.def(
        "miou",
        [](const Grammar& g, const std::string& data_dir, const std::vector<std::string>& ids,
           const std::vector<std::vector<std::string>>& predictions, bool terminals_only) {
            Dataset ds = Dataset::load_dir(data_dir, g, ids.empty() ? nullptr : &ids);
            std::vector<LabelAssignment> preds;
            for (const auto& p : predictions) preds.push_back(assignment_from_names(g, p));
            MiouOptions opts;
            opts.terminals_only = terminals_only;
            auto report = miou(g, ds.items, preds, opts);
            py::dict rows;
            for (const auto& row : report.rows)
                rows[py::cast(g.label_name(row.label))] = row.iou;
            return py::make_tuple(report.mean_miou, rows);
        },
        py::arg("grammar"), py::arg("data_dir"), py::arg("ids"), py::arg("predictions"),
        py::arg("terminals_only") = false);

    m.def(
        "generate_dataset",
        [](const std::string& grammar_name, int count, std::uint64_t seed,
           const std::string& out_dir) {
            SynthSpec spec{grammar_name, count, seed};
            SynthResult result = generate_dataset(spec);
            namespace fs = std::filesystem;
            fs::create_directories(out_dir);
            std::ofstream grammar_out(fs::path(out_dir) / (grammar_name + ".grammar"),
                                      std::ios::binary);
            grammar_out << builtin_grammar_text(grammar_name);
            std::vector<std::string> ids;
            for (const auto& item : result.shapes) {
                item.shape.save(fs::path(out_dir) / (item.shape.id + ".regs"));
                item.ground_truth.save(fs::path(out_dir) / (item.shape.id + ".labels"),
                                       result.grammar);
                ids.push_back(item.shape.id);
            }
            return ids;
        },
        py::arg("grammar_name"), py::arg("count"), py::arg("seed"), py::arg("out_dir"));
    m.def("describe_generator", &describe_generator);

    m.def(
        "corrupt_shape",
        [](const Shape& s, const Grammar& g, const std::vector<std::string>& labels, int level,
           std::uint64_t seed) {
            CorruptedShape c = corrupt_shape(s, assignment_from_names(g, labels), level, seed);
            return py::make_tuple(c.shape, assignment_names(c.labels, g), c.parent_of);
        },
        py::arg("shape"), py::arg("grammar"), py::arg("labels"), py::arg("level"),
        py::arg("seed"));

    m.def("export_colored_ply", &export_colored_ply, py::arg("shape"), py::arg("labels"),
          py::arg("grammar"), py::arg("path"), py::arg("palette_seed") = 0);
    m.def(
        "export_colored",
        [](const Shape& s, const Grammar& g, const std::vector<std::string>& labels,
           const std::filesystem::path& path, std::uint64_t palette_seed) {
            export_colored_ply(s, assignment_from_names(g, labels), g, path, palette_seed);
        },
        py::arg("shape"), py::arg("grammar"), py::arg("labels"), py::arg("path"),
        py::arg("palette_seed") = 0);
}
