#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngsp/dataset.hpp"
#include "ngsp/evaluation.hpp"
#include "ngsp/grammar.hpp"
#include "ngsp/result_io.hpp"
#include "ngsp/shape.hpp"

using namespace ngsp;
namespace fs = std::filesystem;

#ifndef NGSP_CLI_PATH
#define NGSP_CLI_PATH "ngsp"
#endif

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(NGSP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string capture_cli(const std::string& args, const fs::path& tmp) {
    std::string cmd = std::string(NGSP_CLI_PATH) + " " + args + " >" + tmp.string() + " 2>/dev/null";
    std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes: usage, data, success") {
    TempDir tmp("ngsp_cli_codes");
    CHECK(run_cli("definitely-not-a-subcommand") == 1);
    CHECK(run_cli("") == 1);

    std::ofstream(tmp.path / "bad.grammar") << "r -> a ; b\n";
    CHECK(run_cli("parse-grammar " + (tmp.path / "bad.grammar").string()) == 2);

    std::ofstream(tmp.path / "ok.grammar") << "root: r\nr -> a ; b\n";
    CHECK(run_cli("parse-grammar " + (tmp.path / "ok.grammar").string()) == 0);
}

TEST_CASE("parse-grammar prints the canonical form") {
    TempDir tmp("ngsp_cli_pg");
    std::ofstream(tmp.path / "g.grammar") << "# c\nroot: r\nr   ->  a ;\tb\n";
    auto out = capture_cli("parse-grammar " + (tmp.path / "g.grammar").string(),
                           tmp.path / "out.txt");
    CHECK(out == "root: r\nr -> a ; b\n");
}

TEST_CASE("small pipeline: synth, split, train, infer, evaluate") {
    TempDir tmp("ngsp_cli_pipeline");
    const auto data = tmp.path / "data";
    const auto grammar = data / "toychair.grammar";

    REQUIRE(run_cli("synth --grammar toychair --count 156 --seed 5 --out " + data.string()) == 0);
    REQUIRE(fs::exists(grammar));
    REQUIRE(run_cli("split --data " + data.string() + " --grammar " + grammar.string() +
                    " --out " + tmp.path.string()) == 0);
    REQUIRE(fs::exists(tmp.path / "train.txt"));

    const auto model = tmp.path / "model.ngsp";
    REQUIRE(run_cli("train --data " + data.string() + " --grammar " + grammar.string() +
                    " --list " + (tmp.path / "train.txt").string() + " --epochs 60 --seed 2" +
                    " --out " + model.string()) == 0);
    REQUIRE(fs::exists(model));

    const auto out1 = tmp.path / "out1";
    const auto out2 = tmp.path / "out2";
    const std::string infer_args = "infer --data " + data.string() + " --grammar " +
                                   grammar.string() + " --list " +
                                   (tmp.path / "test.txt").string() + " --scorer builtin:" +
                                   model.string() + " --k 200 --jobs 2";
    REQUIRE(run_cli(infer_args + " --out " + out1.string()) == 0);
    REQUIRE(run_cli(infer_args + " --out " + out2.string()) == 0);

    // Determinism: identical result files across the two runs.
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(out1)) {
        CHECK(file_bytes(entry.path()) == file_bytes(out2 / entry.path().filename()));
        ++compared;
    }
    CHECK(compared == 52); // 156 shapes -> 52 per split

    // Evaluate; the reported mean must match a recomputation from the result
    // files themselves (the round-trip invariant).
    auto report = capture_cli("evaluate --data " + data.string() + " --grammar " +
                                  grammar.string() + " --list " +
                                  (tmp.path / "test.txt").string() + " --pred " + out1.string(),
                              tmp.path / "rep.txt");
    auto pos = report.find("mean_miou\t");
    REQUIRE(pos != std::string::npos);
    const double reported = std::stod(report.substr(pos + 10));
    {
        Grammar g2 = Grammar::parse_file(grammar);
        std::vector<LabeledShape> items;
        std::vector<LabelAssignment> preds;
        for (const auto& id : read_id_list(tmp.path / "test.txt")) {
            LabeledShape item;
            item.shape = Shape::load(data / (id + ".regs"));
            item.ground_truth =
                LabelAssignment::load(data / (id + ".labels"), g2, item.shape.region_count());
            preds.push_back(
                load_result(out1 / (id + ".result"), g2, item.shape.region_count()).assignment);
            items.push_back(std::move(item));
        }
        double recomputed = miou(g2, items, preds).mean_miou;
        CHECK(reported == doctest::Approx(recomputed).epsilon(1e-9));
    }

    // The no-L ablation equals a k=1 run.
    const auto noL = tmp.path / "noL";
    const auto k1 = tmp.path / "k1";
    REQUIRE(run_cli("infer --data " + data.string() + " --grammar " + grammar.string() +
                    " --list " + (tmp.path / "test.txt").string() + " --scorer builtin:" +
                    model.string() + " --k 200 --disable geom,layout,region --out " +
                    noL.string()) == 0);
    REQUIRE(run_cli("infer --data " + data.string() + " --grammar " + grammar.string() +
                    " --list " + (tmp.path / "test.txt").string() + " --scorer builtin:" +
                    model.string() + " --k 1 --out " + k1.string()) == 0);
    Grammar g = Grammar::parse_file(grammar);
    for (const auto& entry : fs::directory_iterator(noL)) {
        Shape s = Shape::load(data / (entry.path().stem().string() + ".regs"));
        auto a = load_result(entry.path(), g, s.region_count());
        auto b = load_result(k1 / entry.path().filename(), g, s.region_count());
        CHECK(a.assignment == b.assignment);
    }
}

TEST_CASE("export-colored emits one vertex per point") {
    TempDir tmp("ngsp_cli_ply");
    const auto data = tmp.path / "data";
    REQUIRE(run_cli("synth --grammar toychair --count 1 --seed 9 --out " + data.string()) == 0);
    const auto grammar = data / "toychair.grammar";
    std::string id = "toychair_000000";
    const auto ply = tmp.path / "out.ply";
    REQUIRE(run_cli("export-colored --regs " + (data / (id + ".regs")).string() + " --labels " +
                    (data / (id + ".labels")).string() + " --grammar " + grammar.string() +
                    " --out " + ply.string()) == 0);

    Shape s = Shape::load(data / (id + ".regs"));
    std::size_t points = 0;
    for (const auto& r : s.regions) points += r.points.size();

    std::ifstream in(ply);
    std::string line;
    std::size_t vertex_lines = 0;
    bool header_done = false;
    std::size_t declared = 0;
    while (std::getline(in, line)) {
        if (!header_done) {
            if (line.rfind("element vertex ", 0) == 0)
                declared = static_cast<std::size_t>(std::stoull(line.substr(15)));
            if (line == "end_header") header_done = true;
            continue;
        }
        if (!line.empty()) ++vertex_lines;
    }
    CHECK(declared == points);
    CHECK(vertex_lines == points);
}

TEST_CASE("stochastic mode and no-guide run end to end") {
    TempDir tmp("ngsp_cli_modes");
    const auto data = tmp.path / "data";
    REQUIRE(run_cli("synth --grammar toychair --count 6 --seed 11 --out " + data.string()) == 0);
    const auto grammar = data / "toychair.grammar";
    const auto model = tmp.path / "m.ngsp";
    REQUIRE(run_cli("train --data " + data.string() + " --grammar " + grammar.string() +
                    " --epochs 20 --out " + model.string()) == 0);
    CHECK(run_cli("infer --data " + data.string() + " --grammar " + grammar.string() +
                  " --scorer builtin:" + model.string() + " --k 50 --stochastic --seed 3 --out " +
                  (tmp.path / "st").string()) == 0);
    CHECK(run_cli("infer --data " + data.string() + " --grammar " + grammar.string() +
                  " --scorer builtin:" + model.string() + " --k 50 --no-guide --out " +
                  (tmp.path / "ng").string()) == 0);
}

TEST_CASE("external scorer failures exit with code 3") {
    TempDir tmp("ngsp_cli_ext3");
    const auto data = tmp.path / "data";
    REQUIRE(run_cli("synth --grammar toychair --count 2 --seed 13 --out " + data.string()) == 0);
    const auto grammar = data / "toychair.grammar";
    CHECK(run_cli("infer --data " + data.string() + " --grammar " + grammar.string() +
                  " --scorer external:/bin/false --no-guide --k 5 --jobs 1 --out " +
                  (tmp.path / "x").string()) == 3);
}

TEST_CASE("corrupt writes regions, labels and provenance") {
    TempDir tmp("ngsp_cli_corrupt");
    const auto data = tmp.path / "data";
    REQUIRE(run_cli("synth --grammar toychair --count 2 --seed 4 --out " + data.string()) == 0);
    const auto grammar = data / "toychair.grammar";
    const auto out = tmp.path / "c2";
    REQUIRE(run_cli("corrupt --data " + data.string() + " --grammar " + grammar.string() +
                    " --level 2 --seed 6 --out " + out.string()) == 0);
    Shape before = Shape::load(data / "toychair_000000.regs");
    Shape after = Shape::load(out / "toychair_000000.regs");
    CHECK(after.region_count() > before.region_count());
    CHECK(fs::exists(out / "toychair_000000.labels"));
    CHECK(fs::exists(out / "toychair_000000.parents"));
}

} // TEST_SUITE
