#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ngsp/errors.hpp"
#include "ngsp/external.hpp"
#include "test_helpers.hpp"

using namespace ngsp;
using namespace ngsp::testing;
namespace fs = std::filesystem;

namespace {

// Writes a python scorer script and returns the command to run it.
std::string make_scorer(const std::string& name, const std::string& body) {
    fs::path dir = fs::temp_directory_path() / "ngsp_test_scorers";
    fs::create_directories(dir);
    fs::path path = dir / name;
    std::ofstream out(path);
    out << "#!/usr/bin/env python3\nimport sys\n" << body;
    out.close();
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
    return "python3 " + path.string();
}

const char* kEchoBody = R"(
qp, rp = sys.argv[1], sys.argv[2]
with open(qp) as f, open(rp, "w") as o:
    for line in f:
        qid = line.split("\t")[0]
        o.write(f"{qid}\t0.5\n")
)";

std::vector<ScorerQuery> sample_queries(const Grammar& g) {
    std::vector<ScorerQuery> qs;
    qs.push_back({QueryKind::Geometry, g.require_label("A"), {0, 1}, {}});
    qs.push_back({QueryKind::Layout, g.root(), {0, 1, 2},
                  {g.require_label("A"), g.require_label("A"), g.require_label("B")}});
    qs.push_back({QueryKind::RegionLabel, g.require_label("B"), {2}, {}});
    return qs;
}

} // namespace

TEST_SUITE("external") {

TEST_CASE("query file format") {
    Grammar g = g1();
    auto text = format_query_file(g, "shape9", sample_queries(g));
    CHECK(text ==
          "0\tshape9\tgeom\tA\t0,1\t-\n"
          "1\tshape9\tlayout\tr\t0,1,2\tA,A,B\n"
          "2\tshape9\tregion_label\tB\t2\t-\n");
}

TEST_CASE("response parsing accepts complete answers in any order") {
    auto v = parse_response_file("2\t0.25\n0\t1\n1\t0\n", 3);
    CHECK(v == std::vector<double>{1.0, 0.0, 0.25});
}

TEST_CASE("response violations raise ScorerError") {
    CHECK_THROWS_WITH_AS(parse_response_file("0\t0.5\n", 2),
                         doctest::Contains("IncompleteResponse"), ScorerError);
    CHECK_THROWS_WITH_AS(parse_response_file("0\t0.5\n0\t0.5\n", 1),
                         doctest::Contains("DuplicateResponse"), ScorerError);
    CHECK_THROWS_WITH_AS(parse_response_file("0\t1.3\n", 1),
                         doctest::Contains("ScoreOutOfRange"), ScorerError);
    CHECK_THROWS_AS(parse_response_file("7\t0.5\n", 1), ScorerError);
}

TEST_CASE("echo scorer answers every query with 0.5") {
    Grammar g = g1();
    auto cmd = make_scorer("echo_scorer.py", kEchoBody);
    auto values = run_external_scorer(cmd, 30.0, g, "s", "/dev/null", sample_queries(g));
    REQUIRE(values.size() == 3);
    for (double v : values) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("external bank scores through the batch protocol") {
    Grammar g = g1();
    Shape s = s1();
    auto cmd = make_scorer("echo_half.py", kEchoBody);
    ScorerBank bank = ScorerBank::external(cmd);
    LikelihoodEvaluator ev(bank, g, s, "/dev/null");
    // Occupied non-root labels all score 0.5 -> geometric mean 0.5.
    CHECK(ev.geometry(assign(g, {"a1", "a2", "B"})) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("scorer omitting a query id fails") {
    Grammar g = g1();
    auto cmd = make_scorer("partial.py", R"(
qp, rp = sys.argv[1], sys.argv[2]
with open(qp) as f, open(rp, "w") as o:
    first = f.readline().split("\t")[0]
    o.write(f"{first}\t0.5\n")
)");
    CHECK_THROWS_WITH_AS(run_external_scorer(cmd, 30.0, g, "s", "/dev/null", sample_queries(g)),
                         doctest::Contains("IncompleteResponse"), ScorerError);
}

TEST_CASE("scorer returning out-of-range value fails") {
    Grammar g = g1();
    auto cmd = make_scorer("oob.py", R"(
qp, rp = sys.argv[1], sys.argv[2]
with open(qp) as f, open(rp, "w") as o:
    for line in f:
        o.write(f"{line.split(chr(9))[0]}\t1.3\n")
)");
    CHECK_THROWS_WITH_AS(run_external_scorer(cmd, 30.0, g, "s", "/dev/null", sample_queries(g)),
                         doctest::Contains("ScoreOutOfRange"), ScorerError);
}

TEST_CASE("nonzero exit code fails") {
    Grammar g = g1();
    auto cmd = make_scorer("boom.py", "sys.exit(4)\n");
    CHECK_THROWS_WITH_AS(run_external_scorer(cmd, 30.0, g, "s", "/dev/null", sample_queries(g)),
                         doctest::Contains("exited with code 4"), ScorerError);
}

TEST_CASE("timeout kills the scorer") {
    Grammar g = g1();
    auto cmd = make_scorer("sleepy.py", "import time\ntime.sleep(30)\n");
    CHECK_THROWS_WITH_AS(run_external_scorer(cmd, 0.5, g, "s", "/dev/null", sample_queries(g)),
                         doctest::Contains("timed out"), ScorerError);
}

} // TEST_SUITE
