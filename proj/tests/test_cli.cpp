#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "coa/cli.hpp"
#include "coa/scoring.hpp"
#include "support/random_graphs.hpp"

namespace fs = std::filesystem;
using coa::testing::data_dir;
using coa::testing::read_text;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "coa");
  std::ostringstream out, err;
  const int code = coa::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "coa_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string sample(const std::string& file) { return data_dir() + "/sample/" + file; }
std::string blocked(const std::string& file) { return data_dir() + "/blocked/" + file; }

}  // namespace

TEST_CASE("plan on the bundled sample") {
  const auto out = scratch("plan.json");
  const auto dot = scratch("plan.dot");
  const auto r = run({"plan", "--config", sample("plan.toml"), "--out", out.string(), "--dot", dot.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto report = nlohmann::json::parse(read_text(out.string()));
  CHECK(report["totalValue"].get<double>() == coa::score_vul(9.8, 3.9) + 100);
  CHECK(report["path"] == nlohmann::json::array({4, 2, 1}));
  CHECK(report["schema"] == "coa-report/1");
  CHECK_FALSE(report.contains("elapsedMs"));
  const auto dot_text = read_text(dot.string());
  CHECK(dot_text.find("4 -> 2 [color=red") != std::string::npos);
  CHECK(dot_text.find("2 -> 1 [color=red") != std::string::npos);
}

TEST_CASE("plan flags and exit codes") {
  SUBCASE("flags alone, report on stdout") {
    const auto r = run({"plan", "--vertices", sample("VERTICES.CSV"), "--arcs", sample("ARCS.CSV"), "--vulndb",
                        sample("vulndb.json"), "--source", "4", "--target", "1", "--heuristic", "dp-exact"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["heuristic"] == "dp-exact");
  }
  SUBCASE("flags override the file") {
    const auto r = run({"plan", "--config", sample("plan.toml"), "--edge-weight", "src", "--timing"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["edgeWeight"] == "src");
    CHECK(j.contains("elapsedMs"));
  }
  SUBCASE("missing vertices file") {
    const auto r = run({"plan", "--config", sample("plan.toml"), "--vertices", "/nonexistent/V.CSV"});
    CHECK(r.code == 1);
    CHECK(r.err.find("/nonexistent/V.CSV") != std::string::npos);
  }
  SUBCASE("unreachable target") {
    const auto r = run({"plan", "--config", sample("plan.toml"), "--source", "1", "--target", "4"});
    CHECK(r.code == 2);
  }
  SUBCASE("strict vs lenient CVE handling") {
    const auto empty_db = scratch("empty.json");
    write(empty_db, "[]");
    CHECK(run({"plan", "--config", sample("plan.toml"), "--vulndb", empty_db.string()}).code == 1);
    const auto r = run({"plan", "--config", sample("plan.toml"), "--vulndb", empty_db.string(), "--lenient-cve"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["warnings"].size() == 1);
    CHECK(j["path"] == nlohmann::json::array({4, 3, 1}));
  }
  SUBCASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"plan", "--bogus"}).code == 1);
    CHECK(run({"plan", "--heuristic", "greedy"}).code == 1);
    CHECK(run({"plan", "--config", sample("plan.toml"), "--source", "1", "--target", "1"}).code == 1);
    CHECK(run({"--help"}).code == 0);
  }
}

TEST_CASE("temporal command") {
  SUBCASE("static regime ties and is reproducible") {
    const auto a = run({"temporal", "--config", sample("static.toml")});
    const auto b = run({"temporal", "--config", sample("static.toml")});
    REQUIRE_MESSAGE(a.code == 0, a.err);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["temporal"]["winner"] == "tie");
    CHECK(j["temporal"]["spatial"]["path"] == j["temporal"]["mctsPlan"]["path"]);
  }
  SUBCASE("blocked middle arc") {
    const auto r = run({"temporal", "--config", blocked("temporal.toml")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto t = nlohmann::json::parse(r.out)["temporal"];
    CHECK(t["winner"] == "mcts");
    CHECK(t["spatial"]["path"] == nlohmann::json::array({5, 4, 3, 1}));
    CHECK(t["mctsPlan"]["path"] == nlohmann::json::array({5, 2, 1}));
    CHECK(t["model"]["arcAvailability"].size() == 1);
  }
  SUBCASE("requires the temporal sections") {
    CHECK(run({"temporal", "--config", sample("plan.toml")}).code == 1);
  }
  SUBCASE("seed override changes nothing in a static regime but is recorded") {
    const auto r = run({"temporal", "--config", sample("static.toml"), "--seed", "123", "--iterations", "300"});
    REQUIRE(r.code == 0);
    const auto t = nlohmann::json::parse(r.out)["temporal"];
    CHECK(t["mcts"]["seed"] == 123);
    CHECK(t["model"]["seed"] == 123);
    CHECK(t["mcts"]["iterations"] == 300);
  }
}

TEST_CASE("export and validate") {
  SUBCASE("one node line per vertex, byte-identical reruns") {
    const auto a = run({"export", "--config", sample("plan.toml")});
    const auto b = run({"export", "--config", sample("plan.toml")});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    std::size_t nodes = 0;
    std::istringstream in(a.out);
    for (std::string line; std::getline(in, line);)
      if (line.find("[label=") != std::string::npos) ++nodes;
    CHECK(nodes == 4);
    CHECK(a.out.find("[3.822]") != std::string::npos);
  }
  SUBCASE("corrupt arcs file names the line") {
    const auto bad = scratch("bad_arcs.csv");
    write(bad, "2,4,-1\n1,two,-1\n");
    const auto r = run({"export", "--config", sample("plan.toml"), "--arcs", bad.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
  SUBCASE("validate") {
    const auto r = run({"validate", "--config", sample("plan.toml")});
    CHECK(r.code == 0);
    CHECK(r.out.find("vertices: 4") != std::string::npos);
    CHECK(r.out.find("target reachable: yes") != std::string::npos);
  }
  SUBCASE("pre-normalized arcs") {
    const auto flipped = scratch("flipped.csv");
    write(flipped, "4,2\n2,1\n4,3\n3,1\n");
    const auto r = run({"plan", "--config", sample("plan.toml"), "--arcs", flipped.string(), "--no-reverse-arcs"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["path"] == nlohmann::json::array({4, 2, 1}));
  }
}
