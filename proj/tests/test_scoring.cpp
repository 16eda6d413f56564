#include <random>

#include "doctest.h"

#include "coa/error.hpp"
#include "coa/scoring.hpp"
#include "support/random_graphs.hpp"

using namespace coa;

namespace {

std::shared_ptr<const AttackGraph> rule_graph() {
  // Every scoring rule once: source, target, a scored CVE, both privilege
  // predicates, a network fact and a rule node.
  std::vector<Vertex> vs{
      {1, "execCode(dbServer,root)", VertexKind::Or, 0},
      {2, "vulExists(webServer,'CVE-2017-5638',struts,remoteExploit,privEscalation)", VertexKind::Leaf, 1},
      {3, "execCode(webServer,user)", VertexKind::Or, 0},
      {4, "accessFile(fileServer,write,'/export')", VertexKind::Or, 0},
      {5, "hacl(internet,webServer,tcp,80)", VertexKind::Leaf, 1},
      {6, "RULE 2 (remote exploit of a server program)", VertexKind::And, 0},
      {7, "attackerLocated(internet)", VertexKind::Leaf, 1},
  };
  std::vector<Arc> arcs{{7, 5}, {5, 6}, {2, 6}, {6, 3}, {3, 4}, {4, 1}, {3, 1}};
  return std::make_shared<const AttackGraph>(AttackGraph::build(std::move(vs), std::move(arcs)));
}

VulnDb sample_db() {
  VulnDb db;
  db.add({"CVE-2017-5638", 9.8, 3.9});
  db.add({"CVE-2002-0392", 7.5, 10.0});
  return db;
}

}  // namespace

TEST_CASE("score_vul") {
  CHECK(score_vul(10, 10) == 10);
  CHECK(score_vul(7.5, 0) == 0);
  CHECK(score_vul(9.8, 3.9) == doctest::Approx(3.822).epsilon(1e-12));
  CHECK_THROWS_AS(score_vul(10.5, 1), DomainError);
  CHECK_THROWS_AS(score_vul(1, -0.1), DomainError);
  CHECK_THROWS_AS(score_vul(std::nan(""), 1), DomainError);
}

TEST_CASE("score_vul stays in range and is monotone") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 5000; ++i) {
    const double b = u(rng), e = u(rng), db = u(rng) * (10 - b) / 10, de = u(rng) * (10 - e) / 10;
    const double s = score_vul(b, e);
    CHECK(s >= 0);
    CHECK(s <= std::min(b, 10.0));
    CHECK(score_vul(b + db, e) >= s);
    CHECK(score_vul(b, e + de) >= s);
  }
}

TEST_CASE("load_vuln_db") {
  SUBCASE("JSON") {
    const auto db = load_vuln_db(R"([{"cveId": "CVE-2002-0392", "baseScore": 7.5, "exploitabilityScore": 10.0}])");
    REQUIRE(db.size() == 1);
    CHECK(*db.find("CVE-2002-0392") == VulnRecord{"CVE-2002-0392", 7.5, 10.0});
  }
  SUBCASE("CSV with header") {
    const auto db = load_vuln_db("cveId,baseScore,exploitabilityScore\r\nCVE-2002-0392,7.5,10.0\nCVE-2017-5638,9.8,3.9\n");
    REQUIRE(db.size() == 2);
    CHECK(db.find("CVE-2017-5638")->exploitability_score == 3.9);
  }
  SUBCASE("empty") {
    CHECK(load_vuln_db("[]").empty());
    CHECK(load_vuln_db("").empty());
    CHECK(load_vuln_db("cveId,baseScore,exploitabilityScore\n").empty());
  }
  SUBCASE("out of range names the CVE") {
    try {
      load_vuln_db(R"([{"cveId": "CVE-X", "baseScore": 11, "exploitabilityScore": 1}])");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("CVE-X") != std::string::npos);
    }
  }
  SUBCASE("duplicates") {
    CHECK_THROWS_AS(load_vuln_db("cveId,baseScore,exploitabilityScore\nA,1,1\nA,2,2\n"), DuplicateIdError);
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(load_vuln_db("[{\"cveId\": 3}]"), ParseError);
    CHECK_THROWS_AS(load_vuln_db("[1,"), ParseError);
    CHECK_THROWS_AS(load_vuln_db("id,base,expl\nA,1,1\n"), ParseError);
    CHECK_THROWS_AS(load_vuln_db("cveId,baseScore,exploitabilityScore\nA,one,1\n"), ParseError);
  }
}

TEST_CASE("assign_node_scores applies every rule") {
  const auto g = rule_graph();
  const auto s = assign_node_scores(*g, sample_db(), 7, 1);
  const auto at = [&](VertexId id) { return s.values[g->require_index(id)]; };
  CHECK(at(7) == 0.01);
  CHECK(at(1) == 100);
  CHECK(at(2) == score_vul(9.8, 3.9));
  CHECK(at(3) == 1.5);
  CHECK(at(4) == 1.5);
  CHECK(at(5) == 0);
  CHECK(at(6) == 0);
  CHECK(s.warnings.empty());
}

TEST_CASE("assign_node_scores precedence and missing CVEs") {
  const auto g = rule_graph();
  SUBCASE("target overrides a vulExists score") {
    const auto s = assign_node_scores(*g, sample_db(), 7, 2);
    CHECK(s.values[g->require_index(2)] == 100);
  }
  SUBCASE("source overrides the privilege rule") {
    const auto s = assign_node_scores(*g, sample_db(), 3, 1);
    CHECK(s.values[g->require_index(3)] == 0.01);
  }
  SUBCASE("strict mode names node and CVE") {
    try {
      assign_node_scores(*g, VulnDb{}, 7, 1);
      FAIL("expected MissingCveError");
    } catch (const MissingCveError& e) {
      const std::string what = e.what();
      CHECK(what.find("node 2") != std::string::npos);
      CHECK(what.find("CVE-2017-5638") != std::string::npos);
    }
  }
  SUBCASE("lenient mode scores 0 and warns") {
    ScoringOptions lenient;
    lenient.strict_cve = false;
    const auto s = assign_node_scores(*g, VulnDb{}, 7, 1, lenient);
    CHECK(s.values[g->require_index(2)] == 0);
    CHECK(s.warnings.size() == 1);
  }
  SUBCASE("configurable privilege predicates") {
    ScoringOptions opts;
    opts.privilege_predicates = {"hacl"};
    const auto s = assign_node_scores(*g, sample_db(), 7, 1, opts);
    CHECK(s.values[g->require_index(5)] == 1.5);
    CHECK(s.values[g->require_index(3)] == 0);
  }
  SUBCASE("bad queries") {
    CHECK_THROWS_AS(assign_node_scores(*g, sample_db(), 7, 7), ValidationError);
    CHECK_THROWS_AS(assign_node_scores(*g, sample_db(), 7, 70), LookupError);
  }
}

TEST_CASE("assign_node_scores is idempotent and ignores unrelated CVEs") {
  const auto g = rule_graph();
  const auto a = assign_node_scores(*g, sample_db(), 7, 1);
  CHECK(assign_node_scores(*g, sample_db(), 7, 1).values == a.values);
  VulnDb other = sample_db();
  other.add({"CVE-1999-0001", 1.0, 1.0});
  CHECK(assign_node_scores(*g, other, 7, 1).values == a.values);
}

TEST_CASE("edge_weights") {
  const auto g = rule_graph();
  const auto s = assign_node_scores(*g, sample_db(), 7, 1);
  const auto wg = edge_weights(g, s);
  CHECK(*wg.weight(2, 6) == 0);
  CHECK(*wg.weight(4, 1) == 100);
  CHECK(*wg.weight(6, 3) == 1.5);
  CHECK_FALSE(wg.weight(1, 4).has_value());
  CHECK(wg.weights.size() == g->arc_count());

  const auto chain = testing::weighted(testing::numbered_graph(3, {{1, 2}, {2, 3}}), {0.01, 3.822, 100}, 1, 3);
  CHECK(*chain.weight(1, 2) == 3.822);

  const auto src = edge_weights(g, s, EdgeWeightMode::Src);
  CHECK(*src.weight(7, 5) == 0.01);
  const auto avg = edge_weights(g, s, EdgeWeightMode::Avg);
  CHECK(*avg.weight(4, 1) == (1.5 + 100) / 2);
}

TEST_CASE("weights are non-negative so g never decreases along a path") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_instance(rng, 8, 0.4, false);
    for (const double w : inst.wg.weights) CHECK(w >= 0);
    VertexId at = inst.source;
    double g = 0;
    std::vector<VertexId> seen{at};
    for (int step = 0; step < 8; ++step) {
      const auto next = inst.wg.graph->successors(at);
      if (next.empty()) break;
      const VertexId v = next[rng() % next.size()];
      if (std::find(seen.begin(), seen.end(), v) != seen.end()) break;
      const double g2 = g + *inst.wg.weight(at, v);
      CHECK(g2 >= g);
      g = g2;
      at = v;
      seen.push_back(v);
    }
  }
}
