#include "support/random_graphs.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace coa::testing {

std::string data_dir() {
  const char* env = std::getenv("COA_DATA_DIR");
  return env ? env : "data";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::shared_ptr<const AttackGraph> numbered_graph(std::size_t n, const std::vector<Arc>& arcs) {
  std::vector<Vertex> vertices;
  for (std::size_t i = 1; i <= n; ++i)
    vertices.push_back({static_cast<VertexId>(i), "node(" + std::to_string(i) + ")", VertexKind::Or, 0.0});
  return std::make_shared<const AttackGraph>(AttackGraph::build(std::move(vertices), arcs));
}

WeightedGraph weighted(std::shared_ptr<const AttackGraph> graph, std::vector<double> values, VertexId source,
                       VertexId target, EdgeWeightMode mode) {
  ScoreAssignment s;
  s.values = std::move(values);
  s.source = source;
  s.target = target;
  return edge_weights(std::move(graph), std::move(s), mode);
}

RandomInstance random_instance(std::mt19937_64& rng, std::size_t n, double density, bool acyclic) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> score(0.0, 10.0);
  while (true) {
    std::vector<Arc> arcs;
    for (VertexId i = 1; i <= n; ++i)
      for (VertexId j = 1; j <= n; ++j) {
        if (i == j || (acyclic && j < i)) continue;
        if (unit(rng) < density) arcs.push_back({i, j});
      }
    auto graph = numbered_graph(n, arcs);
    std::vector<double> values(n);
    for (auto& v : values) v = score(rng);
    values.front() = kSourceValue;
    values.back() = kTargetValue;
    RandomInstance inst{weighted(graph, values, 1, static_cast<VertexId>(n)), 1, static_cast<VertexId>(n)};
    if (enumerate_best_values(inst.wg, inst.target)[0]) return inst;
  }
}

namespace {

void enumerate(const WeightedGraph& wg, VertexId at, VertexId target, std::vector<VertexId>& path, double value,
               const std::function<void(double, const std::vector<VertexId>&)>& sink) {
  if (at == target) {
    sink(value, path);
    return;
  }
  for (const VertexId next : wg.graph->successors(at)) {
    if (std::find(path.begin(), path.end(), next) != path.end()) continue;
    path.push_back(next);
    enumerate(wg, next, target, path, value + *wg.weight(at, next), sink);
    path.pop_back();
  }
}

}  // namespace

std::vector<std::optional<double>> enumerate_best_values(const WeightedGraph& wg, VertexId target) {
  std::vector<std::optional<double>> out;
  for (const auto& v : wg.graph->vertices()) {
    std::optional<double> best;
    std::vector<VertexId> path{v.id};
    enumerate(wg, v.id, target, path, 0.0, [&](double value, const std::vector<VertexId>&) {
      if (!best || value > *best) best = value;
    });
    out.push_back(best);
  }
  return out;
}

std::optional<std::pair<double, std::vector<VertexId>>> enumerate_best_path(const WeightedGraph& wg, VertexId source,
                                                                            VertexId target) {
  std::optional<std::pair<double, std::vector<VertexId>>> best;
  std::vector<VertexId> path{source};
  enumerate(wg, source, target, path, 0.0, [&](double value, const std::vector<VertexId>& p) {
    if (!best || value > best->first || (value == best->first && p < best->second)) best = {value, p};
  });
  return best;
}

MulvalFiles random_mulval(std::mt19937_64& rng, std::size_t n) {
  static const char* hosts[] = {"webServer", "fileServer", "workStation", "internet", "dbServer"};
  static const char* cves[] = {"CVE-2002-0392", "CVE-2017-5638", "CVE-2021-44228", "CVE-2019-0708"};
  std::uniform_int_distribution<int> pick(0, 1 << 20);
  const auto host = [&] { return std::string(hosts[pick(rng) % 5]); };

  MulvalFiles f;
  std::vector<VertexId> ids(n);
  VertexId next_id = 0;
  for (auto& id : ids) id = next_id += static_cast<VertexId>(1 + pick(rng) % 3);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (const VertexId id : ids) {
    Vertex v;
    v.id = id;
    switch (pick(rng) % 6) {
      case 0:
        v.label = "execCode(" + host() + ",root)";
        v.kind = VertexKind::Or;
        break;
      case 1:
        v.label = "vulExists(" + host() + ",'" + cves[pick(rng) % 4] + "',httpd,remoteExploit,privEscalation)";
        v.kind = VertexKind::Leaf;
        break;
      case 2:
        v.label = "RULE " + std::to_string(pick(rng) % 20) + " (remote exploit of a server program)";
        v.kind = VertexKind::And;
        break;
      case 3:
        v.label = "hacl(" + host() + "," + host() + ",tcp,80)";
        v.kind = VertexKind::Leaf;
        break;
      case 4:
        v.label = "accessFile(" + host() + ",write,'/export')";
        v.kind = VertexKind::Or;
        break;
      default:
        v.label = "attackerLocated(" + host() + ")";
        v.kind = VertexKind::Leaf;
    }
    const int m = pick(rng) % 4;
    v.metric = m == 0 ? 0.0 : m == 1 ? 1.0 : (pick(rng) % 1000) / 8.0;
    char metric[64];
    std::snprintf(metric, sizeof metric, "%.17g", v.metric);
    static const char* kinds[] = {"LEAF", "AND", "OR"};
    f.vertices_text += std::to_string(v.id) + ",\"" + v.label + "\",\"" + kinds[static_cast<int>(v.kind)] + "\"," +
                       metric + (pick(rng) % 3 == 0 ? "\r\n" : "\n");
    f.vertices.push_back(std::move(v));
  }
  for (std::size_t e = 0; e < 2 * n; ++e) {
    const VertexId a = ids[pick(rng) % n];
    const VertexId b = ids[pick(rng) % n];
    if (a == b) continue;
    f.arcs.push_back({b, a});
    f.arcs_text += std::to_string(a) + "," + std::to_string(b) + (pick(rng) % 2 ? ",-1" : "") + "\n";
  }
  return f;
}

}  // namespace coa::testing
