#include "riskflow/propagation/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "indexed_graph.hpp"
#include "riskflow/core/errors.hpp"
#include "riskflow/core/validation.hpp"

namespace riskflow {

using detail::IndexedGraph;
using detail::RiskTable;

const NodeResult* PropagationResult::find(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const auto& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const NodeResult& PropagationResult::at(std::string_view id) const {
  if (const auto* node = find(id)) return *node;
  throw UnknownReference("unknown node '" + std::string(id) + "'");
}

namespace {

IndexedGraph index_graph(const RiskGraph& graph) {
  for (const auto& e : graph.edges) {
    if (!graph.find_node(e.source) || !graph.find_node(e.target)) {
      throw UnknownReference("edge " + e.ref().to_string() + " has an undeclared endpoint");
    }
  }
  return IndexedGraph(graph);
}

RiskTable compute_directed(const IndexedGraph& g, PropagationStats& stats) {
  auto order = abstraction_topological_order(g.graph);
  if (!order) throw ValidationError(validate_graph(g.graph));
  const std::size_t d = g.dimension;
  RiskTable dr(g.size(), d);
  for (auto u : *order) {
    ++stats.abstraction_visits;
    if (const auto& m = g.graph.nodes[u].measured_risk) {
      for (std::size_t k = 0; k < d; ++k) dr.at(u, k) = (*m)[k];
    }
    for (auto e : g.abstraction_in[u]) {
      const auto p = g.source[e];
      for (std::size_t k = 0; k < d; ++k) {
        dr.at(u, k) = std::max(dr.at(u, k), dr.at(p, k) * g.weight(e, k));
      }
    }
  }
  return dr;
}

std::size_t visit_limit(const IndexedGraph& g) { return g.size() * g.dimension * 64; }

[[noreturn]] void fail_limit(const IndexedGraph& g, const char* why) {
  throw IterationLimitExceeded(std::string("dependency fixpoint did not converge (") + why +
                               ") after " + std::to_string(visit_limit(g)) +
                               " worklist visits; an importance outside [0, 1] is the usual cause");
}

// Relaxes edge e for perspective k. Returns true when the target's total risk
// strictly increased.
bool relax(const IndexedGraph& g, std::size_t e, std::size_t k, const RiskTable& dr,
           RiskTable& fr, RiskTable& tr) {
  const auto v = g.target[e];
  if (g.measured(v)) return false;
  const double candidate = tr.at(g.source[e], k) * g.weight(e, k);
  if (!std::isfinite(candidate)) fail_limit(g, "risk diverged");
  if (candidate <= fr.at(v, k)) return false;
  fr.at(v, k) = candidate;
  const double total = std::max(dr.at(v, k), candidate);
  if (total <= tr.at(v, k)) return false;
  tr.at(v, k) = total;
  return true;
}

// One max-priority worklist per perspective. With importance <= 1 a popped
// value can never be improved afterwards, so each node settles once.
void fixpoint_priority(const IndexedGraph& g, const RiskTable& dr, RiskTable& fr, RiskTable& tr,
                       PropagationStats& stats) {
  const std::size_t limit = visit_limit(g);
  using Entry = std::pair<double, std::size_t>;
  auto lower = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  };
  for (std::size_t k = 0; k < g.dimension; ++k) {
    std::priority_queue<Entry, std::vector<Entry>, decltype(lower)> heap(lower);
    for (std::size_t u = 0; u < g.size(); ++u) {
      if (tr.at(u, k) > 0.0 && !g.dependency_out[u].empty()) heap.emplace(tr.at(u, k), u);
    }
    while (!heap.empty()) {
      auto [value, u] = heap.top();
      heap.pop();
      if (value != tr.at(u, k)) continue;  // superseded by a later push
      if (++stats.dependency_visits > limit) fail_limit(g, "visit limit reached");
      for (auto e : g.dependency_out[u]) {
        ++stats.relaxations;
        if (relax(g, e, k, dr, fr, tr) && !g.dependency_out[g.target[e]].empty()) {
          heap.emplace(tr.at(g.target[e], k), g.target[e]);
        }
      }
    }
  }
}

// Generational FIFO worklist: sweep i processes the nodes whose total risk
// changed during sweep i - 1.
void fixpoint_fifo(const IndexedGraph& g, const RiskTable& dr, RiskTable& fr, RiskTable& tr,
                   PropagationStats& stats) {
  const std::size_t limit = visit_limit(g);
  std::vector<std::size_t> current;
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (!g.dependency_out[u].empty()) current.push_back(u);
  }
  std::vector<bool> queued(g.size(), false);
  while (!current.empty()) {
    ++stats.sweeps;
    std::vector<std::size_t> next;
    for (auto u : current) {
      if (++stats.dependency_visits > limit) fail_limit(g, "visit limit reached");
      for (auto e : g.dependency_out[u]) {
        for (std::size_t k = 0; k < g.dimension; ++k) {
          ++stats.relaxations;
          const auto v = g.target[e];
          if (relax(g, e, k, dr, fr, tr) && !queued[v] && !g.dependency_out[v].empty()) {
            queued[v] = true;
            next.push_back(v);
          }
        }
      }
    }
    for (auto v : next) queued[v] = false;
    current = std::move(next);
  }
}

void compute_followed(const IndexedGraph& g, const RiskTable& dr, RiskTable& fr, RiskTable& tr,
                      Schedule schedule, PropagationStats& stats) {
  tr = dr;
  fr = RiskTable(g.size(), g.dimension);
  if (schedule == Schedule::Priority) {
    fixpoint_priority(g, dr, fr, tr, stats);
  } else {
    fixpoint_fifo(g, dr, fr, tr, stats);
  }
}

// Backward search for every simple maximal path explaining a component.
class CauseTracer {
 public:
  CauseTracer(const IndexedGraph& g, const RiskTable& dr, const RiskTable& fr,
              const RiskTable& tr, const PropagationOptions& options)
      : g_(g), dr_(dr), fr_(fr), tr_(tr), options_(options), on_path_(g.size(), false) {}

  // Returns true when the cap cut the enumeration short.
  bool trace(std::size_t node, std::size_t k, std::vector<ProvenanceEntry>& out) {
    out.clear();
    out_ = &out;
    k_ = k;
    truncated_ = false;
    if (tr_.at(node, k) > 0.0) total(node);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return truncated_;
  }

 private:
  bool ties(double a, double b) const { return std::abs(a - b) <= options_.tie_tolerance; }

  bool full() {
    if (out_->size() < options_.max_causes_per_component) return false;
    truncated_ = true;
    return true;
  }

  void total(std::size_t node) {
    on_path_[node] = true;
    const double value = tr_.at(node, k_);
    if (ties(dr_.at(node, k_), value)) directed(node);
    if (!g_.measured(node) && ties(fr_.at(node, k_), value)) {
      for (auto e : g_.dependency_in[node]) {
        const auto p = g_.source[e];
        if (on_path_[p] || full()) continue;
        if (!ties(tr_.at(p, k_) * g_.weight(e, k_), value)) continue;
        suffix_.push_back(e);
        total(p);
        suffix_.pop_back();
      }
    }
    on_path_[node] = false;
  }

  void directed(std::size_t node) {
    const bool was_on_path = on_path_[node];
    on_path_[node] = true;
    const double value = dr_.at(node, k_);
    if (const auto& m = g_.graph.nodes[node].measured_risk; m && ties((*m)[k_], value) && !full()) {
      emit(node);
    }
    for (auto e : g_.abstraction_in[node]) {
      const auto p = g_.source[e];
      if (on_path_[p] || full()) continue;
      if (!ties(dr_.at(p, k_) * g_.weight(e, k_), value)) continue;
      suffix_.push_back(e);
      directed(p);
      suffix_.pop_back();
    }
    on_path_[node] = was_on_path;
  }

  void emit(std::size_t leaf) {
    ProvenanceEntry entry;
    entry.leaf = g_.graph.nodes[leaf].id;
    entry.value = (*g_.graph.nodes[leaf].measured_risk)[k_];
    for (auto it = suffix_.rbegin(); it != suffix_.rend(); ++it) {
      entry.path.push_back(g_.graph.edges[*it].ref());
      entry.value *= g_.weight(*it, k_);
    }
    out_->push_back(std::move(entry));
  }

  const IndexedGraph& g_;
  const RiskTable& dr_;
  const RiskTable& fr_;
  const RiskTable& tr_;
  const PropagationOptions& options_;
  std::vector<bool> on_path_;
  std::vector<std::size_t> suffix_;  // edges from the explained node backwards
  std::vector<ProvenanceEntry>* out_ = nullptr;
  std::size_t k_ = 0;
  bool truncated_ = false;
};

}  // namespace

LeafClassification classify_leaves(const RiskGraph& graph) {
  LeafClassification leaves;
  for (const auto& node : graph.nodes) {
    if (node.measured_risk) leaves.ids.push_back(node.id);
  }
  leaves.empty_warning = leaves.ids.empty();
  return leaves;
}

std::map<std::string, RiskVector> propagate_directed(const RiskGraph& graph) {
  require_valid(graph);
  IndexedGraph g(graph);
  PropagationStats stats;
  auto dr = compute_directed(g, stats);
  std::map<std::string, RiskVector> out;
  for (std::size_t u = 0; u < g.size(); ++u) {
    out.emplace(graph.nodes[u].id, RiskVector::unchecked(dr.row(u)));
  }
  return out;
}

std::map<std::string, FollowedRisk> propagate_followed(
    const RiskGraph& graph, const std::map<std::string, RiskVector>& directed,
    Schedule schedule) {
  auto g = index_graph(graph);
  RiskTable dr(g.size(), g.dimension);
  for (std::size_t u = 0; u < g.size(); ++u) {
    auto it = directed.find(graph.nodes[u].id);
    if (it == directed.end()) {
      throw UnknownReference("directed risk missing for node '" + graph.nodes[u].id + "'");
    }
    if (it->second.size() != g.dimension) {
      throw DimensionMismatch("directed risk of '" + it->first + "' has dimension " +
                              std::to_string(it->second.size()));
    }
    for (std::size_t k = 0; k < g.dimension; ++k) dr.at(u, k) = it->second[k];
  }
  RiskTable fr(g.size(), g.dimension), tr(g.size(), g.dimension);
  PropagationStats stats;
  compute_followed(g, dr, fr, tr, schedule, stats);
  std::map<std::string, FollowedRisk> out;
  for (std::size_t u = 0; u < g.size(); ++u) {
    out.emplace(graph.nodes[u].id,
                FollowedRisk{RiskVector::unchecked(fr.row(u)), RiskVector::unchecked(tr.row(u))});
  }
  return out;
}

PropagationResult propagate(const RiskGraph& graph, const PropagationOptions& options) {
  require_valid(graph);
  if (options.function != RiskFunction::MaxPerAspect) {
    throw Error("risk function '" + std::string(to_string(options.function)) +
                "' is not supported by the propagation engine");
  }
  IndexedGraph g(graph);
  PropagationResult result{graph.schema, {}, {}};
  auto dr = compute_directed(g, result.stats);
  RiskTable fr(g.size(), g.dimension), tr(g.size(), g.dimension);
  compute_followed(g, dr, fr, tr, options.schedule, result.stats);

  CauseTracer tracer(g, dr, fr, tr, options);
  result.nodes.reserve(g.size());
  for (std::size_t u = 0; u < g.size(); ++u) {
    NodeResult node;
    node.id = graph.nodes[u].id;
    node.concept_name = graph.nodes[u].concept_name;
    node.measured = g.measured(u);
    node.risk = {RiskVector::unchecked(dr.row(u)), RiskVector::unchecked(fr.row(u)),
                 RiskVector::unchecked(tr.row(u))};
    node.causes.resize(g.dimension);
    for (std::size_t k = 0; k < g.dimension; ++k) {
      if (tracer.trace(u, k, node.causes[k])) ++result.stats.truncated_causes;
    }
    result.nodes.push_back(std::move(node));
  }
  return result;
}

}  // namespace riskflow
