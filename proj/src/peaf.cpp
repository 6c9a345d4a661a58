#include "mhpp/peaf.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "mhpp/postopt.hpp"

namespace mhpp {

std::size_t VisitedSet::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool VisitedSet::superset_of(const VisitedSet& o) const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((o.words_[i] & ~words_[i]) != 0) return false;
  return true;
}

Label initial_label(const MhppInstance& inst) {
  Label l;
  for (AgentId a = 0; a < inst.num_agents(); ++a) l.vertex.push_back(inst.start_location(a));
  l.g.assign(inst.num_agents(), 0);
  l.visited = VisitedSet(inst.num_targets());
  update_estimates(l, inst);
  return l;
}

bool dominates(const Label& a, const Label& b) {
  if (a.vertex != b.vertex) return false;
  for (std::size_t i = 0; i < a.g.size(); ++i)
    if (a.g[i] > b.g[i]) return false;
  return a.visited.superset_of(b.visited);
}

Cost mst_heuristic(const Label& l, const MhppInstance& inst) {
  std::size_t active = 0;
  for (AgentId a = 0; a < inst.num_agents(); ++a) active += l.active(inst, a);

  std::vector<LocationId> open;
  for (LocationId v = 0; v < inst.num_targets(); ++v)
    if (!l.visited.contains(v)) open.push_back(v);
  if (open.empty()) return 0;
  if (active == 0) return kInfiniteCost;

  // Prim from the contracted root (all current vertices joined by zero-cost edges).
  std::vector<Cost> key(open.size(), kInfiniteCost);
  for (std::size_t k = 0; k < open.size(); ++k)
    for (LocationId at : l.vertex) key[k] = std::min(key[k], inst.min_cost(at, open[k]));
  std::vector<char> in_tree(open.size(), 0);
  Cost total = 0;
  for (std::size_t step = 0; step < open.size(); ++step) {
    std::size_t pick = open.size();
    for (std::size_t k = 0; k < open.size(); ++k)
      if (!in_tree[k] && (pick == open.size() || key[k] < key[pick])) pick = k;
    if (key[pick] == kInfiniteCost) return kInfiniteCost;
    in_tree[pick] = 1;
    total += key[pick];
    for (std::size_t k = 0; k < open.size(); ++k)
      if (!in_tree[k]) key[k] = std::min(key[k], inst.min_cost(open[pick], open[k]));
  }
  return total / static_cast<Cost>(active);
}

void update_estimates(Label& l, const MhppInstance& inst, Cost parent_f, bool with_heuristic) {
  l.g_max = 0;
  l.g_sum = 0;
  Cost min_active_g = kInfiniteCost;
  for (AgentId a = 0; a < l.g.size(); ++a) {
    l.g_max = std::max(l.g_max, l.g[a]);
    l.g_sum = add_cost(l.g_sum, l.g[a]);
    if (l.active(inst, a)) min_active_g = std::min(min_active_g, l.g[a]);
  }
  l.visited_count = l.visited.count();
  l.h = with_heuristic ? mst_heuristic(l, inst) : 0;
  l.h_pending = !with_heuristic;
  const Cost f_est = min_active_g == kInfiniteCost ? 0 : add_cost(min_active_g, l.h);
  l.f = std::max({l.g_max, f_est, parent_f});
}

AgentId next_agent(const Label& l, const MhppInstance& inst) {
  AgentId best = kNoAgent;
  for (AgentId a = 0; a < inst.num_agents(); ++a)
    if (l.active(inst, a) && (best == kNoAgent || l.g[a] < l.g[best])) best = a;
  return best;
}

std::vector<Label> expand(const Label& l, const MhppInstance& inst, bool with_heuristic) {
  std::vector<Label> out;
  const AgentId i = next_agent(l, inst);
  if (i == kNoAgent) return out;
  const LocationId at = l.vertex[i];

  auto successor = [&](LocationId to, Cost step) {
    Label s = l;
    s.vertex[i] = to;
    s.g[i] = add_cost(s.g[i], step);
    s.moved = i;
    if (inst.is_target(to)) s.visited.insert(to);
    update_estimates(s, inst, l.f, with_heuristic);
    out.push_back(std::move(s));
  };

  for (LocationId u = 0; u < inst.num_targets(); ++u) {
    if (l.visited.contains(u) || !inst.can_serve(i, u)) continue;
    const Cost c = inst.cost(i, at, u);
    if (c != kInfiniteCost) successor(u, c);
  }
  std::size_t active = 0;
  for (AgentId a = 0; a < inst.num_agents(); ++a) active += l.active(inst, a);
  if (active > 1 || l.visited_count == inst.num_targets()) {
    const Cost c = inst.cost(i, at, inst.goal_location(i));
    if (c != kInfiniteCost) successor(inst.goal_location(i), c);
  }
  return out;
}

bool is_complete(const Label& l, const MhppInstance& inst) {
  if (l.visited_count != inst.num_targets()) return false;
  for (AgentId a = 0; a < inst.num_agents(); ++a)
    if (l.active(inst, a)) return false;
  return true;
}

bool is_feasible(const Label& l, const MhppInstance& inst) {
  AgentSet active;
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    const LocationId v = l.vertex[a];
    if (inst.is_target(v) && !inst.can_serve(a, v)) return false;
    if (l.active(inst, a)) active.insert(a);
  }
  const bool all_visited = l.visited.count() == inst.num_targets();
  if (active.empty()) return all_visited;
  for (LocationId v = 0; v < inst.num_targets(); ++v)
    if (!l.visited.contains(v) && !inst.capable(v).intersects(active)) return false;
  return true;
}

std::string_view status_name(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NoSolution: return "no_solution";
  }
  return "unknown";
}

namespace {

struct VertexHash {
  std::size_t operator()(const std::vector<LocationId>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

class FocalSearch {
 public:
  FocalSearch(const MhppInstance& inst, const PeafOptions& opts, SearchCounters& counters)
      : inst_(inst), opts_(opts), counters_(counters), focal_(FocalOrder{&labels_, opts.prefer_larger_f}) {}

  enum class Outcome { Found, Exhausted, OutOfBudget, Escalate };

  // One inner search at `eps`, pruning labels with f >= upper_bound.
  template <class Budget>
  Outcome run(double eps, Cost upper_bound, std::optional<std::size_t> quota, Budget&& out_of_budget,
              Solution& found) {
    eps_ = eps;
    const std::size_t started = counters_.expanded;
    upper_bound_ = upper_bound;
    Label root = initial_label(inst_);
    if (!is_feasible(root, inst_) || root.h == kInfiniteCost) return Outcome::Exhausted;
    if (root.f >= upper_bound_) return Outcome::Exhausted;
    push(std::move(root));

    while (!focal_.empty()) {
      if (out_of_budget()) return Outcome::OutOfBudget;
      if (quota && counters_.expanded - started >= *quota) return Outcome::Escalate;
      const std::uint32_t idx = *focal_.begin();
      if (labels_[idx].f > bound_) ++counters_.focal_violations;
      assert(labels_[idx].f <= bound_);
      focal_.erase(focal_.begin());
      open_.erase({labels_[idx].f, idx});
      refresh_focal();

      if (labels_[idx].f >= upper_bound_) {
        ++counters_.pruned_bound;
        continue;
      }
      if (labels_[idx].h_pending) {
        Label& p = labels_[idx];
        const Cost lower = p.f;
        update_estimates(p, inst_, lower);
        if (p.h == kInfiniteCost) {
          ++counters_.pruned_infeasible;
          continue;
        }
        if (opts_.on_generate) opts_.on_generate(p);
        if (p.f >= upper_bound_) {
          ++counters_.pruned_bound;
          continue;
        }
        if (p.f > lower) {
          insert(idx);
          continue;
        }
      }
      const Label& l = labels_[idx];
      if (opts_.dominance_pruning) {
        if (dominated(l)) {
          ++counters_.pruned_dominance;
          continue;
        }
        insert_frontier(idx);
      }
      if (is_complete(l, inst_)) {
        found = reconstruct(idx);
        return Outcome::Found;
      }
      ++counters_.expanded;
      auto successors = expand(labels_[idx], inst_, false);
      for (auto& s : successors) {
        if (!is_feasible(s, inst_)) {
          ++counters_.pruned_infeasible;
          continue;
        }
        if (s.f >= upper_bound_) {
          ++counters_.pruned_bound;
          continue;
        }
        if (opts_.dominance_pruning && dominated(s)) {
          ++counters_.pruned_dominance;
          continue;
        }
        s.parent = idx;
        ++counters_.generated;
        push(std::move(s));
      }
    }
    return Outcome::Exhausted;
  }

  std::size_t expansions() const noexcept { return counters_.expanded; }

 private:
  struct FocalOrder {
    const std::vector<Label>* labels;
    bool prefer_larger_f;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      const Label& x = (*labels)[a];
      const Label& y = (*labels)[b];
      if (x.visited_count != y.visited_count) return x.visited_count > y.visited_count;
      if (x.f != y.f) return prefer_larger_f ? x.f > y.f : x.f < y.f;
      if (x.g_sum != y.g_sum) return x.g_sum < y.g_sum;
      return a < b;
    }
  };

  Cost focal_bound(Cost f_min) const {
    const long double b = static_cast<long double>(f_min) * (1.0L + static_cast<long double>(eps_));
    if (b >= static_cast<long double>(kInfiniteCost)) return kInfiniteCost;
    return static_cast<Cost>(std::floor(b));
  }

  void push(Label l) {
    labels_.push_back(std::move(l));
    insert(static_cast<std::uint32_t>(labels_.size() - 1));
  }

  void insert(std::uint32_t idx) {
    const Cost f = labels_[idx].f;
    if (open_.empty()) {
      bound_ = focal_bound(f);
      open_.insert({f, idx});
      focal_.insert(idx);
      return;
    }
    const Cost old_min = open_.begin()->first;
    open_.insert({f, idx});
    if (f < old_min) refresh_focal();
    if (f <= bound_) focal_.insert(idx);
  }

  // Re-derive the focal bound from the open list after f_min changed.
  void refresh_focal() {
    if (open_.empty()) return;
    const Cost next = focal_bound(open_.begin()->first);
    if (next > bound_) {
      for (auto it = open_.upper_bound({bound_, kNoParent}); it != open_.end() && it->first <= next; ++it)
        focal_.insert(it->second);
    } else if (next < bound_) {
      for (auto it = open_.upper_bound({next, kNoParent}); it != open_.end() && it->first <= bound_; ++it)
        focal_.erase(it->second);
    }
    bound_ = next;
  }

  bool dominated(const Label& l) const {
    auto it = frontier_.find(l.vertex);
    if (it == frontier_.end()) return false;
    for (auto idx : it->second)
      if (dominates(labels_[idx], l)) return true;
    return false;
  }

  void insert_frontier(std::uint32_t idx) {
    auto& bucket = frontier_[labels_[idx].vertex];
    const Label& l = labels_[idx];
    bucket.erase(std::remove_if(bucket.begin(), bucket.end(),
                                [&](std::uint32_t other) { return dominates(l, labels_[other]); }),
                 bucket.end());
    bucket.push_back(idx);
  }

  Solution reconstruct(std::uint32_t idx) const {
    std::vector<std::pair<AgentId, LocationId>> moves;
    for (std::uint32_t cur = idx; labels_[cur].parent != kNoParent; cur = labels_[cur].parent)
      moves.emplace_back(labels_[cur].moved, labels_[cur].vertex[labels_[cur].moved]);
    Solution sol;
    for (AgentId a = 0; a < inst_.num_agents(); ++a) sol.paths.push_back({inst_.start_location(a)});
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) sol.paths[it->first].push_back(it->second);
    evaluate(inst_, sol);
    return sol;
  }

  const MhppInstance& inst_;
  const PeafOptions& opts_;
  SearchCounters& counters_;
  std::vector<Label> labels_;
  std::set<std::pair<Cost, std::uint32_t>> open_;
  std::set<std::uint32_t, FocalOrder> focal_;
  std::unordered_map<std::vector<LocationId>, std::vector<std::uint32_t>, VertexHash> frontier_;
  double eps_ = 0;
  Cost bound_ = 0;
  Cost upper_bound_ = kInfiniteCost;
};

}  // namespace

SolverReport solve_peaf(const MhppInstance& inst, const PeafOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  };

  SolverReport report;
  report.algorithm = "peaf";
  double eps = std::max(0.0, opts.eps0);
  if (eps < opts.eps_floor) eps = 0;
  Cost upper_bound = kInfiniteCost;
  std::size_t check = 0;

  for (;;) {
    report.eps_trace.push_back(eps);
    FocalSearch search(inst, opts, report.counters);
    auto out_of_budget = [&] {
      if (opts.expansion_limit && report.counters.expanded >= *opts.expansion_limit) return true;
      if (opts.time_limit && (++check & 0x3F) == 0 &&
          elapsed_ms() >= static_cast<double>(opts.time_limit->count()))
        return true;
      return false;
    };
    Solution found;
    std::optional<std::size_t> quota;
    if (!report.best && eps > 0) quota = opts.escalate_after;
    const auto outcome = search.run(eps, upper_bound, quota, out_of_budget, found);

    if (outcome == FocalSearch::Outcome::Escalate) {
      eps *= 2;
      ++report.counters.restarts;
      continue;
    }
    if (outcome == FocalSearch::Outcome::OutOfBudget) {
      report.status = report.best ? SolveStatus::Feasible : SolveStatus::NoSolution;
      break;
    }
    if (outcome == FocalSearch::Outcome::Exhausted) {
      report.status = report.best ? SolveStatus::Optimal : SolveStatus::Infeasible;
      break;
    }
    if (opts.post_optimize) found = post_optimize(inst, std::move(found));
    if (found.makespan < upper_bound) {
      upper_bound = found.makespan;
      report.incumbents.push_back({found.makespan, found.total, elapsed_ms(), eps});
      report.best = std::move(found);
    }
    if (opts.stop_after_first) {
      report.status = SolveStatus::Feasible;
      break;
    }
    if (eps == 0) {
      // First solution popped at eps = 0 has f = f_min, a lower bound.
      report.status = SolveStatus::Optimal;
      break;
    }
    eps *= opts.eps_decay;
    if (eps < opts.eps_floor) eps = 0;
    ++report.counters.restarts;
  }
  report.elapsed_ms = elapsed_ms();
  return report;
}

std::string report_to_json(const SolverReport& report) {
  using nlohmann::json;
  json doc;
  doc["algorithm"] = report.algorithm;
  doc["status"] = status_name(report.status);
  doc["elapsed_ms"] = report.elapsed_ms;
  doc["time_to_best_ms"] = report.time_to_best_ms();
  doc["incumbents"] = json::array();
  for (const auto& inc : report.incumbents)
    doc["incumbents"].push_back(
        {{"makespan", inc.makespan}, {"total", inc.total}, {"at_ms", inc.at_ms}, {"eps", inc.eps}});
  const auto& c = report.counters;
  doc["counters"] = {{"generated", c.generated},
                     {"expanded", c.expanded},
                     {"pruned_dominance", c.pruned_dominance},
                     {"pruned_infeasible", c.pruned_infeasible},
                     {"pruned_bound", c.pruned_bound},
                     {"restarts", c.restarts}};
  doc["eps_trace"] = report.eps_trace;
  if (report.best) {
    doc["makespan"] = report.best->makespan;
    doc["total"] = report.best->total;
    doc["paths"] = report.best->paths;
  }
  return doc.dump(2) + "\n";
}

SolverReport report_from_json(const std::string& text) {
  using nlohmann::json;
  const json doc = json::parse(text);
  SolverReport r;
  r.algorithm = doc.at("algorithm").get<std::string>();
  const auto status = doc.at("status").get<std::string>();
  bool known = false;
  for (auto s : {SolveStatus::Optimal, SolveStatus::Feasible, SolveStatus::Infeasible, SolveStatus::NoSolution})
    if (status_name(s) == status) {
      r.status = s;
      known = true;
    }
  if (!known) throw std::invalid_argument("unknown solver status '" + status + "'");
  r.elapsed_ms = doc.value("elapsed_ms", 0.0);
  for (const auto& inc : doc.at("incumbents"))
    r.incumbents.push_back({inc.at("makespan").get<Cost>(), inc.at("total").get<Cost>(),
                            inc.at("at_ms").get<double>(), inc.value("eps", 0.0)});
  const auto& c = doc.at("counters");
  r.counters.generated = c.value("generated", std::size_t{0});
  r.counters.expanded = c.value("expanded", std::size_t{0});
  r.counters.pruned_dominance = c.value("pruned_dominance", std::size_t{0});
  r.counters.pruned_infeasible = c.value("pruned_infeasible", std::size_t{0});
  r.counters.pruned_bound = c.value("pruned_bound", std::size_t{0});
  r.counters.restarts = c.value("restarts", std::size_t{0});
  r.eps_trace = doc.value("eps_trace", std::vector<double>{});
  if (doc.contains("paths")) {
    Solution sol;
    sol.paths = doc.at("paths").get<std::vector<std::vector<LocationId>>>();
    sol.makespan = doc.at("makespan").get<Cost>();
    sol.total = doc.at("total").get<Cost>();
    r.best = std::move(sol);
  }
  return r;
}

}  // namespace mhpp
