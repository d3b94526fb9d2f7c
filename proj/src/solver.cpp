#include "consilp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace consilp {

namespace {

constexpr double kTieEps = 1e-12;

// Constraints with group references resolved to indices and dense
// per-label coefficient rows.
struct CompiledEntry {
    int group;
    std::vector<int> coeff;   // one per label, 0 where the label has no term
    std::vector<int> support; // labels with a nonzero coefficient
};

struct CompiledConstraint {
    Comparator cmp;
    int rhs;
    std::vector<CompiledEntry> entries;
};

std::vector<CompiledConstraint> compile(const IlpProblem& prob) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < prob.groups.size(); ++i)
        index[prob.groups[i].id] = static_cast<int>(i);

    std::vector<CompiledConstraint> out;
    out.reserve(prob.constraints.size());
    for (const auto& lc : prob.constraints) {
        CompiledConstraint cc{lc.cmp, lc.rhs, {}};
        for (const auto& term : lc.terms) {
            auto it = index.find(term.group);
            if (it == index.end())
                throw SolverError("constraint references unknown group '" +
                                  term.group + "'");
            int g = it->second;
            if (term.label < 0 ||
                term.label >= static_cast<int>(prob.groups[g].weights.size()))
                throw SolverError("constraint references label " +
                                  std::to_string(term.label) +
                                  " out of range for group '" + term.group + "'");
            auto e = std::find_if(cc.entries.begin(), cc.entries.end(),
                                  [g](const CompiledEntry& e) { return e.group == g; });
            if (e == cc.entries.end()) {
                cc.entries.push_back(
                    {g, std::vector<int>(prob.groups[g].weights.size(), 0)});
                e = cc.entries.end() - 1;
            }
            e->coeff[term.label] += term.coeff;
        }
        for (auto& e : cc.entries)
            for (std::size_t l = 0; l < e.coeff.size(); ++l)
                if (e.coeff[l] != 0) e.support.push_back(static_cast<int>(l));
        out.push_back(std::move(cc));
    }
    return out;
}

// Group index -> constraints referencing it.
std::vector<std::vector<int>> adjacency(const std::vector<CompiledConstraint>& cons,
                                        std::size_t num_groups) {
    std::vector<std::vector<int>> adj(num_groups);
    for (std::size_t c = 0; c < cons.size(); ++c)
        for (const auto& e : cons[c].entries)
            adj[e.group].push_back(static_cast<int>(c));
    return adj;
}

// Per-group label domains plus a live-label count per group, so entry
// ranges can be computed from the sparse coefficient support alone.
struct Domains {
    std::vector<std::vector<char>> live;
    std::vector<int> count;
};

// Min/max contribution of one entry's group given its current domain.
std::pair<int, int> entry_range(const CompiledEntry& e, const Domains& dom) {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    const auto& d = dom.live[e.group];
    int live_support = 0;
    for (int l : e.support) {
        if (!d[l]) continue;
        ++live_support;
        lo = std::min(lo, e.coeff[l]);
        hi = std::max(hi, e.coeff[l]);
    }
    if (dom.count[e.group] > live_support) { // a zero-coefficient label is live
        lo = std::min(lo, 0);
        hi = std::max(hi, 0);
    }
    return {lo, hi};
}

// Filters domains to a fixpoint over a constraint worklist: drops any
// label whose choice would push a constraint's optimistic range past its
// comparator, re-enqueueing the constraints of every touched group.
// Returns false when some constraint or domain becomes unsatisfiable.
bool propagate(const std::vector<CompiledConstraint>& cons,
               const std::vector<std::vector<int>>& adj, Domains& dom,
               std::vector<int> queue, std::vector<char>& queued) {
    for (int c : queue) queued[c] = 1;
    auto enqueue_group = [&](int g) {
        for (int c : adj[g]) {
            if (queued[c]) continue;
            queued[c] = 1;
            queue.push_back(c);
        }
    };
    bool feasible = true;
    while (!queue.empty()) {
        int ci = queue.back();
        queue.pop_back();
        queued[ci] = 0;
        if (!feasible) continue; // drain so `queued` ends all-zero for reuse
        const auto& c = cons[ci];

        int total_min = 0, total_max = 0;
        std::vector<std::pair<int, int>> ranges(c.entries.size());
        for (std::size_t i = 0; i < c.entries.size(); ++i) {
            if (dom.count[c.entries[i].group] == 0) {
                feasible = false;
                break;
            }
            ranges[i] = entry_range(c.entries[i], dom);
            total_min += ranges[i].first;
            total_max += ranges[i].second;
        }
        if (!feasible) continue;
        switch (c.cmp) {
        case Comparator::LessEq: feasible = total_min <= c.rhs; break;
        case Comparator::GreaterEq: feasible = total_max >= c.rhs; break;
        case Comparator::Eq:
            feasible = total_min <= c.rhs && total_max >= c.rhs;
            break;
        }
        if (!feasible) continue;

        for (std::size_t i = 0; i < c.entries.size() && feasible; ++i) {
            const auto& e = c.entries[i];
            auto& d = dom.live[e.group];
            const int others_min = total_min - ranges[i].first;
            const int others_max = total_max - ranges[i].second;
            auto keep_coeff = [&](int coeff) {
                switch (c.cmp) {
                case Comparator::LessEq: return coeff + others_min <= c.rhs;
                case Comparator::GreaterEq: return coeff + others_max >= c.rhs;
                case Comparator::Eq:
                    return coeff + others_min <= c.rhs && coeff + others_max >= c.rhs;
                }
                return true;
            };
            bool touched = false;
            for (int l : e.support) {
                if (!d[l] || keep_coeff(e.coeff[l])) continue;
                d[l] = 0;
                --dom.count[e.group];
                touched = true;
            }
            // All zero-coefficient labels share one verdict; only sweep
            // them on the rare occasions it is negative.
            if (!keep_coeff(0)) {
                int live_support = 0;
                for (int l : e.support)
                    if (d[l]) ++live_support;
                if (dom.count[e.group] > live_support) {
                    std::vector<char> in_support(d.size(), 0);
                    for (int l : e.support) in_support[l] = 1;
                    for (std::size_t l = 0; l < d.size(); ++l) {
                        if (!d[l] || in_support[l]) continue;
                        d[l] = 0;
                        --dom.count[e.group];
                        touched = true;
                    }
                }
            }
            if (dom.count[e.group] == 0) feasible = false;
            if (touched && feasible) enqueue_group(e.group);
        }
    }
    return feasible;
}

// True when `cand` precedes `best` lexicographically in group order.
bool lex_smaller(const std::vector<int>& cand, const std::vector<int>& best) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (cand[i] != best[i]) return cand[i] < best[i];
    }
    return false;
}

struct Searcher {
    const IlpProblem& prob;
    std::vector<CompiledConstraint> cons;
    std::vector<std::vector<int>> adj;
    std::vector<char> queued; // scratch for propagate, all-zero between calls
    std::vector<int> order;
    std::int64_t node_limit;
    std::int64_t nodes = 0;
    bool limit_hit = false;

    bool have_incumbent = false;
    double best_obj = 0.0;
    std::vector<int> best_choice;
    std::vector<int> choice;

    Searcher(const IlpProblem& p, std::int64_t limit)
        : prob(p), cons(compile(p)), adj(adjacency(cons, p.groups.size())),
          queued(cons.size(), 0), node_limit(limit) {
        const std::size_t n = prob.groups.size();
        choice.assign(n, -1);
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        // Branch on the group with the largest gap between its best and
        // second-best weight first.
        std::vector<double> spread(n, 0.0);
        for (std::size_t g = 0; g < n; ++g) {
            const auto& w = prob.groups[g].weights;
            double top = -std::numeric_limits<double>::infinity(), second = top;
            for (double x : w) {
                if (x > top) {
                    second = top;
                    top = x;
                } else if (x > second) {
                    second = x;
                }
            }
            spread[g] = w.size() > 1 ? top - second : 0.0;
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return spread[a] > spread[b]; });
    }

    double optimistic_bound(int depth, double acc, const Domains& dom) const {
        double bound = acc;
        for (std::size_t d = depth; d < order.size(); ++d) {
            int g = order[d];
            double best = -std::numeric_limits<double>::infinity();
            const auto& w = prob.groups[g].weights;
            for (std::size_t l = 0; l < w.size(); ++l)
                if (dom.live[g][l]) best = std::max(best, w[l]);
            bound += best;
        }
        return bound;
    }

    void offer(double obj) {
        if (!have_incumbent || obj > best_obj + kTieEps) {
            have_incumbent = true;
            best_obj = obj;
            best_choice = choice;
        } else if (obj > best_obj - kTieEps && lex_smaller(choice, best_choice)) {
            best_choice = choice;
        }
    }

    void dfs(std::size_t depth, double acc, const Domains& dom) {
        if (limit_hit) return;
        if (depth == order.size()) {
            offer(acc);
            return;
        }
        int g = order[depth];
        const auto& w = prob.groups[g].weights;
        std::vector<int> labels;
        for (std::size_t l = 0; l < w.size(); ++l)
            if (dom.live[g][l]) labels.push_back(static_cast<int>(l));
        std::stable_sort(labels.begin(), labels.end(),
                         [&](int a, int b) { return w[a] > w[b]; });

        // Admissible pre-bound from the parent's (wider) domains: lets a
        // whole weight-sorted suffix of children be discarded without
        // paying for propagation.
        const double rest_best = optimistic_bound(static_cast<int>(depth) + 1, 0.0, dom);

        for (int l : labels) {
            if (have_incumbent && acc + w[l] + rest_best < best_obj - kTieEps)
                break; // labels are sorted by weight; the rest are worse
            if (++nodes > node_limit) {
                limit_hit = true;
                return;
            }
            Domains child = dom;
            std::fill(child.live[g].begin(), child.live[g].end(), 0);
            child.live[g][l] = 1;
            child.count[g] = 1;
            if (!propagate(cons, adj, child, adj[g], queued)) continue;
            double child_acc = acc + w[l];
            if (have_incumbent &&
                optimistic_bound(static_cast<int>(depth) + 1, child_acc, child) <
                    best_obj - kTieEps)
                continue;
            choice[g] = l;
            dfs(depth + 1, child_acc, child);
            choice[g] = -1;
            if (limit_hit) return;
        }
    }
};

SolveResult finish(const IlpProblem& prob, bool have, double obj,
                   const std::vector<int>& choice, std::int64_t nodes,
                   bool limit_hit, double seconds, const std::string& tag) {
    SolveResult res;
    res.nodes = nodes;
    res.wall_seconds = seconds;
    if (limit_hit) {
        res.status = SolveStatus::NodeLimit;
    } else {
        res.status = have ? SolveStatus::Optimal : SolveStatus::Infeasible;
    }
    if (have) {
        res.objective = obj;
        res.assignment.provenance = tag;
        for (std::size_t g = 0; g < prob.groups.size(); ++g)
            res.assignment.choice[prob.groups[g].id] = choice[g];
    }
    return res;
}

} // namespace

const char* solve_status_name(SolveStatus status) {
    switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NodeLimit: return "node-limit";
    }
    return "?";
}

IlpProblem build_ilp(const Instance& instance,
                     const std::vector<WeightVector>& weights,
                     const std::vector<LinearConstraint>& constraints) {
    IlpProblem prob;
    std::map<std::string, const WeightVector*> by_id;
    for (const auto& wv : weights) by_id[wv.group_id] = &wv;
    for (const auto& g : instance.groups) {
        auto it = by_id.find(g.id);
        if (it == by_id.end())
            throw SolverError("no weight vector for group '" + g.id + "'");
        if (it->second->weights.size() != g.size())
            throw SolverError("weight vector size mismatch for group '" + g.id + "'");
        prob.groups.push_back({g.id, it->second->weights});
    }
    prob.constraints = constraints;
    compile(prob); // validates references early
    return prob;
}

SolveResult solve(const IlpProblem& problem, const SolveConfig& config) {
    auto t0 = std::chrono::steady_clock::now();
    Searcher s(problem, config.node_limit);

    Domains dom;
    dom.live.resize(problem.groups.size());
    dom.count.resize(problem.groups.size());
    for (std::size_t g = 0; g < problem.groups.size(); ++g) {
        dom.live[g].assign(problem.groups[g].weights.size(), 1);
        dom.count[g] = static_cast<int>(problem.groups[g].weights.size());
    }

    std::vector<int> all(s.cons.size());
    std::iota(all.begin(), all.end(), 0);
    bool root_feasible = propagate(s.cons, s.adj, dom, all, s.queued);
    if (root_feasible) s.dfs(0, 0.0, dom);

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
    return finish(problem, s.have_incumbent, s.best_obj, s.best_choice, s.nodes,
                  s.limit_hit, seconds, "ilp");
}

SolveResult brute_force(const IlpProblem& problem) {
    auto t0 = std::chrono::steady_clock::now();
    double space = 1.0;
    for (const auto& g : problem.groups) space *= static_cast<double>(g.weights.size());
    if (space > 1e6)
        throw SolverError("brute-force search space exceeds 1e6 joint assignments");

    auto cons = compile(problem);
    const std::size_t n = problem.groups.size();
    std::vector<int> choice(n, 0);
    bool have = false;
    double best_obj = 0.0;
    std::vector<int> best_choice;
    std::int64_t visited = 0;

    bool done = n == 0;
    if (done) have = true; // the empty assignment is trivially optimal
    while (!done) {
        ++visited;
        bool feasible = true;
        for (const auto& c : cons) {
            int lhs = 0;
            for (const auto& e : c.entries) lhs += e.coeff[choice[e.group]];
            bool ok = c.cmp == Comparator::LessEq   ? lhs <= c.rhs
                      : c.cmp == Comparator::GreaterEq ? lhs >= c.rhs
                                                       : lhs == c.rhs;
            if (!ok) {
                feasible = false;
                break;
            }
        }
        if (feasible) {
            double obj = 0.0;
            for (std::size_t g = 0; g < n; ++g)
                obj += problem.groups[g].weights[choice[g]];
            // Strict improvement keeps the first (lexicographically
            // smallest) assignment among ties.
            if (!have || obj > best_obj + kTieEps) {
                have = true;
                best_obj = obj;
                best_choice = choice;
            }
        }
        // Odometer over label indices, last group fastest.
        int g = static_cast<int>(n) - 1;
        while (g >= 0) {
            if (++choice[g] < static_cast<int>(problem.groups[g].weights.size())) break;
            choice[g] = 0;
            --g;
        }
        if (g < 0) done = true;
    }

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
    return finish(problem, have, best_obj, best_choice, visited, false, seconds,
                  "brute-force");
}

} // namespace consilp
