#pragma once

// Elementary collapses, certificate replay, and collapse-sequence search.
//
// A face is free when it has exactly one proper coface; removing the pair is
// an elementary collapse. A complex is collapsible when some sequence of
// collapses ends at a single vertex. Search offers a seeded greedy-random
// strategy with restarts (restarts run as parallel tasks over the shared
// immutable input; the lowest-seed success wins, so results are
// deterministic) and an exhaustive strategy with memoization.

#include <chrono>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "collapsar/io.hpp"
#include "collapsar/simplicial_complex.hpp"
#include "collapsar/util.hpp"

namespace collapsar {

struct ElementaryCollapse {
    Face free_face;
    Face coface;

    bool operator==(const ElementaryCollapse& o) const {
        return free_face == o.free_face && coface == o.coface;
    }
};

struct CollapseSequence {
    std::vector<ElementaryCollapse> steps;
    int terminal_vertex = -1;
};

// All currently free pairs, ordered by (face, coface).
inline std::vector<ElementaryCollapse> free_faces(const SimplicialComplex& c) {
    std::vector<ElementaryCollapse> out;
    for (const auto& f : c.faces()) {
        const Face* unique_coface = nullptr;
        int count = 0;
        for (const auto& g : c.faces()) {
            if (g.size() > f.size() && face_subset(f, g)) {
                unique_coface = &g;
                if (++count > 1) break;
            }
        }
        if (count == 1) out.push_back({f, *unique_coface});
    }
    return out;
}

inline bool is_free_pair(const SimplicialComplex& c, const ElementaryCollapse& e) {
    if (!c.has_face(e.free_face) || !c.has_face(e.coface)) return false;
    if (e.free_face.size() >= e.coface.size() || !face_subset(e.free_face, e.coface))
        return false;
    // exactly one proper coface; being one, it must then be e.coface
    int count = 0;
    for (const auto& g : c.faces())
        if (g.size() > e.free_face.size() && face_subset(e.free_face, g) && ++count > 1)
            return false;
    return count == 1;
}

inline SimplicialComplex collapse_step(const SimplicialComplex& c, const ElementaryCollapse& e) {
    if (!is_free_pair(c, e)) {
        std::ostringstream msg;
        msg << "collapse step is stale: face {";
        for (std::size_t i = 0; i < e.free_face.size(); ++i)
            msg << (i ? " " : "") << e.free_face[i];
        msg << "} is not free";
        throw stale_step_error(msg.str());
    }
    return c.without_pair(e.free_face, e.coface);
}

struct ReplayResult {
    bool valid = false;
    int first_failing_step = 0;  // 1-based; 0 when valid
    std::string reason;
};

// Checks the free-face condition step by step and that the terminal complex
// is a single vertex.
inline ReplayResult replay(const SimplicialComplex& c, const CollapseSequence& s) {
    SimplicialComplex cur = c;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        if (!is_free_pair(cur, s.steps[i]))
            return {false, static_cast<int>(i) + 1, "free-face condition fails"};
        cur = cur.without_pair(s.steps[i].free_face, s.steps[i].coface);
    }
    if (cur.size() != 1 || cur.facets()[0].size() != 1)
        return {false, static_cast<int>(s.steps.size()) + 1,
                "terminal complex is not a single vertex"};
    if (s.terminal_vertex >= 0 && cur.facets()[0][0] != s.terminal_vertex)
        return {false, static_cast<int>(s.steps.size()) + 1, "terminal vertex mismatch"};
    return {true, 0, ""};
}

struct GreedyRandomStrategy {
    std::uint64_t seed = 0;
    int restarts = 8;
};

struct ExhaustiveStrategy {
    long depth_limit = -1;  // no limit
};

struct SearchBudget {
    std::uint64_t max_steps = 2'000'000;  // states explored
    double seconds = 300.0;
};

struct SearchStats {
    std::uint64_t states_explored = 0;
    int restarts_used = 0;
    bool budget_hit = false;
    bool pruned = false;
    std::uint64_t seed = 0;
};

enum class SearchOutcome {
    Success,         // full certificate found
    NonCollapsible,  // exhaustive search proved there is none
    NotFound,        // heuristic or truncated search gave up
    Budget,          // resource budget exceeded
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::NotFound;
    std::optional<CollapseSequence> certificate;
    SearchStats stats;
};

namespace detail {

// One greedy pass: repeatedly pick a uniformly random free pair of maximal
// coface dimension.
inline std::optional<CollapseSequence> greedy_pass(const SimplicialComplex& input,
                                                   std::uint64_t seed,
                                                   std::uint64_t* states,
                                                   const std::function<bool()>& stop) {
    Rng rng(seed);
    SimplicialComplex cur = input;
    CollapseSequence seq;
    while (cur.size() > 1) {
        if (stop && stop()) return std::nullopt;
        auto pairs = free_faces(cur);
        if (pairs.empty()) return std::nullopt;
        int best = 0;
        for (const auto& p : pairs) best = std::max(best, face_dim(p.coface));
        std::vector<const ElementaryCollapse*> top;
        for (const auto& p : pairs)
            if (face_dim(p.coface) == best) top.push_back(&p);
        const auto& pick = *top[rng.index(top.size())];
        seq.steps.push_back(pick);
        cur = cur.without_pair(pick.free_face, pick.coface);
        if (states) ++(*states);
    }
    if (cur.empty()) return std::nullopt;
    seq.terminal_vertex = cur.facets()[0][0];
    return seq;
}

inline std::string canonical_key(const SimplicialComplex& c) {
    std::ostringstream ss;
    for (const auto& f : c.facets()) {
        for (int v : f) ss << v << ',';
        ss << ';';
    }
    return ss.str();
}

}  // namespace detail

inline SearchResult find_collapse(const SimplicialComplex& c, const GreedyRandomStrategy& strat,
                                  const SearchBudget& budget = {}) {
    SearchResult result;
    result.stats.seed = strat.seed;
    if (c.empty()) {
        result.outcome = SearchOutcome::NotFound;
        return result;
    }
    if (c.size() == 1) {
        CollapseSequence seq;
        seq.terminal_vertex = c.facets()[0][0];
        result.outcome = SearchOutcome::Success;
        result.certificate = seq;
        return result;
    }

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    int n = std::max(1, strat.restarts);
    std::vector<std::optional<CollapseSequence>> found(n);
    std::atomic<std::uint64_t> total_states{0};
    std::atomic<bool> out_of_budget{false};
    FirstSuccess race(n);
    parallel_for(n, [&](std::size_t i) {
        std::uint64_t local = 0;
        auto stop = [&] {
            ++local;
            total_states.fetch_add(1, std::memory_order_relaxed);
            if (race.cancelled(i)) return true;
            if (elapsed() > budget.seconds || total_states.load() > budget.max_steps) {
                out_of_budget = true;
                return true;
            }
            return false;
        };
        found[i] = detail::greedy_pass(c, strat.seed + i, nullptr, stop);
        if (found[i]) race.report_success(i);
    });

    result.stats.states_explored = total_states.load();
    std::size_t w = race.winner();
    if (w < static_cast<std::size_t>(n)) {
        result.outcome = SearchOutcome::Success;
        result.certificate = found[w];
        result.stats.restarts_used = static_cast<int>(w) + 1;
        result.stats.seed = strat.seed + w;
        return result;
    }
    result.stats.restarts_used = n;
    if (out_of_budget) {
        result.stats.budget_hit = true;
        result.outcome = SearchOutcome::Budget;
    } else {
        result.outcome = SearchOutcome::NotFound;
    }
    return result;
}

inline SearchResult find_collapse(const SimplicialComplex& c, const ExhaustiveStrategy& strat,
                                  const SearchBudget& budget = {}) {
    SearchResult result;
    if (c.empty()) return result;
    if (c.size() == 1) {
        CollapseSequence seq;
        seq.terminal_vertex = c.facets()[0][0];
        result.outcome = SearchOutcome::Success;
        result.certificate = seq;
        return result;
    }

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::unordered_set<std::string> seen;
    std::vector<ElementaryCollapse> path;
    bool found = false;
    CollapseSequence cert;

    std::function<void(const SimplicialComplex&)> dfs = [&](const SimplicialComplex& cur) {
        if (found || result.stats.budget_hit) return;
        if (++result.stats.states_explored > budget.max_steps || elapsed() > budget.seconds) {
            result.stats.budget_hit = true;
            return;
        }
        if (cur.size() == 1) {
            found = true;
            cert.steps = path;
            cert.terminal_vertex = cur.facets()[0][0];
            return;
        }
        if (strat.depth_limit >= 0 && static_cast<long>(path.size()) >= strat.depth_limit) {
            result.stats.pruned = true;
            return;
        }
        if (!seen.insert(detail::canonical_key(cur)).second) return;
        for (const auto& p : free_faces(cur)) {
            path.push_back(p);
            dfs(cur.without_pair(p.free_face, p.coface));
            path.pop_back();
            if (found || result.stats.budget_hit) return;
        }
    };
    dfs(c);

    if (found) {
        result.outcome = SearchOutcome::Success;
        result.certificate = cert;
    } else if (result.stats.budget_hit) {
        result.outcome = SearchOutcome::Budget;
    } else if (result.stats.pruned) {
        result.outcome = SearchOutcome::NotFound;
    } else {
        result.outcome = SearchOutcome::NonCollapsible;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Certificate text format: one `collapse <free> ; <coface>` line per step,
// then `point <vertex>`.

inline void write_certificate(std::ostream& out, const CollapseSequence& s,
                              std::uint64_t seed = 0) {
    out << "# collapse certificate\n";
    out << "# seed " << seed << "\n";
    for (const auto& e : s.steps) {
        out << "collapse";
        for (int v : e.free_face) out << ' ' << v;
        out << " ;";
        for (int v : e.coface) out << ' ' << v;
        out << "\n";
    }
    out << "point " << s.terminal_vertex << "\n";
}

inline CollapseSequence read_certificate(std::istream& in) {
    CollapseSequence seq;
    std::string line;
    int line_no = 0;
    bool saw_point = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head)) continue;
        if (head == "collapse") {
            Face a, b;
            std::string tok;
            bool after_sep = false;
            while (ss >> tok) {
                if (tok == ";") {
                    after_sep = true;
                    continue;
                }
                try {
                    (after_sep ? b : a).push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    throw parse_error("bad vertex label '" + tok + "'", line_no);
                }
            }
            if (a.empty() || b.empty())
                throw parse_error("collapse line needs a free face and a coface", line_no);
            seq.steps.push_back({make_face(a), make_face(b)});
        } else if (head == "point") {
            if (!(ss >> seq.terminal_vertex))
                throw parse_error("point line needs a vertex", line_no);
            saw_point = true;
        } else {
            throw parse_error("unknown directive '" + head + "'", line_no);
        }
    }
    if (!saw_point) throw parse_error("certificate has no terminal point line", line_no);
    return seq;
}

}  // namespace collapsar
