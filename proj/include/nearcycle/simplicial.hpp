#pragma once

// Simplicial 2-complexes with canonical ordering: vertices ascending, edges as
// sorted pairs, triangles as sorted triples, all deduplicated. Face closure is
// maintained by the constructors.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace nearcycle {

struct SimplicialComplex {
    std::vector<int> vertices;                    // ascending
    std::vector<std::array<int, 2>> edges;        // sorted pairs, lexicographic
    std::vector<std::array<int, 3>> triangles;    // sorted triples, lexicographic

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_edges() const { return edges.size(); }
    std::size_t num_triangles() const { return triangles.size(); }

    long euler_characteristic() const {
        return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) +
               static_cast<long>(triangles.size());
    }

    // Builds the closure of the given triangles and extra edges/vertices.
    static SimplicialComplex closure(std::vector<std::array<int, 3>> tris,
                                     std::vector<std::array<int, 2>> extra_edges = {},
                                     std::vector<int> extra_vertices = {}) {
        std::set<std::array<int, 3>> ts;
        std::set<std::array<int, 2>> es;
        std::set<int> vs;
        for (auto t : tris) {
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2])
                throw std::invalid_argument("SimplicialComplex: degenerate triangle");
            ts.insert(t);
            es.insert({t[0], t[1]});
            es.insert({t[0], t[2]});
            es.insert({t[1], t[2]});
            vs.insert(t.begin(), t.end());
        }
        for (auto e : extra_edges) {
            std::sort(e.begin(), e.end());
            if (e[0] == e[1]) throw std::invalid_argument("SimplicialComplex: degenerate edge");
            es.insert(e);
            vs.insert(e.begin(), e.end());
        }
        vs.insert(extra_vertices.begin(), extra_vertices.end());
        SimplicialComplex K;
        K.vertices.assign(vs.begin(), vs.end());
        K.edges.assign(es.begin(), es.end());
        K.triangles.assign(ts.begin(), ts.end());
        return K;
    }
};

// Full subcomplex on a vertex subset: all simplices with every vertex in V.
inline SimplicialComplex induced_subcomplex(const SimplicialComplex& K,
                                            const std::vector<int>& V) {
    std::unordered_set<int> in(V.begin(), V.end());
    SimplicialComplex S;
    for (int v : K.vertices)
        if (in.count(v)) S.vertices.push_back(v);
    for (const auto& e : K.edges)
        if (in.count(e[0]) && in.count(e[1])) S.edges.push_back(e);
    for (const auto& t : K.triangles)
        if (in.count(t[0]) && in.count(t[1]) && in.count(t[2])) S.triangles.push_back(t);
    return S;
}

inline bool is_subcomplex(const SimplicialComplex& K1, const SimplicialComplex& K2) {
    if (!std::includes(K2.vertices.begin(), K2.vertices.end(), K1.vertices.begin(),
                       K1.vertices.end()))
        return false;
    if (!std::includes(K2.edges.begin(), K2.edges.end(), K1.edges.begin(), K1.edges.end()))
        return false;
    return std::includes(K2.triangles.begin(), K2.triangles.end(), K1.triangles.begin(),
                         K1.triangles.end());
}

// Checks that K is a closed surface: every edge lies in exactly two triangles
// and every vertex link is a single cycle. Returns a diagnostic on failure.
inline std::optional<std::string> closed_surface_defect(const SimplicialComplex& K) {
    std::map<std::array<int, 2>, int> edge_count;
    for (const auto& t : K.triangles) {
        edge_count[{t[0], t[1]}]++;
        edge_count[{t[0], t[2]}]++;
        edge_count[{t[1], t[2]}]++;
    }
    if (edge_count.size() != K.edges.size())
        return "edges not matching triangle faces";
    for (const auto& [e, c] : edge_count)
        if (c != 2)
            return "edge (" + std::to_string(e[0]) + "," + std::to_string(e[1]) + ") lies in " +
                   std::to_string(c) + " triangles";
    // Vertex links: for each vertex the opposite edges of incident triangles
    // must form a single closed cycle.
    std::unordered_map<int, std::vector<std::array<int, 2>>> link;
    for (const auto& t : K.triangles) {
        link[t[0]].push_back({t[1], t[2]});
        link[t[1]].push_back({t[0], t[2]});
        link[t[2]].push_back({t[0], t[1]});
    }
    for (int v : K.vertices) {
        auto it = link.find(v);
        if (it == link.end()) return "isolated vertex " + std::to_string(v);
        const auto& segs = it->second;
        std::unordered_map<int, int> deg;
        for (const auto& s : segs) {
            deg[s[0]]++;
            deg[s[1]]++;
        }
        for (const auto& [u, d] : deg)
            if (d != 2) return "vertex " + std::to_string(v) + " has a non-cycle link";
        // Connectivity of the link.
        std::unordered_map<int, std::vector<int>> adj;
        for (const auto& s : segs) {
            adj[s[0]].push_back(s[1]);
            adj[s[1]].push_back(s[0]);
        }
        std::unordered_set<int> seen;
        std::vector<int> stack{segs[0][0]};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            if (!seen.insert(u).second) continue;
            for (int w : adj[u]) stack.push_back(w);
        }
        if (seen.size() != deg.size())
            return "vertex " + std::to_string(v) + " has a disconnected link";
    }
    return std::nullopt;
}

inline bool is_closed_surface(const SimplicialComplex& K) {
    return !closed_surface_defect(K).has_value();
}

}  // namespace nearcycle
