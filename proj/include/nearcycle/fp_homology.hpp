#pragma once

// Simplicial homology over prime fields and image ranks of inclusion-induced
// maps, via sparse modular elimination.
//
// Columns are reduced left to right in the canonical simplex order, pivoting
// on the largest remaining row index; the order is deterministic so reduced
// forms are reproducible. Degree-0 ranks use the component count (the rank of
// the vertex-edge incidence matrix equals V minus the number of components
// over every field).

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nearcycle/simplicial.hpp"

namespace nearcycle {

namespace fp {

inline std::int64_t norm(std::int64_t x, std::int64_t p) { return ((x % p) + p) % p; }

inline std::int64_t inv(std::int64_t x, std::int64_t p) {
    std::int64_t r = 1, b = norm(x, p), e = p - 2;
    while (e > 0) {
        if (e & 1) r = static_cast<std::int64_t>(static_cast<__int128>(r) * b % p);
        b = static_cast<std::int64_t>(static_cast<__int128>(b) * b % p);
        e >>= 1;
    }
    return r;
}

// Sparse column: entries sorted by row index ascending, coefficients in (0,p).
using Column = std::vector<std::pair<int, std::int64_t>>;

inline int low(const Column& c) { return c.empty() ? -1 : c.back().first; }

// dst += f * src (mod p), merging sorted entry lists.
inline void axpy(Column& dst, const Column& src, std::int64_t f, std::int64_t p) {
    f = norm(f, p);
    if (f == 0) return;
    Column out;
    out.reserve(dst.size() + src.size());
    std::size_t i = 0, j = 0;
    while (i < dst.size() || j < src.size()) {
        if (j == src.size() || (i < dst.size() && dst[i].first < src[j].first)) {
            out.push_back(dst[i++]);
        } else if (i == dst.size() || src[j].first < dst[i].first) {
            const std::int64_t v =
                static_cast<std::int64_t>(static_cast<__int128>(f) * src[j].second % p);
            if (v != 0) out.emplace_back(src[j].first, v);
            ++j;
        } else {
            const std::int64_t v = norm(
                dst[i].second + static_cast<std::int64_t>(static_cast<__int128>(f) * src[j].second % p), p);
            if (v != 0) out.emplace_back(dst[i].first, v);
            ++i;
            ++j;
        }
    }
    dst = std::move(out);
}

struct Reduction {
    std::vector<Column> cols;      // reduced columns
    std::vector<int> pivot_col;    // row -> column index holding that pivot, or -1
    int rank = 0;
};

// Left-to-right column reduction; pivot = largest row index of the column.
inline Reduction reduce(std::vector<Column> cols, int rows, std::int64_t p) {
    Reduction R;
    R.pivot_col.assign(static_cast<std::size_t>(rows), -1);
    for (std::size_t j = 0; j < cols.size(); ++j) {
        Column& c = cols[j];
        int l = low(c);
        while (l >= 0 && R.pivot_col[static_cast<std::size_t>(l)] >= 0) {
            const Column& piv = cols[static_cast<std::size_t>(R.pivot_col[static_cast<std::size_t>(l)])];
            const std::int64_t f = p - static_cast<std::int64_t>(
                                           static_cast<__int128>(c.back().second) *
                                           inv(piv.back().second, p) % p);
            axpy(c, piv, f, p);
            l = low(c);
        }
        if (l >= 0) {
            R.pivot_col[static_cast<std::size_t>(l)] = static_cast<int>(j);
            ++R.rank;
        }
    }
    R.cols = std::move(cols);
    return R;
}

// Reduces a single vector against reduced columns; returns the residue.
inline Column reduce_vector(Column v, const Reduction& R, std::int64_t p) {
    int l = low(v);
    while (l >= 0 && R.pivot_col[static_cast<std::size_t>(l)] >= 0) {
        const Column& piv = R.cols[static_cast<std::size_t>(R.pivot_col[static_cast<std::size_t>(l)])];
        const std::int64_t f = p - static_cast<std::int64_t>(static_cast<__int128>(v.back().second) *
                                                             inv(piv.back().second, p) % p);
        axpy(v, piv, f, p);
        l = low(v);
    }
    return v;
}

}  // namespace fp

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

struct Indexer {
    std::map<int, int> vertex_idx;
    std::map<std::array<int, 2>, int> edge_idx;

    explicit Indexer(const SimplicialComplex& K) {
        int i = 0;
        for (int v : K.vertices) vertex_idx[v] = i++;
        i = 0;
        for (const auto& e : K.edges) edge_idx[e] = i++;
    }
};

// d1: rows = vertices, cols = edges; d[u,v] = v - u with u < v.
inline std::vector<fp::Column> boundary1(const SimplicialComplex& K, const Indexer& ix,
                                         std::int64_t p) {
    std::vector<fp::Column> cols;
    cols.reserve(K.edges.size());
    for (const auto& e : K.edges) {
        const int u = ix.vertex_idx.at(e[0]);
        const int v = ix.vertex_idx.at(e[1]);
        fp::Column c;
        if (u < v) {
            c.emplace_back(u, p - 1);
            c.emplace_back(v, 1);
        } else {
            c.emplace_back(v, 1);
            c.emplace_back(u, p - 1);
        }
        cols.push_back(std::move(c));
    }
    return cols;
}

// d2: rows = edges, cols = triangles; d[u,v,w] = [v,w] - [u,w] + [u,v].
inline std::vector<fp::Column> boundary2(const SimplicialComplex& K, const Indexer& ix,
                                         std::int64_t p) {
    std::vector<fp::Column> cols;
    cols.reserve(K.triangles.size());
    for (const auto& t : K.triangles) {
        std::array<std::pair<int, std::int64_t>, 3> ent = {
            std::make_pair(ix.edge_idx.at({t[1], t[2]}), std::int64_t{1}),
            std::make_pair(ix.edge_idx.at({t[0], t[2]}), p - 1),
            std::make_pair(ix.edge_idx.at({t[0], t[1]}), std::int64_t{1})};
        std::sort(ent.begin(), ent.end());
        cols.emplace_back(ent.begin(), ent.end());
    }
    return cols;
}

inline int component_count(const SimplicialComplex& K, const Indexer& ix) {
    UnionFind uf(K.vertices.size());
    int comps = static_cast<int>(K.vertices.size());
    for (const auto& e : K.edges)
        if (uf.unite(ix.vertex_idx.at(e[0]), ix.vertex_idx.at(e[1]))) --comps;
    return comps;
}

}  // namespace detail

inline void check_prime(std::int64_t p) {
    if (p < 2 || p > (std::int64_t{1} << 31))
        throw std::invalid_argument("field characteristic out of range");
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) throw std::invalid_argument("field characteristic must be prime");
}

// Betti numbers of H_a(K; F_p) for a = 0, 1, 2.
inline std::array<long, 3> homology_dims(const SimplicialComplex& K, std::int64_t p) {
    check_prime(p);
    detail::Indexer ix(K);
    const long V = static_cast<long>(K.num_vertices());
    const long E = static_cast<long>(K.num_edges());
    const long T = static_cast<long>(K.num_triangles());
    if (V == 0) return {0, 0, 0};
    const long comps = detail::component_count(K, ix);
    const long rank_d1 = V - comps;
    const long rank_d2 =
        fp::reduce(detail::boundary2(K, ix, p), static_cast<int>(E), p).rank;
    return {comps, E - rank_d1 - rank_d2, T - rank_d2};
}

// Rank of the inclusion-induced map H_a(K1; F_p) -> H_a(K2; F_p), computed as
// dim Z_a(K1) - dim(Z_a(K1) /\ B_a(K2)) = dim(Z_a(K1) + B_a(K2)) - dim B_a(K2).
inline long image_rank(const SimplicialComplex& K1, const SimplicialComplex& K2, int a,
                       std::int64_t p) {
    check_prime(p);
    if (a < 0 || a > 2) return 0;
    if (!is_subcomplex(K1, K2))
        throw std::invalid_argument("image_rank: K1 is not a subcomplex of K2");
    if (K1.vertices.empty()) return 0;

    detail::Indexer ix2(K2);

    if (a == 0) {
        // Components of K2 meeting K1 (H_0 is free over every field).
        detail::UnionFind uf(K2.vertices.size());
        for (const auto& e : K2.edges) uf.unite(ix2.vertex_idx.at(e[0]), ix2.vertex_idx.at(e[1]));
        std::vector<int> roots;
        for (int v : K1.vertices) roots.push_back(uf.find(ix2.vertex_idx.at(v)));
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        return static_cast<long>(roots.size());
    }

    if (a == 2) {
        // B_2(K2) = 0, and Z_2(K1) includes into Z_2(K2), so the rank is
        // dim ker d2(K1).
        detail::Indexer ix1(K1);
        auto R = fp::reduce(detail::boundary2(K1, ix1, p), static_cast<int>(K1.num_edges()), p);
        return static_cast<long>(K1.num_triangles()) - R.rank;
    }

    // a == 1. Boundaries of K2.
    auto B = fp::reduce(detail::boundary2(K2, ix2, p), static_cast<int>(K2.num_edges()), p);

    // Z_1(K1) basis: fundamental cycles of a spanning forest of K1, written in
    // K2 edge indices.
    detail::Indexer ix1(K1);
    const int n1 = static_cast<int>(K1.num_vertices());
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n1));  // (nbr, edge id in K1)
    detail::UnionFind uf(static_cast<std::size_t>(n1));
    std::vector<bool> in_forest(K1.num_edges(), false);
    for (std::size_t ei = 0; ei < K1.edges.size(); ++ei) {
        const auto& e = K1.edges[ei];
        const int u = ix1.vertex_idx.at(e[0]);
        const int v = ix1.vertex_idx.at(e[1]);
        if (uf.unite(u, v)) {
            in_forest[ei] = true;
            adj[static_cast<std::size_t>(u)].emplace_back(v, static_cast<int>(ei));
            adj[static_cast<std::size_t>(v)].emplace_back(u, static_cast<int>(ei));
        }
    }
    // Root paths in the forest (parent pointers by BFS).
    std::vector<int> parent(static_cast<std::size_t>(n1), -1);
    std::vector<int> parent_edge(static_cast<std::size_t>(n1), -1);
    std::vector<int> depth(static_cast<std::size_t>(n1), -1);
    std::vector<int> queue;
    for (int s = 0; s < n1; ++s) {
        if (depth[static_cast<std::size_t>(s)] >= 0) continue;
        depth[static_cast<std::size_t>(s)] = 0;
        queue.clear();
        queue.push_back(s);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int u = queue[qi];
            for (auto [v, eid] : adj[static_cast<std::size_t>(u)]) {
                if (depth[static_cast<std::size_t>(v)] >= 0) continue;
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                parent[static_cast<std::size_t>(v)] = u;
                parent_edge[static_cast<std::size_t>(v)] = eid;
                queue.push_back(v);
            }
        }
    }

    // Signed edge contribution for traversing from a to b along K1 edge eid.
    auto edge_entry = [&](int eid, int from, int to) {
        const auto& e = K1.edges[static_cast<std::size_t>(eid)];
        const int row = ix2.edge_idx.at(e);
        const bool forward = ix1.vertex_idx.at(e[0]) == from && ix1.vertex_idx.at(e[1]) == to;
        return std::make_pair(row, forward ? std::int64_t{1} : p - 1);
    };

    fp::Reduction survivors;
    survivors.pivot_col.assign(K2.num_edges(), -1);
    long rank = 0;

    for (std::size_t ei = 0; ei < K1.edges.size(); ++ei) {
        if (in_forest[ei]) continue;
        // Cycle: edge (u -> v) then forest path v -> u.
        const auto& e = K1.edges[ei];
        int u = ix1.vertex_idx.at(e[0]);
        int v = ix1.vertex_idx.at(e[1]);
        std::map<int, std::int64_t> acc;
        auto add = [&](std::pair<int, std::int64_t> en) {
            auto [row, val] = en;
            acc[row] = fp::norm(acc[row] + val, p);
        };
        add(edge_entry(static_cast<int>(ei), u, v));
        // Walk both endpoints to their common ancestor.
        int x = v, y = u;
        while (x != y) {
            if (depth[static_cast<std::size_t>(x)] >= depth[static_cast<std::size_t>(y)]) {
                add(edge_entry(parent_edge[static_cast<std::size_t>(x)], x,
                               parent[static_cast<std::size_t>(x)]));
                x = parent[static_cast<std::size_t>(x)];
            } else {
                add(edge_entry(parent_edge[static_cast<std::size_t>(y)], parent[static_cast<std::size_t>(y)], y));
                y = parent[static_cast<std::size_t>(y)];
            }
        }
        fp::Column z;
        for (auto [row, val] : acc)
            if (val != 0) z.emplace_back(row, val);
        // Reduce against boundary pivots and previously surviving cycles,
        // interleaved: cancelling one table can re-expose lows of the other.
        for (int l = fp::low(z); l >= 0; l = fp::low(z)) {
            const fp::Reduction* table = nullptr;
            if (B.pivot_col[static_cast<std::size_t>(l)] >= 0)
                table = &B;
            else if (survivors.pivot_col[static_cast<std::size_t>(l)] >= 0)
                table = &survivors;
            else
                break;
            const fp::Column& piv =
                table->cols[static_cast<std::size_t>(table->pivot_col[static_cast<std::size_t>(l)])];
            const std::int64_t f = p - static_cast<std::int64_t>(static_cast<__int128>(z.back().second) *
                                                                 fp::inv(piv.back().second, p) % p);
            fp::axpy(z, piv, f, p);
        }
        if (z.empty()) continue;
        survivors.pivot_col[static_cast<std::size_t>(fp::low(z))] =
            static_cast<int>(survivors.cols.size());
        survivors.cols.push_back(std::move(z));
        ++rank;
    }
    return rank;
}

}  // namespace nearcycle
