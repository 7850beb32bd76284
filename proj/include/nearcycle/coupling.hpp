#pragma once

// Coupling metrics d_i on X_i ⊔ X: joint metrics on a sampled surface and its
// 1-dimensional (or point, or identical-surface) limit. Balls B_{i,x}(δ) of
// limit points, read inside the surface, are the raw material of the h-profile
// computation.
//
// Two constructions are provided:
//  * coupling_from_map: the standard synthesized coupling from an almost
//    isometry f, cross(p, x) = min_{p'} [ d(p,p') + eps + d_X(f p', x) ] with
//    eps >= distortion(f)/2, which satisfies the triangle inequality across
//    blocks;
//  * coupling_ambient: for tube families embedded in H^3, the restriction of
//    the ambient metric, cross(p, x) = dist(p, axis point x). Cross distances
//    are exact and the classical projected-ball sandwich certifies each
//    (x, delta1, delta2) cell.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nearcycle/generators.hpp"
#include "nearcycle/surface.hpp"

namespace nearcycle {

// ---------------------------------------------------------------------------
// Limit spaces

struct LimitSpace {
    enum class Kind { segment, circle, point, surface };
    Kind kind = Kind::point;
    double length = 0.0;
    SurfacePtr self;  // surface kind only
    bool has_reflection = false;  // segments arising as quotients by reflection

    static LimitSpace segment(double len, bool reflection = false) {
        if (!(len > 0)) throw ConfigError("limit segment: length must be positive");
        LimitSpace L;
        L.kind = Kind::segment;
        L.length = len;
        L.has_reflection = reflection;
        return L;
    }
    static LimitSpace circle(double len) {
        if (!(len > 0)) throw ConfigError("limit circle: length must be positive");
        LimitSpace L;
        L.kind = Kind::circle;
        L.length = len;
        return L;
    }
    static LimitSpace point() { return LimitSpace{}; }
    static LimitSpace surface(SurfacePtr S) {
        LimitSpace L;
        L.kind = Kind::surface;
        L.self = std::move(S);
        return L;
    }

    void check_param(double x) const {
        switch (kind) {
            case Kind::segment:
                if (x < -1e-12 || x > length + 1e-12)
                    throw ConfigError("limit parameter outside the segment");
                break;
            case Kind::circle:
                if (x < -1e-12 || x >= length + 1e-12)
                    throw ConfigError("limit parameter outside the circle");
                break;
            case Kind::point:
                break;
            case Kind::surface:
                if (x < 0 || static_cast<std::size_t>(x) >= self->size())
                    throw ConfigError("limit vertex index out of range");
                break;
        }
    }

    double distance(double x, double y) const {
        switch (kind) {
            case Kind::segment:
                return std::abs(x - y);
            case Kind::circle: {
                const double d = std::abs(x - y);
                const double m = std::fmod(d, length);
                return std::min(m, length - m);
            }
            case Kind::point:
                return 0.0;
            case Kind::surface:
                return self->distance(static_cast<int>(x), static_cast<int>(y));
        }
        return 0.0;
    }

    // Uniform parameter samples with gap <= step (plus both segment ends).
    std::vector<double> grid(double step) const {
        std::vector<double> xs;
        switch (kind) {
            case Kind::point:
                xs.push_back(0.0);
                break;
            case Kind::segment: {
                const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
                for (int i = 0; i <= n; ++i) xs.push_back(length * i / n);
                break;
            }
            case Kind::circle: {
                const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
                for (int i = 0; i < n; ++i) xs.push_back(length * i / n);
                break;
            }
            case Kind::surface:
                for (std::size_t v = 0; v < self->size(); v += std::max<std::size_t>(1, self->size() / 64))
                    xs.push_back(static_cast<double>(v));
                break;
        }
        return xs;
    }
};

// ---------------------------------------------------------------------------
// Almost isometries (maps surface -> limit with measured defects)

struct AlmostIsometry {
    SurfacePtr S;
    LimitSpace limit;
    std::vector<double> map;  // vertex -> limit parameter (vertex index for surface limits)
    double distortion = 0.0;
    double codensity = 0.0;
    // Measured sup of d_X(f p, f q) - d(p, q): nonpositive when f contracts,
    // in which case the synthesized cross distance is attained at p' = p.
    double expansion = 0.0;

    double operator()(int v) const { return map[static_cast<std::size_t>(v)]; }
};

namespace coupling_detail {

// Measured distortion: max over sampled vertex pairs of
// |d_X(f p, f q) - d_S(p, q)|, sources spread uniformly through the index
// space; also records the one-sided expansion sup (d_X - d_S).
inline std::pair<double, double> measure_distortion(const AlmostIsometry& f,
                                                    std::size_t max_sources = 32) {
    const std::size_t n = f.S->size();
    double worst = 0.0, expansion = -std::numeric_limits<double>::infinity();
    const std::size_t step = std::max<std::size_t>(1, n / max_sources);
    for (std::size_t i = 0; i < n; i += step) {
        auto row = f.S->distance_row(static_cast<int>(i));
        const double fi = f.map[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double gap = f.limit.distance(fi, f.map[j]) - (*row)[j];
            worst = std::max(worst, std::abs(gap));
            expansion = std::max(expansion, gap);
        }
    }
    return {worst, expansion};
}

inline double measure_codensity(const AlmostIsometry& f) {
    const auto grid = f.limit.grid(std::max(f.S->resolution, 1e-9));
    double worst = 0.0;
    for (double x : grid) {
        double best = std::numeric_limits<double>::infinity();
        for (double fp : f.map) best = std::min(best, f.limit.distance(fp, x));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace coupling_detail

inline AlmostIsometry finalize_isometry(AlmostIsometry f) {
    auto [distortion, expansion] = coupling_detail::measure_distortion(f);
    f.distortion = distortion;
    f.expansion = expansion;
    f.codensity = coupling_detail::measure_codensity(f);
    return f;
}

// Natural projections per family (the spec'd coordinate maps).

inline AlmostIsometry projection_flat_circle(SurfacePtr S, double L) {
    AlmostIsometry f;
    f.S = S;
    f.limit = LimitSpace::circle(L);
    f.map.reserve(S->size());
    for (const auto& c : S->chart) f.map.push_back(std::fmod(c[0], L));
    return finalize_isometry(std::move(f));
}

// Segment-mode Klein bottle: u composed with the reflection quotient
// u -> min(u, L - u) onto [0, L/2].
inline AlmostIsometry projection_klein_segment(SurfacePtr Q, double L) {
    AlmostIsometry f;
    f.S = Q;
    f.limit = LimitSpace::segment(L / 2, /*reflection=*/true);
    f.map.reserve(Q->size());
    for (const auto& c : Q->chart) {
        const double u = std::fmod(std::fmod(c[0], L) + L, L);
        f.map.push_back(std::min(u, L - u));
    }
    return finalize_isometry(std::move(f));
}

// Tube families: arclength parameter of the nearest axis point, clamped to
// the segment [0, l].
inline AlmostIsometry projection_tube_segment(const TubeMesh& M) {
    AlmostIsometry f;
    f.S = M.surface;
    f.limit = LimitSpace::segment(M.length);
    f.map.reserve(M.surface->size());
    for (const auto& p : M.surface->ambient) {
        const double t = fermi_from_point(*M.frame, p).t;
        f.map.push_back(std::clamp(t + 0.5 * M.length, 0.0, M.length));
    }
    return finalize_isometry(std::move(f));
}

// Projective-plane tube: |t| of either lift, clamped to [0, l/2]; the cap end
// maps to l/2 and the central circle to 0.
inline AlmostIsometry projection_rp2_segment(const Rp2Tube& T) {
    AlmostIsometry f;
    f.S = T.quotient;
    f.limit = LimitSpace::segment(0.5 * T.cover_mesh.length, /*reflection=*/false);
    f.map.reserve(T.quotient->size());
    for (const auto& lift_set : T.quotient->lifts) {
        const HPoint& p = T.cover->ambient[static_cast<std::size_t>(lift_set[0])];
        const double t = fermi_from_point(*T.cover_mesh.frame, p).t;
        f.map.push_back(std::clamp(std::abs(t), 0.0, 0.5 * T.cover_mesh.length));
    }
    return finalize_isometry(std::move(f));
}

inline AlmostIsometry projection_constant(SurfacePtr S) {
    AlmostIsometry f;
    f.S = S;
    f.limit = LimitSpace::point();
    f.map.assign(S->size(), 0.0);
    return finalize_isometry(std::move(f));
}

inline AlmostIsometry projection_identity(SurfacePtr S) {
    AlmostIsometry f;
    f.S = S;
    f.limit = LimitSpace::surface(S);
    f.map.resize(S->size());
    for (std::size_t v = 0; v < S->size(); ++v) f.map[v] = static_cast<double>(v);
    // Identity: zero distortion and codensity by construction.
    f.distortion = 0.0;
    f.codensity = 0.0;
    return f;
}

// ---------------------------------------------------------------------------
// Coupling metrics

class CouplingMetric {
  public:
    enum class Kind { synthesized, ambient_segment, ambient_rp2 };

    Kind kind = Kind::synthesized;
    SurfacePtr S;
    LimitSpace limit;
    double eps = 0.0;  // coupling slack (0 for ambient couplings)

    // synthesized
    AlmostIsometry f;

    // ambient kinds
    std::shared_ptr<FermiFrame> frame;
    double axis_length = 0.0;  // full cover axis length
    SurfacePtr cover;          // ambient_rp2: quotient lifts live on the cover

    // Projection values for sandwich certification (all kinds).
    std::vector<double> proj;

    std::shared_ptr<const std::vector<double>> cross_row(double x) const {
        limit.check_param(x);
        const long key = quantize(x);
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        auto row = std::make_shared<std::vector<double>>(compute_cross(x));
        std::lock_guard<std::mutex> lk(mu_);
        auto [it, ok] = cache_.emplace(key, row);
        return it->second;
    }

    double cross(int p, double x) const { return (*cross_row(x))[static_cast<std::size_t>(p)]; }

    // Open ball, ties at 1e-12 excluded deterministically.
    std::vector<int> ball(double x, double delta) const {
        auto row = cross_row(x);
        std::vector<int> out;
        for (std::size_t p = 0; p < row->size(); ++p)
            if ((*row)[p] < delta - 1e-12) out.push_back(static_cast<int>(p));
        return out;
    }

    // Projected ball A_{i,x}(delta) = { p : d_X(f p, x) < delta }.
    std::vector<int> projected_ball(double x, double delta) const {
        std::vector<int> out;
        for (std::size_t p = 0; p < proj.size(); ++p)
            if (limit_proj_distance(proj[p], x) < delta - 1e-12) out.push_back(static_cast<int>(p));
        return out;
    }

    double hausdorff() const {
        const double step = std::max(S->resolution, 1e-9);
        const auto grid = limit.grid(step);
        double sup_limit = 0.0;
        std::vector<double> best_per_vertex(S->size(), std::numeric_limits<double>::infinity());
        for (double x : grid) {
            auto row = cross_row(x);
            double inf_p = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < row->size(); ++p) {
                inf_p = std::min(inf_p, (*row)[p]);
                best_per_vertex[p] = std::min(best_per_vertex[p], (*row)[p]);
            }
            sup_limit = std::max(sup_limit, inf_p);
        }
        double sup_surface = 0.0;
        for (double b : best_per_vertex) sup_surface = std::max(sup_surface, b);
        return std::max(sup_limit, sup_surface);
    }

    double limit_proj_distance(double fp, double x) const { return limit.distance(fp, x); }

  private:
    long quantize(double x) const { return std::lround(x * 1e12); }

    std::vector<double> compute_cross(double x) const {
        switch (kind) {
            case Kind::ambient_segment: {
                const HPoint xp = frame->axis_point(x - 0.5 * axis_length);
                std::vector<double> row(S->size());
                for (std::size_t p = 0; p < S->size(); ++p)
                    row[p] = hyp_distance(S->ambient[p], xp);
                return row;
            }
            case Kind::ambient_rp2: {
                const HPoint xp1 = frame->axis_point(x);
                const HPoint xp2 = frame->axis_point(-x);
                std::vector<double> row(S->size());
                for (std::size_t q = 0; q < S->size(); ++q) {
                    double best = std::numeric_limits<double>::infinity();
                    for (int lift : S->lifts[q]) {
                        const HPoint& p = cover->ambient[static_cast<std::size_t>(lift)];
                        best = std::min(best, hyp_distance(p, xp1));
                        best = std::min(best, hyp_distance(p, xp2));
                    }
                    row[q] = best;
                }
                return row;
            }
            case Kind::synthesized:
                return synthesized_cross(x);
        }
        return {};
    }

    std::vector<double> synthesized_cross(double x) const {
        const std::size_t n = S->size();
        if (limit.kind == LimitSpace::Kind::surface) {
            // f is the identity: the minimum is attained at p' = p.
            auto row = limit.self->distance_row(static_cast<int>(x));
            std::vector<double> out(n);
            for (std::size_t p = 0; p < n; ++p) out[p] = eps + (*row)[p];
            return out;
        }

        // Seed value at p': eps + d_X(f p', x).
        std::vector<double> seed(n);
        for (std::size_t p = 0; p < n; ++p)
            seed[p] = eps + limit.distance(f.map[p], x);

        // Contracting projections attain the minimum at p' = p.
        if (f.expansion <= 1e-12) return seed;

        if (S->backend == SampledSurface::Backend::graph) {
            // Virtual-source Dijkstra: min over p' of d(p, p') + seed(p').
            std::vector<double> dist = seed;
            using QE = std::pair<double, int>;
            std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
            for (std::size_t p = 0; p < n; ++p) pq.emplace(dist[p], static_cast<int>(p));
            while (!pq.empty()) {
                auto [d, u] = pq.top();
                pq.pop();
                if (d > dist[static_cast<std::size_t>(u)]) continue;
                for (const auto& [v, w] : S->graph_adj[static_cast<std::size_t>(u)]) {
                    if (d + w < dist[static_cast<std::size_t>(v)]) {
                        dist[static_cast<std::size_t>(v)] = d + w;
                        pq.emplace(d + w, v);
                    }
                }
            }
            return dist;
        }
        // Exact closed-form surface metric: honest minimization.
        std::vector<double> out(n, std::numeric_limits<double>::infinity());
        for (std::size_t p = 0; p < n; ++p) {
            double best = seed[p];
            for (std::size_t q = 0; q < n; ++q) {
                if (q == p) continue;
                const double cand = S->distance(static_cast<int>(p), static_cast<int>(q)) + seed[q];
                if (cand < best) best = cand;
            }
            out[p] = best;
        }
        return out;
    }

    mutable std::mutex mu_;
    mutable std::unordered_map<long, std::shared_ptr<const std::vector<double>>> cache_;
};

using CouplingPtr = std::shared_ptr<const CouplingMetric>;

// Standard coupling from an almost isometry. Refuses eps below distortion/2
// (the triangle inequality across blocks may fail).
inline CouplingPtr coupling_from_map(const AlmostIsometry& f, double eps) {
    if (eps < f.distortion / 2 + 1e-12)
        throw ConfigError("coupling_from_map: eps below distortion/2");
    auto C = std::make_shared<CouplingMetric>();
    C->kind = CouplingMetric::Kind::synthesized;
    C->S = f.S;
    C->limit = f.limit;
    C->eps = eps;
    C->f = f;
    C->proj = f.map;
    return C;
}

// Ambient coupling for an embedded tube sphere: d_i(p, x) is the H^3 distance
// from the surface point to the axis point at parameter x in [0, l].
inline CouplingPtr coupling_ambient(const TubeMesh& M, const AlmostIsometry& f) {
    auto C = std::make_shared<CouplingMetric>();
    C->kind = CouplingMetric::Kind::ambient_segment;
    C->S = M.surface;
    C->limit = LimitSpace::segment(M.length);
    C->frame = M.frame;
    C->axis_length = M.length;
    C->f = f;
    C->proj = f.map;
    return C;
}

// Ambient coupling for the projective-plane tube: minimum over the two lifts
// and the two axis representatives of the quotient parameter x in [0, l/2].
inline CouplingPtr coupling_ambient_rp2(const Rp2Tube& T, const AlmostIsometry& f) {
    auto C = std::make_shared<CouplingMetric>();
    C->kind = CouplingMetric::Kind::ambient_rp2;
    C->S = T.quotient;
    C->limit = LimitSpace::segment(0.5 * T.cover_mesh.length, /*reflection=*/false);
    C->frame = T.cover_mesh.frame;
    C->axis_length = T.cover_mesh.length;
    C->cover = T.cover;
    C->f = f;
    C->proj = f.map;
    return C;
}

inline double hausdorff_in_coupling(const CouplingMetric& C) { return C.hausdorff(); }

inline std::vector<int> ball(const CouplingMetric& C, double x, double delta) {
    if (!(delta > 0)) throw ConfigError("ball: delta must be positive");
    return C.ball(x, delta);
}

inline std::vector<int> projected_ball(const AlmostIsometry& f, double x, double delta) {
    if (!(delta > 0)) throw ConfigError("projected_ball: delta must be positive");
    std::vector<int> out;
    for (std::size_t p = 0; p < f.map.size(); ++p)
        if (f.limit.distance(f.map[p], x) < delta - 1e-12) out.push_back(static_cast<int>(p));
    return out;
}

// The five-set inclusion chain
//   A(d1/2) ⊆ B(d1) ⊆ A((d1+d2)/2) ⊆ B(d2) ⊆ A(2 d2)
// checked vertex-exactly. For ambient couplings this is the conclusiveness
// certificate of a profile cell.
inline bool sandwich_chain_holds(const CouplingMetric& C, double x, double d1, double d2) {
    auto row = C.cross_row(x);
    auto subset = [&](const std::vector<int>& a, const std::vector<int>& b) {
        std::vector<bool> in(C.S->size(), false);
        for (int v : b) in[static_cast<std::size_t>(v)] = true;
        for (int v : a)
            if (!in[static_cast<std::size_t>(v)]) return false;
        return true;
    };
    const auto A1 = C.projected_ball(x, 0.5 * d1);
    const auto B1 = C.ball(x, d1);
    const auto A2 = C.projected_ball(x, 0.5 * (d1 + d2));
    const auto B2 = C.ball(x, d2);
    const auto A3 = C.projected_ball(x, 2.0 * d2);
    return subset(A1, B1) && subset(B1, A2) && subset(A2, B2) && subset(B2, A3);
}

// ---------------------------------------------------------------------------
// Desk-scale Gromov-Hausdorff oracles on tiny metric spaces.

struct FiniteMetric {
    std::vector<std::vector<double>> d;
    std::size_t size() const { return d.size(); }
};

// Upper bound from candidate maps X -> Y: each candidate is completed to a
// correspondence by matching every uncovered y to its nearest image point.
inline double gh_upper_bound(const FiniteMetric& X, const FiniteMetric& Y,
                             const std::vector<std::vector<int>>& candidates) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& fmap : candidates) {
        if (fmap.size() != X.size()) throw std::invalid_argument("gh_upper_bound: bad candidate");
        std::vector<std::pair<int, int>> rel;
        for (std::size_t i = 0; i < X.size(); ++i) rel.emplace_back(static_cast<int>(i), fmap[i]);
        std::vector<bool> covered(Y.size(), false);
        for (int y : fmap) covered[static_cast<std::size_t>(y)] = true;
        for (std::size_t y = 0; y < Y.size(); ++y) {
            if (covered[y]) continue;
            int bx = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < X.size(); ++i) {
                const double dd = Y.d[static_cast<std::size_t>(fmap[i])][y];
                if (dd < bd) {
                    bd = dd;
                    bx = static_cast<int>(i);
                }
            }
            rel.emplace_back(bx, static_cast<int>(y));
        }
        double dis = 0.0;
        for (std::size_t a = 0; a < rel.size(); ++a)
            for (std::size_t b = a; b < rel.size(); ++b)
                dis = std::max(dis, std::abs(X.d[static_cast<std::size_t>(rel[a].first)][static_cast<std::size_t>(rel[b].first)] -
                                             Y.d[static_cast<std::size_t>(rel[a].second)][static_cast<std::size_t>(rel[b].second)]));
        best = std::min(best, 0.5 * dis);
    }
    return best;
}

namespace coupling_detail {

// Branch-and-bound over pairs (f: X->Y, g: Y->X); the minimum of the
// distortion of graph(f) ∪ graph(g) over all pairs equals the minimum over
// correspondences.
struct GhSearch {
    const FiniteMetric& X;
    const FiniteMetric& Y;
    std::vector<int> fmap, gmap;
    double best = std::numeric_limits<double>::infinity();

    double pair_dis_f(std::size_t upto) const {
        double dis = 0.0;
        for (std::size_t a = 0; a < upto; ++a)
            for (std::size_t b = a; b < upto; ++b)
                dis = std::max(dis, std::abs(X.d[a][b] - Y.d[static_cast<std::size_t>(fmap[a])][static_cast<std::size_t>(fmap[b])]));
        return dis;
    }

    void search_g(std::size_t idx, double current) {
        if (current >= best) return;
        if (idx == Y.size()) {
            best = current;
            return;
        }
        for (std::size_t x = 0; x < X.size(); ++x) {
            gmap[idx] = static_cast<int>(x);
            double dis = current;
            // g-g pairs.
            for (std::size_t b = 0; b < idx; ++b)
                dis = std::max(dis, std::abs(Y.d[idx][b] - X.d[x][static_cast<std::size_t>(gmap[b])]));
            // f-g pairs.
            for (std::size_t a = 0; a < X.size(); ++a)
                dis = std::max(dis, std::abs(X.d[a][x] - Y.d[static_cast<std::size_t>(fmap[a])][idx]));
            if (dis < best) search_g(idx + 1, dis);
        }
    }

    void search_f(std::size_t idx) {
        if (idx == X.size()) {
            search_g(0, pair_dis_f(X.size()));
            return;
        }
        for (std::size_t y = 0; y < Y.size(); ++y) {
            fmap[idx] = static_cast<int>(y);
            double dis = 0.0;
            for (std::size_t a = 0; a <= idx; ++a)
                for (std::size_t b = a; b <= idx; ++b)
                    dis = std::max(dis, std::abs(X.d[a][b] - Y.d[static_cast<std::size_t>(fmap[a])][static_cast<std::size_t>(fmap[b])]));
            if (dis < best) search_f(idx + 1);
        }
    }
};

}  // namespace coupling_detail

// Exact GH distance for |X| * |Y| <= 36, by exhaustive correspondence search.
inline double gh_oracle_small(const FiniteMetric& X, const FiniteMetric& Y) {
    if (X.size() * Y.size() > 36)
        throw std::invalid_argument("gh_oracle_small: instance too large (|X|*|Y| > 36)");
    if (X.size() == 0 || Y.size() == 0)
        throw std::invalid_argument("gh_oracle_small: empty space");
    coupling_detail::GhSearch s{X, Y, std::vector<int>(X.size()), std::vector<int>(Y.size()),
                                std::numeric_limits<double>::infinity()};
    s.search_f(0);
    return 0.5 * s.best;
}

}  // namespace nearcycle
