#pragma once

// Finite metric samples of closed surfaces: the computational stand-in for a
// collapsing family member. A surface carries a triangulation on vertex ids
// 0..n-1, either an exact closed-form metric (flat quotients) or a weighted
// chord graph whose shortest paths over-approximate the intrinsic metric, an
// optional finite group action by vertex permutations, and optional ambient
// positions in H^3.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <set>

#include "nearcycle/fp_homology.hpp"
#include "nearcycle/hyperbolic.hpp"
#include "nearcycle/simplicial.hpp"

namespace nearcycle {

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MetricKind { exact, graph_approx };

enum class ChartRegion : std::int8_t { flat = 0, cylinder = 1, cap_a = 2, cap_b = 3 };

class SampledSurface {
  public:
    std::string label;
    MetricKind metric_kind = MetricKind::exact;
    double error_budget = 0.0;
    double resolution = 0.0;
    SimplicialComplex tri;  // vertex ids are 0..size()-1

    // Per-vertex data.
    std::vector<std::array<double, 2>> chart;  // family chart coordinates
    std::vector<ChartRegion> region;           // tube meshes only
    std::vector<HPoint> ambient;               // embedded families only

    // Group action: one vertex permutation per non-identity group element.
    std::vector<std::vector<int>> actions;

    // Metric backend.
    enum class Backend { flat_torus, flat_klein, graph, quotient };
    Backend backend = Backend::graph;
    double flat_L = 0.0, flat_w = 0.0;
    std::vector<std::vector<std::pair<int, double>>> graph_adj;
    std::shared_ptr<const SampledSurface> cover;  // quotient backend
    std::vector<std::vector<int>> lifts;          // quotient vertex -> cover vertices
    std::vector<int> orbit_of;                    // cover vertex -> quotient vertex

    SampledSurface() = default;
    SampledSurface(const SampledSurface& other)
        : label(other.label),
          metric_kind(other.metric_kind),
          error_budget(other.error_budget),
          resolution(other.resolution),
          tri(other.tri),
          chart(other.chart),
          region(other.region),
          ambient(other.ambient),
          actions(other.actions),
          backend(other.backend),
          flat_L(other.flat_L),
          flat_w(other.flat_w),
          graph_adj(other.graph_adj),
          cover(other.cover),
          lifts(other.lifts),
          orbit_of(other.orbit_of) {}
    SampledSurface& operator=(const SampledSurface&) = delete;

    std::size_t size() const { return tri.vertices.size(); }

    bool has_exact_formula() const {
        return backend == Backend::flat_torus || backend == Backend::flat_klein ||
               (backend == Backend::quotient && cover && cover->has_exact_formula());
    }

    double distance(int i, int j) const {
        switch (backend) {
            case Backend::flat_torus:
                return flat_torus_distance(chart[static_cast<std::size_t>(i)],
                                           chart[static_cast<std::size_t>(j)]);
            case Backend::flat_klein:
                return flat_klein_distance(chart[static_cast<std::size_t>(i)],
                                           chart[static_cast<std::size_t>(j)]);
            case Backend::quotient: {
                double best = std::numeric_limits<double>::infinity();
                for (int a : lifts[static_cast<std::size_t>(i)])
                    for (int b : lifts[static_cast<std::size_t>(j)])
                        best = std::min(best, cover->distance(a, b));
                return best;
            }
            case Backend::graph:
                return (*distance_row(i))[static_cast<std::size_t>(j)];
        }
        return 0.0;
    }

    // Full distance row from one source (memoized; safe for concurrent use).
    std::shared_ptr<const std::vector<double>> distance_row(int src) const {
        {
            std::lock_guard<std::mutex> lk(cache_mu_);
            auto it = row_cache_.find(src);
            if (it != row_cache_.end()) return it->second;
        }
        auto row = std::make_shared<std::vector<double>>(compute_row(src));
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto [it, inserted] = row_cache_.emplace(src, row);
        return it->second;
    }

    double flat_torus_distance(const std::array<double, 2>& a,
                               const std::array<double, 2>& b) const {
        const double du = wrap_abs(b[0] - a[0], flat_L);
        const double dv = wrap_abs(b[1] - a[1], flat_w);
        return std::hypot(du, dv);
    }

    // Quotient of the plane by (u,v) -> (u+L, -v) and (u,v) -> (u, v+w):
    // minimum over deck words with |k| <= 2 horizontal shifts.
    double flat_klein_distance(const std::array<double, 2>& a,
                               const std::array<double, 2>& b) const {
        double best = std::numeric_limits<double>::infinity();
        for (int k = -2; k <= 2; ++k) {
            const double du = b[0] - a[0] - k * flat_L;
            const double va = (k % 2 == 0) ? a[1] : -a[1];
            const double dv = wrap_abs(b[1] - va, flat_w);
            best = std::min(best, std::hypot(du, dv));
        }
        return best;
    }

    static double wrap_abs(double x, double period) {
        double m = std::fmod(std::abs(x), period);
        return std::min(m, period - m);
    }

  private:
    std::vector<double> compute_row(int src) const {
        switch (backend) {
            case Backend::flat_torus:
            case Backend::flat_klein: {
                std::vector<double> row(size());
                for (std::size_t j = 0; j < size(); ++j)
                    row[j] = distance(src, static_cast<int>(j));
                return row;
            }
            case Backend::quotient: {
                std::vector<double> row(size(), std::numeric_limits<double>::infinity());
                for (int a : lifts[static_cast<std::size_t>(src)]) {
                    auto cover_row = cover->distance_row(a);
                    for (std::size_t cb = 0; cb < cover_row->size(); ++cb) {
                        const int q = orbit_of[cb];
                        row[static_cast<std::size_t>(q)] =
                            std::min(row[static_cast<std::size_t>(q)], (*cover_row)[cb]);
                    }
                }
                return row;
            }
            case Backend::graph:
                return dijkstra(src);
        }
        return {};
    }

    std::vector<double> dijkstra(int src) const {
        const std::size_t n = size();
        std::vector<double> dist(n, std::numeric_limits<double>::infinity());
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        dist[static_cast<std::size_t>(src)] = 0.0;
        pq.emplace(0.0, src);
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[static_cast<std::size_t>(u)]) continue;
            for (const auto& [v, w] : graph_adj[static_cast<std::size_t>(u)]) {
                const double nd = d + w;
                if (nd < dist[static_cast<std::size_t>(v)]) {
                    dist[static_cast<std::size_t>(v)] = nd;
                    pq.emplace(nd, v);
                }
            }
        }
        return dist;
    }

    mutable std::mutex cache_mu_;
    mutable std::unordered_map<int, std::shared_ptr<const std::vector<double>>> row_cache_;
};

using SurfacePtr = std::shared_ptr<const SampledSurface>;

// ---------------------------------------------------------------------------
// Validation

inline void validate_surface(const SampledSurface& S, bool require_closed = true) {
    const std::size_t n = S.size();
    if (S.tri.vertices.empty()) throw ConstructionError(S.label + ": empty surface");
    for (std::size_t i = 0; i < n; ++i)
        if (S.tri.vertices[i] != static_cast<int>(i))
            throw ConstructionError(S.label + ": vertex ids must be 0..n-1");
    if (require_closed) {
        if (auto defect = closed_surface_defect(S.tri))
            throw ConstructionError(S.label + ": not a closed surface: " + *defect);
    }
    for (const auto& perm : S.actions) {
        if (perm.size() != n) throw ConstructionError(S.label + ": bad action size");
        std::vector<bool> seen(n, false);
        for (int v : perm) {
            if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)])
                throw ConstructionError(S.label + ": action is not a permutation");
            seen[static_cast<std::size_t>(v)] = true;
        }
        // Simplicial automorphism.
        auto map_tri = [&](std::array<int, 3> t) {
            for (auto& v : t) v = perm[static_cast<std::size_t>(v)];
            std::sort(t.begin(), t.end());
            return t;
        };
        std::set<std::array<int, 3>> tris(S.tri.triangles.begin(), S.tri.triangles.end());
        for (const auto& t : S.tri.triangles)
            if (!tris.count(map_tri(t)))
                throw ConstructionError(S.label + ": action is not simplicial");
    }
}

// Samples pairs and checks each action is an isometry within tol.
inline double action_isometry_defect(const SampledSurface& S, std::size_t max_sources = 24) {
    if (S.actions.empty()) return 0.0;
    const std::size_t n = S.size();
    double worst = 0.0;
    const std::size_t step = std::max<std::size_t>(1, n / max_sources);
    for (const auto& perm : S.actions) {
        for (std::size_t i = 0; i < n; i += step) {
            auto row = S.distance_row(static_cast<int>(i));
            auto prow = S.distance_row(perm[i]);
            for (std::size_t j = 0; j < n; ++j) {
                const double d1 = (*row)[j];
                const double d2 = (*prow)[static_cast<std::size_t>(perm[j])];
                worst = std::max(worst, std::abs(d1 - d2));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Quotient by a finite isometric, simplicially free action.

inline std::shared_ptr<SampledSurface> quotient_by_group(SurfacePtr S, double isometry_tol = 1e-9,
                                                         bool require_closed = true) {
    if (S->actions.empty())
        throw std::invalid_argument("quotient_by_group: surface carries no group action");
    const std::size_t n = S->size();

    for (const auto& perm : S->actions)
        for (std::size_t v = 0; v < n; ++v)
            if (perm[v] == static_cast<int>(v))
                throw ConstructionError("quotient_by_group: action has a fixed vertex");

    const double defect = action_isometry_defect(*S);
    if (defect > isometry_tol)
        throw ConstructionError("quotient_by_group: action is not an isometry (defect " +
                                std::to_string(defect) + ")");

    // Orbits.
    detail::UnionFind uf(n);
    for (const auto& perm : S->actions)
        for (std::size_t v = 0; v < n; ++v) uf.unite(static_cast<int>(v), perm[v]);
    std::vector<int> orbit_of(n, -1);
    std::vector<std::vector<int>> lifts;
    for (std::size_t v = 0; v < n; ++v) {
        const int root = uf.find(static_cast<int>(v));
        if (orbit_of[static_cast<std::size_t>(root)] < 0) {
            orbit_of[static_cast<std::size_t>(root)] = static_cast<int>(lifts.size());
            lifts.emplace_back();
        }
        orbit_of[v] = orbit_of[static_cast<std::size_t>(root)];
        lifts[static_cast<std::size_t>(orbit_of[v])].push_back(static_cast<int>(v));
    }

    // Orbit complex; fails if the action identifies vertices of one simplex.
    std::set<std::array<int, 3>> tris;
    std::set<std::array<int, 2>> edges_only;
    for (const auto& t : S->tri.triangles) {
        std::array<int, 3> q{orbit_of[static_cast<std::size_t>(t[0])],
                             orbit_of[static_cast<std::size_t>(t[1])],
                             orbit_of[static_cast<std::size_t>(t[2])]};
        std::sort(q.begin(), q.end());
        if (q[0] == q[1] || q[1] == q[2])
            throw ConstructionError("quotient_by_group: action identifies a simplex with itself");
        tris.insert(q);
    }
    for (const auto& e : S->tri.edges) {
        std::array<int, 2> q{orbit_of[static_cast<std::size_t>(e[0])],
                             orbit_of[static_cast<std::size_t>(e[1])]};
        std::sort(q.begin(), q.end());
        if (q[0] == q[1])
            throw ConstructionError("quotient_by_group: action identifies a simplex with itself");
        edges_only.insert(q);
    }

    auto Q = std::make_shared<SampledSurface>();
    Q->label = S->label + "/G";
    Q->metric_kind = S->metric_kind;
    Q->error_budget = S->error_budget;
    Q->resolution = S->resolution;
    Q->backend = SampledSurface::Backend::quotient;
    Q->cover = S;
    Q->lifts = std::move(lifts);
    Q->orbit_of = std::move(orbit_of);
    Q->tri = SimplicialComplex::closure(
        std::vector<std::array<int, 3>>(tris.begin(), tris.end()),
        std::vector<std::array<int, 2>>(edges_only.begin(), edges_only.end()));
    // Representative chart/ambient data (first lift).
    Q->chart.resize(Q->lifts.size());
    if (!S->region.empty()) Q->region.resize(Q->lifts.size());
    for (std::size_t q = 0; q < Q->lifts.size(); ++q) {
        const int rep = Q->lifts[q][0];
        Q->chart[q] = S->chart[static_cast<std::size_t>(rep)];
        if (!S->region.empty()) Q->region[q] = S->region[static_cast<std::size_t>(rep)];
    }
    validate_surface(*Q, require_closed);
    return Q;
}

// ---------------------------------------------------------------------------
// Comparison-angle monotonicity spot check (curvature bounded below by -1).

struct CbbHingeViolation {
    int apex;
    double scale_small, scale_large;
    double angle_small, angle_large;
};

struct CbbReport {
    enum class Status { pass, fail, inconclusive } status = Status::inconclusive;
    int hinges_checked = 0;
    double violation_fraction = 0.0;
    std::vector<CbbHingeViolation> violations;
};

// Evaluates the comparison angle lambda(a, b) of hinges at nested scales: the
// apex is a sample vertex, the legs run along two shortest paths, and the
// angle must be nonincreasing in the scale up to 5 * budget / min-scale.
//
// Flat closed-form surfaces march along exact chart geodesics; graph surfaces
// pick sample vertices lying on discrete shortest paths (detour within twice
// the metric error budget).
inline CbbReport cbb_spotcheck(const SampledSurface& S, int trials, std::uint64_t seed = 12345,
                               double min_scale = 0.0) {
    CbbReport rep;
    const std::size_t n = S.size();
    if (n < 16) return rep;
    if (min_scale <= 0.0) min_scale = 10.0 * std::max(S.resolution, 1e-12);
    const bool exact_chart = S.backend == SampledSurface::Backend::flat_torus ||
                             S.backend == SampledSurface::Backend::flat_klein;

    std::uint64_t state = seed ? seed : 1;
    auto rnd = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    auto next_idx = [&](std::size_t m) { return static_cast<int>(rnd() % m); };

    auto chart_dist = [&](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return S.backend == SampledSurface::Backend::flat_torus ? S.flat_torus_distance(a, b)
                                                                : S.flat_klein_distance(a, b);
    };

    int checked = 0, violated = 0;
    for (int t = 0; t < trials; ++t) {
        const int apex = next_idx(n);
        const int y_end = next_idx(n);
        const int z_end = next_idx(n);
        if (y_end == apex || z_end == apex || y_end == z_end) continue;

        double lam_small = 0.0, lam_large = 0.0, s_small = 0.0, s_large = 0.0;
        bool ok = false;

        if (exact_chart) {
            // Straight chart segments toward nearby endpoints: points at
            // parameter fractions are exact metric points on geodesics as
            // long as the leg distance stays additive (verified below).
            const auto& pa = S.chart[static_cast<std::size_t>(apex)];
            const auto& py = S.chart[static_cast<std::size_t>(y_end)];
            const auto& pz = S.chart[static_cast<std::size_t>(z_end)];
            const double dy = chart_dist(pa, py), dz = chart_dist(pa, pz);
            const double full = std::min(dy, dz);
            if (full < 2.0 * min_scale) continue;
            auto leg_point = [&](const std::array<double, 2>& end, double frac,
                                 std::array<double, 2>& out) {
                out = {pa[0] + frac * (end[0] - pa[0]), pa[1] + frac * (end[1] - pa[1])};
                const double d1 = chart_dist(pa, out);
                const double d2 = chart_dist(out, end);
                return std::abs(d1 + d2 - chart_dist(pa, end)) < 1e-10;
            };
            std::array<double, 2> y1, y2, z1, z2;
            s_large = full;
            s_small = 0.5 * full;
            if (!leg_point(py, s_small / dy, y1) || !leg_point(py, s_large / dy, y2) ||
                !leg_point(pz, s_small / dz, z1) || !leg_point(pz, s_large / dz, z2))
                continue;
            auto angle = [&](const std::array<double, 2>& y, const std::array<double, 2>& z) {
                const double a = chart_dist(pa, y), b = chart_dist(pa, z);
                double c = chart_dist(y, z);
                c = std::clamp(c, std::abs(a - b), a + b);
                return comparison_angle(a, b, c);
            };
            lam_small = angle(y1, z1);
            lam_large = angle(y2, z2);
            ok = true;
        } else {
            auto row = S.distance_row(apex);
            const double ay = (*row)[static_cast<std::size_t>(y_end)];
            const double az = (*row)[static_cast<std::size_t>(z_end)];
            const double full = std::min(ay, az);
            if (full < 2.0 * min_scale) continue;

            auto point_at = [&](int end, double target) -> int {
                auto end_row = S.distance_row(end);
                int best = -1;
                double best_err = std::numeric_limits<double>::infinity();
                for (std::size_t v = 0; v < n; ++v) {
                    const double da = (*row)[v];
                    const double de = (*end_row)[v];
                    const double detour = da + de - (*row)[static_cast<std::size_t>(end)];
                    if (detour > 2.0 * S.error_budget + 1e-9) continue;
                    const double err = std::abs(da - target);
                    if (err < best_err) {
                        best_err = err;
                        best = static_cast<int>(v);
                    }
                }
                return best;
            };

            s_large = full;
            s_small = 0.5 * full;
            const int y1 = point_at(y_end, s_small), y2 = point_at(y_end, s_large);
            const int z1 = point_at(z_end, s_small), z2 = point_at(z_end, s_large);
            if (y1 < 0 || y2 < 0 || z1 < 0 || z2 < 0) continue;
            if (y1 == z1 || y2 == z2) continue;

            auto angle = [&](int y, int z) {
                const double a = (*row)[static_cast<std::size_t>(y)];
                const double b = (*row)[static_cast<std::size_t>(z)];
                double c = S.distance(y, z);
                c = std::clamp(c, std::abs(a - b), a + b);
                return comparison_angle(a, b, c);
            };
            lam_small = angle(y1, z1);
            lam_large = angle(y2, z2);
            ok = true;
        }
        if (!ok) continue;

        ++checked;
        const double tol = 5.0 * S.error_budget / std::max(min_scale, s_small * 0.5) + 1e-9;
        if (lam_large > lam_small + tol) {
            ++violated;
            rep.violations.push_back({apex, s_small, s_large, lam_small, lam_large});
        }
    }

    rep.hinges_checked = checked;
    if (checked < std::max(4, trials / 8)) {
        rep.status = CbbReport::Status::inconclusive;
    } else {
        rep.violation_fraction = static_cast<double>(violated) / checked;
        rep.status = violated == 0 ? CbbReport::Status::pass : CbbReport::Status::fail;
    }
    return rep;
}

}  // namespace nearcycle
