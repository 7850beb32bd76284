#pragma once

// Collapsing-family generators.
//
// Flat families (torus, Klein bottle in both modes) carry exact closed-form
// quotient metrics obtained by minimizing over a bounded set of deck
// transformations. Tube families are meshed in Fermi coordinates around a
// geodesic segment in H^3: the cylindrical part carries the flat induced
// metric (circumference 2*pi*sinh r, length l*cosh r), the caps are pieces of
// metric spheres (round metric of radius sinh r). Their intrinsic distances
// come from shortest paths in a chord graph whose edge weights are exact
// in-chart distances, so graph distances never undershoot the true intrinsic
// metric.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "nearcycle/surface.hpp"

namespace nearcycle {

namespace gen_detail {

constexpr double kPi = 3.14159265358979323846;

inline int even_at_least(int n, int lo) {
    n = std::max(n, lo);
    return n % 2 == 0 ? n : n + 1;
}

// Chord directions (a, b) with gcd 1, a in [0, reach], |b| <= reach,
// lexicographically positive so each unordered pair is generated once.
inline const std::vector<std::array<int, 2>>& chord_directions() {
    static const std::vector<std::array<int, 2>> dirs = [] {
        std::vector<std::array<int, 2>> v;
        const int reach = 3;
        for (int a = 0; a <= reach; ++a)
            for (int b = -reach; b <= reach; ++b) {
                if (a == 0 && b <= 0) continue;
                if (std::gcd(a, std::abs(b)) != 1) continue;
                v.push_back({a, b});
            }
        return v;
    }();
    return dirs;
}

}  // namespace gen_detail

// ---------------------------------------------------------------------------
// Flat torus R^2 / <(L,0), (0,w)> on an N_u x N_v grid with exact distances.

namespace gen_detail {

// Grid torus with diagonals alternating by cell parity (Nu, Nv even so the
// pattern closes up); the u-negating deck involution of the segment-mode
// Klein bottle then maps the triangulation to itself when Nv % 4 == 0.
inline std::shared_ptr<SampledSurface> flat_torus_grid(double L, double w, int Nu, int Nv,
                                                       double h) {
    auto S = std::make_shared<SampledSurface>();
    S->label = "flat_torus(L=" + std::to_string(L) + ",w=" + std::to_string(w) + ")";
    S->metric_kind = MetricKind::exact;
    S->error_budget = 0.0;
    S->resolution = h;
    S->backend = SampledSurface::Backend::flat_torus;
    S->flat_L = L;
    S->flat_w = w;

    auto id = [&](int i, int j) { return ((i % Nu + Nu) % Nu) * Nv + ((j % Nv + Nv) % Nv); };
    S->chart.resize(static_cast<std::size_t>(Nu) * Nv);
    for (int i = 0; i < Nu; ++i)
        for (int j = 0; j < Nv; ++j)
            S->chart[static_cast<std::size_t>(id(i, j))] = {i * L / Nu, j * w / Nv};

    std::vector<std::array<int, 3>> tris;
    tris.reserve(static_cast<std::size_t>(Nu) * Nv * 2);
    for (int i = 0; i < Nu; ++i)
        for (int j = 0; j < Nv; ++j) {
            const int c00 = id(i, j), c10 = id(i + 1, j), c01 = id(i, j + 1), c11 = id(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                tris.push_back({c00, c10, c11});
                tris.push_back({c00, c11, c01});
            } else {
                tris.push_back({c00, c10, c01});
                tris.push_back({c01, c10, c11});
            }
        }
    S->tri = SimplicialComplex::closure(tris);
    validate_surface(*S);
    return S;
}

inline void check_flat_params(const char* what, double L, double w, double h, int min_nv) {
    if (!(L > 0) || !(w > 0) || !(h > 0))
        throw ConfigError(std::string(what) + ": sides must be positive");
    if (w > L) throw ConfigError(std::string(what) + ": requires w <= L");
    if (w < static_cast<double>(min_nv) * h - 1e-12)
        throw ConfigError(std::string(what) + ": resolution too coarse, fewer than " +
                          std::to_string(min_nv) + " vertices around the short circle");
}

}  // namespace gen_detail

inline std::shared_ptr<SampledSurface> gen_flat_torus(double L, double w, double h) {
    gen_detail::check_flat_params("flat torus", L, w, h, 4);
    const int Nu = gen_detail::even_at_least(static_cast<int>(std::ceil(L / h - 1e-9)), 4);
    const int Nv = gen_detail::even_at_least(static_cast<int>(std::ceil(w / h - 1e-9)), 4);
    return gen_detail::flat_torus_grid(L, w, Nu, Nv, h);
}

// Flat torus cover of the segment-mode Klein bottle, carrying the free
// involution (u, v) -> (-u, v + w/2) in its action slot. Needs at least 6
// vertices around the short circle (and an even count, since the involution
// shifts v by half a period) so the orbit complex stays simplicial.
inline std::shared_ptr<SampledSurface> gen_klein_segment_cover(double L, double w, double h) {
    gen_detail::check_flat_params("klein segment", L, w, h, 6);
    const int Nu = gen_detail::even_at_least(static_cast<int>(std::ceil(L / h - 1e-9)), 4);
    int Nv = std::max(8, static_cast<int>(std::ceil(w / h - 1e-9)));
    Nv += (4 - Nv % 4) % 4;
    auto S = gen_detail::flat_torus_grid(L, w, Nu, Nv, h);
    auto id = [&](int i, int j) { return ((i % Nu + Nu) % Nu) * Nv + ((j % Nv + Nv) % Nv); };
    std::vector<int> sigma(S->size());
    for (int i = 0; i < Nu; ++i)
        for (int j = 0; j < Nv; ++j) sigma[static_cast<std::size_t>(id(i, j))] = id(-i, j + Nv / 2);
    auto T = std::make_shared<SampledSurface>(*S);
    T->label = "klein_segment_cover(L=" + std::to_string(L) + ",w=" + std::to_string(w) + ")";
    T->actions = {sigma};
    validate_surface(*T);
    return T;
}

// Segment-mode flat Klein bottle: quotient of the torus cover by the free
// involution above. Collapses to a segment of length L/2 as w -> 0.
inline std::shared_ptr<SampledSurface> gen_flat_klein_segment(double L, double w, double h) {
    auto cover = gen_klein_segment_cover(L, w, h);
    auto Q = quotient_by_group(cover, 1e-9);
    auto M = std::make_shared<SampledSurface>(*Q);
    M->label = "flat_klein_segment(L=" + std::to_string(L) + ",w=" + std::to_string(w) + ")";
    if (M->tri.euler_characteristic() != 0)
        throw ConstructionError("flat klein segment: Euler characteristic != 0");
    return M;
}

// Circle-mode flat Klein bottle R^2 / <(u,v)->(u+L,-v), (u,v)->(u,v+w)>,
// meshed on a fundamental-domain grid with a flipped seam.
inline std::shared_ptr<SampledSurface> gen_flat_klein_circle(double L, double w, double h) {
    if (!(L > 0) || !(w > 0) || !(h > 0)) throw ConfigError("flat klein: sides must be positive");
    if (w > L) throw ConfigError("flat klein: requires w <= L");
    if (w < 4.0 * h - 1e-12)
        throw ConfigError("flat klein: resolution too coarse, fewer than 4 vertices around the "
                          "short circle");
    const int Nu = std::max(3, static_cast<int>(std::ceil(L / h - 1e-9)));
    const int Nv = std::max(4, static_cast<int>(std::ceil(w / h - 1e-9)));

    auto S = std::make_shared<SampledSurface>();
    S->label = "flat_klein_circle(L=" + std::to_string(L) + ",w=" + std::to_string(w) + ")";
    S->metric_kind = MetricKind::exact;
    S->error_budget = 0.0;
    S->resolution = h;
    S->backend = SampledSurface::Backend::flat_klein;
    S->flat_L = L;
    S->flat_w = w;

    auto raw = [&](int i, int j) { return i * Nv + ((j % Nv + Nv) % Nv); };
    // Crossing the u seam enters at flipped v.
    auto id = [&](int i, int j) {
        j = (j % Nv + Nv) % Nv;
        if (i >= Nu) {
            i -= Nu;
            j = (Nv - j) % Nv;
        }
        return raw(i, j);
    };
    S->chart.resize(static_cast<std::size_t>(Nu) * Nv);
    for (int i = 0; i < Nu; ++i)
        for (int j = 0; j < Nv; ++j)
            S->chart[static_cast<std::size_t>(raw(i, j))] = {i * L / Nu, j * w / Nv};

    std::vector<std::array<int, 3>> tris;
    for (int i = 0; i < Nu; ++i)
        for (int j = 0; j < Nv; ++j) {
            const int c00 = id(i, j), c10 = id(i + 1, j), c01 = id(i, j + 1), c11 = id(i + 1, j + 1);
            tris.push_back({c00, c10, c11});
            tris.push_back({c00, c11, c01});
        }
    S->tri = SimplicialComplex::closure(tris);
    if (S->tri.euler_characteristic() != 0)
        throw ConstructionError("flat klein circle: Euler characteristic != 0");
    validate_surface(*S);
    return S;
}

enum class KleinMode { circle, segment };

inline std::shared_ptr<SampledSurface> gen_flat_klein(double L, double w, KleinMode mode,
                                                      double h) {
    return mode == KleinMode::circle ? gen_flat_klein_circle(L, w, h)
                                     : gen_flat_klein_segment(L, w, h);
}

// ---------------------------------------------------------------------------
// Tube sphere: boundary of the r-neighborhood of a geodesic segment of length
// l centered at the origin of H^3.

struct TubeMesh {
    std::shared_ptr<SampledSurface> surface;
    // Grid bookkeeping for equivariance and tests.
    int n_t = 0, n_theta = 0, n_cap = 0;
    int tip_a = -1, tip_b = -1;
    double length = 0.0, radius = 0.0;
    std::shared_ptr<FermiFrame> frame;
    // cap ring vertex ids: ring k in 1..n_cap-1 (uniform caps only)
    std::vector<std::vector<int>> cap_a_rings, cap_b_rings;
};

inline TubeMesh gen_sphere_tube_mesh(double l, double r, double h, double max_radius_ratio = 0.1,
                                     bool equivariant = false) {
    if (!(l > 0) || !(r > 0) || !(h > 0)) throw ConfigError("sphere tube: parameters must be positive");
    if (r > max_radius_ratio * l + 1e-12)
        throw ConfigError("sphere tube: tube radius too large for the axis length");
    if (r < 4.0 * h - 1e-12)
        throw ConfigError("sphere tube: resolution too coarse for the tube radius");
    using gen_detail::kPi;

    const double circumference = 2.0 * kPi * std::sinh(r);
    // Angular count divisible by 4 and even row count: the central symmetry
    // maps the cell (j, m) to (Nt-1-j, m+Ntheta/2) with flipped diagonal, and
    // alternating diagonals by (j+m) parity are preserved exactly when Nt and
    // Ntheta/2 have equal parity. An even Nt also keeps a vertex circle at
    // t = 0, the fixed circle of the symmetry's axis reflection.
    int Ntheta = std::max(8, static_cast<int>(std::ceil(circumference / h - 1e-9)));
    Ntheta += (4 - Ntheta % 4) % 4;
    int Nt = std::max(4, static_cast<int>(std::ceil(l * std::cosh(r) / h - 1e-9)));
    if (Nt % 2 != 0) ++Nt;
    const int Ncap = std::max(2, static_cast<int>(std::ceil(0.5 * kPi * std::sinh(r) / h - 1e-9)));

    TubeMesh M;
    M.n_t = Nt;
    M.n_theta = Ntheta;
    M.n_cap = Ncap;
    M.length = l;
    M.radius = r;

    auto S = std::make_shared<SampledSurface>();
    S->label = "sphere_tube(l=" + std::to_string(l) + ",r=" + std::to_string(r) + ")";
    S->metric_kind = MetricKind::graph_approx;
    S->error_budget = 3.0 * h;
    S->resolution = h;
    S->backend = SampledSurface::Backend::graph;

    GeodesicSubspace axis(HPoint::from_klein({0.0, 0.0, 0.0}), {{1.0, 0.0, 0.0}});
    M.frame = std::make_shared<FermiFrame>(axis);
    const FermiFrame& F = *M.frame;

    // --- vertices ---
    std::vector<std::array<double, 2>> chart;
    std::vector<ChartRegion> region;
    std::vector<HPoint> ambient;
    auto add_vertex = [&](ChartRegion reg, double a, double b, const HPoint& p) {
        chart.push_back({a, b});
        region.push_back(reg);
        ambient.push_back(p);
        return static_cast<int>(chart.size()) - 1;
    };

    const double dt = l / Nt;
    const double dtheta = 2.0 * kPi / Ntheta;
    auto theta_of = [&](int m) { return dtheta * ((m % Ntheta + Ntheta) % Ntheta); };

    // Cylinder rows j = 0..Nt, row j at t = -l/2 + j*dt; rows 0 and Nt are the
    // cap seams.
    std::vector<std::vector<int>> row_ids(static_cast<std::size_t>(Nt) + 1);
    for (int j = 0; j <= Nt; ++j) {
        const double t = -0.5 * l + j * dt;
        for (int m = 0; m < Ntheta; ++m) {
            row_ids[static_cast<std::size_t>(j)].push_back(
                add_vertex(ChartRegion::cylinder, t, theta_of(m), F.at({t, r, theta_of(m)})));
        }
    }

    // Caps: metric hemispheres around the segment endpoints. Polar angle phi
    // in [0, pi/2], phi = pi/2 is the seam (shared with cylinder rows).
    const Vec4 cA = F.axis_point(-0.5 * l).mink();
    const Vec4 cB = F.axis_point(0.5 * l).mink();
    const Vec4 uA = vec_sub(vec_scale(std::sinh(0.5 * l), F.e(0)), vec_scale(std::cosh(0.5 * l), F.e(1)));
    const Vec4 uB = vec_add(vec_scale(std::sinh(0.5 * l), F.e(0)), vec_scale(std::cosh(0.5 * l), F.e(1)));

    auto cap_point = [&](bool is_b, double phi, double theta) {
        const Vec4& c = is_b ? cB : cA;
        const Vec4& u = is_b ? uB : uA;
        // Unit normal at the endpoint: cos(phi) outward along the axis plus
        // sin(phi) around it.
        Vec4 n = vec_scale(std::cos(phi), u);
        const Vec4 circ =
            vec_add(vec_scale(std::cos(theta), F.e(2)), vec_scale(std::sin(theta), F.e(3)));
        n = vec_add(n, vec_scale(std::sin(phi), circ));
        const Vec4 x = vec_add(vec_scale(std::cosh(r), c), vec_scale(std::sinh(r), n));
        return HPoint::from_minkowski(x, 3);
    };

    const double dphi = 0.5 * kPi / Ncap;

    M.cap_a_rings.assign(static_cast<std::size_t>(Ncap) + 1, {});
    M.cap_b_rings.assign(static_cast<std::size_t>(Ncap) + 1, {});
    M.tip_a = add_vertex(ChartRegion::cap_a, 0.0, 0.0, cap_point(false, 0.0, 0.0));
    M.tip_b = add_vertex(ChartRegion::cap_b, 0.0, 0.0, cap_point(true, 0.0, 0.0));
    M.cap_a_rings[0] = {M.tip_a};
    M.cap_b_rings[0] = {M.tip_b};
    for (int k = 1; k < Ncap; ++k) {
        const double phi = k * dphi;
        for (int m = 0; m < Ntheta; ++m) {
            M.cap_a_rings[static_cast<std::size_t>(k)].push_back(
                add_vertex(ChartRegion::cap_a, phi, theta_of(m), cap_point(false, phi, theta_of(m))));
            M.cap_b_rings[static_cast<std::size_t>(k)].push_back(
                add_vertex(ChartRegion::cap_b, phi, theta_of(m), cap_point(true, phi, theta_of(m))));
        }
    }
    M.cap_a_rings[static_cast<std::size_t>(Ncap)] = row_ids[0];
    M.cap_b_rings[static_cast<std::size_t>(Ncap)] = row_ids[static_cast<std::size_t>(Nt)];

    S->chart = std::move(chart);
    S->region = std::move(region);
    S->ambient = std::move(ambient);

    // --- triangulation ---
    std::vector<std::array<int, 3>> tris;
    for (int j = 0; j < Nt; ++j)
        for (int m = 0; m < Ntheta; ++m) {
            const int a = row_ids[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
            const int b = row_ids[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(m)];
            const int a1 = row_ids[static_cast<std::size_t>(j)][static_cast<std::size_t>((m + 1) % Ntheta)];
            const int b1 = row_ids[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>((m + 1) % Ntheta)];
            if ((j + m) % 2 == 0) {
                tris.push_back({a, b, b1});
                tris.push_back({a, b1, a1});
            } else {
                tris.push_back({a, b, a1});
                tris.push_back({a1, b, b1});
            }
        }
    auto stitch_cap = [&](const std::vector<std::vector<int>>& rings) {
        // Tip fan.
        const auto& r1 = rings[1];
        for (int m = 0; m < Ntheta; ++m)
            tris.push_back({rings[0][0], r1[static_cast<std::size_t>(m)],
                            r1[static_cast<std::size_t>((m + 1) % Ntheta)]});
        for (int k = 1; k < static_cast<int>(rings.size()) - 1; ++k) {
            const auto& in = rings[static_cast<std::size_t>(k)];
            const auto& out = rings[static_cast<std::size_t>(k + 1)];
            for (int m = 0; m < Ntheta; ++m) {
                const int a = in[static_cast<std::size_t>(m)];
                const int a1 = in[static_cast<std::size_t>((m + 1) % Ntheta)];
                const int b = out[static_cast<std::size_t>(m)];
                const int b1 = out[static_cast<std::size_t>((m + 1) % Ntheta)];
                tris.push_back({a, b, b1});
                tris.push_back({a, b1, a1});
            }
        }
    };
    stitch_cap(M.cap_a_rings);
    stitch_cap(M.cap_b_rings);
    S->tri = SimplicialComplex::closure(tris);

    // --- chord graph with exact in-chart weights ---
    const double ch_r = std::cosh(r), sh_r = std::sinh(r);
    auto cylinder_weight = [&](int dj, int dm) {
        const double a = ch_r * dj * dt;
        const double b = sh_r * dm * dtheta;
        return std::hypot(a, b);
    };
    auto sphere_weight = [&](double phi1, double th1, double phi2, double th2) {
        double cosang = std::cos(phi1) * std::cos(phi2) +
                        std::sin(phi1) * std::sin(phi2) * std::cos(th1 - th2);
        cosang = std::clamp(cosang, -1.0, 1.0);
        return sh_r * std::acos(cosang);
    };

    std::vector<std::vector<std::pair<int, double>>> adj(S->size());
    auto add_edge = [&](int u, int v, double wgt) {
        adj[static_cast<std::size_t>(u)].emplace_back(v, wgt);
        adj[static_cast<std::size_t>(v)].emplace_back(u, wgt);
    };

    for (int j = 0; j <= Nt; ++j)
        for (int m = 0; m < Ntheta; ++m)
            for (const auto& d : gen_detail::chord_directions()) {
                const int j2 = j + d[0];
                if (j2 < 0 || j2 > Nt) continue;
                const int m2 = ((m + d[1]) % Ntheta + Ntheta) % Ntheta;
                add_edge(row_ids[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)],
                         row_ids[static_cast<std::size_t>(j2)][static_cast<std::size_t>(m2)],
                         cylinder_weight(d[0], d[1]));
            }
    auto cap_chords = [&](const std::vector<std::vector<int>>& rings) {
        const int K = static_cast<int>(rings.size()) - 1;
        for (int k = 1; k <= K; ++k)
            for (int m = 0; m < Ntheta; ++m)
                for (const auto& d : gen_detail::chord_directions()) {
                    const int k2 = k + d[0];
                    if (k2 < 1 || k2 > K) continue;
                    const int m2 = ((m + d[1]) % Ntheta + Ntheta) % Ntheta;
                    add_edge(rings[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)],
                             rings[static_cast<std::size_t>(k2)][static_cast<std::size_t>(m2)],
                             sphere_weight(k * dphi, theta_of(m), k2 * dphi, theta_of(m2)));
                }
        // Tip spokes.
        for (int k = 1; k <= std::min(3, K); ++k)
            for (int m = 0; m < Ntheta; ++m)
                add_edge(rings[0][0], rings[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)],
                         sh_r * (k * dphi));
    };
    cap_chords(M.cap_a_rings);
    cap_chords(M.cap_b_rings);
    S->graph_adj = std::move(adj);

    if (equivariant) {
        // Central symmetry through the origin: (t, theta) -> (-t, theta + pi)
        // on the cylinder, cap A <-> cap B.
        std::vector<int> sigma(S->size());
        const int half = Ntheta / 2;
        for (int j = 0; j <= Nt; ++j)
            for (int m = 0; m < Ntheta; ++m)
                sigma[static_cast<std::size_t>(row_ids[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)])] =
                    row_ids[static_cast<std::size_t>(Nt - j)][static_cast<std::size_t>((m + half) % Ntheta)];
        sigma[static_cast<std::size_t>(M.tip_a)] = M.tip_b;
        sigma[static_cast<std::size_t>(M.tip_b)] = M.tip_a;
        for (int k = 1; k < Ncap; ++k)
            for (int m = 0; m < Ntheta; ++m) {
                sigma[static_cast<std::size_t>(M.cap_a_rings[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)])] =
                    M.cap_b_rings[static_cast<std::size_t>(k)][static_cast<std::size_t>((m + half) % Ntheta)];
                sigma[static_cast<std::size_t>(M.cap_b_rings[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)])] =
                    M.cap_a_rings[static_cast<std::size_t>(k)][static_cast<std::size_t>((m + half) % Ntheta)];
            }
        S->actions = {sigma};
    }

    validate_surface(*S);
    if (S->tri.euler_characteristic() != 2)
        throw ConstructionError("sphere tube: Euler characteristic != 2");
    M.surface = S;
    return M;
}

inline std::shared_ptr<SampledSurface> gen_sphere_tube(double l, double r, double h,
                                                       double max_radius_ratio = 0.1) {
    return gen_sphere_tube_mesh(l, r, h, max_radius_ratio).surface;
}

struct Rp2Tube {
    std::shared_ptr<SampledSurface> quotient;
    SurfacePtr cover;
    TubeMesh cover_mesh;
};

// Quotient of the tube sphere by the central symmetry: a projective plane
// collapsing to a segment of length l/2 (+caps).
inline Rp2Tube gen_rp2_tube(double l, double r, double h) {
    Rp2Tube out;
    out.cover_mesh = gen_sphere_tube_mesh(l, r, h, 0.1, /*equivariant=*/true);
    out.cover = out.cover_mesh.surface;
    auto Q = quotient_by_group(out.cover, 1e-9);
    Q->label = "rp2_tube(l=" + std::to_string(l) + ",r=" + std::to_string(r) + ")";
    if (Q->tri.euler_characteristic() != 1)
        throw ConstructionError("rp2 tube: Euler characteristic != 1");
    out.quotient = Q;
    return out;
}

// ---------------------------------------------------------------------------
// Double cover of a convex polygon in H^2: two triangulated copies glued
// along their common boundary. Homeomorphic to the 2-sphere.

inline std::shared_ptr<SampledSurface> gen_double_cover(
    const std::vector<std::array<double, 2>>& polygon, double h) {
    const int m = static_cast<int>(polygon.size());
    if (m < 3) throw ConfigError("double cover: need at least 3 vertices");
    // Convex position in the Klein chart (hyperbolic convexity is chart
    // convexity).
    double orient = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& a = polygon[static_cast<std::size_t>(i)];
        const auto& b = polygon[static_cast<std::size_t>((i + 1) % m)];
        const auto& c = polygon[static_cast<std::size_t>((i + 2) % m)];
        const double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (i == 0) orient = cr;
        if (cr * orient <= 0.0) throw ConfigError("double cover: vertices not in convex position");
    }
    std::array<double, 2> centroid{0.0, 0.0};
    for (const auto& p : polygon) {
        centroid[0] += p[0] / m;
        centroid[1] += p[1] / m;
    }

    // Subdivision level: hyperbolic length of the longest coarse edge / h.
    auto hp = [&](const std::array<double, 2>& p) { return HPoint::from_klein({p[0], p[1]}); };
    double longest = 0.0;
    for (int i = 0; i < m; ++i) {
        longest = std::max(longest, hyp_distance(hp(polygon[static_cast<std::size_t>(i)]),
                                                 hp(polygon[static_cast<std::size_t>((i + 1) % m)])));
        longest = std::max(longest, hyp_distance(hp(centroid), hp(polygon[static_cast<std::size_t>(i)])));
    }
    const int n = std::max(2, static_cast<int>(std::ceil(longest / h)));

    // Vertices are keyed by exact integer barycentric data over the corner set
    // {centroid = 0, polygon vertices 1..m} so shared subdivision points
    // coincide across coarse triangles.
    using Key = std::vector<std::pair<int, int>>;  // sorted (corner, weight), weights sum to n
    std::map<Key, int> interior_ids;  // copy 0
    std::map<Key, int> boundary_ids;  // shared by both copies
    std::map<Key, int> interior_ids_1;

    std::vector<std::array<double, 2>> chart;
    std::vector<std::array<double, 2>> corner_pos(static_cast<std::size_t>(m) + 1);
    corner_pos[0] = centroid;
    for (int i = 0; i < m; ++i) corner_pos[static_cast<std::size_t>(i + 1)] = polygon[static_cast<std::size_t>(i)];

    auto key_pos = [&](const Key& key) {
        std::array<double, 2> p{0.0, 0.0};
        for (const auto& [corner, weight] : key) {
            p[0] += corner_pos[static_cast<std::size_t>(corner)][0] * weight / n;
            p[1] += corner_pos[static_cast<std::size_t>(corner)][1] * weight / n;
        }
        return p;
    };
    auto is_boundary = [&](const Key& key) {
        for (const auto& [corner, weight] : key)
            if (corner == 0 && weight > 0) return false;
        return true;
    };
    auto vertex_for = [&](const Key& key, int copy) {
        if (is_boundary(key)) {
            auto it = boundary_ids.find(key);
            if (it != boundary_ids.end()) return it->second;
            chart.push_back(key_pos(key));
            boundary_ids[key] = static_cast<int>(chart.size()) - 1;
            return boundary_ids[key];
        }
        auto& ids = copy == 0 ? interior_ids : interior_ids_1;
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        chart.push_back(key_pos(key));
        ids[key] = static_cast<int>(chart.size()) - 1;
        return ids[key];
    };

    std::vector<std::array<int, 3>> tris;
    for (int e = 0; e < m; ++e) {
        const int cA = 0, cB = e + 1, cC = (e + 1) % m + 1;
        auto key_at = [&](int ia, int ib, int ic) {
            Key k;
            if (ia > 0) k.emplace_back(cA, ia);
            if (ib > 0) k.emplace_back(cB, ib);
            if (ic > 0) k.emplace_back(cC, ic);
            std::sort(k.begin(), k.end());
            return k;
        };
        for (int copy = 0; copy < 2; ++copy) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j + i < n; ++j) {
                    // Upward cell (i, j) in barycentric grid: corners
                    // (i,j), (i+1,j), (i,j+1) with third coord n-i-j...
                    const int k0 = vertex_for(key_at(n - i - j, i, j), copy);
                    const int k1 = vertex_for(key_at(n - i - j - 1, i + 1, j), copy);
                    const int k2 = vertex_for(key_at(n - i - j - 1, i, j + 1), copy);
                    tris.push_back({k0, k1, k2});
                    if (i + j < n - 1) {
                        const int k3 = vertex_for(key_at(n - i - j - 2, i + 1, j + 1), copy);
                        tris.push_back({k1, k3, k2});
                    }
                }
        }
    }

    auto S = std::make_shared<SampledSurface>();
    S->label = "double_cover(m=" + std::to_string(m) + ")";
    S->metric_kind = MetricKind::graph_approx;
    S->error_budget = 3.0 * h;
    S->resolution = h;
    S->backend = SampledSurface::Backend::graph;
    S->chart = chart;
    for (const auto& p : chart) S->ambient.push_back(HPoint::from_klein({p[0], p[1]}));
    S->tri = SimplicialComplex::closure(tris);

    std::vector<std::vector<std::pair<int, double>>> adj(S->size());
    for (const auto& e : S->tri.edges) {
        const double wgt = hyp_distance(S->ambient[static_cast<std::size_t>(e[0])],
                                        S->ambient[static_cast<std::size_t>(e[1])]);
        adj[static_cast<std::size_t>(e[0])].emplace_back(e[1], wgt);
        adj[static_cast<std::size_t>(e[1])].emplace_back(e[0], wgt);
    }
    S->graph_adj = std::move(adj);
    validate_surface(*S);
    if (S->tri.euler_characteristic() != 2)
        throw ConstructionError("double cover: Euler characteristic != 2");
    return S;
}

}  // namespace nearcycle
