#pragma once

// Hyperbolic geometry kernel for H^2 and H^3.
//
// Points are stored in the hyperboloid (Minkowski) model and exposed through
// the Klein chart: the open unit ball in which geodesics are affine chords.
// All closed forms below are derived in the hyperboloid model; the test suite
// validates them against numeric integration of the Klein chart metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearcycle {

using Vec4 = std::array<double, 4>;

// Minkowski form of signature (-,+,+,+).
inline double mink_dot(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline Vec4 vec_add(const Vec4& a, const Vec4& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Vec4 vec_sub(const Vec4& a, const Vec4& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

inline Vec4 vec_scale(double c, const Vec4& a) {
    return {c * a[0], c * a[1], c * a[2], c * a[3]};
}

// A point of H^n (n = 2 or 3). Invariants: unit timelike Minkowski vector on
// the upper sheet; Klein coordinates stay strictly inside the unit ball with
// margin 1e-12.
class HPoint {
  public:
    static constexpr double kBallMargin = 1e-12;

    HPoint() : m_{1.0, 0.0, 0.0, 0.0}, dim_(3) {}

    static HPoint from_klein(std::span<const double> k) {
        if (k.size() != 2 && k.size() != 3)
            throw std::invalid_argument("HPoint: Klein coordinates must have dimension 2 or 3");
        double n2 = 0.0;
        for (double c : k) n2 += c * c;
        if (n2 >= 1.0 - kBallMargin)
            throw std::domain_error("HPoint: Klein coordinates outside the open unit ball");
        const double x0 = 1.0 / std::sqrt(1.0 - n2);
        Vec4 m{x0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < k.size(); ++i) m[i + 1] = k[i] * x0;
        return HPoint(m, static_cast<int>(k.size()));
    }

    static HPoint from_klein(std::initializer_list<double> k) {
        return from_klein(std::span<const double>(k.begin(), k.size()));
    }

    // Accepts a timelike vector and normalizes it onto the upper sheet.
    static HPoint from_minkowski(const Vec4& v, int dim) {
        const double q = mink_dot(v, v);
        if (q >= 0.0)
            throw std::domain_error("HPoint: vector is not timelike");
        const double s = 1.0 / std::sqrt(-q);
        Vec4 m = vec_scale(v[0] > 0 ? s : -s, v);
        return HPoint(m, dim);
    }

    const Vec4& mink() const { return m_; }
    int dim() const { return dim_; }

    std::vector<double> klein() const {
        std::vector<double> k(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) k[static_cast<std::size_t>(i)] = m_[static_cast<std::size_t>(i) + 1] / m_[0];
        return k;
    }

  private:
    HPoint(const Vec4& m, int dim) : m_(m), dim_(dim) {}

    Vec4 m_;
    int dim_;
};

inline void check_same_dim(const HPoint& p, const HPoint& q) {
    if (p.dim() != q.dim())
        throw std::invalid_argument("hyperbolic: dimension mismatch");
}

inline double hyp_distance(const HPoint& p, const HPoint& q) {
    check_same_dim(p, q);
    // Chordal form: <p-q, p-q> = 2(cosh d - 1) = 4 sinh^2(d/2). Stable near
    // d = 0 where acosh(-<p,q>) loses half the significand.
    const Vec4 v = vec_sub(p.mink(), q.mink());
    const double s = std::max(0.0, mink_dot(v, v));
    return 2.0 * std::asinh(0.5 * std::sqrt(s));
}

// Point at arclength fraction s in [0,1] along the geodesic from p to q.
// p == q returns p.
inline HPoint geodesic_point(const HPoint& p, const HPoint& q, double s) {
    check_same_dim(p, q);
    const double d = hyp_distance(p, q);
    if (d < 1e-15) return p;
    // Unit tangent at p toward q.
    const Vec4 w = vec_scale(1.0 / std::sinh(d), vec_sub(q.mink(), vec_scale(std::cosh(d), p.mink())));
    const double t = s * d;
    const Vec4 x = vec_add(vec_scale(std::cosh(t), p.mink()), vec_scale(std::sinh(t), w));
    return HPoint::from_minkowski(x, p.dim());
}

// A geodesic subspace of dimension 1 or 2, given in the Klein chart by a base
// point and affine direction vectors. Internally kept as a Minkowski
// orthonormal basis (one timelike, k spacelike) of the spanning linear
// subspace.
class GeodesicSubspace {
  public:
    GeodesicSubspace(const HPoint& base, const std::vector<std::array<double, 3>>& directions)
        : base_(base), k_(static_cast<int>(directions.size())) {
        if (k_ < 1 || k_ > 2)
            throw std::invalid_argument("GeodesicSubspace: need 1 or 2 direction vectors");
        basis_[0] = base.mink();  // unit timelike by construction
        int have = 1;
        for (const auto& d : directions) {
            Vec4 v{0.0, d[0], d[1], d[2]};
            for (int i = 0; i < have; ++i) {
                const double sgn = (i == 0) ? -1.0 : 1.0;
                const double c = sgn * mink_dot(v, basis_[static_cast<std::size_t>(i)]);
                v = vec_sub(v, vec_scale(c, basis_[static_cast<std::size_t>(i)]));
            }
            const double n2 = mink_dot(v, v);
            if (n2 < 1e-20)
                throw std::invalid_argument("GeodesicSubspace: direction vectors linearly dependent");
            basis_[static_cast<std::size_t>(have)] = vec_scale(1.0 / std::sqrt(n2), v);
            ++have;
        }
    }

    const HPoint& base() const { return base_; }
    int subspace_dim() const { return k_; }
    int ambient_dim() const { return base_.dim(); }
    const Vec4& timelike() const { return basis_[0]; }
    const Vec4& spacelike(int i) const { return basis_[static_cast<std::size_t>(i) + 1]; }

    bool contains(const HPoint& p, double tol = 1e-10) const {
        Vec4 v = p.mink();
        const double c0 = -mink_dot(v, basis_[0]);
        v = vec_sub(v, vec_scale(c0, basis_[0]));
        for (int i = 0; i < k_; ++i) {
            const double c = mink_dot(v, basis_[static_cast<std::size_t>(i) + 1]);
            v = vec_sub(v, vec_scale(c, basis_[static_cast<std::size_t>(i) + 1]));
        }
        return std::sqrt(std::abs(mink_dot(v, v))) < tol;
    }

  private:
    HPoint base_;
    int k_;
    std::array<Vec4, 3> basis_{};
};

// Busemann-Feller nearest-point projection onto a geodesic subspace: the
// Minkowski-orthogonal projection onto the spanning subspace, renormalized.
inline HPoint project_to_geodesic(const HPoint& p, const GeodesicSubspace& L) {
    const double c0 = -mink_dot(p.mink(), L.timelike());
    Vec4 v = vec_scale(c0, L.timelike());
    for (int i = 0; i < L.subspace_dim(); ++i) {
        const double c = mink_dot(p.mink(), L.spacelike(i));
        v = vec_add(v, vec_scale(c, L.spacelike(i)));
    }
    return HPoint::from_minkowski(v, p.dim());
}

struct FermiCoords {
    double t = 0.0;      // signed arclength along the axis
    double r = 0.0;      // distance to the axis
    double theta = 0.0;  // angle in [0, 2*pi); 0 by convention when r == 0
};

// Orthonormal frame (e0 timelike on the axis, e1 axis tangent, e2/e3 parallel
// normals) for Fermi coordinates around a geodesic line in H^3 (or H^2, where
// theta is restricted to {0, pi}).
class FermiFrame {
  public:
    explicit FermiFrame(const GeodesicSubspace& axis) : dim_(axis.ambient_dim()) {
        if (axis.subspace_dim() != 1)
            throw std::invalid_argument("FermiFrame: axis must be 1-dimensional");
        e_[0] = axis.timelike();
        e_[1] = axis.spacelike(0);
        // Complete with coordinate vectors, Minkowski Gram-Schmidt.
        int have = 2;
        for (int seed = 1; seed <= 3 && have < dim_ + 1; ++seed) {
            Vec4 v{0.0, 0.0, 0.0, 0.0};
            v[static_cast<std::size_t>(seed)] = 1.0;
            v = vec_sub(v, vec_scale(-mink_dot(v, e_[0]), e_[0]));
            for (int i = 1; i < have; ++i)
                v = vec_sub(v, vec_scale(mink_dot(v, e_[static_cast<std::size_t>(i)]), e_[static_cast<std::size_t>(i)]));
            const double n2 = mink_dot(v, v);
            if (n2 < 1e-14) continue;
            e_[static_cast<std::size_t>(have)] = vec_scale(1.0 / std::sqrt(n2), v);
            ++have;
        }
        if (have != dim_ + 1)
            throw std::invalid_argument("FermiFrame: failed to complete the frame");
    }

    int ambient_dim() const { return dim_; }

    // e(0) timelike axis base, e(1) axis tangent, e(2)/e(3) parallel normals.
    const Vec4& e(int i) const { return e_[static_cast<std::size_t>(i)]; }

    HPoint axis_point(double t) const {
        return HPoint::from_minkowski(
            vec_add(vec_scale(std::cosh(t), e_[0]), vec_scale(std::sinh(t), e_[1])), dim_);
    }

    HPoint at(const FermiCoords& fc) const {
        Vec4 foot = vec_add(vec_scale(std::cosh(fc.t), e_[0]), vec_scale(std::sinh(fc.t), e_[1]));
        Vec4 n = vec_scale(std::cos(fc.theta), e_[2]);
        if (dim_ == 3) n = vec_add(n, vec_scale(std::sin(fc.theta), e_[3]));
        Vec4 x = vec_add(vec_scale(std::cosh(fc.r), foot), vec_scale(std::sinh(fc.r), n));
        return HPoint::from_minkowski(x, dim_);
    }

    FermiCoords coords(const HPoint& p) const {
        const double c0 = -mink_dot(p.mink(), e_[0]);
        const double c1 = mink_dot(p.mink(), e_[1]);
        const double c2 = mink_dot(p.mink(), e_[2]);
        const double c3 = (dim_ == 3) ? mink_dot(p.mink(), e_[3]) : 0.0;
        FermiCoords fc;
        fc.t = std::atanh(c1 / c0);
        const double nr = std::hypot(c2, c3);
        fc.r = std::asinh(nr);
        if (nr > 1e-14) {
            fc.theta = std::atan2(c3, c2);
            if (fc.theta < 0.0) fc.theta += 2.0 * std::acos(-1.0);
        } else {
            fc.theta = 0.0;
        }
        return fc;
    }

  private:
    int dim_;
    std::array<Vec4, 4> e_{};
};

inline FermiCoords fermi_from_point(const FermiFrame& frame, const HPoint& p) {
    return frame.coords(p);
}

inline HPoint fermi_to_point(const FermiFrame& frame, const FermiCoords& fc) {
    return frame.at(fc);
}

// Geodesic symmetry through a point: an involutive isometry. In the
// hyperboloid model sigma(p) = -p - 2<p,c>c.
inline HPoint point_reflection(const HPoint& center, const HPoint& p) {
    check_same_dim(center, p);
    const double c = mink_dot(p.mink(), center.mink());
    const Vec4 x = vec_sub(vec_scale(-1.0, p.mink()), vec_scale(2.0 * c, center.mink()));
    return HPoint::from_minkowski(x, p.dim());
}

// Angle opposite to the side of length c in the curvature -1 comparison
// triangle with sides a, b, c (hyperbolic law of cosines). Degenerate
// triangles return pi (c = a+b) and 0 (c = |a-b|).
inline double comparison_angle(double a, double b, double c) {
    constexpr double kTol = 1e-9;
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("comparison_angle: sides a, b must be positive");
    if (c > a + b + kTol || c < std::abs(a - b) - kTol)
        throw std::domain_error("comparison_angle: side c violates the triangle inequality");
    const double denom = std::sinh(a) * std::sinh(b);
    const double num = std::cosh(a) * std::cosh(b) - std::cosh(c);
    const double cosv = std::clamp(num / denom, -1.0, 1.0);
    return std::acos(cosv);
}

}  // namespace nearcycle
