#pragma once

// Extended constrained zonotopes
//     Z(G, c, A, b, h) = { G xi + c : A xi = b, |xi_j| <= h_j }
// with h_j allowed to be +inf (an unbounded generator direction).
//
// All set algebra is exact: no generator or constraint reduction happens
// here. LP-backed queries (membership, emptiness, interval hull) go through
// czest::lp.

#include "czest/errors.hpp"
#include "czest/linalg.hpp"
#include "czest/lp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace czest
{

inline constexpr double kUnbounded = kInf;

// Axis-aligned box, bounds may be infinite.
struct Box
{
    Vector lo;
    Vector hi;

    Box() = default;
    Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_))
    {
        if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo/hi size mismatch.");
        for (Eigen::Index j = 0; j < lo.size(); ++j)
        {
            if (std::isnan(lo(j)) || std::isnan(hi(j)) || lo(j) > hi(j))
                throw std::invalid_argument("Box: requires lo <= hi componentwise.");
        }
    }

    static Box symmetric(const Vector& center, double half_width)
    {
        return Box(center.array() - half_width, center.array() + half_width);
    }

    int dim() const { return static_cast<int>(lo.size()); }
    Vector width() const { return hi - lo; }
    Vector center() const { return 0.5 * (lo + hi); }

    double max_width() const { return dim() == 0 ? 0.0 : width().maxCoeff(); }

    bool contains(const Vector& x, double tol = lp::kFeasTol) const
    {
        if (x.size() != lo.size()) throw std::invalid_argument("Box::contains: dimension mismatch.");
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (x(j) < lo(j) - tol || x(j) > hi(j) + tol) return false;
        return true;
    }

    bool is_bounded() const { return lo.allFinite() && hi.allFinite(); }
};

class ConstrainedZonotope
{
    public:
        ConstrainedZonotope() = default;

        ConstrainedZonotope(Matrix G, Vector c, Matrix A, Vector b, Vector h)
            : G_(std::move(G)), c_(std::move(c)), A_(std::move(A)), b_(std::move(b)), h_(std::move(h))
        {
            validate();
        }

        // Classical zonotope: unit half-widths, no constraints.
        ConstrainedZonotope(Matrix G, Vector c)
            : G_(std::move(G)), c_(std::move(c))
        {
            A_.resize(0, G_.cols());
            b_.resize(0);
            h_ = Vector::Ones(G_.cols());
            validate();
        }

        static ConstrainedZonotope point(const Vector& x)
        {
            return ConstrainedZonotope(Matrix(x.size(), 0), x);
        }

        // The whole space R^n: identity generators with infinite half-widths.
        static ConstrainedZonotope unbounded(int n)
        {
            return ConstrainedZonotope(Matrix::Identity(n, n), Vector::Zero(n), Matrix(0, n), Vector(0),
                                       Vector::Constant(n, kUnbounded));
        }

        int dim() const { return static_cast<int>(c_.size()); }
        int num_generators() const { return static_cast<int>(G_.cols()); }
        int num_constraints() const { return static_cast<int>(A_.rows()); }

        const Matrix& G() const { return G_; }
        const Vector& c() const { return c_; }
        const Matrix& A() const { return A_; }
        const Vector& b() const { return b_; }
        const Vector& h() const { return h_; }

        bool has_unbounded_generator() const
        {
            for (Eigen::Index j = 0; j < h_.size(); ++j)
                if (std::isinf(h_(j))) return true;
            return false;
        }

        friend bool operator==(const ConstrainedZonotope& a, const ConstrainedZonotope& b)
        {
            auto same = [](const auto& x, const auto& y) {
                return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
            };
            return same(a.G_, b.G_) && same(a.c_, b.c_) && same(a.A_, b.A_) && same(a.b_, b.b_) && same(a.h_, b.h_);
        }

    private:
        Matrix G_;
        Vector c_;
        Matrix A_;
        Vector b_;
        Vector h_;

        void validate() const
        {
            if (G_.rows() != c_.size())
                throw std::invalid_argument("ConstrainedZonotope: rows(G) must equal len(c).");
            if (A_.cols() != G_.cols() || h_.size() != G_.cols())
                throw std::invalid_argument("ConstrainedZonotope: cols(G), cols(A) and len(h) must agree.");
            if (A_.rows() != b_.size())
                throw std::invalid_argument("ConstrainedZonotope: rows(A) must equal len(b).");
            for (Eigen::Index j = 0; j < h_.size(); ++j)
            {
                if (std::isnan(h_(j)) || h_(j) < 0.0)
                    throw std::invalid_argument("ConstrainedZonotope: half-widths must lie in [0, +inf].");
            }
        }
};

using CZ = ConstrainedZonotope;

// ---------------------------------------------------------------------------
// Construction

inline ConstrainedZonotope from_box(const Box& box)
{
    const int n = box.dim();
    Matrix G = Matrix::Zero(n, n);
    Vector c(n);
    Vector h(n);
    for (int j = 0; j < n; ++j)
    {
        const double lo = box.lo(j), hi = box.hi(j);
        const bool lo_inf = std::isinf(lo), hi_inf = std::isinf(hi);
        if (lo_inf != hi_inf)
            throw std::invalid_argument("from_box: one-sided infinite interval is not representable.");
        if (lo_inf)
        {
            G(j, j) = 1.0;
            c(j) = 0.0;
            h(j) = kUnbounded;
        }
        else
        {
            G(j, j) = 0.5 * (hi - lo);
            c(j) = 0.5 * (hi + lo);
            h(j) = 1.0;
        }
    }
    return ConstrainedZonotope(std::move(G), std::move(c), Matrix(0, n), Vector(0), std::move(h));
}

// ---------------------------------------------------------------------------
// Set algebra

inline ConstrainedZonotope linear_map(const Matrix& M, const ConstrainedZonotope& Z)
{
    require(M.cols() == Z.dim(), "linear_map: cols(M) must equal dim(Z).");
    return ConstrainedZonotope(M * Z.G(), M * Z.c(), Z.A(), Z.b(), Z.h());
}

inline ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& Z1, const ConstrainedZonotope& Z2)
{
    require(Z1.dim() == Z2.dim(), "minkowski_sum: dimension mismatch.");
    Matrix G(Z1.dim(), Z1.num_generators() + Z2.num_generators());
    G << Z1.G(), Z2.G();
    return ConstrainedZonotope(std::move(G), Z1.c() + Z2.c(), block_diag({Z1.A(), Z2.A()}),
                               vstack({Z1.b(), Z2.b()}), vstack({Z1.h(), Z2.h()}));
}

inline ConstrainedZonotope cartesian_product(std::span<const ConstrainedZonotope> parts)
{
    require(!parts.empty(), "cartesian_product: empty list.");
    std::vector<Matrix> Gs, As;
    std::vector<Vector> cs, bs, hs;
    for (const auto& p : parts)
    {
        Gs.push_back(p.G());
        As.push_back(p.A());
        cs.push_back(p.c());
        bs.push_back(p.b());
        hs.push_back(p.h());
    }
    return ConstrainedZonotope(block_diag(std::span<const Matrix>(Gs)), vstack(std::span<const Vector>(cs)),
                               block_diag(std::span<const Matrix>(As)), vstack(std::span<const Vector>(bs)),
                               vstack(std::span<const Vector>(hs)));
}

inline ConstrainedZonotope cartesian_product(std::initializer_list<ConstrainedZonotope> parts)
{
    std::vector<ConstrainedZonotope> v(parts);
    return cartesian_product(std::span<const ConstrainedZonotope>(v));
}

// Keeps Z1's affine part and couples Z2 through G1 xi1 - G2 xi2 = c2 - c1.
inline ConstrainedZonotope intersect(const ConstrainedZonotope& Z1, const ConstrainedZonotope& Z2)
{
    require(Z1.dim() == Z2.dim(), "intersect: dimension mismatch.");
    const int n = Z1.dim();
    const int g1 = Z1.num_generators(), g2 = Z2.num_generators();
    Matrix G = Matrix::Zero(n, g1 + g2);
    G.leftCols(g1) = Z1.G();
    Matrix A = Matrix::Zero(Z1.num_constraints() + Z2.num_constraints() + n, g1 + g2);
    A.block(0, 0, Z1.num_constraints(), g1) = Z1.A();
    A.block(Z1.num_constraints(), g1, Z2.num_constraints(), g2) = Z2.A();
    const int r = Z1.num_constraints() + Z2.num_constraints();
    A.block(r, 0, n, g1) = Z1.G();
    A.block(r, g1, n, g2) = -Z2.G();
    Vector b = vstack({Z1.b(), Z2.b(), Vector(Z2.c() - Z1.c())});
    return ConstrainedZonotope(std::move(G), Z1.c(), std::move(A), std::move(b), vstack({Z1.h(), Z2.h()}));
}

// { x in Zx : Y - H x in Vset }, realized by appending the constraint
// H (G xi + c) + G_V xi_V = Y - c_V. No rank condition on H is needed.
inline ConstrainedZonotope intersect_under_map(const ConstrainedZonotope& Zx, const Matrix& H, const Vector& Y,
                                               const ConstrainedZonotope& Vset)
{
    require(H.cols() == Zx.dim(), "intersect_under_map: cols(H) must equal dim(Zx).");
    require(H.rows() == Vset.dim() && H.rows() == Y.size(),
            "intersect_under_map: rows(H), dim(Vset) and len(Y) must agree.");
    const int n = Zx.dim();
    const int m = static_cast<int>(H.rows());
    const int gx = Zx.num_generators(), gv = Vset.num_generators();
    const int cx = Zx.num_constraints(), cv = Vset.num_constraints();
    Matrix G = Matrix::Zero(n, gx + gv);
    G.leftCols(gx) = Zx.G();
    Matrix A = Matrix::Zero(cx + cv + m, gx + gv);
    A.block(0, 0, cx, gx) = Zx.A();
    A.block(cx, gx, cv, gv) = Vset.A();
    A.block(cx + cv, 0, m, gx) = H * Zx.G();
    A.block(cx + cv, gx, m, gv) = Vset.G();
    Vector b = vstack({Zx.b(), Vset.b(), Vector(Y - Vset.c() - H * Zx.c())});
    return ConstrainedZonotope(std::move(G), Zx.c(), std::move(A), std::move(b), vstack({Zx.h(), Vset.h()}));
}

inline ConstrainedZonotope project(const ConstrainedZonotope& Z, std::span<const int> coords)
{
    std::set<int> seen;
    for (int i : coords)
    {
        if (i < 0 || i >= Z.dim()) throw std::out_of_range("project: coordinate index out of range.");
        if (!seen.insert(i).second) throw std::invalid_argument("project: duplicate coordinate index.");
    }
    const int k = static_cast<int>(coords.size());
    Matrix G(k, Z.num_generators());
    Vector c(k);
    for (int r = 0; r < k; ++r)
    {
        G.row(r) = Z.G().row(coords[r]);
        c(r) = Z.c()(coords[r]);
    }
    return ConstrainedZonotope(std::move(G), std::move(c), Z.A(), Z.b(), Z.h());
}

inline ConstrainedZonotope project(const ConstrainedZonotope& Z, std::initializer_list<int> coords)
{
    std::vector<int> v(coords);
    return project(Z, std::span<const int>(v));
}

// Contiguous coordinate block [offset, offset + len).
inline ConstrainedZonotope project_block(const ConstrainedZonotope& Z, int offset, int len)
{
    std::vector<int> idx(len);
    for (int i = 0; i < len; ++i) idx[i] = offset + i;
    return project(Z, std::span<const int>(idx));
}

// Drops generators that contribute nothing (zero half-width, or zero column
// in both G and A). Not applied implicitly by any operation.
inline ConstrainedZonotope compact(const ConstrainedZonotope& Z)
{
    std::vector<int> keep;
    for (int j = 0; j < Z.num_generators(); ++j)
    {
        const bool dead = Z.h()(j) == 0.0 ||
                          (Z.G().col(j).isZero(0.0) && (Z.num_constraints() == 0 || Z.A().col(j).isZero(0.0)));
        if (!dead) keep.push_back(j);
    }
    Matrix G(Z.dim(), keep.size()), A(Z.num_constraints(), keep.size());
    Vector h(keep.size());
    for (size_t k = 0; k < keep.size(); ++k)
    {
        G.col(k) = Z.G().col(keep[k]);
        A.col(k) = Z.A().col(keep[k]);
        h(k) = Z.h()(keep[k]);
    }
    return ConstrainedZonotope(std::move(G), Z.c(), std::move(A), Z.b(), std::move(h));
}

// ---------------------------------------------------------------------------
// LP-backed queries

namespace detail
{

inline Vector lower_bounds(const Vector& h) { return -h; }

inline double box_radius(const Eigen::Ref<const Eigen::RowVectorXd>& g, const Vector& h)
{
    double r = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j)
    {
        if (g(j) == 0.0) continue;
        r += std::abs(g(j)) * h(j);
    }
    return r;
}

} // namespace detail

// `start` (optional) is a generator-coefficient guess used to warm the LP;
// it never changes the answer.
inline bool contains(const ConstrainedZonotope& Z, const Vector& x, const Vector* start = nullptr)
{
    require(x.size() == Z.dim(), "contains: dimension mismatch.");
    const int n = Z.dim(), nc = Z.num_constraints(), ng = Z.num_generators();
    Matrix M(n + nc, ng);
    M << Z.G(), Z.A();
    Vector rhs = vstack({Vector(x - Z.c()), Z.b()});
    lp::Workspace ws(M, rhs, detail::lower_bounds(Z.h()), Z.h(), start);
    return ws.feasible();
}

inline bool is_empty(const ConstrainedZonotope& Z, const Vector* start = nullptr)
{
    if (Z.num_constraints() == 0) return false;
    lp::Workspace ws(Z.A(), Z.b(), detail::lower_bounds(Z.h()), Z.h(), start);
    return !ws.feasible();
}

struct HullDetail
{
    Box box;
    // Generator coefficients attaining lo_j / hi_j (empty when unbounded).
    std::vector<Vector> argmin;
    std::vector<Vector> argmax;
    // A feasible coefficient vector (the last LP point); empty when unconstrained.
    Vector witness;
};

// Exact coordinate-wise bounds by 2n LPs sharing one feasible workspace.
inline HullDetail interval_hull_detail(const ConstrainedZonotope& Z, const Vector* start = nullptr)
{
    const int n = Z.dim(), ng = Z.num_generators();
    Vector lo(n), hi(n);
    HullDetail out;
    out.argmin.resize(n);
    out.argmax.resize(n);

    if (Z.num_constraints() == 0)
    {
        for (int j = 0; j < n; ++j)
        {
            const double r = detail::box_radius(Z.G().row(j), Z.h());
            lo(j) = Z.c()(j) - r;
            hi(j) = Z.c()(j) + r;
            if (std::isfinite(r))
            {
                Vector xi_lo(ng), xi_hi(ng);
                for (int g = 0; g < ng; ++g)
                {
                    const double s = Z.G()(j, g) > 0.0 ? 1.0 : (Z.G()(j, g) < 0.0 ? -1.0 : 0.0);
                    xi_lo(g) = -s * Z.h()(g);
                    xi_hi(g) = s * Z.h()(g);
                }
                out.argmin[j] = xi_lo;
                out.argmax[j] = xi_hi;
            }
        }
        out.box = Box(lo, hi);
        return out;
    }

    lp::Workspace ws(Z.A(), Z.b(), detail::lower_bounds(Z.h()), Z.h(), start);
    if (!ws.feasible()) throw EmptySetError("interval_hull: set is empty.");
    for (int j = 0; j < n; ++j)
    {
        const Vector obj = Z.G().row(j).transpose();
        if (obj.isZero(0.0))
        {
            lo(j) = hi(j) = Z.c()(j);
            out.argmin[j] = out.argmax[j] = ws.point();
            continue;
        }
        const auto smin = ws.optimize(obj, lp::Sense::Minimize);
        if (smin.optimal())
        {
            lo(j) = smin.value + Z.c()(j);
            out.argmin[j] = smin.point;
        }
        else lo(j) = -kInf;
        const auto smax = ws.optimize(obj, lp::Sense::Maximize);
        if (smax.optimal())
        {
            hi(j) = smax.value + Z.c()(j);
            out.argmax[j] = smax.point;
        }
        else hi(j) = kInf;
        // Round-off can cross for degenerate (flat) coordinates.
        if (lo(j) > hi(j)) lo(j) = hi(j) = 0.5 * (lo(j) + hi(j));
    }
    out.witness = ws.point();
    out.box = Box(lo, hi);
    return out;
}

inline Box interval_hull(const ConstrainedZonotope& Z, const Vector* start = nullptr)
{
    return interval_hull_detail(Z, start).box;
}

inline double diameter_inf(const Box& box) { return box.max_width(); }

inline double diameter_inf(const ConstrainedZonotope& Z) { return diameter_inf(interval_hull(Z)); }

// Unconstrained box CZ with diagonal generators (h = 1) covering the hull.
inline ConstrainedZonotope hull_zonotope(const Box& box) { return from_box(box); }

} // namespace czest
