#pragma once

// Built-in oracle suites behind `czest verify`:
//   geometry  - sampling oracles for the set algebra and hull queries;
//   filters   - update-intersection equivalence and an exhaustive lattice
//               search on the two-agent scalar scenario;
//   ordering  - containment and hull ordering on short five-agent runs.

#include "czest/czono.hpp"
#include "czest/filters.hpp"
#include "czest/scenario.hpp"
#include "czest/simharness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace czest::verify
{

struct CheckResult
{
    std::string suite;
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerifyOptions
{
    std::string filter = "all";   // geometry | filters | ordering | all
    std::uint64_t seed = 2024;
    bool inject_fault = false;    // flips the coupling offset sign in update_intersection
    int cases = 200;
    int probes = 1000;            // sampled points per case
};

// ---------------------------------------------------------------------------
// Random sets and samplers

class Random
{
    public:
        explicit Random(std::uint64_t seed) : s_(seed) {}
        double uniform(double lo, double hi) { return s_.uniform(lo, hi); }
        int integer(int lo, int hi) { return lo + static_cast<int>(s_.below(static_cast<std::uint64_t>(hi - lo + 1))); }

        Matrix matrix(int r, int c, double scale = 1.0)
        {
            Matrix m(r, c);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
            return m;
        }
        Vector vector(int n, double scale = 1.0) { return matrix(n, 1, scale).col(0); }

    private:
        NoiseSampler s_;
};

// A non-empty constrained zonotope together with a strictly interior
// feasible coefficient vector.
struct Witnessed
{
    ConstrainedZonotope set;
    Vector xi;
};

inline Witnessed random_cz(Random& rng, int n, int ng, int nc)
{
    Vector h(ng);
    for (int j = 0; j < ng; ++j) h(j) = rng.uniform(0.5, 1.5);
    Vector xi(ng);
    for (int j = 0; j < ng; ++j) xi(j) = rng.uniform(-0.6, 0.6) * h(j);
    Matrix A = rng.matrix(nc, ng);
    Vector b = A * xi;
    return {ConstrainedZonotope(rng.matrix(n, ng), rng.vector(n, 2.0), std::move(A), std::move(b), std::move(h)), xi};
}

// Hit-and-run inside {A xi = b, |xi| <= h} starting from a feasible xi.
class SetSampler
{
    public:
        SetSampler(const ConstrainedZonotope& z, Vector start) : z_(z), xi_(std::move(start))
        {
            const int ng = z.num_generators();
            if (z.num_constraints() == 0) null_ = Matrix::Identity(ng, ng);
            else
            {
                Eigen::FullPivLU<Matrix> lu(z.A());
                null_ = lu.kernel();
                if (null_.cols() == 1 && null_.isZero(0.0)) null_.resize(ng, 0);
            }
        }

        Vector next(Random& rng)
        {
            if (null_.cols() > 0)
            {
                const Vector dir = null_ * rng.vector(static_cast<int>(null_.cols()));
                double tlo = -1e300, thi = 1e300;
                for (int j = 0; j < dir.size(); ++j)
                {
                    if (std::abs(dir(j)) < 1e-14) continue;
                    const double a = (-z_.h()(j) - xi_(j)) / dir(j), b = (z_.h()(j) - xi_(j)) / dir(j);
                    tlo = std::max(tlo, std::min(a, b));
                    thi = std::min(thi, std::max(a, b));
                }
                if (tlo < thi) xi_ += rng.uniform(tlo, thi) * dir;
            }
            return xi_;
        }

        Vector point(Random& rng) { return z_.G() * next(rng) + z_.c(); }

    private:
        const ConstrainedZonotope& z_;
        Vector xi_;
        Matrix null_;
};

// Points in an enlarged hull box: a mix of members and non-members.
inline Vector probe(Random& rng, const Box& hull, double grow = 0.5)
{
    Vector x(hull.dim());
    for (int j = 0; j < hull.dim(); ++j)
    {
        const double w = hull.hi(j) - hull.lo(j) + 1e-3;
        x(j) = rng.uniform(hull.lo(j) - grow * w, hull.hi(j) + grow * w);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Geometry suite

namespace detail
{

struct Tally
{
    int failures = 0;
    std::string first;

    void fail(const std::string& what)
    {
        if (failures++ == 0) first = what;
    }

    CheckResult result(const std::string& suite, const std::string& name, int cases) const
    {
        return {suite, name, failures == 0,
                failures == 0 ? std::to_string(cases) + " cases"
                              : std::to_string(failures) + " failures; first: " + first};
    }
};

} // namespace detail

inline std::vector<CheckResult> geometry_suite(const VerifyOptions& opt)
{
    std::vector<CheckResult> out;
    Random rng(opt.seed);
    const int cases = opt.cases;
    const int probes = opt.probes;

    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(1, 3);
            auto z1 = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            auto z2 = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            const auto sum = minkowski_sum(z1.set, z2.set);
            SetSampler s1(z1.set, z1.xi), s2(z2.set, z2.xi);
            for (int p = 0; p < probes; ++p)
                if (!contains(sum, s1.point(rng) + s2.point(rng))) t.fail("case " + std::to_string(c));
        }
        out.push_back(t.result("geometry", "minkowski_sum contains pairwise sums", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(1, 3);
            auto z = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            const Matrix M = rng.matrix(rng.integer(1, 3), n);
            const auto img = linear_map(M, z.set);
            SetSampler s(z.set, z.xi);
            for (int p = 0; p < probes; ++p)
                if (!contains(img, M * s.point(rng))) t.fail("case " + std::to_string(c));
        }
        out.push_back(t.result("geometry", "linear_map contains mapped points", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(1, 3);
            auto z1 = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            auto z2 = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 1));
            const auto both = intersect(z1.set, z2.set);
            const Box hull = interval_hull(z1.set);
            SetSampler s1(z1.set, z1.xi);
            for (int p = 0; p < probes; ++p)
            {
                const Vector x = (p % 2) ? s1.point(rng) : probe(rng, hull);
                if (contains(both, x) != (contains(z1.set, x) && contains(z2.set, x))) t.fail("case " + std::to_string(c));
            }
        }
        out.push_back(t.result("geometry", "intersect membership biconditional", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(1, 3), m = rng.integer(1, 3);
            auto z = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            auto v = random_cz(rng, m, rng.integer(1, 4), rng.integer(0, 1));
            const Matrix H = rng.matrix(m, n);
            SetSampler sz(z.set, z.xi), sv(v.set, v.xi);
            const Vector Y = H * sz.point(rng) + sv.point(rng);
            const auto upd = intersect_under_map(z.set, H, Y, v.set);
            const Box hull = interval_hull(z.set);
            for (int p = 0; p < probes; ++p)
            {
                const Vector x = (p % 2) ? sz.point(rng) : probe(rng, hull);
                if (contains(upd, x) != (contains(z.set, x) && contains(v.set, Vector(Y - H * x))))
                    t.fail("case " + std::to_string(c));
            }
        }
        out.push_back(t.result("geometry", "intersect_under_map membership biconditional", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            auto z = random_cz(rng, rng.integer(1, 3), rng.integer(1, 6), rng.integer(0, 2));
            const auto hd = interval_hull_detail(z.set);
            for (int j = 0; j < z.set.dim(); ++j)
            {
                for (const auto* pt : {&hd.argmin[static_cast<size_t>(j)], &hd.argmax[static_cast<size_t>(j)]})
                {
                    const Vector& xi = *pt;
                    const double bound = pt == &hd.argmin[static_cast<size_t>(j)] ? hd.box.lo(j) : hd.box.hi(j);
                    const double scale = 1.0 + std::abs(bound);
                    bool ok = xi.size() == z.set.num_generators();
                    if (ok)
                    {
                        ok = ok && std::abs(z.set.G().row(j).dot(xi) + z.set.c()(j) - bound) <= 1e-9 * scale;
                        if (z.set.num_constraints() > 0) ok = ok && (z.set.A() * xi - z.set.b()).cwiseAbs().maxCoeff() <= 1e-8;
                        ok = ok && (xi.cwiseAbs() - z.set.h()).maxCoeff() <= 1e-9;
                    }
                    if (!ok) t.fail("case " + std::to_string(c) + " coordinate " + std::to_string(j));
                }
            }
        }
        out.push_back(t.result("geometry", "interval hull bounds attained by feasible points", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(2, 3);
            auto z = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            std::vector<int> coords;
            for (int i = 0; i < n; ++i)
                if (rng.integer(0, 1) == 1) coords.push_back(i);
            if (coords.empty()) coords.push_back(0);
            const auto pz = project(z.set, std::span<const int>(coords));
            SetSampler s(z.set, z.xi);
            for (int p = 0; p < probes; ++p)
            {
                const Vector x = s.point(rng);
                Vector sel(static_cast<Eigen::Index>(coords.size()));
                for (size_t i = 0; i < coords.size(); ++i) sel(static_cast<Eigen::Index>(i)) = x(coords[i]);
                if (!contains(pz, sel)) t.fail("forward, case " + std::to_string(c));
            }
            // Points of the projection, biased to its hull boundary, have a
            // preimage: the slice of Z through them is non-empty.
            Matrix S = Matrix::Zero(static_cast<Eigen::Index>(coords.size()), n);
            for (size_t i = 0; i < coords.size(); ++i) S(static_cast<Eigen::Index>(i), coords[i]) = 1.0;
            const auto point0 = from_box(Box(Vector::Zero(S.rows()), Vector::Zero(S.rows())));
            const auto hd = interval_hull_detail(pz);
            std::vector<Vector> ys;
            for (const auto& xi : hd.argmin) ys.push_back(pz.G() * xi + pz.c());
            for (const auto& xi : hd.argmax) ys.push_back(pz.G() * xi + pz.c());
            SetSampler sp(pz, hd.argmax.front());
            while (ys.size() < 100) ys.push_back(sp.point(rng));
            for (const auto& y : ys)
                if (is_empty(intersect_under_map(z.set, S, y, point0))) t.fail("preimage, case " + std::to_string(c));
        }
        out.push_back(t.result("geometry", "projection soundness", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            const int n = rng.integer(1, 3);
            auto z = random_cz(rng, n, rng.integer(1, 6), rng.integer(0, 2));
            auto cut = random_cz(rng, n, rng.integer(1, 4), 0);
            const auto sub = intersect(z.set, cut.set);
            if (is_empty(sub)) continue;
            const Box outer = interval_hull(z.set), inner = interval_hull(sub);
            for (int j = 0; j < n; ++j)
                if (inner.lo(j) < outer.lo(j) - 1e-9 || inner.hi(j) > outer.hi(j) + 1e-9) t.fail("case " + std::to_string(c));
        }
        out.push_back(t.result("geometry", "hull monotone under inclusion", cases));
    }
    {
        detail::Tally t;
        for (int c = 0; c < cases; ++c)
        {
            auto z = random_cz(rng, rng.integer(1, 3), rng.integer(1, 6), rng.integer(0, 2));
            const double d = diameter_inf(z.set);
            SetSampler s(z.set, z.xi);
            std::vector<Vector> pts;
            for (int p = 0; p < 142; ++p) pts.push_back(s.point(rng));   // about 10^4 pairs
            double brute = 0.0;
            for (size_t a = 0; a < pts.size(); ++a)
                for (size_t b = a + 1; b < pts.size(); ++b) brute = std::max(brute, (pts[a] - pts[b]).cwiseAbs().maxCoeff());
            if (brute > d + 1e-9) t.fail("case " + std::to_string(c));
        }
        out.push_back(t.result("geometry", "sampled diameter never exceeds the hull diameter", cases));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Filter suites

struct IntersectionInstance
{
    ConstrainedZonotope own;
    std::vector<ReceivedJoint> received;
    int block_dim = 1;
    Vector common;   // a point of block i shared by every joint
};

// Joints that all contain the same block-i point, so the intersection is non-empty.
inline IntersectionInstance random_intersection_instance(Random& rng)
{
    IntersectionInstance inst;
    const int n = rng.integer(1, 2);
    inst.block_dim = n;
    inst.common = rng.vector(n, 2.0);
    auto make = [&](int blocks, int alpha) {
        auto w = random_cz(rng, blocks * n, rng.integer(n, n + 4), rng.integer(0, 2));
        Vector c = w.set.c();
        const Vector at = w.set.G() * w.xi + c;
        c.segment(alpha * n, n) += inst.common - at.segment(alpha * n, n);
        return ConstrainedZonotope(w.set.G(), c, w.set.A(), w.set.b(), w.set.h());
    };
    inst.own = make(rng.integer(1, 3), 0);
    const int nl = rng.integer(0, 3);
    for (int l = 0; l < nl; ++l)
    {
        const int blocks = rng.integer(2, 4);
        const int alpha = rng.integer(1, blocks - 1);
        inst.received.push_back({l + 10, alpha, blocks, make(blocks, alpha)});
    }
    return inst;
}

inline ConstrainedZonotope intersection_by_primitives(const IntersectionInstance& inst)
{
    auto z = project_block(inst.own, 0, inst.block_dim);
    for (const auto& r : inst.received) z = intersect(z, project_block(r.joint, r.alpha * inst.block_dim, inst.block_dim));
    return z;
}

inline CheckResult update_intersection_check(const VerifyOptions& opt, int instances, int probes_per_instance)
{
    Random rng(opt.seed + 17);
    detail::Tally t;
    for (int c = 0; c < instances; ++c)
    {
        const auto inst = random_intersection_instance(rng);
        const auto stacked = update_intersection(inst.own, inst.block_dim, inst.received, {opt.inject_fault});
        const auto prim = intersection_by_primitives(inst);
        const Box hull = interval_hull(project_block(inst.own, 0, inst.block_dim));
        int disagree = 0;
        for (int p = 0; p < probes_per_instance; ++p)
        {
            const Vector x = p == 0 ? inst.common : probe(rng, hull, 0.2);
            if (contains(stacked, x) != contains(prim, x)) ++disagree;
        }
        if (disagree > 0) t.fail("instance " + std::to_string(c) + ": " + std::to_string(disagree) + " disagreements");
    }
    return t.result("filters", "update_intersection equals project/intersect composition", instances);
}

// Exhaustive lattice search for two scalar agents with x+ = x + w,
// y_i = x_i + v_i, z = x_i - x_j + r. All data lie on a lattice of spacing
// `step`; the constraints are interval bounds on single coordinates and on
// differences, so the lattice hull coincides with the exact hull.
class PairLatticeOracle
{
    public:
        PairLatticeOracle(const ScenarioConfig& cfg) : cfg_(cfg), step_(cfg.grid_step)
        {
            const auto& sys = cfg.system;
            require(sys.num_agents() == 2, "PairLatticeOracle: expects two agents.");
            for (int i = 1; i <= 2; ++i)
            {
                const auto& a = sys.agent(i);
                require(a.n() == 1 && a.A.is_constant() && a.A.constant()->value(0, 0) == 1.0 && a.B(0, 0) == 1.0 &&
                            a.C(0, 0) == 1.0,
                        "PairLatticeOracle: expects unit scalar dynamics.");
                require(!cfg.initial_boxes.empty(), "PairLatticeOracle: expects explicit initial boxes.");
            }
            lo_ = {units(cfg.initial_boxes[0].lo(0)), units(cfg.initial_boxes[1].lo(0))};
            hi_ = {units(cfg.initial_boxes[0].hi(0)), units(cfg.initial_boxes[1].hi(0))};
            cells_.assign(static_cast<size_t>(width(0) * width(1)), 1);
        }

        // Apply one batch (predicting first unless k == 0); returns the hull.
        Box step(const MeasurementBatch& batch)
        {
            const auto& sys = cfg_.system;
            if (batch.k > 0)
                for (int i = 0; i < 2; ++i) dilate(i, interval_units(sys.agent(i + 1).W));
            for (int i = 0; i < 2; ++i)
            {
                const auto [vl, vh] = interval_units(sys.agent(i + 1).V);
                const long y = units(batch.y.at(i + 1)(0));
                restrict_axis(i, y - vh, y - vl);
            }
            for (const auto& [ij, zv] : batch.z)
            {
                const auto [rl, rh] = interval_units(sys.agent(ij.first).relative_noise(ij.second));
                const long z = units(zv(0) / sys.agent(ij.first).D(0, 0));
                restrict_difference(ij.first - 1, ij.second - 1, z - rh, z - rl);
            }
            return hull();
        }

    private:
        const ScenarioConfig& cfg_;
        double step_;
        std::array<long, 2> lo_{}, hi_{};
        std::vector<char> cells_;

        long units(double v) const { return std::lround(v / step_); }
        long width(int i) const { return hi_[static_cast<size_t>(i)] - lo_[static_cast<size_t>(i)] + 1; }
        size_t idx(long a, long b) const
        {
            return static_cast<size_t>((a - lo_[0]) * width(1) + (b - lo_[1]));
        }

        std::pair<long, long> interval_units(const ConstrainedZonotope& z) const
        {
            const Box b = interval_hull(z);
            return {units(b.lo(0)), units(b.hi(0))};
        }

        void dilate(int axis, std::pair<long, long> w)
        {
            std::array<long, 2> nlo = lo_, nhi = hi_;
            nlo[static_cast<size_t>(axis)] += w.first;
            nhi[static_cast<size_t>(axis)] += w.second;
            const long w0 = nhi[0] - nlo[0] + 1, w1 = nhi[1] - nlo[1] + 1;
            std::vector<char> next(static_cast<size_t>(w0 * w1), 0);
            for (long a = lo_[0]; a <= hi_[0]; ++a)
                for (long b = lo_[1]; b <= hi_[1]; ++b)
                {
                    if (!cells_[idx(a, b)]) continue;
                    for (long d = w.first; d <= w.second; ++d)
                    {
                        const long na = axis == 0 ? a + d : a, nb = axis == 1 ? b + d : b;
                        next[static_cast<size_t>((na - nlo[0]) * w1 + (nb - nlo[1]))] = 1;
                    }
                }
            lo_ = nlo;
            hi_ = nhi;
            cells_ = std::move(next);
        }

        void restrict_axis(int axis, long lo, long hi)
        {
            for (long a = lo_[0]; a <= hi_[0]; ++a)
                for (long b = lo_[1]; b <= hi_[1]; ++b)
                {
                    const long v = axis == 0 ? a : b;
                    if (v < lo || v > hi) cells_[idx(a, b)] = 0;
                }
        }

        void restrict_difference(int i, int j, long lo, long hi)
        {
            for (long a = lo_[0]; a <= hi_[0]; ++a)
                for (long b = lo_[1]; b <= hi_[1]; ++b)
                {
                    const long xi = i == 0 ? a : b, xj = j == 0 ? a : b;
                    if (xi - xj < lo || xi - xj > hi) cells_[idx(a, b)] = 0;
                }
        }

        Box hull() const
        {
            long l0 = hi_[0] + 1, h0 = lo_[0] - 1, l1 = hi_[1] + 1, h1 = lo_[1] - 1;
            for (long a = lo_[0]; a <= hi_[0]; ++a)
                for (long b = lo_[1]; b <= hi_[1]; ++b)
                {
                    if (!cells_[idx(a, b)]) continue;
                    l0 = std::min(l0, a);
                    h0 = std::max(h0, a);
                    l1 = std::min(l1, b);
                    h1 = std::max(h1, b);
                }
            if (l0 > h0) throw EmptySetError("PairLatticeOracle: no lattice point is consistent with the data.");
            Vector lo(2), hi(2);
            lo << l0 * step_, l1 * step_;
            hi << h0 * step_, h1 * step_;
            return Box(lo, hi);
        }
};

inline CheckResult lattice_check(const VerifyOptions& opt, int seeds)
{
    detail::Tally t;
    for (int s = 0; s < seeds; ++s)
    {
        auto cfg = build_pair1d_scenario(5, opt.seed + static_cast<std::uint64_t>(s));
        cfg.algorithms = {"centralized", "distributed"};
        const auto log = run_trial(cfg, 0, {-1, {opt.inject_fault}});
        PairLatticeOracle oracle(cfg);
        for (const auto& st : log.steps)
        {
            const Box ref = oracle.step(st.batch);
            const auto& cen = st.estimates.at("centralized");
            const auto& dis = st.estimates.at("distributed");
            for (int i = 0; i < 2; ++i)
            {
                const auto& h = cen[static_cast<size_t>(i)].hull;
                const double tol = cfg.grid_step + 1e-6;
                if (std::abs(h.lo(0) - ref.lo(i)) > tol || std::abs(h.hi(0) - ref.hi(i)) > tol)
                    t.fail("seed " + std::to_string(s) + " k=" + std::to_string(st.k) + " agent " + std::to_string(i + 1));
                const auto& dh = dis[static_cast<size_t>(i)].hull;
                if (dh.lo(0) > h.lo(0) + 1e-9 || dh.hi(0) < h.hi(0) - 1e-9 || !dis[static_cast<size_t>(i)].contained)
                    t.fail("distributed, seed " + std::to_string(s) + " k=" + std::to_string(st.k));
            }
        }
        if (log.violations) t.fail("seed " + std::to_string(s) + ": containment violation");
    }
    return t.result("filters", "two-agent lattice search matches centralized hulls", seeds);
}

// ---------------------------------------------------------------------------
// Ordering suite

inline std::vector<CheckResult> ordering_suite(const VerifyOptions& opt, int trials = 2, int horizon = 15)
{
    auto cfg = build_uav_scenario(horizon, 3, opt.seed);
    const auto mc = run_monte_carlo(cfg, trials, {-1, {opt.inject_fault}});
    detail::Tally contain, order;
    for (const auto& log : mc.trials)
    {
        if (log.violations) contain.fail("trial " + std::to_string(log.trial) + (log.aborted.empty() ? "" : ": " + log.aborted));
        for (const auto& s : log.steps)
        {
            if (!s.estimates.count("centralized")) continue;
            const auto& cen = s.estimates.at("centralized");
            for (const auto& alg : {"oit", "distributed"})
            {
                if (!s.estimates.count(alg) || (std::string(alg) == "oit" && s.k <= cfg.delta_bar)) continue;
                const auto& other = s.estimates.at(alg);
                for (size_t i = 0; i < cen.size(); ++i)
                    if (cen[i].d > other[i].d + 1e-9)
                        order.fail(std::string(alg) + " trial " + std::to_string(log.trial) + " k=" + std::to_string(s.k));
            }
        }
    }
    return {contain.result("ordering", "truth inside every estimate (uav5)", trials),
            order.result("ordering", "centralized hull no wider than oit and distributed", trials)};
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_suites(const VerifyOptions& opt)
{
    const bool all = opt.filter == "all";
    if (!all && opt.filter != "geometry" && opt.filter != "filters" && opt.filter != "ordering")
        throw std::invalid_argument("verify: unknown filter \"" + opt.filter + "\" (geometry, filters, ordering, all).");
    std::vector<CheckResult> out;
    if (all || opt.filter == "geometry")
        for (auto& r : geometry_suite(opt)) out.push_back(std::move(r));
    if (all || opt.filter == "filters")
    {
        out.push_back(update_intersection_check(opt, 100, opt.probes));
        out.push_back(lattice_check(opt, 3));
    }
    if (all || opt.filter == "ordering")
        for (auto& r : ordering_suite(opt)) out.push_back(std::move(r));
    return out;
}

inline void print_table(std::ostream& os, const std::vector<CheckResult>& results)
{
    for (const auto& r : results)
        os << (r.passed ? "PASS" : "FAIL") << "  " << r.suite << "  " << r.name << "  (" << r.detail << ")\n";
}

} // namespace czest::verify
