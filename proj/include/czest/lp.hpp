#pragma once

// Dense bounded-variable primal simplex.
//
// Problems have the form
//     min/max  c^T x   s.t.  A x = b,  lower <= x <= upper
// where bounds may be infinite. The solver keeps a compact dictionary
// x_B = beta - D x_N over the movable nonbasic columns only; fixed variables
// are folded into beta. A crash basis picks column singletons (one nonzero
// in the column) so constraint systems produced by set intersections with
// box noise start nearly feasible. Phase 1 minimizes the sum of artificials
// placed on the remaining rows.
//
// Pricing is Dantzig (largest reduced cost) and switches to Bland's rule
// after a run of degenerate pivots; both are deterministic, so identical
// inputs always give bit-identical outputs.

#include "czest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace czest::lp
{

inline constexpr double kFeasTol = 1e-9;

enum class Sense { Minimize, Maximize };
enum class Outcome { Optimal, Infeasible, Unbounded };

struct Status
{
    Outcome outcome = Outcome::Infeasible;
    double value = 0.0;
    Vector point;

    bool optimal() const { return outcome == Outcome::Optimal; }
};

struct Problem
{
    Vector objective;
    Matrix eq_matrix;
    Vector eq_rhs;
    Vector lower;
    Vector upper;
    Sense sense = Sense::Minimize;
};

// Feasible-region workspace: phase 1 runs once in the constructor, then
// optimize() can be called repeatedly with different objectives, each
// warm-started from the previous optimal basis.
class Workspace
{
    public:
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

        // `start` (optional) seeds the crash: nonbasic variables begin at its
        // entries clamped to their bounds; missing trailing entries are 0.
        Workspace(const Matrix& A, const Vector& b, const Vector& lower, const Vector& upper, const Vector* start = nullptr)
            : A_(A), b_(b)
        {
            if (A.rows() != b.size() || A.cols() != lower.size() || lower.size() != upper.size())
                throw std::invalid_argument("lp::Workspace: inconsistent dimensions.");
            for (Eigen::Index j = 0; j < lower.size(); ++j)
            {
                if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j))
                    throw std::invalid_argument("lp::Workspace: invalid variable bounds.");
            }
            m_ = static_cast<int>(A.rows());
            n_ = static_cast<int>(A.cols());
            scale_ = std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
            lo_.resize(n_ + m_);
            hi_.resize(n_ + m_);
            lo_.head(n_) = lower;
            hi_.head(n_) = upper;
            lo_.tail(m_).setZero();
            hi_.tail(m_).setConstant(kInf);
            sigma_.assign(m_, 1.0);
            crash(start);
            phase_one();
        }

        bool feasible() const { return feasible_; }
        int rows() const { return m_; }
        int cols() const { return n_; }
        long long pivots() const { return pivots_; }

        // Current (feasible) point over the structural variables.
        Vector point() const { return x_.head(n_); }

        Status optimize(const Vector& c, Sense sense)
        {
            if (c.size() != n_) throw std::invalid_argument("lp::Workspace::optimize: objective size mismatch.");
            Status st;
            if (!feasible_)
            {
                st.outcome = Outcome::Infeasible;
                return st;
            }
            cost_.setZero(n_ + m_);
            cost_.head(n_) = (sense == Sense::Minimize) ? c : Vector(-c);
            price_from_costs();
            const bool bounded = iterate(false);
            settle();
            if (!bounded)
            {
                st.outcome = Outcome::Unbounded;
                st.value = (sense == Sense::Minimize) ? -kInf : kInf;
                return st;
            }
            st.outcome = Outcome::Optimal;
            st.point = x_.head(n_);
            st.value = c.dot(st.point);
            return st;
        }

        // Max absolute equality residual of the current point (artificials included).
        double residual() const
        {
            if (m_ == 0) return 0.0;
            Vector r = A_ * x_.head(n_) - b_;
            for (int i = 0; i < m_; ++i) r(i) += sigma_[i] * x_(n_ + i);
            return r.cwiseAbs().maxCoeff();
        }

    private:
        static constexpr double kPivTol = 1e-9;
        static constexpr double kCostTol = 1e-10;
        static constexpr int kDegenerateRun = 40;

        Matrix A_;
        Vector b_;
        int m_ = 0;
        int n_ = 0;
        double scale_ = 1.0;

        Vector lo_, hi_;              // bounds over structural + artificial variables
        Vector x_;                    // current values
        Vector cost_;                 // active cost vector
        std::vector<double> sigma_;   // artificial column sign per row
        std::vector<int> basic_;      // variable basic in each row
        std::vector<int> cols_;       // variable of each active dictionary column
        std::vector<int> colpos_;     // column of each variable, -1 if basic or inactive
        std::vector<int> rowpos_;     // row of each variable, -1 if nonbasic
        RowMajor D_;                  // m x capacity, active width ncols()
        Vector beta_;
        Vector d_;                    // reduced costs over active columns
        bool feasible_ = false;
        long long pivots_ = 0;
        std::vector<int> nz_;         // scratch: nonzero columns of the pivot row

        int ncols() const { return static_cast<int>(cols_.size()); }
        bool is_artificial(int v) const { return v >= n_; }

        double coeff(int row, int var) const
        {
            return var < n_ ? A_(row, var) : (var - n_ == row ? sigma_[row] : 0.0);
        }

        void crash(const Vector* start)
        {
            const int total = n_ + m_;
            x_.setZero(total);
            for (int j = 0; j < n_; ++j)
            {
                const double s = (start && j < start->size() && std::isfinite((*start)(j))) ? (*start)(j) : 0.0;
                x_(j) = std::clamp(s, lo_(j), hi_(j));
            }

            // Singleton columns: exactly one nonzero entry.
            std::vector<int> singleton_of_row(m_, -1);
            for (int j = 0; j < n_; ++j)
            {
                if (lo_(j) == hi_(j)) continue;
                int nz_row = -1, nnz = 0;
                for (int i = 0; i < m_ && nnz < 2; ++i)
                {
                    if (A_(i, j) != 0.0)
                    {
                        nz_row = i;
                        ++nnz;
                    }
                }
                if (nnz != 1 || std::abs(A_(nz_row, j)) < 1e-9) continue;
                const int cur = singleton_of_row[nz_row];
                if (cur < 0 || std::abs(A_(nz_row, j)) > std::abs(A_(nz_row, cur)))
                    singleton_of_row[nz_row] = j;
            }

            basic_.assign(m_, -1);
            rowpos_.assign(total, -1);
            std::vector<char> is_basic(total, 0);
            for (int r = 0; r < m_; ++r)
            {
                const int s = singleton_of_row[r];
                double res = b_(r);
                for (int j = 0; j < n_; ++j)
                    if (j != s) res -= A_(r, j) * x_(j);
                if (s >= 0)
                {
                    const double val = res / A_(r, s);
                    if (val >= lo_(s) - kFeasTol && val <= hi_(s) + kFeasTol)
                    {
                        basic_[r] = s;
                        x_(s) = val;
                        is_basic[s] = 1;
                        continue;
                    }
                    x_(s) = val < lo_(s) ? lo_(s) : hi_(s);
                    res -= A_(r, s) * x_(s);
                }
                sigma_[r] = res < 0.0 ? -1.0 : 1.0;
                basic_[r] = n_ + r;
                x_(n_ + r) = std::abs(res);
                is_basic[n_ + r] = 1;
            }
            for (int r = 0; r < m_; ++r) rowpos_[basic_[r]] = r;

            // Active nonbasic columns: movable structural variables only.
            cols_.clear();
            colpos_.assign(total, -1);
            for (int j = 0; j < n_; ++j)
            {
                if (is_basic[j] || lo_(j) == hi_(j)) continue;
                colpos_[j] = static_cast<int>(cols_.size());
                cols_.push_back(j);
            }
            // Artificials that are nonbasic never exist at this point.
            for (int r = 0; r < m_; ++r)
                if (basic_[r] < n_) hi_(n_ + r) = 0.0;

            D_.setZero(m_, std::max(ncols(), 1));
            beta_.setZero(m_);
            for (int r = 0; r < m_; ++r)
            {
                const double piv = coeff(r, basic_[r]);
                double rhs = b_(r);
                for (int j = 0; j < n_; ++j)
                {
                    if (is_basic[j] || colpos_[j] >= 0) continue;
                    rhs -= A_(r, j) * x_(j); // fixed variables
                }
                beta_(r) = rhs / piv;
                for (int c = 0; c < ncols(); ++c)
                    D_(r, c) = A_(r, cols_[c]) / piv;
            }
        }

        void price_from_costs()
        {
            const int nc = ncols();
            d_.resize(std::max(nc, 1));
            for (int c = 0; c < nc; ++c) d_(c) = cost_(cols_[c]);
            for (int r = 0; r < m_; ++r)
            {
                const double cb = cost_(basic_[r]);
                if (cb == 0.0) continue;
                d_.head(nc).noalias() -= cb * D_.row(r).head(nc).transpose();
            }
        }

        void phase_one()
        {
            bool any_art = false;
            for (int r = 0; r < m_; ++r) any_art = any_art || is_artificial(basic_[r]);
            if (any_art)
            {
                cost_.setZero(n_ + m_);
                cost_.tail(m_).setOnes();
                price_from_costs();
                iterate(true);
                settle();
                double infeas = 0.0;
                for (int r = 0; r < m_; ++r)
                    if (is_artificial(basic_[r])) infeas += std::max(0.0, x_(basic_[r]));
                if (infeas > kFeasTol * scale_)
                {
                    feasible_ = false;
                    return;
                }
                // Remaining basic artificials sit at zero and are pinned there.
                for (int r = 0; r < m_; ++r)
                {
                    if (!is_artificial(basic_[r])) continue;
                    x_(basic_[r]) = 0.0;
                    hi_(basic_[r]) = 0.0;
                }
            }
            feasible_ = true;
        }

        // Recompute basic values from the dictionary to limit drift, and
        // refactor from scratch when the equality residual is too large.
        void settle()
        {
            recompute_basics();
            if (residual() > kFeasTol * scale_) refactor();
        }

        void recompute_basics()
        {
            const int nc = ncols();
            Vector xn(nc);
            for (int c = 0; c < nc; ++c) xn(c) = x_(cols_[c]);
            for (int r = 0; r < m_; ++r)
            {
                double v = beta_(r) - D_.row(r).head(nc).dot(xn);
                const int var = basic_[r];
                // Snap tiny bound violations produced by round-off.
                if (v < lo_(var) && v > lo_(var) - kFeasTol * scale_) v = lo_(var);
                if (v > hi_(var) && v < hi_(var) + kFeasTol * scale_) v = hi_(var);
                x_(var) = v;
            }
        }

        void refactor()
        {
            if (m_ == 0) return;
            Matrix B(m_, m_);
            for (int r = 0; r < m_; ++r)
                for (int i = 0; i < m_; ++i) B(i, r) = coeff(i, basic_[r]);
            Eigen::PartialPivLU<Matrix> lu(B);
            const int nc = ncols();
            Matrix N(m_, std::max(nc, 1));
            N.setZero();
            for (int c = 0; c < nc; ++c)
                for (int i = 0; i < m_; ++i) N(i, c) = coeff(i, cols_[c]);
            Vector rhs = b_;
            for (int j = 0; j < n_; ++j)
            {
                if (rowpos_[j] >= 0 || colpos_[j] >= 0) continue;
                rhs -= A_.col(j) * x_(j);
            }
            beta_ = lu.solve(rhs);
            Matrix dn = lu.solve(N);
            D_.leftCols(std::max(nc, 1)) = dn;
            recompute_basics();
            if (cost_.size() == n_ + m_) price_from_costs();
        }

        // Returns false if the objective is unbounded along some edge.
        bool iterate(bool phase_one)
        {
            const long long max_iter = 50LL * (m_ + n_ + 10);
            int degenerate = 0;
            bool bland = false;
            const double cost_scale = std::max(1.0, cost_.size() ? cost_.cwiseAbs().maxCoeff() : 0.0);
            const double dtol = kCostTol * cost_scale;
            for (long long it = 0; it < max_iter; ++it)
            {
                const int nc = ncols();
                // Pricing.
                int q = -1;
                double best = 0.0;
                double dir = 0.0;
                for (int c = 0; c < nc; ++c)
                {
                    const int v = cols_[c];
                    const double dj = d_(c);
                    double cand_dir = 0.0;
                    if (dj < -dtol && x_(v) < hi_(v)) cand_dir = 1.0;
                    else if (dj > dtol && x_(v) > lo_(v)) cand_dir = -1.0;
                    if (cand_dir == 0.0) continue;
                    if (bland)
                    {
                        if (q < 0 || v < cols_[q])
                        {
                            q = c;
                            dir = cand_dir;
                        }
                    }
                    else if (std::abs(dj) > best)
                    {
                        best = std::abs(dj);
                        q = c;
                        dir = cand_dir;
                    }
                }
                if (q < 0) return true;

                const int enter = cols_[q];
                // Ratio test (two-pass, Harris-style tolerance).
                double tmax = kInf;
                for (int r = 0; r < m_; ++r)
                {
                    const double rate = -D_(r, q) * dir;
                    if (std::abs(rate) <= kPivTol) continue;
                    const int v = basic_[r];
                    const double lim = rate < 0.0
                        ? (x_(v) - lo_(v) + kFeasTol) / -rate
                        : (hi_(v) - x_(v) + kFeasTol) / rate;
                    tmax = std::min(tmax, lim);
                }
                int leave = -1;
                double t = kInf;
                double best_rate = 0.0;
                if (tmax < kInf)
                {
                    for (int r = 0; r < m_; ++r)
                    {
                        const double rate = -D_(r, q) * dir;
                        if (std::abs(rate) <= kPivTol) continue;
                        const int v = basic_[r];
                        const double bound = rate < 0.0 ? lo_(v) : hi_(v);
                        if (!std::isfinite(bound)) continue;
                        const double lim = rate < 0.0 ? (x_(v) - lo_(v)) / -rate : (hi_(v) - x_(v)) / rate;
                        if (lim > tmax) continue;
                        bool take = false;
                        if (leave < 0) take = true;
                        else if (bland) take = v < basic_[leave];
                        else take = std::abs(rate) > best_rate;
                        if (take)
                        {
                            leave = r;
                            best_rate = std::abs(rate);
                            t = std::max(lim, 0.0);
                        }
                    }
                }
                const double own = dir > 0.0 ? hi_(enter) - x_(enter) : x_(enter) - lo_(enter);
                if (own <= t)
                {
                    if (!std::isfinite(own))
                    {
                        if (phase_one) throw std::runtime_error("lp: phase 1 unbounded (internal error).");
                        return false;
                    }
                    // Bound flip, no basis change.
                    move(q, dir * own);
                    x_(enter) = dir > 0.0 ? hi_(enter) : lo_(enter);
                    degenerate = 0;
                    bland = false;
                    continue;
                }
                if (leave < 0)
                {
                    if (phase_one) throw std::runtime_error("lp: phase 1 unbounded (internal error).");
                    return false;
                }
                if (t <= kFeasTol)
                {
                    if (++degenerate >= kDegenerateRun) bland = true;
                }
                else
                {
                    degenerate = 0;
                    bland = false;
                }
                move(q, dir * t);
                pivot(leave, q, dir);
                if (phase_one && all_artificials_out()) return true;
            }
            throw std::runtime_error("lp: iteration limit exceeded.");
        }

        bool all_artificials_out() const
        {
            for (int r = 0; r < m_; ++r)
                if (is_artificial(basic_[r]) && x_(basic_[r]) > 0.0) return false;
            return true;
        }

        void move(int q, double delta)
        {
            const int enter = cols_[q];
            x_(enter) += delta;
            for (int r = 0; r < m_; ++r)
            {
                const double f = D_(r, q);
                if (f != 0.0) x_(basic_[r]) -= f * delta;
            }
        }

        void pivot(int r, int q, double dir)
        {
            ++pivots_;
            const int nc = ncols();
            const int enter = cols_[q];
            const int leave = basic_[r];
            const double rate = -D_(r, q) * dir;
            // Leaving variable lands exactly on the bound it hit.
            x_(leave) = rate < 0.0 ? lo_(leave) : hi_(leave);

            const double p = D_(r, q);
            auto prow = D_.row(r).head(nc);
            prow /= p;
            prow(q) = 1.0 / p;
            beta_(r) /= p;
            // Dictionary rows are typically sparse: update only the pivot
            // row's nonzero columns when that is cheaper.
            nz_.clear();
            for (int c = 0; c < nc; ++c)
                if (prow(c) != 0.0) nz_.push_back(c);
            const bool sparse = 3 * nz_.size() < static_cast<size_t>(nc);
            for (int i = 0; i < m_; ++i)
            {
                if (i == r) continue;
                const double f = D_(i, q);
                if (f == 0.0) continue;
                D_(i, q) = 0.0;
                if (sparse)
                {
                    double* row = D_.row(i).data();
                    for (int c : nz_) row[c] -= f * prow(c);
                }
                else
                {
                    D_.row(i).head(nc).noalias() -= f * prow;
                }
                beta_(i) -= f * beta_(r);
            }
            {
                const double f = d_(q);
                if (f != 0.0)
                {
                    d_(q) = 0.0;
                    for (int c : nz_) d_(c) -= f * prow(c);
                }
            }
            basic_[r] = enter;
            rowpos_[enter] = r;
            rowpos_[leave] = -1;
            colpos_[enter] = -1;
            cols_[q] = leave;
            colpos_[leave] = q;

            // An artificial that left the basis never returns: drop its column.
            if (is_artificial(leave)) drop_column(q);
        }

        void drop_column(int q)
        {
            const int last = ncols() - 1;
            const int var = cols_[q];
            if (q != last)
            {
                D_.col(q).head(m_) = D_.col(last).head(m_);
                d_(q) = d_(last);
                cols_[q] = cols_[last];
                colpos_[cols_[q]] = q;
            }
            cols_.pop_back();
            colpos_[var] = -1;
            x_(var) = 0.0;
            lo_(var) = hi_(var) = 0.0;
        }
};

// Single-shot solve.
inline Status solve(const Problem& p)
{
    const Eigen::Index n = p.objective.size();
    if (p.lower.size() != n || p.upper.size() != n || p.eq_matrix.cols() != n || p.eq_matrix.rows() != p.eq_rhs.size())
        throw std::invalid_argument("lp::solve: inconsistent problem dimensions.");
    Workspace ws(p.eq_matrix, p.eq_rhs, p.lower, p.upper);
    if (!ws.feasible())
    {
        Status st;
        st.outcome = Outcome::Infeasible;
        return st;
    }
    return ws.optimize(p.objective, p.sense);
}

} // namespace czest::lp
