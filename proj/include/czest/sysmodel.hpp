#pragma once

// Multi-agent linear system with absolute and relative measurements:
//     x_{i,k+1} = A_i(k) x_{i,k} + B_i w_{i,k}
//     y_{i,k}   = C_i x_{i,k} + v_{i,k}
//     z_{i,j,k} = D_i (x_{i,k} - x_{j,k}) + r_{i,j,k},   j in N_i
// plus the builders that stack these into centralized and per-neighborhood
// forms.
//
// Ordering conventions (fixed, shared by every consumer):
//   * agents are 1-based ids; the centralized state is x_1, ..., x_N;
//   * a neighborhood state is (x_i, x_{j1}, ..., x_{js}) with N_i ascending;
//   * stacked measurements put all absolute blocks first, then relative
//     blocks grouped by measuring agent (ascending), then by neighbor
//     (ascending).

#include "czest/czono.hpp"
#include "czest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace czest
{

// A_i(k): either a constant matrix or the coordinated-turn family
//   a11 = a22 = 1 + (sin((k+1) w T) - sin(k w T)) / w
//   a12 = -a21 = -(cos((k+1) w T) - cos(k w T)) / w
// applied per axis (I_axes (x) A_2x2).
class TimeVaryingMatrix
{
    public:
        struct Constant
        {
            Matrix value;
        };
        struct CoordinatedTurn
        {
            double omega = 1.0;
            double period = 0.0;
            int axes = 2;
        };

        TimeVaryingMatrix() : spec_(Constant{Matrix(0, 0)}) {}
        explicit TimeVaryingMatrix(Matrix constant) : spec_(Constant{std::move(constant)}) {}
        explicit TimeVaryingMatrix(CoordinatedTurn ct) : spec_(ct)
        {
            if (ct.omega == 0.0) throw std::invalid_argument("coordinated-turn: omega must be nonzero.");
            if (ct.axes < 1) throw std::invalid_argument("coordinated-turn: axes must be >= 1.");
        }

        static Matrix coordinated_turn_block(double omega, double period, int k)
        {
            const double a = 1.0 + (std::sin((k + 1) * omega * period) - std::sin(k * omega * period)) / omega;
            const double b = -(std::cos((k + 1) * omega * period) - std::cos(k * omega * period)) / omega;
            Matrix m(2, 2);
            m << a, b, -b, a;
            return m;
        }

        Matrix at(int k) const
        {
            if (const auto* c = std::get_if<Constant>(&spec_)) return c->value;
            const auto& ct = std::get<CoordinatedTurn>(spec_);
            return kron(Matrix::Identity(ct.axes, ct.axes), coordinated_turn_block(ct.omega, ct.period, k));
        }

        int rows() const
        {
            if (const auto* c = std::get_if<Constant>(&spec_)) return static_cast<int>(c->value.rows());
            return 2 * std::get<CoordinatedTurn>(spec_).axes;
        }
        int cols() const
        {
            if (const auto* c = std::get_if<Constant>(&spec_)) return static_cast<int>(c->value.cols());
            return 2 * std::get<CoordinatedTurn>(spec_).axes;
        }

        bool is_constant() const { return std::holds_alternative<Constant>(spec_); }
        const Constant* constant() const { return std::get_if<Constant>(&spec_); }
        const CoordinatedTurn* coordinated_turn() const { return std::get_if<CoordinatedTurn>(&spec_); }

    private:
        std::variant<Constant, CoordinatedTurn> spec_;
};

struct AgentModel
{
    int id = 0;
    TimeVaryingMatrix A;
    Matrix B;
    Matrix C;
    Matrix D;
    ConstrainedZonotope W;                  // process noise range
    ConstrainedZonotope V;                  // absolute measurement noise range
    ConstrainedZonotope R;                  // relative noise range (default for every in-neighbor)
    std::map<int, ConstrainedZonotope> R_by_neighbor;

    int n() const { return static_cast<int>(B.rows()); }
    int p() const { return static_cast<int>(B.cols()); }
    int m() const { return static_cast<int>(C.rows()); }
    int r() const { return static_cast<int>(D.rows()); }

    const ConstrainedZonotope& relative_noise(int j) const
    {
        auto it = R_by_neighbor.find(j);
        return it == R_by_neighbor.end() ? R : it->second;
    }

    void validate() const
    {
        const std::string who = "agent " + std::to_string(id) + ": ";
        require(A.rows() == n() && A.cols() == n(), who + "A must be n x n with n = rows(B).");
        require(C.cols() == n(), who + "C must have n columns.");
        require(D.cols() == n(), who + "D must have n columns.");
        require(W.dim() == p(), who + "process noise set must have dimension cols(B).");
        require(V.dim() == m(), who + "absolute noise set must have dimension rows(C).");
        require(R.dim() == r(), who + "relative noise set must have dimension rows(D).");
        for (const auto& [j, set] : R_by_neighbor)
            require(set.dim() == r(), who + "relative noise set for neighbor " + std::to_string(j) + " has wrong dimension.");
    }
};

// Directed measurement/communication graph. An edge (j, i) means j in N_i:
// agent i measures relative to j and receives from j.
class Topology
{
    public:
        Topology() = default;
        Topology(int num_agents, std::set<std::pair<int, int>> edges)
            : n_(num_agents), edges_(std::move(edges))
        {
            require(num_agents >= 1, "Topology: need at least one agent.");
            for (const auto& [j, i] : edges_)
            {
                require(i >= 1 && i <= n_ && j >= 1 && j <= n_, "Topology: edge endpoint out of range.");
                require(i != j, "Topology: self-loops are not allowed.");
            }
        }

        int num_agents() const { return n_; }
        const std::set<std::pair<int, int>>& edges() const { return edges_; }

        std::vector<int> in_neighbors(int i) const
        {
            check(i);
            std::vector<int> out;
            for (const auto& [j, k] : edges_)
                if (k == i) out.push_back(j);
            std::sort(out.begin(), out.end());
            return out;
        }

        // M_i = { l : i in N_l }.
        std::vector<int> out_neighbors(int i) const
        {
            check(i);
            std::vector<int> out;
            for (const auto& [j, l] : edges_)
                if (j == i) out.push_back(l);
            std::sort(out.begin(), out.end());
            return out;
        }

        // Closed neighborhood: i first, then in-neighbors ascending.
        std::vector<int> closed_neighborhood(int i) const
        {
            std::vector<int> out{i};
            for (int j : in_neighbors(i)) out.push_back(j);
            return out;
        }

        int q(int i) const { return static_cast<int>(closed_neighborhood(i).size()); }

        bool has_edge(int from, int to) const { return edges_.count({from, to}) > 0; }

    private:
        int n_ = 0;
        std::set<std::pair<int, int>> edges_;

        void check(int i) const
        {
            if (i < 1 || i > n_) throw std::out_of_range("Topology: unknown agent id " + std::to_string(i) + ".");
        }
};

struct MultiAgentSystem
{
    std::vector<AgentModel> agents;   // agents[i-1] has id i
    Topology topology;

    int num_agents() const { return static_cast<int>(agents.size()); }

    const AgentModel& agent(int id) const
    {
        if (id < 1 || id > num_agents()) throw std::out_of_range("MultiAgentSystem: unknown agent id " + std::to_string(id) + ".");
        return agents[static_cast<size_t>(id - 1)];
    }

    int state_offset(int id) const
    {
        int off = 0;
        for (int j = 1; j < id; ++j) off += agent(j).n();
        return off;
    }

    int state_dim() const
    {
        int n = 0;
        for (const auto& a : agents) n += a.n();
        return n;
    }

    int noise_dim() const
    {
        int p = 0;
        for (const auto& a : agents) p += a.p();
        return p;
    }

    void validate() const
    {
        require(!agents.empty(), "MultiAgentSystem: no agents.");
        require(topology.num_agents() == num_agents(), "MultiAgentSystem: topology size differs from agent count.");
        for (int i = 1; i <= num_agents(); ++i)
        {
            const auto& a = agent(i);
            require(a.id == i, "MultiAgentSystem: agents must be listed with ids 1..N in order.");
            a.validate();
            for (int j : topology.in_neighbors(i))
                require(agent(j).n() == a.n(), "MultiAgentSystem: relative measurement needs equal state dimensions for agents " +
                                                   std::to_string(i) + " and " + std::to_string(j) + ".");
        }
    }
};

struct MeasurementBatch
{
    int k = 0;
    std::map<int, Vector> y;                   // absolute, by agent
    std::map<std::pair<int, int>, Vector> z;   // relative, keyed (i, j) for j in N_i
};

struct StateBlock
{
    int agent = 0;
    int offset = 0;
    int length = 0;
};

struct StackedSystem
{
    std::vector<StateBlock> index_map;   // block order of the stacked state
    Matrix A;
    Matrix B;
    Matrix H;
    ConstrainedZonotope Wset;
    ConstrainedZonotope Vset;

    const StateBlock& block_of(int agent) const
    {
        for (const auto& b : index_map)
            if (b.agent == agent) return b;
        throw std::out_of_range("StackedSystem: agent " + std::to_string(agent) + " not in this stacking.");
    }
};

namespace detail
{

inline StackedSystem build_stacking(const MultiAgentSystem& sys, const std::vector<int>& order,
                                    const std::vector<std::pair<int, int>>& rel_edges, int k)
{
    StackedSystem s;
    std::vector<Matrix> As, Bs, Cs;
    std::vector<ConstrainedZonotope> Ws, Vs;
    int off = 0;
    for (int id : order)
    {
        const auto& a = sys.agent(id);
        s.index_map.push_back({id, off, a.n()});
        off += a.n();
        As.push_back(a.A.at(k));
        Bs.push_back(a.B);
        Cs.push_back(a.C);
        Ws.push_back(a.W);
        Vs.push_back(a.V);
    }
    s.A = block_diag(std::span<const Matrix>(As));
    s.B = block_diag(std::span<const Matrix>(Bs));
    const Matrix Cc = block_diag(std::span<const Matrix>(Cs));

    int rel_rows = 0;
    for (const auto& [i, j] : rel_edges) rel_rows += sys.agent(i).r();
    s.H = Matrix::Zero(Cc.rows() + rel_rows, off);
    s.H.topRows(Cc.rows()) = Cc;
    int row = static_cast<int>(Cc.rows());
    for (const auto& [i, j] : rel_edges)
    {
        const auto& ai = sys.agent(i);
        const auto& bi = s.block_of(i);
        const auto& bj = s.block_of(j);
        s.H.block(row, bi.offset, ai.r(), bi.length) += ai.D;
        s.H.block(row, bj.offset, ai.r(), bj.length) -= ai.D;
        Vs.push_back(ai.relative_noise(j));
        row += ai.r();
    }
    s.Wset = cartesian_product(std::span<const ConstrainedZonotope>(Ws));
    s.Vset = cartesian_product(std::span<const ConstrainedZonotope>(Vs));
    return s;
}

inline std::vector<std::pair<int, int>> all_relative_edges(const MultiAgentSystem& sys)
{
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= sys.num_agents(); ++i)
        for (int j : sys.topology.in_neighbors(i)) out.emplace_back(i, j);
    return out;
}

} // namespace detail

inline StackedSystem build_centralized(const MultiAgentSystem& sys, int k)
{
    std::vector<int> order;
    for (int i = 1; i <= sys.num_agents(); ++i) order.push_back(i);
    return detail::build_stacking(sys, order, detail::all_relative_edges(sys), k);
}

inline StackedSystem build_neighborhood(const MultiAgentSystem& sys, int i, int k)
{
    const auto order = sys.topology.closed_neighborhood(i);
    std::vector<std::pair<int, int>> rel;
    for (size_t t = 1; t < order.size(); ++t) rel.emplace_back(i, order[t]);
    return detail::build_stacking(sys, order, rel, k);
}

// Y_k in the centralized row order.
inline Vector stack_measurements(const MultiAgentSystem& sys, const MeasurementBatch& batch)
{
    std::vector<Vector> parts;
    for (int i = 1; i <= sys.num_agents(); ++i) parts.push_back(batch.y.at(i));
    for (const auto& e : detail::all_relative_edges(sys)) parts.push_back(batch.z.at(e));
    return vstack(std::span<const Vector>(parts));
}

// Y_{N_i,k}: y_i, y_{j1}, ..., y_{js}, z_{i,j1}, ..., z_{i,js}.
inline Vector stack_neighborhood_measurements(const MultiAgentSystem& sys, int i, const MeasurementBatch& batch)
{
    const auto order = sys.topology.closed_neighborhood(i);
    std::vector<Vector> parts;
    for (int id : order) parts.push_back(batch.y.at(id));
    for (size_t t = 1; t < order.size(); ++t) parts.push_back(batch.z.at({i, order[t]}));
    return vstack(std::span<const Vector>(parts));
}

// w is the stacked process noise (agents in id order).
inline Vector step_truth(const MultiAgentSystem& sys, int k, const Vector& x, const Vector& w)
{
    require(x.size() == sys.state_dim(), "step_truth: state dimension mismatch.");
    require(w.size() == sys.noise_dim(), "step_truth: noise dimension mismatch.");
    Vector out(x.size());
    int xo = 0, wo = 0;
    for (const auto& a : sys.agents)
    {
        const Vector wi = w.segment(wo, a.p());
#ifndef NDEBUG
        if (!contains(a.W, wi)) throw std::invalid_argument("step_truth: process noise outside its declared set.");
#endif
        out.segment(xo, a.n()) = a.A.at(k) * x.segment(xo, a.n()) + a.B * wi;
        xo += a.n();
        wo += a.p();
    }
    return out;
}

inline MeasurementBatch measure(const MultiAgentSystem& sys, int k, const Vector& x, const std::map<int, Vector>& v,
                                const std::map<std::pair<int, int>, Vector>& r)
{
    require(x.size() == sys.state_dim(), "measure: state dimension mismatch.");
    MeasurementBatch batch;
    batch.k = k;
    for (int i = 1; i <= sys.num_agents(); ++i)
    {
        const auto& a = sys.agent(i);
        const Vector xi = x.segment(sys.state_offset(i), a.n());
        const Vector& vi = v.at(i);
        require(vi.size() == a.m(), "measure: absolute noise dimension mismatch for agent " + std::to_string(i) + ".");
#ifndef NDEBUG
        if (!contains(a.V, vi)) throw std::invalid_argument("measure: absolute noise outside its declared set.");
#endif
        batch.y[i] = a.C * xi + vi;
        for (int j : sys.topology.in_neighbors(i))
        {
            const Vector xj = x.segment(sys.state_offset(j), sys.agent(j).n());
            const Vector& rij = r.at({i, j});
            require(rij.size() == a.r(), "measure: relative noise dimension mismatch.");
            batch.z[{i, j}] = a.D * (xi - xj) + rij;
        }
    }
    return batch;
}

inline constexpr double kRankTol = 1e-8;

inline int numerical_rank(const Matrix& M, double rel_tol = kRankTol)
{
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++rank;
    return rank;
}

// Smallest mu such that [H(k0); H(k0+1) A(k0); ...; H(k0+mu-1) A(k0+mu-2)...A(k0)]
// has full column rank.
inline int observability_index(const MultiAgentSystem& sys, int k0, int mu_max)
{
    require(mu_max >= 1, "observability_index: mu_max must be >= 1.");
    const int n = sys.state_dim();
    Matrix transition = Matrix::Identity(n, n);
    Matrix stacked(0, n);
    for (int mu = 1; mu <= mu_max; ++mu)
    {
        const int k = k0 + mu - 1;
        const auto s = build_centralized(sys, k);
        Matrix block = s.H * transition;
        Matrix next(stacked.rows() + block.rows(), n);
        next << stacked, block;
        stacked = std::move(next);
        if (numerical_rank(stacked) == n) return mu;
        transition = s.A * transition;
    }
    throw NotObservableError("observability_index: not observable within " + std::to_string(mu_max) + " steps.");
}

} // namespace czest
