#pragma once

// Set-membership estimators over constrained zonotopes:
//   * standard centralized filter (exact, growing complexity) - the benchmark;
//   * finite-horizon centralized filter: past the window length it restarts
//     from the whole space at k - delta and replays the last delta + 1
//     measurement batches, so its size no longer depends on k;
//   * distributed filter: each agent predicts locally, forms a joint prior
//     with its in-neighbors (round 1), updates it with the neighborhood
//     measurements, intersects its own block with the joints published by
//     agents that also hold it (round 2), and closes the step with an
//     interval hull.
//
// Time convention: k = 0 updates the initial range with the first batch;
// every later step predicts with A(k-1) and then updates with batch k.

#include "czest/czono.hpp"
#include "czest/errors.hpp"
#include "czest/sysmodel.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace czest
{

// ---------------------------------------------------------------------------
// Centralized

inline ConstrainedZonotope centralized_predict(const ConstrainedZonotope& posterior, const StackedSystem& stacked,
                                               const ConstrainedZonotope& Wset)
{
    return minkowski_sum(linear_map(stacked.A, posterior), linear_map(stacked.B, Wset));
}

inline ConstrainedZonotope centralized_predict(const ConstrainedZonotope& posterior, const StackedSystem& stacked)
{
    return centralized_predict(posterior, stacked, stacked.Wset);
}

inline ConstrainedZonotope centralized_update(const ConstrainedZonotope& prior, const StackedSystem& stacked,
                                              const Vector& Y, bool check_nonempty = true)
{
    auto post = intersect_under_map(prior, stacked.H, Y, stacked.Vset);
    if (check_nonempty && is_empty(post))
        throw EmptyPosteriorError("centralized_update: measurements inconsistent with the declared noise sets.");
    return post;
}

inline ConstrainedZonotope extract_agent_set(const ConstrainedZonotope& posterior, int agent,
                                             std::span<const StateBlock> index_map)
{
    for (const auto& b : index_map)
        if (b.agent == agent) return project_block(posterior, b.offset, b.length);
    throw std::out_of_range("extract_agent_set: unknown agent " + std::to_string(agent) + ".");
}

class CentralizedFilter
{
    public:
        CentralizedFilter(MultiAgentSystem sys, ConstrainedZonotope initial_range, bool check_nonempty = false)
            : sys_(std::move(sys)), initial_(std::move(initial_range)), check_(check_nonempty)
        {
            require(initial_.dim() == sys_.state_dim(), "CentralizedFilter: initial range has wrong dimension.");
        }

        const ConstrainedZonotope& step(const MeasurementBatch& batch)
        {
            require(batch.k == k_ + 1, "CentralizedFilter: batches must arrive in time order.");
            const auto now = build_centralized(sys_, batch.k);
            const ConstrainedZonotope prior =
                batch.k == 0 ? initial_ : centralized_predict(posterior_, build_centralized(sys_, batch.k - 1));
            posterior_ = centralized_update(prior, now, stack_measurements(sys_, batch), check_);
            k_ = batch.k;
            return posterior_;
        }

        const ConstrainedZonotope& posterior() const { return posterior_; }
        int k() const { return k_; }
        const MultiAgentSystem& system() const { return sys_; }

    private:
        MultiAgentSystem sys_;
        ConstrainedZonotope initial_;
        ConstrainedZonotope posterior_;
        bool check_;
        int k_ = -1;
};

// ---------------------------------------------------------------------------
// Finite-horizon (sliding window) centralized

class OitFilter
{
    public:
        // mu0 < 0 computes the observability index at k0 = 0.
        OitFilter(MultiAgentSystem sys, ConstrainedZonotope initial_range, int delta_bar, int mu0 = -1,
                  bool check_nonempty = false)
            : standard_(sys, initial_range, check_nonempty), sys_(std::move(sys)), delta_(delta_bar), check_(check_nonempty)
        {
            require(delta_bar >= 0, "OitFilter: window length must be non-negative.");
            mu0_ = mu0 >= 0 ? mu0 : observability_index(sys_, 0, delta_bar + 1 + 16);
            if (delta_bar < mu0_ - 1)
                throw WindowTooShortError("OitFilter: window length " + std::to_string(delta_bar) +
                                          " is shorter than observability index - 1 = " + std::to_string(mu0_ - 1) + ".");
        }

        const ConstrainedZonotope& step(const MeasurementBatch& batch)
        {
            require(batch.k == k_ + 1, "OitFilter: batches must arrive in time order.");
            window_.push_back({batch, build_centralized(sys_, batch.k)});
            while (static_cast<int>(window_.size()) > delta_ + 1) window_.pop_front();
            k_ = batch.k;
            if (k_ <= delta_)
            {
                posterior_ = standard_.step(batch);
                return posterior_;
            }
#ifndef NDEBUG
            // Debug builds re-check observability at each window start.
            observability_index(sys_, k_ - delta_, delta_ + 1);
#endif
            // Restart from the whole space at k - delta and replay the window.
            ConstrainedZonotope z = ConstrainedZonotope::unbounded(sys_.state_dim());
            for (size_t t = 0; t < window_.size(); ++t)
            {
                const auto& [b, stacked] = window_[t];
                if (t > 0) z = centralized_predict(z, window_[t - 1].second);
                z = centralized_update(z, stacked, stack_measurements(sys_, b), check_);
            }
            posterior_ = std::move(z);
            return posterior_;
        }

        const ConstrainedZonotope& posterior() const { return posterior_; }
        int k() const { return k_; }
        int delta_bar() const { return delta_; }
        int mu0() const { return mu0_; }
        size_t window_size() const { return window_.size(); }

    private:
        CentralizedFilter standard_;
        MultiAgentSystem sys_;
        int delta_;
        int mu0_ = 1;
        bool check_;
        int k_ = -1;
        ConstrainedZonotope posterior_;
        std::deque<std::pair<MeasurementBatch, StackedSystem>> window_;
};

// ---------------------------------------------------------------------------
// Distributed

inline ConstrainedZonotope distributed_predict(const ConstrainedZonotope& posterior_i, const Matrix& A_prev,
                                               const Matrix& B, const ConstrainedZonotope& Wset)
{
    return minkowski_sum(linear_map(A_prev, posterior_i), linear_map(B, Wset));
}

// Cartesian product in closed-neighborhood order (i first, then N_i ascending).
inline ConstrainedZonotope joint_prior(const Topology& topo, int i, const ConstrainedZonotope& own_prior,
                                       const std::map<int, ConstrainedZonotope>& neighbor_priors)
{
    std::vector<ConstrainedZonotope> parts{own_prior};
    for (int j : topo.in_neighbors(i))
    {
        auto it = neighbor_priors.find(j);
        if (it == neighbor_priors.end())
            throw std::invalid_argument("joint_prior: missing prior of in-neighbor " + std::to_string(j) + " for agent " +
                                        std::to_string(i) + ".");
        parts.push_back(it->second);
    }
    return cartesian_product(std::span<const ConstrainedZonotope>(parts));
}

inline ConstrainedZonotope joint_update(const ConstrainedZonotope& joint_prior, const StackedSystem& stacked_i,
                                        const Vector& Y)
{
    return intersect_under_map(joint_prior, stacked_i.H, Y, stacked_i.Vset);
}

// A joint posterior published by agent l, with the position alpha (0-based)
// of the receiving agent's block inside N_l and the block count q_l.
struct ReceivedJoint
{
    int from = 0;
    int alpha = 0;
    int blocks = 0;
    ConstrainedZonotope joint;
};

struct UpdateIntersectionOptions
{
    // Verification hook: negates the coupling offsets (breaks the set identity).
    bool flip_offset_sign = false;
};

// Own block (position 0 of the own joint) intersected with the same block
// projected out of every received joint:
//   G = [E_1 G_own, 0, ..., 0],  c = E_1 c_own
//   A = [diag(A_own, A_l1, ...); per l: E_1 G_own ... -E_alpha G_l ...]
//   b = [b_own; b_l1; ...; per l: E_alpha c_l - E_1 c_own]
inline ConstrainedZonotope update_intersection(const ConstrainedZonotope& own_joint, int block_dim,
                                               std::span<const ReceivedJoint> received,
                                               UpdateIntersectionOptions opts = {})
{
    require(block_dim >= 1 && own_joint.dim() >= block_dim && own_joint.dim() % block_dim == 0,
            "update_intersection: own joint dimension must be a multiple of the block dimension.");
    for (const auto& r : received)
    {
        require(r.blocks >= 1 && r.alpha >= 0 && r.alpha < r.blocks,
                "update_intersection: alpha must lie in [0, blocks).");
        require(r.joint.dim() == r.blocks * block_dim,
                "update_intersection: received joint from agent " + std::to_string(r.from) + " has inconsistent block dimensions.");
    }
    const int n = block_dim;
    const Matrix G_own = own_joint.G().topRows(n);
    const Vector c_own = own_joint.c().head(n);

    int total_g = own_joint.num_generators();
    int total_c = own_joint.num_constraints();
    for (const auto& r : received)
    {
        total_g += r.joint.num_generators();
        total_c += r.joint.num_constraints();
    }
    const int coupling = n * static_cast<int>(received.size());

    Matrix G = Matrix::Zero(n, total_g);
    G.leftCols(own_joint.num_generators()) = G_own;
    Matrix A = Matrix::Zero(total_c + coupling, total_g);
    Vector b(total_c + coupling);
    Vector h(total_g);

    A.topLeftCorner(own_joint.num_constraints(), own_joint.num_generators()) = own_joint.A();
    b.head(own_joint.num_constraints()) = own_joint.b();
    h.head(own_joint.num_generators()) = own_joint.h();
    int go = own_joint.num_generators(), co = own_joint.num_constraints();
    std::vector<int> gen_offset;
    for (const auto& r : received)
    {
        gen_offset.push_back(go);
        A.block(co, go, r.joint.num_constraints(), r.joint.num_generators()) = r.joint.A();
        b.segment(co, r.joint.num_constraints()) = r.joint.b();
        h.segment(go, r.joint.num_generators()) = r.joint.h();
        go += r.joint.num_generators();
        co += r.joint.num_constraints();
    }
    for (size_t t = 0; t < received.size(); ++t)
    {
        const auto& r = received[t];
        const int row = co + n * static_cast<int>(t);
        A.block(row, 0, n, own_joint.num_generators()) = G_own;
        A.block(row, gen_offset[t], n, r.joint.num_generators()) = -r.joint.G().middleRows(r.alpha * n, n);
        Vector offset = r.joint.c().segment(r.alpha * n, n) - c_own;
        if (opts.flip_offset_sign) offset = -offset;
        b.segment(row, n) = offset;
    }
    return ConstrainedZonotope(std::move(G), c_own, std::move(A), std::move(b), std::move(h));
}

// Interval hull re-encoded as an unconstrained box zonotope.
inline ConstrainedZonotope finalize_hull(const ConstrainedZonotope& intersected)
{
    return from_box(interval_hull(intersected));
}

struct DistributedAgentState
{
    int id = 0;
    int k = -1;
    ConstrainedZonotope prior;            // local prior at k
    ConstrainedZonotope joint_posterior;  // over the closed neighborhood
    ConstrainedZonotope intersected;      // before the hull step
    ConstrainedZonotope posterior;        // finalized box
    Box hull;
    std::map<int, ConstrainedZonotope> inbox_priors;
    std::map<int, Vector> inbox_measurements;
    std::map<int, ConstrainedZonotope> inbox_joints;
};

class DistributedFilter
{
    public:
        // initial_blocks[i-1] is agent i's initial range.
        DistributedFilter(MultiAgentSystem sys, std::vector<ConstrainedZonotope> initial_blocks,
                          UpdateIntersectionOptions opts = {})
            : sys_(std::move(sys)), opts_(opts)
        {
            require(static_cast<int>(initial_blocks.size()) == sys_.num_agents(),
                    "DistributedFilter: need one initial range per agent.");
            for (int i = 1; i <= sys_.num_agents(); ++i)
            {
                require(initial_blocks[i - 1].dim() == sys_.agent(i).n(), "DistributedFilter: initial range has wrong dimension.");
                DistributedAgentState st;
                st.id = i;
                st.posterior = std::move(initial_blocks[i - 1]);
                agents_.push_back(std::move(st));
            }
        }

        // Per-agent blocks of a joint initial range; constrained blocks are
        // replaced by their interval hulls.
        static std::vector<ConstrainedZonotope> split_initial(const MultiAgentSystem& sys, const ConstrainedZonotope& joint)
        {
            std::vector<ConstrainedZonotope> out;
            for (int i = 1; i <= sys.num_agents(); ++i)
            {
                auto block = project_block(joint, sys.state_offset(i), sys.agent(i).n());
                out.push_back(block.num_constraints() == 0 ? block : from_box(interval_hull(block)));
            }
            return out;
        }

        void step(const MeasurementBatch& batch)
        {
            require(batch.k == k_ + 1, "DistributedFilter: batches must arrive in time order.");
            const int k = batch.k;
            const int N = sys_.num_agents();
            const auto& topo = sys_.topology;

            // Local prediction.
            for (auto& st : agents_)
            {
                const auto& a = sys_.agent(st.id);
                st.prior = k == 0 ? st.posterior : distributed_predict(st.posterior, a.A.at(k - 1), a.B, a.W);
                st.k = k;
            }

            // Round 1: priors and absolute measurements to out-neighbors.
            for (auto& st : agents_)
            {
                st.inbox_priors.clear();
                st.inbox_measurements.clear();
            }
            for (int i = 1; i <= N; ++i)
            {
                for (int l : topo.out_neighbors(i))
                {
                    auto& dst = agents_[l - 1];
                    dst.inbox_priors[i] = agents_[i - 1].prior;
                    dst.inbox_measurements[i] = batch.y.at(i);
                }
            }

            // Joint update.
            for (auto& st : agents_)
            {
                const int i = st.id;
                const auto stacked = build_neighborhood(sys_, i, k);
                const auto jp = joint_prior(topo, i, st.prior, st.inbox_priors);
                st.joint_posterior = joint_update(jp, stacked, local_measurements(st, batch));
            }

            // Round 2: joint posteriors to out-neighbors.
            for (auto& st : agents_) st.inbox_joints.clear();
            for (int l = 1; l <= N; ++l)
                for (int i : topo.out_neighbors(l)) agents_[i - 1].inbox_joints[l] = agents_[l - 1].joint_posterior;

            // Update intersection with l in M_i and N_i, then hull.
            for (auto& st : agents_)
            {
                const int i = st.id;
                std::vector<ReceivedJoint> received;
                for (int l : topo.out_neighbors(i))
                {
                    if (!topo.has_edge(l, i)) continue;
                    const auto nbhd = topo.closed_neighborhood(l);
                    const int alpha = static_cast<int>(std::find(nbhd.begin(), nbhd.end(), i) - nbhd.begin());
                    received.push_back({l, alpha, static_cast<int>(nbhd.size()), st.inbox_joints.at(l)});
                }
                st.intersected = update_intersection(st.joint_posterior, sys_.agent(i).n(), received, opts_);
                try
                {
                    st.hull = interval_hull(st.intersected);
                }
                catch (const EmptySetError&)
                {
                    throw EmptyPosteriorError("distributed filter: empty posterior for agent " + std::to_string(i) +
                                              " at k=" + std::to_string(k) + ".");
                }
                st.posterior = from_box(st.hull);
            }
            k_ = k;
        }

        int k() const { return k_; }
        const DistributedAgentState& agent(int id) const { return agents_.at(static_cast<size_t>(id - 1)); }
        const std::vector<DistributedAgentState>& agents() const { return agents_; }

    private:
        MultiAgentSystem sys_;
        UpdateIntersectionOptions opts_;
        std::vector<DistributedAgentState> agents_;
        int k_ = -1;

        // Y_{N_i,k} assembled from the agent's own data and its inbox only.
        Vector local_measurements(const DistributedAgentState& st, const MeasurementBatch& batch) const
        {
            const int i = st.id;
            std::vector<Vector> parts{batch.y.at(i)};
            const auto nbrs = sys_.topology.in_neighbors(i);
            for (int j : nbrs) parts.push_back(st.inbox_measurements.at(j));
            for (int j : nbrs) parts.push_back(batch.z.at({i, j}));
            return vstack(std::span<const Vector>(parts));
        }
};

} // namespace czest
