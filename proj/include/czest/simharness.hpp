#pragma once

// Scenario execution: truth propagation, bounded-noise sampling, filter
// orchestration, per-step metrics and seeded Monte Carlo trials.

#include "czest/czono.hpp"
#include "czest/czono_json.hpp"
#include "czest/errors.hpp"
#include "czest/filters.hpp"
#include "czest/scenario.hpp"
#include "czest/sysmodel.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace czest
{

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t base, int trial) { return splitmix64(base + static_cast<std::uint64_t>(trial)); }

// Draws noise inside declared sets. The uniform draw is built from raw
// mt19937_64 output so the sequence does not depend on the standard
// library's distribution implementations.
class NoiseSampler
{
    public:
        NoiseSampler(std::uint64_t seed, NoiseMode mode = NoiseMode::Uniform, double grid_step = 0.05)
            : rng_(seed), mode_(mode), step_(grid_step)
        {
        }

        double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
        std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

        double scalar(double lo, double hi)
        {
            switch (mode_)
            {
                case NoiseMode::Uniform: return uniform(lo, hi);
                case NoiseMode::Vertex: return (rng_() & 1ULL) ? hi : lo;
                case NoiseMode::Grid:
                {
                    const auto count = static_cast<std::uint64_t>(std::floor((hi - lo) / step_ + 1e-9)) + 1;
                    return snap(lo + step_ * static_cast<double>(below(count)));
                }
            }
            return lo;
        }

        Vector box(const Box& b)
        {
            Vector x(b.dim());
            for (int j = 0; j < b.dim(); ++j) x(j) = scalar(b.lo(j), b.hi(j));
            return x;
        }

        // Boxes are sampled directly; other sets by rejection from their hull.
        Vector sample(const ConstrainedZonotope& set)
        {
            if (const auto b = as_box(set)) return box(*b);
            const Box hull = interval_hull(set);
            for (int tries = 0; tries < 100000; ++tries)
            {
                Vector x = box(hull);
                if (contains(set, x)) return x;
            }
            throw std::runtime_error("NoiseSampler: rejection sampling did not find a point of the set.");
        }

        NoiseMode mode() const { return mode_; }

        // Unconstrained sets with one nonzero per generator column are boxes.
        static std::optional<Box> as_box(const ConstrainedZonotope& z)
        {
            if (z.num_constraints() != 0 || z.has_unbounded_generator()) return std::nullopt;
            Vector r = Vector::Zero(z.dim());
            for (int j = 0; j < z.num_generators(); ++j)
            {
                int nz = 0;
                for (int i = 0; i < z.dim(); ++i)
                {
                    if (z.G()(i, j) != 0.0)
                    {
                        ++nz;
                        r(i) += std::abs(z.G()(i, j)) * z.h()(j);
                    }
                }
                if (nz > 1) return std::nullopt;
            }
            return Box(z.c() - r, z.c() + r);
        }

    private:
        std::mt19937_64 rng_;
        NoiseMode mode_;
        double step_;

        // Keeps lattice values exact multiples of the step in decimal terms.
        double snap(double v) const { return std::round(v / step_) * step_; }
};

// ---------------------------------------------------------------------------
// Trial log

struct AgentEstimate
{
    Box hull;
    double d = 0.0;       // maximum edge length of the hull
    double gnorm = 0.0;   // infinity norm of the hull generator matrix
    bool contained = true;
};

struct SetComplexity
{
    int generators = 0;
    int constraints = 0;
};

struct StepRecord
{
    int k = 0;
    Vector truth;
    MeasurementBatch batch;
    std::map<std::string, std::vector<AgentEstimate>> estimates;   // per algorithm, agents in id order
    std::map<std::string, SetComplexity> complexity;               // posterior size (centralized, oit)
};

struct TrialLog
{
    int trial = 0;
    std::uint64_t seed = 0;
    std::string scenario;
    int mu0 = 0;
    std::vector<Box> initial_boxes;
    std::vector<StepRecord> steps;
    int violations = 0;
    std::string aborted;   // diagnostic when a filter reported an empty posterior
};

inline AgentEstimate make_estimate(const Box& hull, bool contained)
{
    AgentEstimate e;
    e.hull = hull;
    e.d = diameter_inf(hull);
    const auto z = from_box(hull);
    double g = 0.0;
    for (int i = 0; i < z.dim(); ++i)
    {
        double row = 0.0;
        for (int j = 0; j < z.num_generators(); ++j) row += std::abs(z.G()(i, j)) * (std::isinf(z.h()(j)) ? kInf : z.h()(j));
        g = std::max(g, row);
    }
    e.gnorm = g;
    e.contained = contained;
    return e;
}

namespace detail
{

// Hulls and containment for a centralized-type posterior over the stacked state.
// `warm` carries the previous step's feasible coefficients: the exact filter
// only appends generators, so the old prefix stays nearly feasible.
inline std::vector<AgentEstimate> centralized_estimates(const MultiAgentSystem& sys, const ConstrainedZonotope& posterior,
                                                        const Vector& truth, Vector& warm)
{
    const auto hull = interval_hull_detail(posterior, warm.size() ? &warm : nullptr);
    const Box& full = hull.box;
    warm = hull.witness;
    const bool joint = contains(posterior, truth, warm.size() ? &warm : nullptr);
    std::vector<AgentEstimate> out;
    for (int i = 1; i <= sys.num_agents(); ++i)
    {
        const int off = sys.state_offset(i), n = sys.agent(i).n();
        const Vector xi = truth.segment(off, n);
        const Box block(full.lo.segment(off, n), full.hi.segment(off, n));
        bool in = joint;
        if (!in) in = contains(project_block(posterior, off, n), xi, warm.size() ? &warm : nullptr);
        out.push_back(make_estimate(block, in));
    }
    return out;
}

} // namespace detail

struct TrialOptions
{
    int mu0 = -1;   // observability index; computed when negative
    UpdateIntersectionOptions intersection;
};

inline int scenario_observability_index(const ScenarioConfig& cfg)
{
    return observability_index(cfg.system, 0, cfg.delta_bar + 1 + 16);
}

// One seeded trial. Draw order: initial centers (random ranges), initial
// truth, then per step absolute noises (agent order), relative noises (edge
// order), and process noises after the filters have consumed the batch.
inline TrialLog run_trial(const ScenarioConfig& cfg, int trial = 0, TrialOptions opts = {})
{
    const auto& sys = cfg.system;
    TrialLog log;
    log.trial = trial;
    log.seed = trial_seed(cfg.seed, trial);
    log.scenario = cfg.name;
    NoiseSampler rng(log.seed, cfg.noise_mode, cfg.grid_step);

    // Initial range and truth.
    if (!cfg.initial_boxes.empty())
    {
        log.initial_boxes = cfg.initial_boxes;
    }
    else
    {
        for (int i = 1; i <= sys.num_agents(); ++i)
        {
            const int n = sys.agent(i).n();
            Vector c(n);
            for (int j = 0; j < n; ++j) c(j) = rng.uniform(cfg.random_initial.center_lo, cfg.random_initial.center_hi);
            log.initial_boxes.push_back(Box::symmetric(c, cfg.random_initial.half_width));
        }
    }
    Vector x(sys.state_dim());
    if (cfg.initial_truth)
    {
        x = *cfg.initial_truth;
    }
    else
    {
        for (int i = 1; i <= sys.num_agents(); ++i)
            x.segment(sys.state_offset(i), sys.agent(i).n()) = rng.box(log.initial_boxes[static_cast<size_t>(i - 1)]);
    }

    std::vector<ConstrainedZonotope> blocks;
    for (const auto& b : log.initial_boxes) blocks.push_back(from_box(b));
    const auto joint_initial = cartesian_product(std::span<const ConstrainedZonotope>(blocks));

    std::optional<CentralizedFilter> central;
    std::optional<OitFilter> oit;
    std::optional<DistributedFilter> distributed;
    if (cfg.has_algorithm("centralized")) central.emplace(sys, joint_initial);
    if (cfg.has_algorithm("oit"))
    {
        log.mu0 = opts.mu0 >= 0 ? opts.mu0 : scenario_observability_index(cfg);
        oit.emplace(sys, joint_initial, cfg.delta_bar, log.mu0);
    }
    if (cfg.has_algorithm("distributed")) distributed.emplace(sys, blocks, opts.intersection);

    Vector warm_central, warm_oit;
    const auto scaled = [&](const ConstrainedZonotope& set) -> Vector {
        Vector s = rng.sample(set);
        if (cfg.noise_scale != 1.0) s = set.c() + cfg.noise_scale * (s - set.c());
        return s;
    };

    for (int k = 0; k < cfg.horizon; ++k)
    {
        std::map<int, Vector> v;
        std::map<std::pair<int, int>, Vector> r;
        for (int i = 1; i <= sys.num_agents(); ++i) v[i] = scaled(sys.agent(i).V);
        for (int i = 1; i <= sys.num_agents(); ++i)
            for (int j : sys.topology.in_neighbors(i)) r[{i, j}] = scaled(sys.agent(i).relative_noise(j));

        StepRecord rec;
        rec.k = k;
        rec.truth = x;
        rec.batch = measure(sys, k, x, v, r);

        std::string stage;
        try
        {
            if (central)
            {
                stage = "centralized";
                const auto& post = central->step(rec.batch);
                rec.estimates["centralized"] = detail::centralized_estimates(sys, post, x, warm_central);
                rec.complexity["centralized"] = {post.num_generators(), post.num_constraints()};
            }
            if (oit)
            {
                stage = "oit";
                const auto& post = oit->step(rec.batch);
                rec.estimates["oit"] = detail::centralized_estimates(sys, post, x, warm_oit);
                rec.complexity["oit"] = {post.num_generators(), post.num_constraints()};
            }
            if (distributed)
            {
                stage = "distributed";
                distributed->step(rec.batch);
                std::vector<AgentEstimate> est;
                for (int i = 1; i <= sys.num_agents(); ++i)
                {
                    const auto& st = distributed->agent(i);
                    const Vector xi = x.segment(sys.state_offset(i), sys.agent(i).n());
                    est.push_back(make_estimate(st.hull, st.hull.contains(xi)));
                }
                rec.estimates["distributed"] = std::move(est);
            }
        }
        catch (const EmptySetError& e)
        {
            log.aborted = stage + " at k=" + std::to_string(k) + ": " + e.what();
            ++log.violations;
            log.steps.push_back(std::move(rec));
            break;
        }
        catch (const EmptyPosteriorError& e)
        {
            log.aborted = stage + " at k=" + std::to_string(k) + ": " + e.what();
            ++log.violations;
            log.steps.push_back(std::move(rec));
            break;
        }
        catch (const std::exception& e)
        {
            throw std::runtime_error("trial " + std::to_string(trial) + ", " + stage + " at k=" + std::to_string(k) + ": " + e.what());
        }

        for (const auto& [alg, est] : rec.estimates)
            for (const auto& e : est)
                if (!e.contained) ++log.violations;
        log.steps.push_back(std::move(rec));

        if (k + 1 < cfg.horizon)
        {
            Vector w(sys.noise_dim());
            int off = 0;
            for (const auto& a : sys.agents)
            {
                w.segment(off, a.p()) = scaled(a.W);
                off += a.p();
            }
            x = step_truth(sys, k, x, w);
        }
    }
    return log;
}

// ---------------------------------------------------------------------------
// Metrics

struct MetricRow
{
    int k = 0;
    std::string algorithm;
    int agent = 0;
    double d = 0.0;
    double gnorm = 0.0;
    bool contained = true;
};

// One row per step, algorithm and agent. The finalized hulls are encoded with
// a diagonal generator matrix, so d = 2 * gnorm must hold for every row.
inline std::vector<MetricRow> compute_metrics(const TrialLog& log)
{
    std::vector<MetricRow> rows;
    for (const auto& s : log.steps)
    {
        for (const auto& [alg, est] : s.estimates)
        {
            for (size_t t = 0; t < est.size(); ++t)
            {
                const auto& e = est[t];
                if (!(std::isinf(e.d) && std::isinf(e.gnorm)) && std::abs(e.d - 2.0 * e.gnorm) > 1e-12 * std::max(1.0, e.d))
                    throw std::logic_error("compute_metrics: diameter differs from twice the generator norm.");
                rows.push_back({s.k, alg, static_cast<int>(t) + 1, e.d, e.gnorm, e.contained});
            }
        }
    }
    return rows;
}

struct StepAggregate
{
    double mean_d = 0.0;
    double max_d = 0.0;
    double mean_gnorm = 0.0;
    double max_gnorm = 0.0;
    int samples = 0;
};

struct MonteCarloResult
{
    std::vector<TrialLog> trials;
    std::map<std::string, std::vector<StepAggregate>> per_step;   // algorithm -> k
    int violations = 0;
    int mu0 = 0;
};

inline int thread_budget()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("CZEST_THREADS"))
    {
        const int cap = std::atoi(env);
        if (cap >= 1) n = cap;
    }
    return n;
}

// Trials run in parallel; results and aggregation follow trial order.
inline MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, int trials, TrialOptions opts = {}, int threads = -1)
{
    require(trials >= 1, "run_monte_carlo: trials must be >= 1.");
    MonteCarloResult out;
    if (cfg.has_algorithm("oit") && opts.mu0 < 0) opts.mu0 = scenario_observability_index(cfg);
    out.mu0 = std::max(opts.mu0, 0);
    out.trials.resize(static_cast<size_t>(trials));

    const int workers = std::min(trials, threads >= 1 ? threads : thread_budget());
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int t = next++; t < trials; t = next++)
        {
            try
            {
                out.trials[static_cast<size_t>(t)] = run_trial(cfg, t, opts);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    for (const auto& log : out.trials)
    {
        out.violations += log.violations;
        for (const auto& s : log.steps)
        {
            for (const auto& [alg, est] : s.estimates)
            {
                auto& series = out.per_step[alg];
                if (static_cast<int>(series.size()) <= s.k) series.resize(static_cast<size_t>(s.k) + 1);
                auto& agg = series[static_cast<size_t>(s.k)];
                for (const auto& e : est)
                {
                    agg.mean_d += e.d;
                    agg.mean_gnorm += e.gnorm;
                    agg.max_d = std::max(agg.max_d, e.d);
                    agg.max_gnorm = std::max(agg.max_gnorm, e.gnorm);
                    ++agg.samples;
                }
            }
        }
    }
    for (auto& [alg, series] : out.per_step)
    {
        for (auto& agg : series)
        {
            if (agg.samples == 0) continue;
            agg.mean_d /= agg.samples;
            agg.mean_gnorm /= agg.samples;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Persistence

inline std::string format_double(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline nlohmann::json step_to_json(const StepRecord& s)
{
    using json = nlohmann::json;
    json j;
    j["k"] = s.k;
    j["truth"] = json_io::encode_vector(s.truth);
    json y = json::object();
    for (const auto& [i, v] : s.batch.y) y[std::to_string(i)] = json_io::encode_vector(v);
    j["y"] = y;
    json z = json::object();
    for (const auto& [ij, v] : s.batch.z) z[std::to_string(ij.first) + "," + std::to_string(ij.second)] = json_io::encode_vector(v);
    j["z"] = z;
    json est = json::object();
    for (const auto& [alg, list] : s.estimates)
    {
        json arr = json::array();
        for (size_t t = 0; t < list.size(); ++t)
        {
            const auto& e = list[t];
            arr.push_back({{"agent", static_cast<int>(t) + 1},
                           {"lo", json_io::encode_vector(e.hull.lo)},
                           {"hi", json_io::encode_vector(e.hull.hi)},
                           {"d", json_io::encode_number(e.d)},
                           {"gnorm", json_io::encode_number(e.gnorm)},
                           {"contained", e.contained}});
        }
        est[alg] = arr;
    }
    j["estimates"] = est;
    json cx = json::object();
    for (const auto& [alg, c] : s.complexity) cx[alg] = {{"generators", c.generators}, {"constraints", c.constraints}};
    j["complexity"] = cx;
    return j;
}

// JSON lines: a header line describing the trial, then one line per step.
inline void write_jsonl(std::ostream& out, const TrialLog& log)
{
    using json = nlohmann::json;
    json header;
    header["trial"] = log.trial;
    header["seed"] = log.seed;
    header["scenario"] = log.scenario;
    header["mu0"] = log.mu0;
    header["violations"] = log.violations;
    header["aborted"] = log.aborted;
    json boxes = json::array();
    for (const auto& b : log.initial_boxes) boxes.push_back(json_io::to_json(b));
    header["initial_boxes"] = boxes;
    out << header.dump() << '\n';
    for (const auto& s : log.steps) out << step_to_json(s).dump() << '\n';
}

inline constexpr const char* kCsvHeader = "k,algorithm,agent,d,gnorm,contained";

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows)
{
    out << kCsvHeader << '\n';
    for (const auto& r : rows)
    {
        out << r.k << ',' << r.algorithm << ',' << r.agent << ',' << format_double(r.d) << ',' << format_double(r.gnorm) << ','
            << (r.contained ? "true" : "false") << '\n';
    }
}

inline void write_summary_csv(std::ostream& out, const MonteCarloResult& mc)
{
    out << "k,algorithm,mean_d,max_d,mean_gnorm,max_gnorm\n";
    for (const auto& [alg, series] : mc.per_step)
        for (size_t k = 0; k < series.size(); ++k)
        {
            const auto& a = series[k];
            out << k << ',' << alg << ',' << format_double(a.mean_d) << ',' << format_double(a.max_d) << ','
                << format_double(a.mean_gnorm) << ',' << format_double(a.max_gnorm) << '\n';
        }
}

} // namespace czest
