#include "scarfinder/scarfinder.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "scarfinder/models.hpp"

namespace scarfinder {

int effective_chi_work(const ScarFinderConfig& cfg) {
    if (cfg.chi_work > 0) return cfg.chi_work;
    return std::max(3 * cfg.chi_target, cfg.chi_target + 8);
}

UniformMPS project_to_manifold(const UniformMPS& psi, int chi_target, double* discarded_weight) {
    UniformMPS out = psi;
    double w = out.truncate_bonds(chi_target);
    if (discarded_weight) *discarded_weight = w;
    return out;
}

UniformMPS energy_correct(const UniformMPS& psi, const HamiltonianSpec& h, double e_target, int n,
                          int chi_target, double cutoff) {
    if (n < 1) throw InvalidInputError("energy_correct: n must be >= 1");
    double e0 = energy_density(psi, h);
    double de = e0 - e_target;
    if (std::abs(de) < 1e-13) return psi;

    double dtau = de / double(n);
    GatePlan plan = trotter_plan(h, Complex(0.0, -dtau), 2,
                                 psi.unit_cell() % h.unit_cell == 0 &&
                                         psi.unit_cell() >= h.max_span()
                                     ? psi.unit_cell()
                                     : 0);
    UniformMPS cur = psi;
    if (cur.unit_cell() % plan.unit_cell != 0)
        cur = cur.extended(std::lcm(cur.unit_cell(), plan.unit_cell) / cur.unit_cell());

    UniformMPS best = cur;
    double best_diff = std::abs(de);
    bool improved = false;
    double prev_diff = std::abs(de);
    int worsening = 0;
    for (int i = 0; i < n; ++i) {
        itebd_step(cur, plan, chi_target, cutoff);
        double ei = energy_density(cur, h);
        double diff = std::abs(ei - e_target);
        if (diff < best_diff) {
            best_diff = diff;
            best = cur;
            improved = true;
        }
        if (diff > prev_diff) {
            if (++worsening >= 2 && improved) break;  // passed the closest point
        } else {
            worsening = 0;
        }
        prev_diff = diff;
    }
    if (!improved)
        throw CorrectionFailedError("energy_correct: energy deviation failed to decrease");
    return best;
}

namespace {

int fit_plan_cell(const HamiltonianSpec& h, int state_cell) {
    int base = std::lcm(h.unit_cell, state_cell);
    int span = h.max_span();
    int n = base;
    while (n < span) n += base;
    return n;
}

double mean_bond_entropy(const UniformMPS& psi) {
    double s = 0.0;
    for (int b = 0; b < psi.unit_cell(); ++b) s += half_chain_entropy(psi, b);
    return s / double(psi.unit_cell());
}

} // namespace

RunResult scarfinder_run(const UniformMPS& psi0, const HamiltonianSpec& h,
                         const ScarFinderConfig& cfg) {
    if (cfg.dt_projection <= 0) throw ConfigError("scarfinder_run: dt_projection must be > 0");
    if (cfg.n_imag_substeps < 1) throw ConfigError("scarfinder_run: n_imag_substeps must be >= 1");
    const int chi_work = effective_chi_work(cfg);
    const int n_inner = std::max(1, static_cast<int>(std::round(cfg.dt_projection / cfg.inner_dt)));
    const double inner_dt = cfg.dt_projection / n_inner;

    RunResult res;
    res.state = psi0;
    const int plan_cell = fit_plan_cell(h, psi0.unit_cell());
    if (res.state.unit_cell() % plan_cell != 0)
        res.state = res.state.extended(std::lcm(res.state.unit_cell(), plan_cell) /
                                       res.state.unit_cell());
    GatePlan plan = trotter_plan(h, Complex(inner_dt, 0.0), 2, plan_cell);

    double prev_probe_entropy = 0.0;
    bool have_probe = false;
    int probe_stable = 0;

    for (int step = 1; step <= cfg.n_steps; ++step) {
        IterationRecord rec;
        rec.step = step;
        for (int i = 0; i < n_inner; ++i) itebd_step(res.state, plan, chi_work, cfg.cutoff);
        rec.energy_pre = energy_density(res.state, h);

        res.state = project_to_manifold(res.state, cfg.chi_target, &rec.discarded_weight);

        if (cfg.energy_correction) {
            try {
                res.state = energy_correct(res.state, h, cfg.e_target, cfg.n_imag_substeps,
                                           cfg.chi_target, cfg.cutoff);
            } catch (const CorrectionFailedError& e) {
                rec.energy_post = energy_density(res.state, h);
                rec.entropy = mean_bond_entropy(res.state);
                res.records.push_back(rec);
                res.success = false;
                res.message = e.what();
                return res;
            }
        }
        rec.energy_post = energy_density(res.state, h);
        rec.entropy = mean_bond_entropy(res.state);

        if (cfg.fidelity_family && cfg.fidelity_stride > 0 &&
            (step % cfg.fidelity_stride == 0 || step == cfg.n_steps)) {
            rec.scar_fidelity = scar_fidelity(res.state, *cfg.fidelity_family).fidelity;
            if (cfg.stop_at_fidelity > 0 && *rec.scar_fidelity >= cfg.stop_at_fidelity) {
                res.records.push_back(rec);
                res.converged = true;
                res.message = "scar fidelity threshold reached";
                return res;
            }
        }

        if (cfg.convergence_probe && step % cfg.probe_stride == 0) {
            UniformMPS probe = res.state;
            EvolveOptions opts;
            opts.dt = cfg.inner_dt;
            opts.chi_max = chi_work;
            opts.cutoff = cfg.cutoff;
            opts.record_stride = 1 << 30;
            opts.record_fidelity = false;
            free_evolve(probe, h, cfg.probe_time, opts);
            double s = mean_bond_entropy(probe);
            if (have_probe && std::abs(s - prev_probe_entropy) < cfg.probe_entropy_tol) {
                if (++probe_stable >= cfg.probe_stable_needed) {
                    res.records.push_back(rec);
                    res.converged = true;
                    res.message = "entropy probe stable";
                    return res;
                }
            } else {
                probe_stable = 0;
            }
            prev_probe_entropy = s;
            have_probe = true;
        }
        res.records.push_back(rec);
    }
    return res;
}

std::pair<double, double> dominant_frequency(const std::vector<double>& series, double dt) {
    const int n = static_cast<int>(series.size());
    if (n < 4) return {0.0, 0.0};
    double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double best_f = 0.0, best_p = 0.0;
    for (int m = 1; m <= n / 2; ++m) {
        Complex acc(0, 0);
        for (int t = 0; t < n; ++t)
            acc += (series[t] - mean) * std::exp(-2.0 * M_PI * kImag * double(m) * double(t) / double(n));
        double p = std::norm(acc);
        if (p > best_p) {
            best_p = p;
            best_f = double(m) / (double(n) * dt);
        }
    }
    return {best_f, best_p};
}

SampleResult sample_and_select(const HamiltonianSpec& h, int n_samples,
                               const ScarFinderConfig& cfg, std::uint64_t seed, int threads) {
    if (n_samples < 1) throw InvalidInputError("sample_and_select: n_samples must be >= 1");
    const int cell = cfg.sample_unit_cell > 0 ? cfg.sample_unit_cell : h.unit_cell;
    SampleResult out;
    out.runs.resize(n_samples);
    out.scores.assign(n_samples, std::numeric_limits<double>::infinity());
    out.probe_trajectories.resize(n_samples);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_samples));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_samples; i = next.fetch_add(1)) {
            std::uint64_t trial_seed = seed * 0x9e3779b97f4a7c15ull + std::uint64_t(i);
            UniformMPS psi0 = random_imps(cfg.chi_target, cell, h.local_dim, trial_seed);
            out.runs[i] = scarfinder_run(psi0, h, cfg);
            if (!out.runs[i].success) continue;

            // score the candidate with a free-evolution probe
            UniformMPS probe = out.runs[i].state;
            EvolveOptions opts;
            opts.dt = cfg.inner_dt;
            opts.chi_max = effective_chi_work(cfg);
            opts.cutoff = cfg.cutoff;
            opts.record_stride = std::max(1, int(std::round(0.1 / cfg.inner_dt)));
            Trajectory traj = free_evolve(probe, h, cfg.selection.t, opts);
            out.probe_trajectories[i] = traj;
            if (cfg.selection.kind == SelectionKind::MinEntropyAtT) {
                out.scores[i] = traj.records.back().entropies.mean();
            } else {
                std::vector<double> fid;
                fid.reserve(traj.records.size());
                for (const auto& r : traj.records) fid.push_back(r.log_fidelity);
                double rdt = traj.records.size() > 1 ? traj.records[1].time - traj.records[0].time
                                                     : opts.dt;
                auto [freq, power] = dominant_frequency(fid, rdt);
                if (freq >= cfg.selection.f_lo && freq <= cfg.selection.f_hi)
                    out.scores[i] = -power;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (int i = 0; i < n_samples; ++i)
        if (out.scores[i] < std::numeric_limits<double>::infinity() &&
            (out.best_index < 0 || out.scores[i] < out.scores[out.best_index]))
            out.best_index = i;
    if (out.best_index >= 0) {
        out.any_success = true;
        out.best = out.runs[out.best_index].state;
    }
    return out;
}

} // namespace scarfinder
