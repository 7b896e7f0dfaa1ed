#include "scarfinder/poincare.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "scarfinder/models.hpp"
#include "scarfinder/optimize.hpp"

namespace scarfinder {

namespace {

double wrap_angle(double a) {
    double w = std::fmod(a, 2.0 * M_PI);
    if (w < 0) w += 2.0 * M_PI;
    return w;
}

double torus_dist1(double a, double b) {
    double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, 2.0 * M_PI - d);
}

} // namespace

AnsatzAngles AnsatzAngles::wrapped() const {
    return {wrap_angle(t1), wrap_angle(t2), wrap_angle(t3)};
}

double AnsatzAngles::distance(const AnsatzAngles& other) const {
    return std::max({torus_dist1(t1, other.t1), torus_dist1(t2, other.t2),
                     torus_dist1(t3, other.t3)});
}

std::vector<std::vector<ComplexMatrix>> ansatz_raw_tensors(const AnsatzAngles& a) {
    ComplexMatrix up = ComplexMatrix::Zero(2, 2);
    up(0, 1) = kImag;
    auto down = [](double t) {
        ComplexMatrix m = ComplexMatrix::Zero(2, 2);
        m(0, 0) = std::cos(t);
        m(1, 0) = std::sin(t);
        return m;
    };
    return {{up, down(a.t1)}, {up, down(a.t2)}, {up, down(a.t3)}};
}

UniformMPS ansatz_mps(const AnsatzAngles& a) {
    return UniformMPS::from_tensors(ansatz_raw_tensors(a));
}

AnsatzAngles project_to_ansatz(const UniformMPS& psi, const AnsatzAngles& guess,
                               double* fidelity) {
    auto eval = [&](const AnsatzAngles& a) -> double {
        try {
            return transfer_fidelity(psi, ansatz_mps(a));
        } catch (const ConvergenceError&) {
            return 0.0;
        }
    };
    auto neg = [&](const std::vector<double>& x) {
        return -eval({x[0], x[1], x[2]});
    };

    double f_guess = eval(guess);
    SimplexResult best{{guess.t1, guess.t2, guess.t3}, -f_guess, 0};
    const double steps[] = {0.05, 0.15, 0.4};
    for (double step : steps) {
        SimplexResult r = nelder_mead(neg, best.x, step, 1e-7, 600);
        if (r.value < best.value) best = r;
        if (-best.value >= 0.5) break;  // inside the trust region; restarts only while lost
    }
    if (-best.value < 0.5)
        throw ProjectionLostError("project_to_ansatz: optimizer stagnated below fidelity 0.5");
    if (fidelity) *fidelity = -best.value;
    AnsatzAngles out{best.x[0], best.x[1], best.x[2]};
    return out.wrapped();
}

PoincareRun poincare_run(const AnsatzAngles& theta0, const PoincareOptions& opts,
                         int trajectory_id) {
    if (opts.dt <= 0) throw ConfigError("poincare_run: dt must be > 0");
    HamiltonianSpec h = pxp(opts.omega, opts.mu);
    const int n_inner = std::max(1, static_cast<int>(std::round(opts.dt / opts.inner_dt)));
    GatePlan plan = trotter_plan(h, Complex(opts.dt / n_inner, 0.0), 2, /*plan_cell=*/3);

    PoincareRun run;
    AnsatzAngles lifted = theta0.wrapped();
    run.path.push_back(lifted);
    UniformMPS state = ansatz_mps(lifted);

    int last_dir = 0;
    double last_same_dir_t1 = 0, last_same_dir_t3 = 0;
    int settled = 0;

    for (int step = 0; step < opts.n_steps; ++step) {
        UniformMPS evolved = state;
        for (int i = 0; i < n_inner; ++i) itebd_step(evolved, plan, opts.chi_work, opts.cutoff);
        run.energies.push_back(energy_density(evolved, h));

        AnsatzAngles raw;
        try {
            raw = project_to_ansatz(evolved, lifted.wrapped());
        } catch (const ProjectionLostError&) {
            run.lost = true;
            break;
        }
        // lift onto the real line: nearest 2*pi translate of each component
        AnsatzAngles next;
        next.t1 = raw.t1 + 2.0 * M_PI * std::round((lifted.t1 - raw.t1) / (2.0 * M_PI));
        next.t2 = raw.t2 + 2.0 * M_PI * std::round((lifted.t2 - raw.t2) / (2.0 * M_PI));
        next.t3 = raw.t3 + 2.0 * M_PI * std::round((lifted.t3 - raw.t3) / (2.0 * M_PI));

        // crossings of theta2 through any lift of the theta2 = 0 plane
        double a = lifted.t2, b = next.t2;
        if (a != b) {
            double lo = std::min(a, b), hi = std::max(a, b);
            for (std::int64_t m = std::int64_t(std::ceil(lo / (2.0 * M_PI))); true; ++m) {
                double plane = 2.0 * M_PI * double(m);
                if (plane <= lo || plane > hi) {
                    if (plane > hi) break;
                    continue;
                }
                double f = (plane - a) / (b - a);
                PoincarePoint pt;
                pt.theta1 = wrap_angle(lifted.t1 + f * (next.t1 - lifted.t1));
                pt.theta3 = wrap_angle(lifted.t3 + f * (next.t3 - lifted.t3));
                pt.crossing_index = static_cast<int>(run.points.size());
                pt.trajectory_id = trajectory_id;
                pt.direction = b > a ? +1 : -1;
                run.points.push_back(pt);

                if (pt.direction == last_dir || last_dir == 0) {
                    double move = std::max(torus_dist1(pt.theta1, last_same_dir_t1),
                                           torus_dist1(pt.theta3, last_same_dir_t3));
                    if (last_dir != 0 && move < opts.early_stop_eps) ++settled;
                    else settled = 0;
                    last_dir = pt.direction;
                    last_same_dir_t1 = pt.theta1;
                    last_same_dir_t3 = pt.theta3;
                }
            }
        }
        lifted = next;
        run.path.push_back(lifted);
        state = ansatz_mps(raw);

        if (opts.early_stop && settled >= 2 &&
            static_cast<int>(run.points.size()) >= opts.min_crossings)
            break;
    }
    run.final_angles = lifted.wrapped();
    return run;
}

FixedPointSearch find_fixed_points(int n_samples, const PoincareOptions& opts, std::uint64_t seed,
                                   int threads) {
    if (n_samples < 1) throw InvalidInputError("find_fixed_points: n_samples must be >= 1");
    struct Terminal {
        double t1, t3;
        AnsatzAngles start;
        bool valid = false;
    };
    std::vector<std::array<Terminal, 2>> terminals(n_samples);  // per direction (+, -)

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_samples));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_samples; i = next.fetch_add(1)) {
            std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + std::uint64_t(i));
            std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
            AnsatzAngles theta0{uni(rng), uni(rng), uni(rng)};
            PoincareRun run = poincare_run(theta0, opts, i);
            if (run.lost) continue;
            // terminal crossing per direction, accepted when the last two
            // same-direction crossings agree to 1e-4
            for (int dir = 0; dir < 2; ++dir) {
                int want = dir == 0 ? +1 : -1;
                const PoincarePoint* last = nullptr;
                const PoincarePoint* prev = nullptr;
                for (const auto& p : run.points)
                    if (p.direction == want) {
                        prev = last;
                        last = &p;
                    }
                if (!last || !prev) continue;
                double move = std::max(torus_dist1(last->theta1, prev->theta1),
                                       torus_dist1(last->theta3, prev->theta3));
                if (move < 1e-4) {
                    terminals[i][dir] = {last->theta1, last->theta3, theta0, true};
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // greedy clustering, radius 0.02*pi in (theta1, theta3)
    const double radius = 0.02 * M_PI;
    struct Cluster {
        double t1 = 0, t3 = 0;  // running means (via unwrapped accumulation)
        std::vector<AnsatzAngles> starts;
        std::vector<std::pair<double, double>> members;
    };
    std::vector<Cluster> clusters;
    FixedPointSearch out;
    for (int i = 0; i < n_samples; ++i)
        for (int dir = 0; dir < 2; ++dir) {
            const Terminal& t = terminals[i][dir];
            if (!t.valid) continue;
            ++out.n_converged;
            bool placed = false;
            for (auto& c : clusters) {
                if (std::max(torus_dist1(t.t1, c.t1), torus_dist1(t.t3, c.t3)) < radius) {
                    c.members.emplace_back(t.t1, t.t3);
                    c.starts.push_back(t.start);
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                Cluster c;
                c.t1 = t.t1;
                c.t3 = t.t3;
                c.members.emplace_back(t.t1, t.t3);
                c.starts.push_back(t.start);
                clusters.push_back(std::move(c));
            }
        }

    for (const auto& c : clusters) {
        FixedPoint fp;
        fp.angles = AnsatzAngles{c.t1, 0.0, c.t3}.wrapped();
        fp.basin_count = static_cast<int>(c.members.size());
        std::vector<double> dists;
        for (const auto& s : c.starts)
            dists.push_back(AnsatzAngles{c.t1, 0.0, c.t3}.distance(s));
        std::sort(dists.begin(), dists.end());
        fp.convergence_radius = dists.empty() ? 0.0 : dists[dists.size() / 2];
        out.all_clusters.push_back(fp);
        if (fp.angles.t1 >= 0.5 * M_PI && fp.angles.t1 <= 1.5 * M_PI && fp.angles.t3 <= M_PI)
            out.in_domain.push_back(fp);
    }
    std::sort(out.all_clusters.begin(), out.all_clusters.end(),
              [](const FixedPoint& a, const FixedPoint& b) { return a.basin_count > b.basin_count; });
    std::sort(out.in_domain.begin(), out.in_domain.end(),
              [](const FixedPoint& a, const FixedPoint& b) { return a.basin_count > b.basin_count; });
    return out;
}

} // namespace scarfinder
