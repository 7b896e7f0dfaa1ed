#include "scarfinder/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>

namespace scarfinder::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path.string());
    return out;
}

} // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    auto out = open_out(path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    if (traj.records.empty()) {
        write_csv(path, {"time"}, {});
        return;
    }
    const auto& first = traj.records.front();
    std::vector<std::string> header = {"time", "energy", "entropy_mean"};
    for (Eigen::Index b = 0; b < first.entropies.size(); ++b)
        header.push_back("entropy_bond_" + std::to_string(b));
    header.push_back("log_fidelity");
    for (const auto& [name, value] : first.observables) header.push_back(name);

    std::vector<std::vector<double>> rows;
    for (const auto& r : traj.records) {
        std::vector<double> row = {r.time, r.energy, r.entropies.mean()};
        for (Eigen::Index b = 0; b < r.entropies.size(); ++b) row.push_back(r.entropies(b));
        row.push_back(r.log_fidelity);
        for (const auto& [name, value] : r.observables) row.push_back(value);
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& records) {
    auto out = open_out(path);
    out << "step,energy_pre,energy_post,delta_e,discarded_weight,entropy,scar_fidelity\n";
    for (const auto& r : records) {
        out << r.step << ',' << format_double(r.energy_pre) << ',' << format_double(r.energy_post)
            << ',' << format_double(r.energy_post - r.energy_pre) << ','
            << format_double(r.discarded_weight) << ',' << format_double(r.entropy) << ',';
        if (r.scar_fidelity) out << format_double(*r.scar_fidelity);
        out << "\n";
    }
}

void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<std::array<double, 3>>& rows) {
    auto out = open_out(path);
    out << "energy,entropy,overlap_sq\n";
    for (const auto& r : rows)
        out << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2])
            << "\n";
}

void write_crossings_csv(const std::filesystem::path& path,
                         const std::vector<PoincarePoint>& points) {
    auto out = open_out(path);
    out << "trajectory_id,crossing_index,theta1_over_pi,theta3_over_pi,direction\n";
    for (const auto& p : points)
        out << p.trajectory_id << ',' << p.crossing_index << ',' << format_double(p.theta1 / M_PI)
            << ',' << format_double(p.theta3 / M_PI) << ',' << p.direction << "\n";
}

void write_fixed_points_csv(const std::filesystem::path& path,
                            const std::vector<FixedPoint>& points) {
    auto out = open_out(path);
    out << "theta1_over_pi,theta2_over_pi,theta3_over_pi,basin_count,convergence_radius\n";
    for (const auto& p : points)
        out << format_double(p.angles.t1 / M_PI) << ',' << format_double(p.angles.t2 / M_PI) << ','
            << format_double(p.angles.t3 / M_PI) << ',' << p.basin_count << ','
            << format_double(p.convergence_radius) << "\n";
}

json tensor_dump(const UniformMPS& psi) {
    json j;
    j["format"] = "imps-tensors";
    j["version"] = 1;
    j["dtype"] = "complex128";
    j["unit_cell"] = psi.unit_cell();
    j["local_dim"] = psi.local_dim();
    json lambdas = json::array();
    json gammas = json::array();
    for (int site = 0; site < psi.unit_cell(); ++site) {
        json lam = json::array();
        for (Eigen::Index i = 0; i < psi.lambda(site).size(); ++i) lam.push_back(psi.lambda(site)(i));
        lambdas.push_back(lam);
        json site_tensors = json::array();
        for (int s = 0; s < psi.local_dim(); ++s) {
            const ComplexMatrix& g = psi.gamma(site, s);
            json m;
            m["rows"] = g.rows();
            m["cols"] = g.cols();
            json re = json::array(), im = json::array();
            for (Eigen::Index col = 0; col < g.cols(); ++col)
                for (Eigen::Index row = 0; row < g.rows(); ++row) {
                    re.push_back(std::real(g(row, col)));
                    im.push_back(std::imag(g(row, col)));
                }
            m["re"] = re;
            m["im"] = im;
            site_tensors.push_back(m);
        }
        gammas.push_back(site_tensors);
    }
    j["lambdas"] = lambdas;
    j["gammas"] = gammas;
    return j;
}

UniformMPS tensor_load(const json& j) {
    if (j.value("format", "") != "imps-tensors" || j.value("version", 0) != 1)
        throw InvalidInputError("tensor_load: unrecognized dump format");
    const int n = j.at("unit_cell").get<int>();
    const int d = j.at("local_dim").get<int>();
    std::vector<std::vector<ComplexMatrix>> gammas(n, std::vector<ComplexMatrix>(d));
    std::vector<RealVector> lambdas(n);
    for (int site = 0; site < n; ++site) {
        const auto& lam = j.at("lambdas").at(site);
        lambdas[site].resize(lam.size());
        for (size_t i = 0; i < lam.size(); ++i) lambdas[site](i) = lam.at(i).get<double>();
        for (int s = 0; s < d; ++s) {
            const auto& m = j.at("gammas").at(site).at(s);
            Eigen::Index rows = m.at("rows").get<Eigen::Index>();
            Eigen::Index cols = m.at("cols").get<Eigen::Index>();
            ComplexMatrix g(rows, cols);
            const auto& re = m.at("re");
            const auto& im = m.at("im");
            Eigen::Index idx = 0;
            for (Eigen::Index col = 0; col < cols; ++col)
                for (Eigen::Index row = 0; row < rows; ++row, ++idx)
                    g(row, col) = Complex(re.at(idx).get<double>(), im.at(idx).get<double>());
            gammas[site][s] = g;
        }
    }
    UniformMPS psi;
    psi.set_tensors(std::move(gammas), std::move(lambdas));
    psi.canonicalize();
    return psi;
}

std::string config_hash(const json& config) {
    std::string canon = config.dump();  // nlohmann::json keeps object keys sorted
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace scarfinder::io
