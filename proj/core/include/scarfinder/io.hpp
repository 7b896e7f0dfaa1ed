#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "scarfinder/mps.hpp"
#include "scarfinder/poincare.hpp"
#include "scarfinder/scarfinder.hpp"

namespace scarfinder::io {

using json = nlohmann::json;

/// Shortest round-trip decimal form; numeric CSV columns are byte-stable
/// across runs with identical seeds.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_iterations_csv(const std::filesystem::path& path,
                          const std::vector<IterationRecord>& records);
void write_spectrum_csv(const std::filesystem::path& path,
                        const std::vector<std::array<double, 3>>& rows);  // E, S, overlap^2
void write_crossings_csv(const std::filesystem::path& path,
                         const std::vector<PoincarePoint>& points);
void write_fixed_points_csv(const std::filesystem::path& path,
                            const std::vector<FixedPoint>& points);

/// Versioned tensor dump with shapes and dtype; loadable back into a state.
json tensor_dump(const UniformMPS& psi);
UniformMPS tensor_load(const json& j);

/// FNV-1a over the canonical (sorted-key) serialization.
std::string config_hash(const json& config);

} // namespace scarfinder::io
