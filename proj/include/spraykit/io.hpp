#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spraykit/observables.hpp"

namespace spraykit {

// Writes via a temporary sibling file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double v);

// t, x0..x{n-1}, v0..v{n-1}, F_H, F_labtime (when a lab time is registered)
std::string trajectory_csv(const SpacetimeModel& model, const Prolongation& p);
// t, lambda, x0.., v0..
std::string leaf_csv(const Leaf& leaf);
// weight, x0.., v0.., tag
std::string ensemble_csv(const ParticleEnsemble& ens);
// t, x1.., J0.., and T upper triangle when present
std::string moment_grid_csv(const MomentGrid& grid);
// Generic columns.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

} // namespace spraykit
