#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "perron/operator_core.hpp"

namespace perron {

// Shortest round-trippable decimal form; makes artifacts byte-stable.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const Eigen::MatrixXd& data);

// FNV-1a 64-bit content hash, hex-encoded.
std::string file_hash(const std::filesystem::path& path);

// CSV matrix plus sidecar JSON (grid, weights, label, construction notes).
void export_operator(const DiscreteOperator& op,
                     const std::filesystem::path& matrix_csv,
                     const std::filesystem::path& meta_json);
DiscreteOperator import_operator(const std::filesystem::path& matrix_csv,
                                 const std::filesystem::path& meta_json);

void export_grid_csv(const Grid& grid, const std::filesystem::path& path);

}  // namespace perron
