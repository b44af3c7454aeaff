#pragma once

// Artifact emission: CSV solution fields, the "ENDS" binary tensor container,
// and plain key: value report files.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "ends/grid.hpp"

namespace ends {

class IoError : public std::runtime_error {
 public:
  explicit IoError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

/// Columns: one per cross-section coordinate (theta, or omega_u/omega_v),
/// then r, then u; one row per grid node in index order.
void write_solution_csv(const std::string& path, const TensorGrid& grid,
                        const Eigen::VectorXd& u);

/// Binary layout: magic "ENDS", version u32, rank u32, dims u64 each,
/// little-endian f64 payload in row-major order (last dim fastest).
struct TensorFile {
  std::vector<std::uint64_t> dims;
  std::vector<double> data;
};

void write_tensor(const std::string& path, const std::vector<std::uint64_t>& dims,
                  const double* data, std::size_t count);
void write_solution_tensor(const std::string& path, const TensorGrid& grid,
                           const Eigen::VectorXd& u);
TensorFile read_tensor(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ends
