#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "densigraph/model.hpp"

namespace densigraph {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe rendering with 17 significant digits.
std::string format_double(double value);

/// Header line `N size_plus p seed`, then N rows of '0'/'1' (row i lists theta(i, .)).
void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);

/// Sparse CSV `t,i,x` listing only x = 1 entries with 1-based t and i,
/// preceded by a `# n=<N> t_len=<T>` comment line.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Reads the sparse CSV. The comment line supplies N and T unless overridden.
Trajectory read_trajectory_csv(std::istream& is, std::optional<std::size_t> n = std::nullopt,
                               std::optional<std::size_t> t_len = std::nullopt);

}  // namespace densigraph
