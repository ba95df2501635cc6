#pragma once

#include <optional>
#include <vector>

#include "qgrom/fields.hpp"

namespace qgrom {

enum class Provenance : unsigned { gp = 0, lstm = 1, true_projection = 2 };

const char* to_string(Provenance p) noexcept;

/// Time series of modal coefficients. Column t of `a` is the state at times[t].
struct RomTrajectory {
  Provenance provenance = Provenance::gp;
  std::size_t sigma = 0;  // lookback window for LSTM rollouts, 0 otherwise
  std::vector<double> times;
  Matrix a;  // r x T
  std::optional<double> diverged_at;

  std::size_t r() const noexcept { return a.rows(); }
  std::size_t length() const noexcept { return times.size(); }
  std::vector<double> state(std::size_t t) const { return a.column(t); }
  /// Largest |a_k| over the whole trajectory for mode k.
  double max_abs(std::size_t k) const;
};

}  // namespace qgrom
