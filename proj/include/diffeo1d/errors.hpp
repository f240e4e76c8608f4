#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffeo1d {

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear composition grew past the configured piece cap.
struct pl_overflow_error : std::runtime_error {
  std::size_t pieces, cap;
  pl_overflow_error(std::size_t pieces_, std::size_t cap_)
      : std::runtime_error("piecewise-linear composition needs " + std::to_string(pieces_) +
                           " pieces (cap " + std::to_string(cap_) +
                           "); use a grid representation instead"),
        pieces(pieces_),
        cap(cap_) {}
};

struct root_find_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Vector-field construction did not meet the tolerance within the cap.
struct convergence_error : std::runtime_error {
  std::vector<double> diagnostics;  // per-iteration BV distances
  convergence_error(const std::string& what, std::vector<double> diag)
      : std::runtime_error(what), diagnostics(std::move(diag)) {}
};

struct mather_precondition_error : std::runtime_error {
  int m_min, n_min;
  mather_precondition_error(int m_min_, int n_min_)
      : std::runtime_error("renormalization window too small; smallest admissible m=" +
                           std::to_string(m_min_) + ", n=" + std::to_string(n_min_)),
        m_min(m_min_),
        n_min(n_min_) {}
};

}  // namespace diffeo1d
