#pragma once

// Brute-force reference solvers. Energies are evaluated directly from the
// formula and minima are located by grid search or enumeration; the only
// library solver used is solve_p1 when pricing schedules in the exhaustive
// binary search (and that one is itself checked against oracle_p1).

#include <span>
#include <vector>

#include "rrm/model.hpp"

namespace rrm::oracle {

struct GridSpec {
  int resolution = 400;   ///< points per dimension on each pass
  int refine_passes = 2;  ///< each pass shrinks the window x10 around the incumbent

  void validate() const;
  /// Defaults: 2000 points for one free coordinate, 400 otherwise.
  static GridSpec for_dimension(int free_coordinates);
};

struct P1Result {
  std::vector<double> gamma;
  double objective = 0.0;  ///< total upload energy at t_k = T_k
};

struct P4Result {
  double beta = 0.0;
  double objective = 0.0;
};

struct P2Result {
  std::vector<double> beta;  ///< binary
  double objective = 0.0;    ///< sum E^up - lambda sum beta
};

/// Upload energy straight from the formula; +inf when the value overflows.
double direct_energy(double power_gain, double bandwidth, double noise, double model_size,
                     double gamma, double t, double beta);

/**
 * Minimizes total upload energy over the simplex of bandwidth shares of the
 * scheduled devices (at most 4), upload times pinned to T_k. Unscheduled
 * devices get gamma = 0. Throws DimensionError for more than 4 scheduled devices.
 */
P1Result oracle_p1(std::span<const Device> devices, const SystemParams& params,
                   std::span<const double> beta, const GridSpec& grid);

/// 1-D scan of J(beta) = E^up(beta) - lambda beta over [0, 1].
P4Result oracle_p4(const Device& dev, const SystemParams& params, double gamma, double t_allowed,
                   double lambda, const GridSpec& grid);

/**
 * Enumerates all 2^K binary schedules (K <= 12). Each nonempty schedule is
 * priced with its optimal bandwidth split; the empty schedule costs 0.
 * Schedules containing a device that cannot participate are skipped.
 */
P2Result oracle_p2_exhaustive(std::span<const Device> devices, const SystemParams& params,
                              double lambda);

/// Grid scan of one device's energy over t in (0, T_k]; returns the best t.
double oracle_upload_time(const Device& dev, const SystemParams& params, double gamma, double beta,
                          int resolution);

}  // namespace rrm::oracle
