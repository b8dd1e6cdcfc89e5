#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gatesmith/encoding.hpp"
#include "gatesmith/ga_engine.hpp"

namespace gatesmith {

/// Angle refinement settings. The genome resolves angles to 5 degrees;
/// refinement narrows them to the final 0.1 degree step of the schedule.
struct RefineConfig {
  double window_deg = 10.0;                            // sweep +-window
  std::vector<double> step_schedule_deg = {5.0, 1.0, 0.5, 0.1};
  FitnessKind fitness_kind = FitnessKind::F3;
  bool phase_free = false;
  int max_passes = 20;             // coordinate sweeps per schedule level
  double min_input_fitness = 100.0;

  void validate() const;  // schedule strictly decreasing, ends at 0.1
};

/// Input sequence scored below RefineConfig::min_input_fitness: the search
/// has not converged enough for local refinement to be meaningful.
class RefineFloorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Greedy cyclic coordinate descent over the step angles: at each schedule
/// level, each angle in turn is replaced by the best candidate on the
/// level's grid within +-window of the incumbent; passes repeat until no
/// angle moves. Operators, ordering and direction flags never change, and
/// the returned fitness is >= the input fitness.
PulseSequence hill_climb(const PulseSequence& seq, const Matrix8c& target,
                         const RefineConfig& config);

/// Continuous-angle GA refinement: a population of angle-jittered clones
/// (uniform +-jitter, member 0 unjittered), recombined only by contiguous
/// angle-block exchange (the CROSS 4 move on a floating-point fourth
/// column), elitist, fitness F3 by default.
struct RefineGaConfig {
  int population_size = 2000;
  int generations = 50;
  double jitter_deg = 10.0;
  FitnessKind fitness_kind = FitnessKind::F3;
  bool phase_free = false;
  double min_input_fitness = 100.0;
};

PulseSequence refine_ga(const PulseSequence& seq, const Matrix8c& target,
                        uint64_t seed, const RefineGaConfig& config = {});

/// Rebuilds a sequence with new angles (degrees), recomputing step costs.
/// Step structure must match; used by the refiners and their tests.
PulseSequence with_angles_deg(const PulseSequence& seq,
                              const std::vector<double>& angles_deg);
std::vector<double> angles_deg(const PulseSequence& seq);

}  // namespace gatesmith
