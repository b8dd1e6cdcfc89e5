#include "gatesmith/local_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/StdVector>

namespace gatesmith {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double objective(const Matrix8c& g, const Matrix8c& target, FitnessKind kind,
                 bool phase_free) {
  return phase_free ? fitness_phase_free(g, target, kind)
                    : fitness(g, target, kind);
}

void check_floor(double input_fitness, double floor) {
  if (input_fitness < floor) {
    std::ostringstream msg;
    msg << "input fitness " << input_fitness << " is below the refinement floor "
        << floor << "; the search stage has not converged enough to refine";
    throw RefineFloorError(msg.str());
  }
}

using MatrixVec = std::vector<Matrix8c, Eigen::aligned_allocator<Matrix8c>>;

Matrix8c step_unitary_deg(const PulseStep& proto, double angle_deg) {
  return propagator(proto.gen, angle_deg * kDegToRad, proto.reversed);
}

}  // namespace

void RefineConfig::validate() const {
  if (step_schedule_deg.empty()) throw ConfigError("empty refinement schedule");
  for (size_t i = 1; i < step_schedule_deg.size(); ++i) {
    if (step_schedule_deg[i] >= step_schedule_deg[i - 1]) {
      throw ConfigError("refinement schedule must be strictly decreasing");
    }
  }
  if (step_schedule_deg.back() != 0.1) {
    throw ConfigError("refinement schedule must end at 0.1 degrees");
  }
  if (window_deg <= 0) throw ConfigError("refinement window must be positive");
  if (max_passes < 1) throw ConfigError("refinement needs at least one pass");
}

std::vector<double> angles_deg(const PulseSequence& seq) {
  std::vector<double> out;
  out.reserve(seq.steps.size());
  for (const auto& s : seq.steps) out.push_back(s.theta_deg());
  return out;
}

PulseSequence with_angles_deg(const PulseSequence& seq,
                              const std::vector<double>& angles) {
  if (angles.size() != seq.steps.size()) {
    throw std::invalid_argument("angle count must match step count");
  }
  PulseSequence out = seq;
  for (size_t i = 0; i < angles.size(); ++i) {
    if (angles[i] < 0) throw std::invalid_argument("angles must be >= 0");
    out.steps[i].theta = angles[i] * kDegToRad;
    out.steps[i].cost = step_cost(out.steps[i].gen, out.steps[i].theta);
  }
  return out;
}

PulseSequence hill_climb(const PulseSequence& seq, const Matrix8c& target,
                         const RefineConfig& config) {
  config.validate();
  const int n = static_cast<int>(seq.steps.size());
  double current = objective(sequence_unitary(seq), target, config.fitness_kind,
                             config.phase_free);
  check_floor(current, config.min_input_fitness);
  if (n == 0) return seq;

  std::vector<double> angles = angles_deg(seq);

  for (double step : config.step_schedule_deg) {
    const int reach = static_cast<int>(std::floor(config.window_deg / step + 1e-9));
    for (int pass = 0; pass < config.max_passes; ++pass) {
      bool improved = false;

      // Suffix products for the current angles; the prefix is accumulated as
      // coordinates are finalized left to right.
      MatrixVec suffix(n + 1);
      suffix[n] = Matrix8c::Identity();
      for (int i = n - 1; i >= 0; --i) {
        suffix[i] = step_unitary_deg(seq.steps[i], angles[i]) * suffix[i + 1];
      }
      Matrix8c prefix = Matrix8c::Identity();

      for (int i = 0; i < n; ++i) {
        double best_angle = angles[i];
        double best_fitness = current;
        for (int k = -reach; k <= reach; ++k) {
          if (k == 0) continue;
          const double candidate = angles[i] + k * step;
          if (candidate < 0) continue;
          const Matrix8c u =
              prefix * step_unitary_deg(seq.steps[i], candidate) * suffix[i + 1];
          const double f =
              objective(u, target, config.fitness_kind, config.phase_free);
          if (f > best_fitness) {
            best_fitness = f;
            best_angle = candidate;
          }
        }
        if (best_angle != angles[i]) {
          angles[i] = best_angle;
          current = best_fitness;
          improved = true;
        }
        prefix = prefix * step_unitary_deg(seq.steps[i], angles[i]);
      }
      if (!improved) break;
    }
  }
  return with_angles_deg(seq, angles);
}

PulseSequence refine_ga(const PulseSequence& seq, const Matrix8c& target,
                        uint64_t seed, const RefineGaConfig& config) {
  const int n = static_cast<int>(seq.steps.size());
  double input_fitness = objective(sequence_unitary(seq), target,
                                   config.fitness_kind, config.phase_free);
  check_floor(input_fitness, config.min_input_fitness);
  if (n == 0) return seq;

  Rng rng(seed);
  const int pop_size = std::max(4, config.population_size);
  constexpr int kElite = 5;

  std::vector<std::vector<double>> members(pop_size);
  const std::vector<double> base = angles_deg(seq);
  members[0] = base;  // the unjittered input anchors the elitist guarantee
  for (int m = 1; m < pop_size; ++m) {
    members[m] = base;
    for (double& a : members[m]) {
      a = std::max(0.0, a + rng.uniform(-config.jitter_deg, config.jitter_deg));
    }
  }

  auto evaluate = [&](const std::vector<double>& angles) {
    Matrix8c u = Matrix8c::Identity();
    for (int i = 0; i < n; ++i) {
      u = u * step_unitary_deg(seq.steps[i], angles[i]);
    }
    return objective(u, target, config.fitness_kind, config.phase_free);
  };

  std::vector<double> fit(pop_size);
  for (int m = 0; m < pop_size; ++m) fit[m] = evaluate(members[m]);

  std::vector<int> order(pop_size);
  for (int gen = 0; gen < config.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fit[a] > fit[b]; });

    std::vector<std::vector<double>> next;
    next.reserve(pop_size);
    for (int e = 0; e < std::min(kElite, pop_size); ++e) {
      next.push_back(members[order[e]]);
    }

    const double total = std::accumulate(fit.begin(), fit.end(), 0.0);
    auto roulette = [&]() {
      if (total <= 0) return rng.uniform_int(0, pop_size - 1);
      double r = rng.u01() * total;
      for (int i = 0; i < pop_size; ++i) {
        r -= fit[i];
        if (r < 0) return i;
      }
      return pop_size - 1;
    };

    while (static_cast<int>(next.size()) < pop_size) {
      const int a = roulette();
      int b = roulette();
      while (b == a) b = rng.uniform_int(0, pop_size - 1);
      // The angle-column exchange: a contiguous block of rows swaps values.
      const int height = rng.uniform_int(1, n);
      const int start = rng.uniform_int(0, n - height);
      std::vector<double> child_a = members[a];
      std::vector<double> child_b = members[b];
      for (int r = start; r < start + height; ++r) {
        std::swap(child_a[r], child_b[r]);
      }
      next.push_back(std::move(child_a));
      if (static_cast<int>(next.size()) < pop_size) {
        next.push_back(std::move(child_b));
      }
    }

    members = std::move(next);
    for (int m = 0; m < pop_size; ++m) fit[m] = evaluate(members[m]);
  }

  const int best =
      static_cast<int>(std::max_element(fit.begin(), fit.end()) - fit.begin());
  if (fit[best] <= input_fitness) return seq;
  return with_angles_deg(seq, members[best]);
}

}  // namespace gatesmith
