#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gatesmith/encoding.hpp"
#include "gatesmith/rng.hpp"
#include "gatesmith/spin_algebra.hpp"

namespace gatesmith {

enum class FitnessKind : uint8_t { F1, F2, F3 };

std::string fitness_name(FitnessKind kind);
FitnessKind fitness_from_name(std::string_view name);  // "f1"/"f2"/"f3"

/// Cap returned when the fitness denominator vanishes (exact match).
inline constexpr double kFitnessMax = 1e12;

/// Reciprocal mismatch fitness of candidate G against target U:
///   F1 = 1 / Tr |G^dag U - U^dag U|
///   F2 = 1 / sum_ij |G^dag U - U^dag U|_ij
///   F3 = 1 / sum_ij |G - U|_ij
/// with |.| the elementwise modulus. Denominators below 1e-12 return
/// kFitnessMax. All three are phase-sensitive.
double fitness(const Matrix8c& g, const Matrix8c& u, FitnessKind kind);

/// Same, after first removing the optimal global phase from G.
double fitness_phase_free(const Matrix8c& g, const Matrix8c& u, FitnessKind kind);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaConfig {
  int population_size = 500;
  int generations = 50;
  FitnessKind fitness_kind = FitnessKind::F2;
  int rows = 3;  // N, chromosome rows
  CouplingTopology topology = CouplingTopology::linear_chain();
  uint64_t seed = 0;
  int elite_count = 5;
  double success_fitness = 1000.0;
  // Post-crossover mutation probability of the protected columns.
  double cross2_mutation_prob = 0.10;
  double cross3_mutation_prob = 0.07;
  double cross4_mutation_prob = 0.50;
  // Catastrophic mutation ramp: off before mutate_start_gen, then linear
  // up to mutate_max_prob at the final generation.
  int mutate_start_gen = 30;
  double mutate_max_prob = 0.35;
  int mutate_members = 10;
  bool phase_free = false;

  /// Throws ConfigError on violated invariants (population even and
  /// >= 2*elite_count, generations >= 1, rows in [3, 10], ...).
  void validate() const;

  double mutation_probability(int generation) const;
};

struct Population {
  std::vector<Chromosome> members;
  std::vector<double> fitness;
  int generation = 0;

  int size() const { return static_cast<int>(members.size()); }
  int best_index() const;
};

/// Roulette selection of a mating pair: both indices fitness-proportional,
/// independent; on a collision the second index is re-drawn uniformly until
/// distinct. All-zero fitness falls back to uniform draws.
std::pair<int, int> select_pair(const Population& pop, Rng& rng);

/// CROSS k: exchanges the rightmost (5-k) columns of a contiguous row block
/// (height uniform in [1, N], start uniform among valid rows) between the
/// parents. The protected left columns pass through unchanged, except that
/// with the configured probability one random protected entry of one child
/// is randomized to 0-9 (CROSS 1 has no protected columns and no mutation).
std::pair<Chromosome, Chromosome> cross(const Chromosome& a, const Chromosome& b,
                                        int k, const GaConfig& config, Rng& rng);

/// Exchanges one uniformly chosen pair of distinct rows.
Chromosome flip(const Chromosome& a, Rng& rng);

/// Catastrophic mutation: with probability config.mutation_probability(gen)
/// fully randomizes mutate_members uniformly chosen non-elite members.
void mutate_catastrophic(Population& pop, int generation, const GaConfig& config,
                         Rng& rng);

/// Fitness evaluator for decoded chromosomes against a fixed target.
/// Memoizes step propagators over the finite genotype alphabet, so repeat
/// evaluation is two 8x8 products per row. Not thread-safe; use one
/// instance per run.
class SequenceEvaluator {
 public:
  SequenceEvaluator(Matrix8c target, FitnessKind kind, CouplingTopology topo,
                    bool phase_free);
  ~SequenceEvaluator();

  double evaluate(const Chromosome& chrom);
  Matrix8c unitary(const Chromosome& chrom) const;

  const Matrix8c& target() const { return target_; }

 private:
  struct Cache;
  Matrix8c target_;
  Matrix8c target_gram_;  // U^dag U, computed once
  FitnessKind kind_;
  CouplingTopology topology_;
  bool phase_free_;
  std::unique_ptr<Cache> cache_;
};

/// One reproduction cycle: keep the elite unchanged, refill from
/// roulette-selected parents through a uniformly chosen CROSS 1-4, flip a
/// uniformly chosen half of the new members, apply catastrophic mutation,
/// re-evaluate fitness.
void evolve_generation(Population& pop, SequenceEvaluator& eval,
                       const GaConfig& config, Rng& rng);

struct Candidate {
  Chromosome chromosome;
  double fitness = 0.0;
  PulseSequence sequence;
};

struct RunOutcome {
  std::vector<Candidate> candidates;  // distinct decoded sequences, best 20
  int generations_run = 0;
  bool early_stopped = false;
};

/// Full GA run: random initial population, evolve up to config.generations
/// with early stop once the best fitness reaches config.success_fitness.
/// The log stream (optional) receives one line per generation:
///   gen=<g> best=<fitness> mean=<fitness> best_cost=<t>
RunOutcome run(const Matrix8c& target, const GaConfig& config,
               std::ostream* log = nullptr);

struct SweepEntry {
  int n_rows = 0;
  uint64_t seed = 0;
  RunOutcome outcome;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  // Overall winner (success_fitness met, minimum cost, ties by fewer steps
  // then lower N): entry index and candidate index within it, or -1/-1 when
  // no candidate met the threshold.
  int winner_entry = -1;
  int winner_candidate = -1;

  bool has_winner() const { return winner_entry >= 0; }
  const Candidate& winner() const;
};

/// Runs `run` once per row count in [n_low, n_high]; per-N seeds derive
/// from the master seed via derive_seed(master, N).
SweepResult sweep_n(const Matrix8c& target, const GaConfig& base, int n_low,
                    int n_high, uint64_t master_seed, std::ostream* log = nullptr);

}  // namespace gatesmith
