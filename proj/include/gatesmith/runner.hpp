#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gatesmith/ga_engine.hpp"
#include "gatesmith/gate_library.hpp"
#include "gatesmith/local_opt.hpp"

namespace gatesmith {

/// Everything a synthesis run needs beyond the target matrix itself.
struct SynthesisOptions {
  CouplingTopology topology = CouplingTopology::linear_chain();
  int population_size = 500;
  int generations = 50;
  int rows_low = 3;
  int rows_high = 10;
  uint64_t master_seed = 0;
  FitnessKind fitness_kind = FitnessKind::F2;
  bool phase_free = false;
  int elite_count = 5;
  double success_fitness = 1000.0;
  int threads = 1;

  /// Flag-range validation (CLI contract): population in [100, 2000] and
  /// even, rows in [3, 10] with low <= high, threads >= 1, plus the GA
  /// config invariants.
  void validate() const;

  GaConfig ga_config(int n_rows) const;
};

/// Outcome record for one swept row count.
struct NResult {
  int n_rows = 0;
  uint64_t seed = 0;
  int generations_run = 0;
  bool early_stop = false;
  Chromosome chromosome;          // GA-best genotype
  PulseSequence steps;            // refined sequence (GA decode if the
                                  // refinement floor was not met)
  std::vector<double> angles_deg; // refined angles
  double fitness = 0.0;           // GA fitness of the decoded genotype
  double refined_fitness = 0.0;
  bool refined = false;           // false when the floor rejected refinement
  double total_time = 0.0;        // 1/J units of the refined sequence
  double phase = 0.0;             // arg Tr(S^dag U)
  double distance = 0.0;          // phase-invariant distance to the target
  bool meets_threshold = false;
};

/// Persisted synthesis record. Deterministic for fixed options and seed:
/// serializing twice yields byte-identical bodies (only wall_time_sec, the
/// final line, may differ).
struct RunResult {
  int format_version = 1;
  std::string target;        // gate name or "file"
  std::string matrix_digest; // FNV-1a over the canonical matrix text
  SynthesisOptions options;
  std::vector<NResult> per_n;
  int winner_index = -1;     // into per_n, -1 when nothing met the threshold
  double wall_time_sec = 0.0;

  bool has_winner() const { return winner_index >= 0; }
  const NResult& winner() const;
};

std::string matrix_digest(const Matrix8c& m);

/// The full pipeline: per-N GA runs (seeds derived from the master seed),
/// hill-climb refinement of each N-winner, verification against the target,
/// winner selection by (threshold met, minimum cost, fewer steps, lower N).
/// Per-N runs execute concurrently when options.threads > 1; results are
/// identical either way.
RunResult synthesize(const Matrix8c& target, const std::string& target_label,
                     const SynthesisOptions& options, std::ostream* log = nullptr);

/// Key-value text serialization of RunResult. Field names are the
/// compatibility contract; wall_time_sec is written last.
void write_run_result(std::ostream& out, const RunResult& result);
RunResult read_run_result(std::istream& in);
RunResult read_run_result_file(const std::string& path);

/// Re-verifies a loaded record against its target: re-simulates the stored
/// steps and checks the stored distance, fitness and cost to tolerance.
/// Returns a diagnostic message on failure.
std::optional<std::string> reverify(const RunResult& result, const Matrix8c& target,
                                    double tol = 1e-9);

/// Strips the wall_time_sec line; what is left is the deterministic body.
std::string run_result_body(const std::string& serialized);

}  // namespace gatesmith
