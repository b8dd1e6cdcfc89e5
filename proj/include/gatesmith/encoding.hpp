#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gatesmith/rng.hpp"
#include "gatesmith/spin_algebra.hpp"

namespace gatesmith {

/// Genotype: N rows of 4 digits 0-9. Column 1 picks the operator subspace,
/// column 2 the operator inside it, columns 3-4 the angle (45/5 degree
/// split), giving the encoding its column significance hierarchy.
struct Chromosome {
  std::vector<std::array<uint8_t, 4>> rows;

  int row_count() const { return static_cast<int>(rows.size()); }
  bool operator==(const Chromosome&) const = default;
};

/// Uniform random genotype with n_rows rows, all digits independent.
Chromosome random_chromosome(int n_rows, Rng& rng);

enum class CouplingMode : uint8_t { Full, LinearChain };

/// Coupling topology of the spin system. In the linear chain (J13 = 0,
/// J12 = J23) the 1-3 bilinear subspace is not directly implementable and
/// decodes to the combined chain propagator instead.
struct CouplingTopology {
  CouplingMode mode = CouplingMode::LinearChain;

  static CouplingTopology full() { return {CouplingMode::Full}; }
  static CouplingTopology linear_chain() { return {CouplingMode::LinearChain}; }
  std::string name() const;

  bool operator==(const CouplingTopology&) const = default;
};

struct PulseStep {
  Generator gen;
  double theta = 0.0;      // radians, >= 0
  bool reversed = false;   // realize exp(+i theta G); costed by |theta|
  double cost = 0.0;       // 1/J units

  double theta_deg() const;
  Matrix8c unitary() const { return propagator(gen, theta, reversed); }
};

struct PulseSequence {
  std::vector<PulseStep> steps;

  double total_time() const;     // sum of step costs, 1/J units
  int hard_pulse_count() const;  // proxy metric, see step_hard_pulses
  bool empty() const { return steps.empty(); }
};

/// Proxy pulse count for one step: a single-spin step is one hard pulse;
/// interaction steps add two pulses per non-z factor (rotate in/out of the
/// z frame) plus two when time-reversed (sign flip by pi conjugation).
int step_hard_pulses(const PulseStep& step);

/// Eq-style two-digit angle: 45*c3 + 5*c4 degrees, range [0, 450].
double decode_angle_deg(int c3, int c4);

/// Canonical digit -> operator map.
///
/// Column 1: 1 spin-1, 2 pair (1,2), 3 spin-2, 4 pair (2,3), 5 spin-3,
/// 6 pair (1,3) [chain in linear topology], 7/8/9 trilinear with first-spin
/// axis x/y/z, 0 no-op. Column 2 indexes inside the subspace; single-spin
/// subspaces triplicate ((i-1) mod 3 -> x,y,z) and 0 maps to index 9.
namespace decoding_table {

/// Axis pair for a within-subspace index 1..9:
/// xx, xy, xz, yx, yy, yz, zy, zx, zz.
std::pair<Axis, Axis> axis_pair(int index);

/// Generator for a (column 1, column 2) digit pair, or nullopt for the
/// no-op digit 0.
std::optional<Generator> generator(int c1, int c2, CouplingTopology topo);

}  // namespace decoding_table

/// Evolution time of one step in 1/J units: single-spin steps are free,
/// bilinear and chain steps cost theta/(2 pi), trilinear steps follow the
/// geodesic time sqrt(kappa (4 - kappa))/2 with kappa = theta/(2 pi).
/// Throws std::invalid_argument for negative theta.
double step_cost(const Generator& g, double theta);

/// Genotype -> phenotype. Total on all digit matrices; row order is
/// preserved (first row = leftmost factor of the sequence unitary).
PulseSequence decode(const Chromosome& chrom, CouplingTopology topo);

/// Ordered product of the step propagators, first step leftmost.
Matrix8c sequence_unitary(const PulseSequence& seq);

/// Sequence text format: one step per line,
///   `<kind> <spins> <axes> <theta_deg>`
/// e.g. `tri 123 zzx 360`, `bi 12 zz -180` (negative angle = reversed),
/// `single 3 x 270`, `chain - zz+zz 180`. `#` comments and blank lines
/// are ignored. Parse failures carry 1-based line numbers.
PulseSequence parse_sequence(std::istream& in);
PulseSequence parse_sequence_file(const std::string& path);
std::string format_step(const PulseStep& step);
std::string format_sequence(const PulseSequence& seq);

/// Chromosome text format: one row per line, 4 digits separated by spaces
/// (or a contiguous 4-digit token); `#` comments ignored.
Chromosome parse_chromosome(std::istream& in);
std::string format_chromosome(const Chromosome& chrom);

}  // namespace gatesmith
