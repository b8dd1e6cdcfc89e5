#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gatesmith/encoding.hpp"
#include "gatesmith/spin_algebra.hpp"

namespace gatesmith {

/// A built-in target gate: its matrix, the conventional-circuit time cost
/// (when one is established) and the optimized reference sequence this
/// library certifies against it (when one is known).
struct GateSpec {
  std::string name;
  Matrix8c matrix;
  std::string description;
  std::optional<double> conventional_cost;        // 1/J units
  std::optional<PulseSequence> reference_sequence;
};

class UnknownGateError : public std::runtime_error {
 public:
  explicit UnknownGateError(std::string_view name);
};

/// Built-in gate names: invert_on_equality, parity, fanout, lambda2_iz.
const std::vector<std::string>& gate_names();

/// Throws UnknownGateError (listing the valid names) for anything else.
const GateSpec& get_gate(std::string_view name);

/// Conventional-circuit costs in 1/J units (parity 2.5, fanout 2.5,
/// invert_on_equality 1.5 for equal couplings).
std::map<std::string, double> conventional_costs();

/// The optimized reference sequences, keyed by gate name. Each verifies
/// against its gate up to global phase to better than 1e-9.
std::map<std::string, PulseSequence> optimized_sequences();

struct VerifyReport {
  double distance = 0.0;      // global-phase-invariant Frobenius distance
  double raw_distance = 0.0;  // plain Frobenius distance
  double phase = 0.0;         // arg Tr(S^dag U): target = e^{i phase} S at match
  double total_time = 0.0;    // 1/J units
  int hard_pulse_count = 0;
  bool pass = false;
};

/// Certifies a sequence against a target: realizes the sequence unitary and
/// reports both distances; pass is judged on the phase-invariant distance
/// when up_to_phase is set, on the raw distance otherwise.
VerifyReport verify(const PulseSequence& seq, const Matrix8c& target, double tol,
                    bool up_to_phase);

}  // namespace gatesmith
