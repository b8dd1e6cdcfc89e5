#include "gatesmith/gate_library.hpp"

#include <cmath>
#include <numbers>

namespace gatesmith {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

PulseStep make_step(Generator gen, double theta_deg, bool reversed) {
  PulseStep s;
  s.gen = std::move(gen);
  s.theta = theta_deg * kDegToRad;
  s.reversed = reversed;
  s.cost = step_cost(s.gen, s.theta);
  return s;
}

Matrix8c diagonal_gate(std::initializer_list<double> entries) {
  Matrix8c m = Matrix8c::Zero();
  int i = 0;
  for (double d : entries) m(i, i) = d, ++i;
  return m;
}

// Permutation given as image of each basis index (0-based, |abc>).
Matrix8c permutation_gate(std::initializer_list<int> image) {
  Matrix8c m = Matrix8c::Zero();
  int col = 0;
  for (int row : image) m(row, col) = 1, ++col;
  return m;
}

std::map<std::string, GateSpec> build_gates() {
  std::map<std::string, GateSpec> gates;

  {
    GateSpec g;
    g.name = "invert_on_equality";
    // |abc> -> -|abc> exactly when a = b = c.
    g.matrix = diagonal_gate({-1, 1, 1, 1, 1, 1, 1, -1});
    g.description = "flips the sign of |000> and |111>";
    // Three zz evolutions of 1/(2J) each when all pairwise couplings equal J.
    g.conventional_cost = 1.5;
    PulseSequence seq;
    seq.steps = {
        make_step(Generator::trilinear(Axis::Z, Axis::X, Axis::Y), 360, false),
        make_step(Generator::coupled_chain(), 180, false),
        make_step(Generator::trilinear(Axis::Z, Axis::Y, Axis::X), 360, false),
        make_step(Generator::bilinear(2, Axis::Y, 3, Axis::Y), 180, false),
    };
    g.reference_sequence = std::move(seq);
    gates.emplace(g.name, std::move(g));
  }
  {
    GateSpec g;
    g.name = "parity";
    // Adds a xor b onto c: swaps |010><->|011| and |100><->|101>.
    g.matrix = permutation_gate({0, 1, 3, 2, 5, 4, 6, 7});
    g.description = "xors the first two qubits onto the third";
    g.conventional_cost = 2.5;
    PulseSequence seq;
    seq.steps = {
        make_step(Generator::single(3, Axis::X), 270, false),
        make_step(Generator::bilinear(1, Axis::Z, 2, Axis::Z), 180, true),
        make_step(Generator::trilinear(Axis::Z, Axis::Z, Axis::X), 360, false),
    };
    g.reference_sequence = std::move(seq);
    gates.emplace(g.name, std::move(g));
  }
  {
    GateSpec g;
    g.name = "fanout";
    // Copies qubit 1 onto qubits 2 and 3: swaps |100><->|111>, |101><->|110>.
    g.matrix = permutation_gate({0, 1, 2, 3, 7, 6, 5, 4});
    g.description = "xors the first qubit onto the second and third";
    g.conventional_cost = 2.5;
    PulseSequence seq;
    seq.steps = {
        make_step(Generator::bilinear(2, Axis::X, 3, Axis::X), 180, true),
        make_step(Generator::trilinear(Axis::Z, Axis::X, Axis::X), 360, false),
        make_step(Generator::single(1, Axis::Z), 270, false),
    };
    g.reference_sequence = std::move(seq);
    gates.emplace(g.name, std::move(g));
  }
  {
    GateSpec g;
    g.name = "lambda2_iz";
    g.matrix = diagonal_gate({1, 1, 1, 1, 1, 1, 1, -1});
    g.description = "doubly-controlled phase flip of |111>";
    gates.emplace(g.name, std::move(g));
  }
  return gates;
}

const std::map<std::string, GateSpec>& gate_map() {
  static const std::map<std::string, GateSpec> gates = build_gates();
  return gates;
}

}  // namespace

UnknownGateError::UnknownGateError(std::string_view name)
    : std::runtime_error([&] {
        std::string msg = "unknown gate '" + std::string(name) + "'; known gates:";
        for (const auto& n : gate_names()) msg += " " + n;
        return msg;
      }()) {}

const std::vector<std::string>& gate_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, spec] : gate_map()) out.push_back(name);
    return out;
  }();
  return names;
}

const GateSpec& get_gate(std::string_view name) {
  const auto& gates = gate_map();
  const auto it = gates.find(std::string(name));
  if (it == gates.end()) throw UnknownGateError(name);
  return it->second;
}

std::map<std::string, double> conventional_costs() {
  std::map<std::string, double> out;
  for (const auto& [name, spec] : gate_map()) {
    if (spec.conventional_cost) out.emplace(name, *spec.conventional_cost);
  }
  return out;
}

std::map<std::string, PulseSequence> optimized_sequences() {
  std::map<std::string, PulseSequence> out;
  for (const auto& [name, spec] : gate_map()) {
    if (spec.reference_sequence) out.emplace(name, *spec.reference_sequence);
  }
  return out;
}

VerifyReport verify(const PulseSequence& seq, const Matrix8c& target, double tol,
                    bool up_to_phase) {
  const Matrix8c u = sequence_unitary(seq);
  VerifyReport report;
  report.raw_distance = (u - target).norm();
  const auto pd = phase_invariant_distance(u, target);
  report.distance = pd.distance;
  // Phase by which the sequence must be rotated to meet the target:
  // target ~= e^{i phase} * sequence at a match.
  report.phase = std::arg((u.adjoint() * target).trace());
  report.total_time = seq.total_time();
  report.hard_pulse_count = seq.hard_pulse_count();
  report.pass = (up_to_phase ? report.distance : report.raw_distance) <= tol;
  return report;
}

}  // namespace gatesmith
