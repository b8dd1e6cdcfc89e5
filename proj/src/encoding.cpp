#include "gatesmith/encoding.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

namespace gatesmith {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
}  // namespace

Chromosome random_chromosome(int n_rows, Rng& rng) {
  if (n_rows < 3 || n_rows > 10) {
    throw std::invalid_argument("chromosome rows must be in [3, 10]");
  }
  Chromosome c;
  c.rows.resize(n_rows);
  for (auto& row : c.rows) {
    for (auto& d : row) d = static_cast<uint8_t>(rng.digit());
  }
  return c;
}

std::string CouplingTopology::name() const {
  return mode == CouplingMode::Full ? "full" : "linear";
}

double PulseStep::theta_deg() const { return theta / kDegToRad; }

double PulseSequence::total_time() const {
  double t = 0;
  for (const auto& s : steps) t += s.cost;
  return t;
}

int PulseSequence::hard_pulse_count() const {
  int n = 0;
  for (const auto& s : steps) n += step_hard_pulses(s);
  return n;
}

int step_hard_pulses(const PulseStep& step) {
  if (step.gen.kind == GeneratorKind::Single) return 1;
  int n = step.reversed ? 2 : 0;
  if (step.gen.op) {
    for (const auto& f : step.gen.op->factors()) {
      if (f.axis != Axis::Z) n += 2;
    }
  }
  return n;
}

double decode_angle_deg(int c3, int c4) {
  if (c3 < 0 || c3 > 9 || c4 < 0 || c4 > 9) {
    throw std::invalid_argument("angle digits must be 0-9");
  }
  return 45.0 * c3 + 5.0 * c4;
}

namespace decoding_table {

std::pair<Axis, Axis> axis_pair(int index) {
  // Lexicographic over (first, second) except 7 and 8 swapped, anchoring
  // (subspace 4, square 7) to I2zI3y.
  static constexpr std::array<std::pair<Axis, Axis>, 9> kTable = {{
      {Axis::X, Axis::X},
      {Axis::X, Axis::Y},
      {Axis::X, Axis::Z},
      {Axis::Y, Axis::X},
      {Axis::Y, Axis::Y},
      {Axis::Y, Axis::Z},
      {Axis::Z, Axis::Y},
      {Axis::Z, Axis::X},
      {Axis::Z, Axis::Z},
  }};
  if (index < 1 || index > 9) throw std::invalid_argument("subspace index 1-9");
  return kTable[index - 1];
}

std::optional<Generator> generator(int c1, int c2, CouplingTopology topo) {
  if (c1 < 0 || c1 > 9 || c2 < 0 || c2 > 9) {
    throw std::invalid_argument("digits must be 0-9");
  }
  if (c1 == 0) return std::nullopt;       // no-op row
  const int index = c2 == 0 ? 9 : c2;     // digit 0 selects the last square
  static constexpr std::array<Axis, 3> kAxes = {Axis::X, Axis::Y, Axis::Z};
  switch (c1) {
    case 1:
    case 3:
    case 5: {
      const int spin = (c1 + 1) / 2;
      return Generator::single(spin, kAxes[(index - 1) % 3]);
    }
    case 2: {
      auto [a, b] = axis_pair(index);
      return Generator::bilinear(1, a, 2, b);
    }
    case 4: {
      auto [a, b] = axis_pair(index);
      return Generator::bilinear(2, a, 3, b);
    }
    case 6: {
      if (topo.mode == CouplingMode::LinearChain) {
        // J13 = 0: the 1-3 bilinear subspace is replaced wholesale by the
        // combined drift propagator.
        return Generator::coupled_chain();
      }
      auto [a, b] = axis_pair(index);
      return Generator::bilinear(1, a, 3, b);
    }
    case 7:
    case 8:
    case 9: {
      auto [a2, a3] = axis_pair(index);
      return Generator::trilinear(kAxes[c1 - 7], a2, a3);
    }
  }
  return std::nullopt;
}

}  // namespace decoding_table

double step_cost(const Generator& g, double theta) {
  if (theta < 0) throw std::invalid_argument("step angle must be >= 0");
  switch (g.kind) {
    case GeneratorKind::Single:
      return 0.0;
    case GeneratorKind::Bilinear:
    case GeneratorKind::CoupledChain:
      return theta / (2 * kPi);
    case GeneratorKind::Trilinear: {
      const double kappa = theta / (2 * kPi);
      return std::sqrt(kappa * (4.0 - kappa)) / 2.0;
    }
  }
  return 0.0;
}

PulseSequence decode(const Chromosome& chrom, CouplingTopology topo) {
  PulseSequence seq;
  seq.steps.reserve(chrom.rows.size());
  for (const auto& row : chrom.rows) {
    auto gen = decoding_table::generator(row[0], row[1], topo);
    if (!gen) continue;
    const double deg = decode_angle_deg(row[2], row[3]);
    PulseStep step;
    step.gen = *gen;
    step.theta = deg * kDegToRad;
    step.reversed = false;
    step.cost = step_cost(step.gen, step.theta);
    seq.steps.push_back(std::move(step));
  }
  return seq;
}

Matrix8c sequence_unitary(const PulseSequence& seq) {
  Matrix8c u = Matrix8c::Identity();
  for (const auto& step : seq.steps) u = u * step.unitary();
  return u;
}

namespace {

std::string spins_token(const Generator& g) {
  if (g.kind == GeneratorKind::CoupledChain) return "-";
  std::string s;
  for (const auto& f : g.op->factors()) s += static_cast<char>('0' + f.spin);
  return s;
}

std::string axes_token(const Generator& g) {
  if (g.kind == GeneratorKind::CoupledChain) return "zz+zz";
  std::string s;
  for (const auto& f : g.op->factors()) s += axis_char(f.axis);
  return s;
}

}  // namespace

std::string format_step(const PulseStep& step) {
  const char* kind = nullptr;
  switch (step.gen.kind) {
    case GeneratorKind::Single: kind = "single"; break;
    case GeneratorKind::Bilinear: kind = "bi"; break;
    case GeneratorKind::Trilinear: kind = "tri"; break;
    case GeneratorKind::CoupledChain: kind = "chain"; break;
  }
  char buf[160];
  const double deg = step.reversed ? -step.theta_deg() : step.theta_deg();
  std::snprintf(buf, sizeof(buf), "%s %s %s %.10g", kind, spins_token(step.gen).c_str(),
                axes_token(step.gen).c_str(), deg);
  return buf;
}

std::string format_sequence(const PulseSequence& seq) {
  std::string out;
  for (const auto& step : seq.steps) {
    out += format_step(step);
    out += '\n';
  }
  return out;
}

namespace {

PulseStep parse_step_tokens(const std::string& kind, const std::string& spins,
                            const std::string& axes, const std::string& angle,
                            int line_no) {
  double deg = 0;
  try {
    size_t used = 0;
    deg = std::stod(angle, &used);
    if (used != angle.size()) throw std::invalid_argument("");
  } catch (...) {
    throw ParseError(line_no, "bad angle '" + angle + "'");
  }

  auto parse_axes = [&](size_t count) {
    if (axes.size() != count) {
      throw ParseError(line_no, "expected " + std::to_string(count) + " axes");
    }
    std::vector<Axis> out;
    for (char c : axes) {
      auto a = axis_from_char(c);
      if (!a) throw ParseError(line_no, std::string("bad axis '") + c + "'");
      out.push_back(*a);
    }
    return out;
  };
  auto parse_spins = [&](size_t count) {
    if (spins.size() != count) {
      throw ParseError(line_no, "expected " + std::to_string(count) + " spins");
    }
    std::vector<int> out;
    for (char c : spins) {
      if (c < '1' || c > '3') throw ParseError(line_no, "spins must be 1-3");
      out.push_back(c - '0');
    }
    for (size_t i = 1; i < out.size(); ++i) {
      if (out[i] <= out[i - 1]) {
        throw ParseError(line_no, "spins must be distinct and ascending");
      }
    }
    return out;
  };

  Generator gen = Generator::coupled_chain();
  if (kind == "single") {
    const auto sp = parse_spins(1);
    const auto ax = parse_axes(1);
    gen = Generator::single(sp[0], ax[0]);
  } else if (kind == "bi") {
    const auto sp = parse_spins(2);
    const auto ax = parse_axes(2);
    gen = Generator::bilinear(sp[0], ax[0], sp[1], ax[1]);
  } else if (kind == "tri") {
    const auto sp = parse_spins(3);
    const auto ax = parse_axes(3);
    gen = Generator::trilinear(ax[0], ax[1], ax[2]);
  } else if (kind == "chain") {
    if (spins != "-") throw ParseError(line_no, "chain spins token must be '-'");
    if (axes != "zz+zz") throw ParseError(line_no, "chain axes token must be 'zz+zz'");
  } else {
    throw ParseError(line_no, "unknown step kind '" + kind + "'");
  }

  PulseStep step;
  step.gen = gen;
  step.reversed = deg < 0;
  step.theta = std::abs(deg) * kDegToRad;
  step.cost = step_cost(gen, step.theta);
  return step;
}

}  // namespace

PulseSequence parse_sequence(std::istream& in) {
  PulseSequence seq;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string kind, spins, axes, angle, extra;
    if (!(fields >> kind)) continue;
    if (!(fields >> spins >> axes >> angle)) {
      throw ParseError(line_no, "expected '<kind> <spins> <axes> <theta_deg>'");
    }
    if (fields >> extra) throw ParseError(line_no, "trailing token '" + extra + "'");
    seq.steps.push_back(parse_step_tokens(kind, spins, axes, angle, line_no));
  }
  return seq;
}

PulseSequence parse_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sequence file: " + path);
  try {
    return parse_sequence(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Chromosome parse_chromosome(std::istream& in) {
  Chromosome chrom;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (fields >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    std::string digits;
    for (const auto& t : tokens) digits += t;
    if (digits.size() != 4) {
      throw ParseError(line_no, "expected 4 digits per row");
    }
    std::array<uint8_t, 4> row{};
    for (int i = 0; i < 4; ++i) {
      if (digits[i] < '0' || digits[i] > '9') {
        throw ParseError(line_no, "rows must be digits 0-9");
      }
      row[i] = static_cast<uint8_t>(digits[i] - '0');
    }
    chrom.rows.push_back(row);
  }
  if (chrom.rows.empty()) throw ParseError(line_no, "empty chromosome file");
  return chrom;
}

std::string format_chromosome(const Chromosome& chrom) {
  std::string out;
  for (const auto& row : chrom.rows) {
    for (int i = 0; i < 4; ++i) {
      out += static_cast<char>('0' + row[i]);
      out += (i == 3) ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace gatesmith
