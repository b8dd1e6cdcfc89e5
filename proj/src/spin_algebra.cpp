#include "gatesmith/spin_algebra.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>

namespace gatesmith {

char axis_char(Axis a) {
  switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

std::optional<Axis> axis_from_char(char c) {
  switch (c) {
    case 'x': return Axis::X;
    case 'y': return Axis::Y;
    case 'z': return Axis::Z;
    default: return std::nullopt;
  }
}

Matrix2c pauli(Axis axis) {
  Matrix2c m;
  switch (axis) {
    case Axis::X:
      m << 0, 0.5, 0.5, 0;
      break;
    case Axis::Y:
      m << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
      break;
    case Axis::Z:
      m << 0.5, 0, 0, -0.5;
      break;
  }
  return m;
}

ProductOperator::ProductOperator(std::vector<SpinFactor> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty() || factors_.size() > 3) {
    throw std::invalid_argument("product operator needs 1 to 3 factors");
  }
  std::sort(factors_.begin(), factors_.end(),
            [](const SpinFactor& a, const SpinFactor& b) { return a.spin < b.spin; });
  for (size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].spin < 1 || factors_[i].spin > 3) {
      throw std::invalid_argument("spin index out of range");
    }
    if (i > 0 && factors_[i].spin == factors_[i - 1].spin) {
      throw std::invalid_argument("duplicate spin in product operator");
    }
  }
}

std::string ProductOperator::label() const {
  std::string s;
  for (const auto& f : factors_) {
    s += 'I';
    s += static_cast<char>('0' + f.spin);
    s += axis_char(f.axis);
  }
  return s;
}

namespace {

// Embeds a 2x2 operator on one spin, identity elsewhere; spin 1 is the
// leftmost Kronecker factor (basis |abc>, index 4a+2b+c).
Matrix8c embed(int spin, const Matrix2c& m) {
  Matrix8c out;
  const int stride = spin == 1 ? 4 : (spin == 2 ? 2 : 1);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      // Bits of the row/column index for the three spins.
      const int rs = (r / stride) % 2, cs = (c / stride) % 2;
      const bool same_elsewhere = (r - rs * stride) == (c - cs * stride);
      out(r, c) = same_elsewhere ? m(rs, cs) : Complex(0, 0);
    }
  }
  return out;
}

Matrix8c plain_product(const std::vector<SpinFactor>& factors) {
  Matrix8c m = Matrix8c::Identity();
  for (const auto& f : factors) m = m * embed(f.spin, pauli(f.axis));
  return m;
}

}  // namespace

Matrix8c realize(const ProductOperator& op) {
  const double scale = std::pow(2.0, op.weight() - 1);
  return scale * plain_product(op.factors());
}

const std::vector<ProductOperator>& product_operator_basis() {
  static const std::vector<ProductOperator> basis = [] {
    std::vector<ProductOperator> ops;
    const std::array<Axis, 3> axes = {Axis::X, Axis::Y, Axis::Z};
    for (int spin = 1; spin <= 3; ++spin) {
      for (Axis a : axes) ops.push_back(ProductOperator({{spin, a}}));
    }
    const std::array<std::pair<int, int>, 3> pairs = {{{1, 2}, {2, 3}, {1, 3}}};
    for (auto [s1, s2] : pairs) {
      for (Axis a : axes) {
        for (Axis b : axes) ops.push_back(ProductOperator({{s1, a}, {s2, b}}));
      }
    }
    for (Axis a : axes) {
      for (Axis b : axes) {
        for (Axis c : axes) {
          ops.push_back(ProductOperator({{1, a}, {2, b}, {3, c}}));
        }
      }
    }
    return ops;
  }();
  return basis;
}

Generator Generator::single(int spin, Axis axis) {
  return {GeneratorKind::Single, ProductOperator({{spin, axis}})};
}

Generator Generator::bilinear(int spin_a, Axis a, int spin_b, Axis b) {
  return {GeneratorKind::Bilinear, ProductOperator({{spin_a, a}, {spin_b, b}})};
}

Generator Generator::trilinear(Axis a1, Axis a2, Axis a3) {
  return {GeneratorKind::Trilinear, ProductOperator({{1, a1}, {2, a2}, {3, a3}})};
}

Generator Generator::coupled_chain() {
  return {GeneratorKind::CoupledChain, std::nullopt};
}

Matrix8c Generator::matrix() const {
  if (kind == GeneratorKind::CoupledChain) {
    return plain_product({{1, Axis::Z}, {2, Axis::Z}}) +
           plain_product({{2, Axis::Z}, {3, Axis::Z}});
  }
  return plain_product(op->factors());
}

namespace {

int axis_index(Axis a) { return static_cast<int>(a); }

int pair_slot(int s1, int s2) {
  if (s1 == 1 && s2 == 2) return 0;
  if (s1 == 2 && s2 == 3) return 1;
  return 2;  // (1,3)
}

}  // namespace

int Generator::id() const {
  switch (kind) {
    case GeneratorKind::Single: {
      const auto& f = op->factors()[0];
      return (f.spin - 1) * 3 + axis_index(f.axis);
    }
    case GeneratorKind::Bilinear: {
      const auto& fs = op->factors();
      return 9 + pair_slot(fs[0].spin, fs[1].spin) * 9 +
             axis_index(fs[0].axis) * 3 + axis_index(fs[1].axis);
    }
    case GeneratorKind::Trilinear: {
      const auto& fs = op->factors();
      return 36 + axis_index(fs[0].axis) * 9 + axis_index(fs[1].axis) * 3 +
             axis_index(fs[2].axis);
    }
    case GeneratorKind::CoupledChain:
      return 63;
  }
  return -1;
}

std::string Generator::label() const {
  if (kind == GeneratorKind::CoupledChain) return "I1zI2z+I2zI3z";
  return op->label();
}

namespace {

struct EigenSystem {
  Matrix8c vectors;
  Eigen::Matrix<double, 8, 1> values;
};

// All 64 generators are fixed Hermitian matrices; their eigensystems are
// computed once and shared. The id layout matches Generator::id().
const EigenSystem& generator_eigensystem(const Generator& g) {
  static const std::array<EigenSystem, 64>* table = [] {
    auto* t = new std::array<EigenSystem, 64>;
    auto solve = [&](const Generator& gen) {
      Eigen::SelfAdjointEigenSolver<Matrix8c> solver(gen.matrix());
      (*t)[gen.id()] = {solver.eigenvectors(), solver.eigenvalues()};
    };
    const std::array<Axis, 3> axes = {Axis::X, Axis::Y, Axis::Z};
    for (int spin = 1; spin <= 3; ++spin) {
      for (Axis a : axes) solve(Generator::single(spin, a));
    }
    const std::array<std::pair<int, int>, 3> pairs = {{{1, 2}, {2, 3}, {1, 3}}};
    for (auto [s1, s2] : pairs) {
      for (Axis a : axes) {
        for (Axis b : axes) solve(Generator::bilinear(s1, a, s2, b));
      }
    }
    for (Axis a : axes) {
      for (Axis b : axes) {
        for (Axis c : axes) solve(Generator::trilinear(a, b, c));
      }
    }
    solve(Generator::coupled_chain());
    return t;
  }();
  return (*table)[g.id()];
}

}  // namespace

Matrix8c propagator(const Generator& g, double theta, bool reversed) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("propagator angle must be finite");
  }
  const EigenSystem& es = generator_eigensystem(g);
  const double sign = reversed ? 1.0 : -1.0;
  Eigen::Matrix<Complex, 8, 1> phases;
  for (int i = 0; i < 8; ++i) {
    phases(i) = std::exp(Complex(0, sign * theta * es.values(i)));
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

PhaseDistance phase_invariant_distance(const Matrix8c& g, const Matrix8c& u) {
  const Complex overlap = (u.adjoint() * g).trace();
  const double phase = std::abs(overlap) < 1e-300 ? 0.0 : std::arg(overlap);
  const double distance = (g - std::exp(Complex(0, phase)) * u).norm();
  return {distance, phase};
}

double unitarity_error(const Matrix8c& u) {
  return (u.adjoint() * u - Matrix8c::Identity()).norm();
}

bool is_unitary(const Matrix8c& u, double tol) {
  return unitarity_error(u) <= tol;
}

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

double parse_double(std::string_view text, bool& ok) {
  double value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  ok = (ec == std::errc() && ptr == end);
  return value;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty complex entry");
  const bool imaginary = text.back() == 'i' || text.back() == 'I';
  std::string_view body = imaginary ? text.substr(0, text.size() - 1) : text;

  // Find the split between real and imaginary parts: the last '+'/'-' that
  // is not a leading sign and not an exponent sign.
  size_t split = std::string_view::npos;
  for (size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') &&
        body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }

  bool ok = false;
  if (!imaginary) {
    if (split != std::string_view::npos) {
      throw std::invalid_argument("missing trailing i on complex entry");
    }
    const double re = parse_double(body, ok);
    if (!ok) throw std::invalid_argument("bad real entry");
    return {re, 0.0};
  }
  if (split == std::string_view::npos) {
    // Pure imaginary: "bi", "-2.5i", also bare "i"/"-i".
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    const double im = parse_double(body, ok);
    if (!ok) throw std::invalid_argument("bad imaginary entry");
    return {0.0, im};
  }
  const double re = parse_double(body.substr(0, split), ok);
  if (!ok) throw std::invalid_argument("bad real part");
  std::string_view imag = body.substr(split);
  double im;
  if (imag == "+") {
    im = 1.0;
  } else if (imag == "-") {
    im = -1.0;
  } else {
    im = parse_double(imag, ok);
    if (!ok) throw std::invalid_argument("bad imaginary part");
  }
  return {re, im};
}

Matrix8c load_matrix(std::istream& in) {
  Matrix8c m;
  int row = 0;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (fields >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (row >= 8) throw ParseError(line_no, "more than 8 matrix rows");
    if (tokens.size() != 8) {
      throw ParseError(line_no, "expected 8 entries, got " +
                                    std::to_string(tokens.size()));
    }
    for (int c = 0; c < 8; ++c) {
      try {
        m(row, c) = parse_complex(tokens[c]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, std::string(e.what()) + " ('" + tokens[c] + "')");
      }
    }
    ++row;
  }
  if (row != 8) {
    throw ParseError(line_no, "expected 8 matrix rows, got " + std::to_string(row));
  }
  const double err = unitarity_error(m);
  if (err > 1e-8) {
    std::ostringstream msg;
    msg << "matrix is not unitary (deviation " << err << ", tolerance 1e-8)";
    throw std::runtime_error(msg.str());
  }
  return m;
}

Matrix8c load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  try {
    return load_matrix(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const Matrix8c& m) {
  char buf[80];
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const Complex z = m(r, c);
      std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", z.real(), z.imag());
      out << buf << (c == 7 ? "" : " ");
    }
    out << '\n';
  }
}

}  // namespace gatesmith
