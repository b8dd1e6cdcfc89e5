#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gatesmith {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
// All gate-level objects live in the 8x8 space of three coupled spins,
// basis-ordered |abc> with spin 1 the leftmost (most significant) factor.
using Matrix8c = Eigen::Matrix<Complex, 8, 8>;

enum class Axis : uint8_t { X, Y, Z };

char axis_char(Axis a);
std::optional<Axis> axis_from_char(char c);

/// Half-normalized spin-1/2 operator for one axis: Ix, Iy or Iz.
Matrix2c pauli(Axis axis);

struct SpinFactor {
  int spin;  // 1..3
  Axis axis;
  bool operator==(const SpinFactor&) const = default;
};

/// A product of single-spin operators, at most one factor per spin,
/// normalized to ascending spin order. Together with the identity, the 63
/// such products (scaled by 2^(q-1), q = number of factors) form a
/// trace-orthogonal basis of the 8x8 Hermitian traceless matrices.
class ProductOperator {
 public:
  explicit ProductOperator(std::vector<SpinFactor> factors);

  const std::vector<SpinFactor>& factors() const { return factors_; }
  int weight() const { return static_cast<int>(factors_.size()); }
  std::string label() const;  // e.g. "I1zI2x"

  bool operator==(const ProductOperator&) const = default;

 private:
  std::vector<SpinFactor> factors_;
};

/// Basis realization: 2^(q-1) * product of embedded factors, identity on
/// absent spins. Hermitian and traceless for every product operator.
Matrix8c realize(const ProductOperator& op);

/// All 63 product operators (3 single-spin per spin, 9 per spin pair,
/// 27 trilinear), in a fixed enumeration order.
const std::vector<ProductOperator>& product_operator_basis();

enum class GeneratorKind : uint8_t { Single, Bilinear, Trilinear, CoupledChain };

/// The exponent structure of one propagator step. The matrix is the plain
/// operator product (no 2^(q-1) scaling): angles are always quoted against
/// exp(-i theta I1a I2b ...) exactly as sequences are written. CoupledChain
/// is the drift term of the linear coupling topology, I1zI2z + I2zI3z.
struct Generator {
  GeneratorKind kind;
  std::optional<ProductOperator> op;  // nullopt iff CoupledChain

  static Generator single(int spin, Axis axis);
  static Generator bilinear(int spin_a, Axis a, int spin_b, Axis b);
  static Generator trilinear(Axis a1, Axis a2, Axis a3);
  static Generator coupled_chain();

  Matrix8c matrix() const;

  /// Dense id in [0, 63]; stable across runs, used for propagator caching.
  int id() const;
  std::string label() const;

  bool operator==(const Generator&) const = default;
};

/// exp(-i theta M) (or exp(+i theta M) when reversed) for the generator's
/// matrix M, computed by eigendecomposition of the Hermitian generator.
/// Unitary to better than 1e-12 for any finite theta.
Matrix8c propagator(const Generator& g, double theta, bool reversed = false);

struct PhaseDistance {
  double distance;  // min over phi of ||G - e^{i phi} U||_F
  double phase;     // the minimizing phi = arg Tr(U^dag G)
};

/// Global-phase-invariant Frobenius distance between two unitaries.
/// Zero iff G = e^{i phi} U; symmetric in its distance component.
PhaseDistance phase_invariant_distance(const Matrix8c& g, const Matrix8c& u);

/// ||U^dag U - 1||_F
double unitarity_error(const Matrix8c& u);
bool is_unitary(const Matrix8c& u, double tol);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses one complex entry of the matrix file format: `a`, `bi`, `a+bi`
/// or `a-bi` with decimal or exponent notation.
Complex parse_complex(std::string_view text);

/// Matrix file format: 8 rows of 8 whitespace-separated complex entries;
/// blank lines and `#` comments ignored. Unitarity is enforced at load
/// (Frobenius tolerance 1e-8).
Matrix8c load_matrix(std::istream& in);
Matrix8c load_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix8c& m);

}  // namespace gatesmith
