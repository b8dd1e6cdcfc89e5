#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gatesmith/encoding.hpp"

using namespace gatesmith;

namespace {
constexpr double kPi = std::numbers::pi;

Chromosome make_chromosome(std::initializer_list<std::array<uint8_t, 4>> rows) {
  Chromosome c;
  c.rows.assign(rows);
  return c;
}

}  // namespace

TEST_CASE("angle decode") {
  CHECK(decode_angle_deg(2, 1) == 95.0);
  CHECK(decode_angle_deg(0, 0) == 0.0);
  CHECK(decode_angle_deg(9, 6) == 435.0);
  CHECK(decode_angle_deg(9, 9) == 450.0);
  // Always an exact multiple of 5 degrees.
  for (int c3 = 0; c3 < 10; ++c3) {
    for (int c4 = 0; c4 < 10; ++c4) {
      const double deg = decode_angle_deg(c3, c4);
      CHECK(std::fmod(deg, 5.0) == 0.0);
    }
  }
  CHECK_THROWS(decode_angle_deg(-1, 0));
  CHECK_THROWS(decode_angle_deg(0, 10));
}

TEST_CASE("decoding table") {
  const auto topo = CouplingTopology::full();

  SUBCASE("anchor: digits (4,7) decode to I2zI3y") {
    const auto gen = decoding_table::generator(4, 7, topo);
    REQUIRE(gen.has_value());
    CHECK(gen->kind == GeneratorKind::Bilinear);
    CHECK(gen->label() == "I2zI3y");
  }

  SUBCASE("single-spin subspaces triplicate") {
    for (int base : {1, 3, 5}) {
      for (int i = 1; i <= 9; ++i) {
        const auto gen = decoding_table::generator(base, i, topo);
        const auto same = decoding_table::generator(base, ((i - 1) % 3) + 1, topo);
        CHECK(gen->label() == same->label());
      }
    }
    CHECK(decoding_table::generator(1, 1, topo)->label() == "I1x");
    CHECK(decoding_table::generator(3, 2, topo)->label() == "I2y");
    CHECK(decoding_table::generator(5, 3, topo)->label() == "I3z");
  }

  SUBCASE("column-2 digit 0 maps to index 9") {
    CHECK(decoding_table::generator(2, 0, topo)->label() == "I1zI2z");
    CHECK(decoding_table::generator(9, 0, topo)->label() == "I1zI2zI3z");
    CHECK(decoding_table::generator(1, 0, topo)->label() == "I1z");
  }

  SUBCASE("trilinear subspaces partition by first-spin axis") {
    CHECK(decoding_table::generator(7, 1, topo)->label() == "I1xI2xI3x");
    CHECK(decoding_table::generator(8, 5, topo)->label() == "I1yI2yI3y");
    CHECK(decoding_table::generator(9, 8, topo)->label() == "I1zI2zI3x");
    CHECK(decoding_table::generator(9, 5, topo)->label() == "I1zI2yI3y");
  }

  SUBCASE("column-1 digit 0 is a no-op") {
    CHECK_FALSE(decoding_table::generator(0, 5, topo).has_value());
  }

  SUBCASE("linear topology rewrites the 1-3 subspace to the chain") {
    const auto linear = CouplingTopology::linear_chain();
    for (int c2 = 0; c2 <= 9; ++c2) {
      const auto gen = decoding_table::generator(6, c2, linear);
      CHECK(gen->kind == GeneratorKind::CoupledChain);
    }
    CHECK(decoding_table::generator(6, 4, topo)->label() == "I1yI3x");
  }
}

TEST_CASE("decode") {
  const auto topo = CouplingTopology::full();

  SUBCASE("single row with the worked anchor") {
    const auto seq = decode(make_chromosome({{{4, 7, 2, 1}}, {{0, 0, 0, 0}},
                                             {{0, 1, 2, 3}}}),
                            topo);
    REQUIRE(seq.steps.size() == 1);
    CHECK(seq.steps[0].gen.label() == "I2zI3y");
    CHECK(seq.steps[0].theta_deg() == doctest::Approx(95.0));
    CHECK_FALSE(seq.steps[0].reversed);
  }

  SUBCASE("all-zero chromosome decodes to the empty sequence") {
    const auto seq = decode(make_chromosome({{{0, 0, 0, 0}}, {{0, 0, 0, 0}},
                                             {{0, 0, 0, 0}}}),
                            topo);
    CHECK(seq.steps.empty());
    CHECK(seq.total_time() == 0.0);
    CHECK((sequence_unitary(seq) - Matrix8c::Identity()).norm() < 1e-15);
  }

  SUBCASE("row order is preserved, first row leftmost") {
    const auto seq = decode(make_chromosome({{{1, 3, 2, 1}},   // I1z 95
                                             {{9, 5, 1, 8}},   // I1zI2yI3y 85
                                             {{2, 3, 6, 3}},   // I1xI2z 285
                                             {{7, 2, 3, 8}}}), // I1xI2xI3y 175
                            topo);
    REQUIRE(seq.steps.size() == 4);
    CHECK(seq.steps[0].gen.label() == "I1z");
    CHECK(seq.steps[1].gen.label() == "I1zI2yI3y");
    CHECK(seq.steps[1].theta_deg() == doctest::Approx(85.0));
    CHECK(seq.steps[2].gen.label() == "I1xI2z");
    CHECK(seq.steps[2].theta_deg() == doctest::Approx(285.0));
    CHECK(seq.steps[3].gen.label() == "I1xI2xI3y");
    const Matrix8c left_to_right =
        seq.steps[0].unitary() * seq.steps[1].unitary() * seq.steps[2].unitary() *
        seq.steps[3].unitary();
    CHECK((sequence_unitary(seq) - left_to_right).norm() < 1e-13);
  }

  SUBCASE("decode is total and deterministic over random genotypes") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = rng.uniform_int(3, 10);
      const Chromosome c = random_chromosome(n, rng);
      const auto topo_pick = trial % 2 == 0 ? CouplingTopology::full()
                                            : CouplingTopology::linear_chain();
      const PulseSequence a = decode(c, topo_pick);
      const PulseSequence b = decode(c, topo_pick);
      CHECK(format_sequence(a) == format_sequence(b));
      CHECK(unitarity_error(sequence_unitary(a)) < 1e-10);
      for (const auto& step : a.steps) CHECK(step.cost >= 0.0);
    }
  }

  SUBCASE("linear topology never yields a 1-3 bilinear product") {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
      const Chromosome c = random_chromosome(5, rng);
      const auto seq = decode(c, CouplingTopology::linear_chain());
      for (const auto& step : seq.steps) {
        if (step.gen.kind != GeneratorKind::Bilinear) continue;
        const auto& fs = step.gen.op->factors();
        CHECK_FALSE((fs[0].spin == 1 && fs[1].spin == 3));
      }
    }
  }
}

TEST_CASE("step costs") {
  const Generator bi = Generator::bilinear(1, Axis::Z, 2, Axis::Z);
  const Generator tri = Generator::trilinear(Axis::Z, Axis::Z, Axis::X);
  const Generator chain = Generator::coupled_chain();
  const Generator single = Generator::single(3, Axis::X);

  CHECK(step_cost(bi, kPi) == doctest::Approx(0.5));
  CHECK(step_cost(chain, kPi) == doctest::Approx(0.5));
  CHECK(step_cost(tri, 2 * kPi) == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(step_cost(single, 2 * kPi) == 0.0);
  CHECK(step_cost(single, 0.3) == 0.0);
  CHECK_THROWS_AS(step_cost(bi, -0.1), std::invalid_argument);

  SUBCASE("bilinear cost strictly increasing in theta") {
    double prev = -1;
    for (double deg = 0; deg <= 450; deg += 5) {
      const double c = step_cost(bi, deg * kPi / 180);
      CHECK(c > prev);
      prev = c;
    }
  }

  SUBCASE("trilinear cost increasing up to kappa = 2 with maximum 1") {
    double prev = -1;
    for (double kappa = 0; kappa <= 2.0; kappa += 0.05) {
      const double c = step_cost(tri, kappa * 2 * kPi);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(step_cost(tri, 4 * kPi) == doctest::Approx(1.0));
  }
}

TEST_CASE("random chromosomes") {
  SUBCASE("fixed seed reproduces") {
    Rng a(77), b(77);
    CHECK(random_chromosome(6, a) == random_chromosome(6, b));
  }

  SUBCASE("row count honored and bounds enforced") {
    Rng rng(1);
    CHECK(random_chromosome(3, rng).row_count() == 3);
    CHECK(random_chromosome(10, rng).row_count() == 10);
    CHECK_THROWS(random_chromosome(2, rng));
    CHECK_THROWS(random_chromosome(11, rng));
  }

  SUBCASE("digit histogram uniform within 3 sigma over 1e5 draws") {
    Rng rng(2024);
    int counts[10] = {0};
    const int draws = 100000;
    for (int i = 0; i < draws / 40; ++i) {
      const Chromosome c = random_chromosome(10, rng);
      for (const auto& row : c.rows) {
        for (uint8_t d : row) ++counts[d];
      }
    }
    const double expected = draws / 10.0;
    const double sigma = std::sqrt(draws * 0.1 * 0.9);
    for (int d = 0; d < 10; ++d) {
      CHECK(std::abs(counts[d] - expected) < 3 * sigma);
    }
  }
}

TEST_CASE("sequence text format") {
  const std::string text =
      "# steps for a diagonal target\n"
      "single 3 x 270\n"
      "bi 12 zz -180\n"
      "tri 123 zzx 360\n"
      "chain - zz+zz 180\n";
  std::istringstream in(text);
  const PulseSequence seq = parse_sequence(in);
  REQUIRE(seq.steps.size() == 4);
  CHECK(seq.steps[0].gen.kind == GeneratorKind::Single);
  CHECK(seq.steps[1].reversed);
  CHECK(seq.steps[1].theta_deg() == doctest::Approx(180.0));
  CHECK(seq.steps[2].gen.label() == "I1zI2zI3x");
  CHECK(seq.steps[3].gen.kind == GeneratorKind::CoupledChain);

  SUBCASE("round trip through format_sequence") {
    std::istringstream again(format_sequence(seq));
    const PulseSequence back = parse_sequence(again);
    CHECK(format_sequence(back) == format_sequence(seq));
    CHECK((sequence_unitary(back) - sequence_unitary(seq)).norm() < 1e-14);
  }

  SUBCASE("errors carry line numbers") {
    std::istringstream bad("single 3 x 90\nbi 13 zz oops\n");
    try {
      parse_sequence(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream dup("bi 11 zz 90\n");
    CHECK_THROWS_AS(parse_sequence(dup), ParseError);
    std::istringstream axes("tri 123 zz 90\n");
    CHECK_THROWS_AS(parse_sequence(axes), ParseError);
  }
}

TEST_CASE("chromosome text format") {
  std::istringstream in("# comment\n4 7 2 1\n0000\n9 8 8 0\n");
  const Chromosome c = parse_chromosome(in);
  REQUIRE(c.row_count() == 3);
  CHECK(c.rows[0] == std::array<uint8_t, 4>{4, 7, 2, 1});
  CHECK(c.rows[1] == std::array<uint8_t, 4>{0, 0, 0, 0});

  std::istringstream round(format_chromosome(c));
  CHECK(parse_chromosome(round) == c);

  std::istringstream bad("4 7 2\n");
  CHECK_THROWS_AS(parse_chromosome(bad), ParseError);
}

TEST_CASE("hard pulse proxy counts") {
  PulseSequence seq;
  PulseStep single;
  single.gen = Generator::single(3, Axis::X);
  single.theta = kPi;
  single.cost = 0;
  PulseStep bi;
  bi.gen = Generator::bilinear(1, Axis::Z, 2, Axis::Z);
  bi.theta = kPi;
  bi.reversed = true;  // sign reversal costs a conjugating pulse pair
  bi.cost = 0.5;
  PulseStep tri;
  tri.gen = Generator::trilinear(Axis::Z, Axis::Z, Axis::X);
  tri.theta = 2 * kPi;
  tri.cost = std::sqrt(3.0) / 2;
  seq.steps = {single, bi, tri};

  CHECK(step_hard_pulses(seq.steps[0]) == 1);
  CHECK(step_hard_pulses(seq.steps[1]) == 2);
  CHECK(step_hard_pulses(seq.steps[2]) == 2);  // one non-z factor
  CHECK(seq.hard_pulse_count() == 5);
}
