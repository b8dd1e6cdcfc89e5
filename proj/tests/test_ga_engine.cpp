#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gatesmith/ga_engine.hpp"

using namespace gatesmith;

namespace {
constexpr double kPi = std::numbers::pi;

Matrix8c lambda2_iz() {
  Matrix8c m = Matrix8c::Identity();
  m(7, 7) = -1;
  return m;
}

Matrix8c bilinear_target() {
  return propagator(Generator::bilinear(1, Axis::Z, 2, Axis::Z), kPi);
}

GaConfig small_config(uint64_t seed) {
  GaConfig config;
  config.population_size = 60;
  config.generations = 30;
  config.rows = 3;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("fitness functions") {
  const Matrix8c id = Matrix8c::Identity();
  const Matrix8c trap = lambda2_iz();

  SUBCASE("the identity trap scores one half under F1 and F2") {
    CHECK(fitness(id, trap, FitnessKind::F1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fitness(id, trap, FitnessKind::F2) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("exact match returns the cap") {
    CHECK(fitness(trap, trap, FitnessKind::F1) == kFitnessMax);
    CHECK(fitness(trap, trap, FitnessKind::F2) == kFitnessMax);
    CHECK(fitness(trap, trap, FitnessKind::F3) == kFitnessMax);
  }

  SUBCASE("F3 is symmetric") {
    const Matrix8c u = propagator(Generator::trilinear(Axis::Z, Axis::X, Axis::Y), 0.9);
    CHECK(fitness(u, trap, FitnessKind::F3) ==
          doctest::Approx(fitness(trap, u, FitnessKind::F3)));
  }

  SUBCASE("F1 equals F2 when the deviation is diagonal") {
    // G and U diagonal makes G^dag U - U^dag U diagonal.
    const Matrix8c g = propagator(Generator::bilinear(1, Axis::Z, 2, Axis::Z), 0.7);
    const Matrix8c u = propagator(Generator::bilinear(1, Axis::Z, 2, Axis::Z), 1.3);
    CHECK(fitness(g, u, FitnessKind::F1) ==
          doctest::Approx(fitness(g, u, FitnessKind::F2)));
  }

  SUBCASE("phase-free variant forgives a global phase") {
    const Matrix8c u = propagator(Generator::trilinear(Axis::Z, Axis::Z, Axis::X),
                                  2 * kPi);
    const Matrix8c g = std::exp(Complex(0, 0.6)) * u;
    CHECK(fitness(g, u, FitnessKind::F2) < 10.0);
    CHECK(fitness_phase_free(g, u, FitnessKind::F2) == kFitnessMax);
  }

  SUBCASE("fitness at the success threshold pins the deviation") {
    // F2 >= 1000 means the summed elementwise deviation of G^dag U from the
    // identity is at most 1e-3.
    const Matrix8c u = bilinear_target();
    const Matrix8c g = propagator(Generator::bilinear(1, Axis::Z, 2, Axis::Z),
                                  kPi + 1e-7);
    const double f = fitness(g, u, FitnessKind::F2);
    const double deviation = (g.adjoint() * u - Matrix8c::Identity()).cwiseAbs().sum();
    CHECK(f == doctest::Approx(1.0 / deviation));
    CHECK(f > 1000.0);
  }
}

TEST_CASE("config validation") {
  GaConfig config;
  CHECK_NOTHROW(config.validate());
  config.population_size = 501;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.population_size = 8;
  config.elite_count = 5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = GaConfig{};
  config.rows = 11;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = GaConfig{};
  config.generations = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("mutation schedule") {
  GaConfig config;  // start 30, max 0.35, 50 generations
  CHECK(config.mutation_probability(0) == 0.0);
  CHECK(config.mutation_probability(30) == 0.0);
  CHECK(config.mutation_probability(40) == doctest::Approx(0.175).epsilon(1e-15));
  CHECK(config.mutation_probability(50) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(config.mutation_probability(60) == doctest::Approx(0.35));
}

TEST_CASE("select_pair") {
  SUBCASE("degenerate fitness pairs the only fit member with a uniform partner") {
    Population pop;
    for (int i = 0; i < 10; ++i) {
      pop.members.push_back(Chromosome{{{{1, 1, 1, 1}}}});
      pop.fitness.push_back(i == 3 ? 1.0 : 0.0);
    }
    Rng rng(5);
    int partner_counts[10] = {0};
    for (int t = 0; t < 2000; ++t) {
      const auto [a, b] = select_pair(pop, rng);
      CHECK(a == 3);
      CHECK(b != 3);
      ++partner_counts[b];
    }
    for (int i = 0; i < 10; ++i) {
      if (i == 3) continue;
      CHECK(partner_counts[i] > 120);  // ~222 expected
    }
  }

  SUBCASE("all-zero fitness falls back to uniform") {
    Population pop;
    for (int i = 0; i < 6; ++i) {
      pop.members.push_back(Chromosome{{{{1, 1, 1, 1}}}});
      pop.fitness.push_back(0.0);
    }
    Rng rng(17);
    int first_counts[6] = {0};
    const int draws = 30000;
    for (int t = 0; t < draws; ++t) {
      const auto [a, b] = select_pair(pop, rng);
      CHECK(a != b);
      ++first_counts[a];
    }
    const double expected = draws / 6.0;
    const double sigma = std::sqrt(draws * (1.0 / 6) * (5.0 / 6));
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(first_counts[i] - expected) < 3 * sigma);
    }
  }

  SUBCASE("selection frequency proportional to fitness within 3 sigma") {
    Population pop;
    const std::vector<double> fit = {1, 2, 3, 4, 10};
    double total = 0;
    for (double f : fit) {
      pop.members.push_back(Chromosome{{{{1, 1, 1, 1}}}});
      pop.fitness.push_back(f);
      total += f;
    }
    Rng rng(31);
    const int draws = 100000;
    std::vector<int> counts(fit.size(), 0);
    for (int t = 0; t < draws; ++t) {
      ++counts[select_pair(pop, rng).first];
    }
    for (size_t i = 0; i < fit.size(); ++i) {
      const double p = fit[i] / total;
      const double sigma = std::sqrt(draws * p * (1 - p));
      CHECK(std::abs(counts[i] - draws * p) < 3 * sigma);
    }
  }
}

TEST_CASE("crossover operators") {
  Rng seed_rng(9);
  GaConfig config = small_config(0);

  auto random_parent = [&](int n) { return random_chromosome(n, seed_rng); };

  SUBCASE("CROSS1 with full height swaps the parents") {
    // Height and start are drawn first; find a draw where height == N.
    const Chromosome a = random_parent(4), b = random_parent(4);
    bool seen_full_swap = false;
    for (uint64_t s = 0; s < 50 && !seen_full_swap; ++s) {
      Rng rng(s);
      const auto [ca, cb] = cross(a, b, 1, config, rng);
      if (ca == b && cb == a) seen_full_swap = true;
    }
    CHECK(seen_full_swap);
  }

  SUBCASE("protected columns pass through untouched when mutation is off") {
    GaConfig quiet = config;
    quiet.cross2_mutation_prob = 0;
    quiet.cross3_mutation_prob = 0;
    quiet.cross4_mutation_prob = 0;
    Rng rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = rng.uniform_int(3, 8);
      const Chromosome a = random_parent(n), b = random_parent(n);
      const int k = rng.uniform_int(2, 4);
      const auto [ca, cb] = cross(a, b, k, quiet, rng);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < k - 1; ++c) {
          CHECK(ca.rows[r][c] == a.rows[r][c]);
          CHECK(cb.rows[r][c] == b.rows[r][c]);
        }
      }
    }
  }

  SUBCASE("exchanged block stays within the row range") {
    GaConfig quiet = config;
    quiet.cross2_mutation_prob = 0;
    quiet.cross3_mutation_prob = 0;
    quiet.cross4_mutation_prob = 0;
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
      const Chromosome a = random_parent(5), b = random_parent(5);
      const int k = rng.uniform_int(1, 4);
      const auto [ca, cb] = cross(a, b, k, quiet, rng);
      for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 4; ++c) {
          // Every entry is either from its own parent or exchanged with the
          // other parent at the same position.
          const bool own = ca.rows[r][c] == a.rows[r][c];
          const bool swapped = ca.rows[r][c] == b.rows[r][c] &&
                               cb.rows[r][c] == a.rows[r][c];
          CHECK((own || swapped));
          CHECK(ca.rows[r][c] <= 9);
          CHECK(cb.rows[r][c] <= 9);
        }
      }
    }
  }

  SUBCASE("mutation hits only protected columns") {
    GaConfig loud = config;
    loud.cross2_mutation_prob = 1.0;
    loud.cross3_mutation_prob = 1.0;
    loud.cross4_mutation_prob = 1.0;
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
      const Chromosome a = random_parent(4), b = random_parent(4);
      const int k = rng.uniform_int(2, 4);
      const auto [ca, cb] = cross(a, b, k, loud, rng);
      int mutated = 0;
      for (int r = 0; r < 4; ++r) {
        for (int c = k - 1; c < 4; ++c) {
          const bool own = ca.rows[r][c] == a.rows[r][c];
          const bool swapped = ca.rows[r][c] == b.rows[r][c] &&
                               cb.rows[r][c] == a.rows[r][c];
          CHECK((own || swapped));  // unprotected columns never mutate
        }
        for (int c = 0; c < k - 1; ++c) {
          if (ca.rows[r][c] != a.rows[r][c]) ++mutated;
          if (cb.rows[r][c] != b.rows[r][c]) ++mutated;
        }
      }
      CHECK(mutated <= 1);  // at most one protected entry changes
    }
  }
}

TEST_CASE("flip") {
  Chromosome a;
  a.rows = {{{1, 1, 1, 1}}, {{2, 2, 2, 2}}, {{3, 3, 3, 3}}};

  SUBCASE("row multiset preserved") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const Chromosome f = flip(a, rng);
      auto sorted_rows = [](Chromosome c) {
        std::sort(c.rows.begin(), c.rows.end());
        return c.rows;
      };
      CHECK(sorted_rows(f) == sorted_rows(a));
      CHECK(f.rows != a.rows);  // some pair really was exchanged
    }
  }

  SUBCASE("flip with the same draw is an involution") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      Rng r1(seed), r2(seed);
      const Chromosome once = flip(a, r1);
      Rng r3(seed);
      const Chromosome twice = flip(once, r3);
      (void)r2;
      CHECK(twice == a);
    }
  }

  SUBCASE("explicit three-row exchange") {
    // Find a seed whose draw swaps rows 0 and 2.
    bool seen = false;
    for (uint64_t seed = 0; seed < 60 && !seen; ++seed) {
      Rng rng(seed);
      const Chromosome f = flip(a, rng);
      if (f.rows[0] == a.rows[2] && f.rows[2] == a.rows[0] &&
          f.rows[1] == a.rows[1]) {
        seen = true;
      }
    }
    CHECK(seen);
  }
}

TEST_CASE("catastrophic mutation") {
  GaConfig config = small_config(0);
  config.mutate_members = 4;

  Population pop;
  for (int i = 0; i < 20; ++i) {
    Rng rng(i);
    pop.members.push_back(random_chromosome(3, rng));
    pop.fitness.push_back(1.0);
  }
  const Population before = pop;

  SUBCASE("no-op before the start generation") {
    Rng rng(8);
    mutate_catastrophic(pop, 29, config, rng);
    CHECK(pop.members == before.members);
    mutate_catastrophic(pop, 30, config, rng);
    CHECK(pop.members == before.members);
  }

  SUBCASE("forced mutation randomizes chosen non-elite members only") {
    config.mutate_start_gen = 0;
    config.generations = 1;
    config.mutate_max_prob = 1.0;  // ramp complete at generation 1
    Rng rng(8);
    mutate_catastrophic(pop, 1, config, rng);
    for (int e = 0; e < config.elite_count; ++e) {
      CHECK(pop.members[e] == before.members[e]);
    }
    int changed = 0;
    for (int i = config.elite_count; i < pop.size(); ++i) {
      if (!(pop.members[i] == before.members[i])) ++changed;
    }
    CHECK(changed >= 1);
    CHECK(changed <= config.mutate_members);
  }
}

TEST_CASE("evolve_generation") {
  const Matrix8c target = bilinear_target();
  GaConfig config = small_config(11);
  SequenceEvaluator eval(target, config.fitness_kind, config.topology,
                         config.phase_free);

  Rng rng(config.seed);
  Population pop;
  for (int i = 0; i < config.population_size; ++i) {
    pop.members.push_back(random_chromosome(config.rows, rng));
  }
  pop.fitness.resize(pop.size());
  for (int i = 0; i < pop.size(); ++i) pop.fitness[i] = eval.evaluate(pop.members[i]);

  SUBCASE("population size constant and max fitness non-decreasing") {
    double best = pop.fitness[pop.best_index()];
    for (int g = 0; g < 25; ++g) {
      evolve_generation(pop, eval, config, rng);
      CHECK(pop.size() == config.population_size);
      const double now = pop.fitness[pop.best_index()];
      CHECK(now >= best);
      best = now;
      for (const auto& member : pop.members) {
        CHECK(member.row_count() == config.rows);
        for (const auto& row : member.rows) {
          for (uint8_t d : row) CHECK(d <= 9);
        }
      }
    }
  }

  SUBCASE("equal seeds give identical populations") {
    auto run_once = [&](uint64_t seed) {
      Rng r(seed);
      Population p;
      for (int i = 0; i < config.population_size; ++i) {
        p.members.push_back(random_chromosome(config.rows, r));
      }
      p.fitness.resize(p.size());
      for (int i = 0; i < p.size(); ++i) p.fitness[i] = eval.evaluate(p.members[i]);
      for (int g = 0; g < 10; ++g) evolve_generation(p, eval, config, r);
      return p;
    };
    const Population a = run_once(99), b = run_once(99);
    CHECK(a.members == b.members);
    CHECK(a.fitness == b.fitness);
  }
}

TEST_CASE("run") {
  SUBCASE("identity target is found and costs nothing") {
    GaConfig config = small_config(21);
    config.generations = 50;
    const RunOutcome outcome = run(Matrix8c::Identity(), config);
    REQUIRE_FALSE(outcome.candidates.empty());
    const Candidate& best = outcome.candidates.front();
    CHECK(best.fitness == kFitnessMax);
    CHECK(best.sequence.total_time() == 0.0);
    CHECK(outcome.early_stopped);
  }

  SUBCASE("log lines follow the per-generation format") {
    GaConfig config = small_config(4);
    config.generations = 5;
    std::ostringstream log;
    run(bilinear_target(), config, &log);
    std::istringstream lines(log.str());
    std::string line;
    int gen_lines = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("early_stop", 0) == 0) continue;
      CAPTURE(line);
      CHECK(line.rfind("gen=", 0) == 0);
      CHECK(line.find(" best=") != std::string::npos);
      CHECK(line.find(" mean=") != std::string::npos);
      CHECK(line.find(" best_cost=") != std::string::npos);
      ++gen_lines;
    }
    CHECK(gen_lines >= 1);
  }

  SUBCASE("single bilinear target is solved within twenty seeds") {
    GaConfig config;
    config.population_size = 500;
    config.generations = 50;
    config.rows = 3;
    const Matrix8c target = bilinear_target();
    int successes = 0;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      GaConfig c = config;
      c.seed = seed;
      const RunOutcome outcome = run(target, c);
      if (outcome.candidates.front().fitness >= c.success_fitness) {
        ++successes;
        break;  // one success is the contract; stop early to stay fast
      }
    }
    CHECK(successes >= 1);
  }

  SUBCASE("candidates are distinct decoded sequences, at most twenty") {
    GaConfig config = small_config(33);
    config.generations = 10;
    const RunOutcome outcome = run(bilinear_target(), config);
    CHECK(outcome.candidates.size() <= 20);
    std::vector<std::string> keys;
    for (const auto& c : outcome.candidates) {
      keys.push_back(format_sequence(c.sequence));
    }
    std::sort(keys.begin(), keys.end());
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
    // Sorted by fitness, best first.
    for (size_t i = 1; i < outcome.candidates.size(); ++i) {
      CHECK(outcome.candidates[i - 1].fitness >= outcome.candidates[i].fitness);
    }
  }
}

TEST_CASE("sweep") {
  const Matrix8c target = bilinear_target();
  GaConfig base = small_config(0);
  base.population_size = 200;
  base.generations = 40;

  const SweepResult sweep = sweep_n(target, base, 3, 4, 7);
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.entries[0].n_rows == 3);
  CHECK(sweep.entries[1].n_rows == 4);
  CHECK(sweep.entries[0].seed == derive_seed(7, 3));

  if (sweep.has_winner()) {
    const double winner_cost = sweep.winner().sequence.total_time();
    for (const auto& entry : sweep.entries) {
      for (const auto& cand : entry.outcome.candidates) {
        if (cand.fitness >= base.success_fitness) {
          CHECK(winner_cost <= cand.sequence.total_time() + 1e-12);
        }
      }
    }
  }

  SUBCASE("bad sweep ranges are rejected") {
    CHECK_THROWS_AS(sweep_n(target, base, 2, 4, 7), ConfigError);
    CHECK_THROWS_AS(sweep_n(target, base, 5, 4, 7), ConfigError);
  }
}
