#include "gatesmith/ga_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include <Eigen/StdVector>

namespace gatesmith {

std::string fitness_name(FitnessKind kind) {
  switch (kind) {
    case FitnessKind::F1: return "f1";
    case FitnessKind::F2: return "f2";
    case FitnessKind::F3: return "f3";
  }
  return "?";
}

FitnessKind fitness_from_name(std::string_view name) {
  if (name == "f1" || name == "F1") return FitnessKind::F1;
  if (name == "f2" || name == "F2") return FitnessKind::F2;
  if (name == "f3" || name == "F3") return FitnessKind::F3;
  throw ConfigError("unknown fitness kind '" + std::string(name) +
                    "' (expected f1, f2 or f3)");
}

namespace {

double fitness_with_gram(const Matrix8c& g, const Matrix8c& u,
                         const Matrix8c& u_gram, FitnessKind kind) {
  double denom = 0;
  switch (kind) {
    case FitnessKind::F1:
      denom = (g.adjoint() * u - u_gram).diagonal().cwiseAbs().sum();
      break;
    case FitnessKind::F2:
      denom = (g.adjoint() * u - u_gram).cwiseAbs().sum();
      break;
    case FitnessKind::F3:
      denom = (g - u).cwiseAbs().sum();
      break;
  }
  if (denom < 1e-12) return kFitnessMax;
  return 1.0 / denom;
}

Matrix8c remove_global_phase(const Matrix8c& g, const Matrix8c& u) {
  const Complex overlap = (g.adjoint() * u).trace();
  if (std::abs(overlap) < 1e-300) return g;
  // Rotate g onto u's phase: with psi = arg Tr(g^dag u), e^{-i psi} g is the
  // closest phase representative.
  return std::exp(Complex(0, -std::arg(overlap))) * g;
}

}  // namespace

double fitness(const Matrix8c& g, const Matrix8c& u, FitnessKind kind) {
  return fitness_with_gram(g, u, u.adjoint() * u, kind);
}

double fitness_phase_free(const Matrix8c& g, const Matrix8c& u, FitnessKind kind) {
  return fitness(remove_global_phase(g, u), u, kind);
}

void GaConfig::validate() const {
  if (population_size < 2) throw ConfigError("population size must be >= 2");
  if (population_size % 2 != 0) throw ConfigError("population size must be even");
  if (elite_count < 0) throw ConfigError("elite count must be >= 0");
  if (population_size < 2 * elite_count) {
    throw ConfigError("population size must be >= 2 * elite count");
  }
  if (generations < 1) throw ConfigError("generations must be >= 1");
  if (rows < 3 || rows > 10) throw ConfigError("rows must be in [3, 10]");
  if (success_fitness <= 0) throw ConfigError("success fitness must be > 0");
  if (mutate_members < 0) throw ConfigError("mutate members must be >= 0");
  for (double p : {cross2_mutation_prob, cross3_mutation_prob, cross4_mutation_prob,
                   mutate_max_prob}) {
    if (p < 0 || p > 1) throw ConfigError("probabilities must be in [0, 1]");
  }
}

double GaConfig::mutation_probability(int generation) const {
  if (generation <= mutate_start_gen) return 0.0;
  const int ramp = generations - mutate_start_gen;
  if (ramp <= 0) return mutate_max_prob;
  const double p = mutate_max_prob * (generation - mutate_start_gen) / ramp;
  return std::min(p, mutate_max_prob);
}

int Population::best_index() const {
  if (members.empty()) return -1;
  int best = 0;
  for (int i = 1; i < size(); ++i) {
    if (fitness[i] > fitness[best]) best = i;
  }
  return best;
}

std::pair<int, int> select_pair(const Population& pop, Rng& rng) {
  const int n = pop.size();
  if (n < 2) throw ConfigError("selection needs at least 2 members");
  const double total = std::accumulate(pop.fitness.begin(), pop.fitness.end(), 0.0);

  auto roulette = [&]() {
    double r = rng.u01() * total;
    for (int i = 0; i < n; ++i) {
      r -= pop.fitness[i];
      if (r < 0) return i;
    }
    return n - 1;
  };

  int first, second;
  if (total <= 0 || !std::isfinite(total)) {
    first = rng.uniform_int(0, n - 1);
    second = rng.uniform_int(0, n - 1);
  } else {
    first = roulette();
    second = roulette();
  }
  while (second == first) second = rng.uniform_int(0, n - 1);
  return {first, second};
}

std::pair<Chromosome, Chromosome> cross(const Chromosome& a, const Chromosome& b,
                                        int k, const GaConfig& config, Rng& rng) {
  if (k < 1 || k > 4) throw std::invalid_argument("crossover kind must be 1-4");
  const int n = a.row_count();
  if (n != b.row_count()) throw std::invalid_argument("parents must have equal rows");

  const int height = rng.uniform_int(1, n);
  const int start = rng.uniform_int(0, n - height);
  const int first_col = k - 1;  // exchanged columns [k-1, 3]

  Chromosome ca = a, cb = b;
  for (int r = start; r < start + height; ++r) {
    for (int c = first_col; c < 4; ++c) std::swap(ca.rows[r][c], cb.rows[r][c]);
  }

  if (k >= 2) {
    const double p = k == 2   ? config.cross2_mutation_prob
                     : k == 3 ? config.cross3_mutation_prob
                              : config.cross4_mutation_prob;
    if (rng.bernoulli(p)) {
      Chromosome& child = rng.uniform_int(0, 1) == 0 ? ca : cb;
      const int row = rng.uniform_int(0, n - 1);
      const int col = rng.uniform_int(0, k - 2);  // a protected column
      child.rows[row][col] = static_cast<uint8_t>(rng.digit());
    }
  }
  return {std::move(ca), std::move(cb)};
}

Chromosome flip(const Chromosome& a, Rng& rng) {
  const int n = a.row_count();
  if (n < 2) throw std::invalid_argument("flip needs at least 2 rows");
  const int i = rng.uniform_int(0, n - 1);
  int j = rng.uniform_int(0, n - 2);
  if (j >= i) ++j;
  Chromosome out = a;
  std::swap(out.rows[i], out.rows[j]);
  return out;
}

void mutate_catastrophic(Population& pop, int generation, const GaConfig& config,
                         Rng& rng) {
  const double p = config.mutation_probability(generation);
  if (p <= 0 || !rng.bernoulli(p)) return;

  // The first elite_count members are the protected elite.
  const int pool = pop.size() - config.elite_count;
  if (pool <= 0) return;
  const int count = std::min(config.mutate_members, pool);
  std::vector<int> indices(pool);
  std::iota(indices.begin(), indices.end(), config.elite_count);
  for (int t = 0; t < count; ++t) {
    const int pick = t + rng.uniform_int(0, pool - 1 - t);
    std::swap(indices[t], indices[pick]);
    for (auto& row : pop.members[indices[t]].rows) {
      for (auto& d : row) d = static_cast<uint8_t>(rng.digit());
    }
  }
}

// ---------------------------------------------------------------------------
// SequenceEvaluator

struct SequenceEvaluator::Cache {
  // Propagators indexed by generator id (0..63) and angle index (0..90,
  // 5-degree ticks). The genotype alphabet is finite, so every GA
  // evaluation after warm-up is pure table lookups and products.
  static constexpr int kAngles = 91;
  std::vector<Matrix8c, Eigen::aligned_allocator<Matrix8c>> props;
  std::vector<uint8_t> ready;

  Cache() : props(64 * kAngles), ready(64 * kAngles, 0) {}

  const Matrix8c& get(const Generator& gen, int angle_index) {
    const int slot = gen.id() * kAngles + angle_index;
    if (!ready[slot]) {
      constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
      props[slot] = propagator(gen, 5.0 * angle_index * kDegToRad);
      ready[slot] = 1;
    }
    return props[slot];
  }
};

SequenceEvaluator::SequenceEvaluator(Matrix8c target, FitnessKind kind,
                                     CouplingTopology topo, bool phase_free)
    : target_(std::move(target)),
      target_gram_(target_.adjoint() * target_),
      kind_(kind),
      topology_(topo),
      phase_free_(phase_free),
      cache_(std::make_unique<Cache>()) {}

SequenceEvaluator::~SequenceEvaluator() = default;

double SequenceEvaluator::evaluate(const Chromosome& chrom) {
  Matrix8c g = Matrix8c::Identity();
  bool any = false;
  for (const auto& row : chrom.rows) {
    if (row[0] == 0) continue;
    const int angle_index = 9 * row[2] + row[3];
    if (angle_index == 0) continue;  // zero angle, identity factor
    const auto gen = decoding_table::generator(row[0], row[1], topology_);
    const Matrix8c& step = cache_->get(*gen, angle_index);
    if (!any) {
      g = step;
      any = true;
    } else {
      g = g * step;
    }
  }
  const Matrix8c& candidate = g;
  if (phase_free_) {
    return fitness_with_gram(remove_global_phase(candidate, target_), target_,
                             target_gram_, kind_);
  }
  return fitness_with_gram(candidate, target_, target_gram_, kind_);
}

Matrix8c SequenceEvaluator::unitary(const Chromosome& chrom) const {
  return sequence_unitary(decode(chrom, topology_));
}

// ---------------------------------------------------------------------------

void evolve_generation(Population& pop, SequenceEvaluator& eval,
                       const GaConfig& config, Rng& rng) {
  const int n = pop.size();
  const int elite = std::min(config.elite_count, n);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pop.fitness[a] > pop.fitness[b];
  });

  std::vector<Chromosome> next;
  next.reserve(n);
  for (int e = 0; e < elite; ++e) next.push_back(pop.members[order[e]]);

  while (static_cast<int>(next.size()) < n) {
    const auto [i, j] = select_pair(pop, rng);
    const int k = rng.uniform_int(1, 4);
    auto [child_a, child_b] = cross(pop.members[i], pop.members[j], k, config, rng);
    next.push_back(std::move(child_a));
    if (static_cast<int>(next.size()) < n) next.push_back(std::move(child_b));
  }

  // Flip half of the new (non-elite) members, chosen without replacement.
  const int children = n - elite;
  const int flips = children / 2;
  std::vector<int> child_idx(children);
  std::iota(child_idx.begin(), child_idx.end(), elite);
  for (int t = 0; t < flips; ++t) {
    const int pick = t + rng.uniform_int(0, children - 1 - t);
    std::swap(child_idx[t], child_idx[pick]);
    next[child_idx[t]] = flip(next[child_idx[t]], rng);
  }

  pop.members = std::move(next);
  pop.generation += 1;
  mutate_catastrophic(pop, pop.generation, config, rng);

  pop.fitness.resize(n);
  for (int i = 0; i < n; ++i) pop.fitness[i] = eval.evaluate(pop.members[i]);
}

RunOutcome run(const Matrix8c& target, const GaConfig& config, std::ostream* log) {
  config.validate();
  Rng rng(config.seed);
  SequenceEvaluator eval(target, config.fitness_kind, config.topology,
                         config.phase_free);

  Population pop;
  pop.generation = 0;
  pop.members.reserve(config.population_size);
  for (int i = 0; i < config.population_size; ++i) {
    pop.members.push_back(random_chromosome(config.rows, rng));
  }
  pop.fitness.resize(config.population_size);
  for (int i = 0; i < config.population_size; ++i) {
    pop.fitness[i] = eval.evaluate(pop.members[i]);
  }

  auto emit = [&]() {
    if (!log) return;
    const int best = pop.best_index();
    const double mean =
        std::accumulate(pop.fitness.begin(), pop.fitness.end(), 0.0) / pop.size();
    const double cost = decode(pop.members[best], config.topology).total_time();
    char line[160];
    std::snprintf(line, sizeof(line), "gen=%d best=%.9g mean=%.9g best_cost=%.9g\n",
                  pop.generation, pop.fitness[best], mean, cost);
    (*log) << line;
    log->flush();
  };

  RunOutcome outcome;
  emit();
  while (pop.generation < config.generations) {
    if (pop.fitness[pop.best_index()] >= config.success_fitness) {
      outcome.early_stopped = true;
      if (log) {
        char line[96];
        std::snprintf(line, sizeof(line), "early_stop gen=%d best=%.9g\n",
                      pop.generation, pop.fitness[pop.best_index()]);
        (*log) << line;
        log->flush();
      }
      break;
    }
    evolve_generation(pop, eval, config, rng);
    emit();
  }
  outcome.generations_run = pop.generation;

  // Distinct decoded sequences, best 20, by descending fitness.
  std::vector<int> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pop.fitness[a] > pop.fitness[b];
  });
  std::unordered_set<std::string> seen;
  for (int idx : order) {
    if (outcome.candidates.size() >= 20) break;
    PulseSequence seq = decode(pop.members[idx], config.topology);
    std::string key = format_sequence(seq);
    if (!seen.insert(std::move(key)).second) continue;
    outcome.candidates.push_back(
        {pop.members[idx], pop.fitness[idx], std::move(seq)});
  }
  return outcome;
}

const Candidate& SweepResult::winner() const {
  if (!has_winner()) {
    throw std::logic_error("sweep produced no candidate meeting the threshold");
  }
  return entries[winner_entry].outcome.candidates[winner_candidate];
}

SweepResult sweep_n(const Matrix8c& target, const GaConfig& base, int n_low,
                    int n_high, uint64_t master_seed, std::ostream* log) {
  if (n_low < 3 || n_high > 10 || n_low > n_high) {
    throw ConfigError("row sweep must satisfy 3 <= low <= high <= 10");
  }
  SweepResult result;
  for (int n = n_low; n <= n_high; ++n) {
    GaConfig config = base;
    config.rows = n;
    config.seed = derive_seed(master_seed, static_cast<uint64_t>(n));
    if (log) {
      (*log) << "run N=" << n << " seed=" << config.seed << "\n";
      log->flush();
    }
    result.entries.push_back({n, config.seed, run(target, config, log)});
  }

  // Winner: minimum cost among all threshold-meeting candidates; ties by
  // fewer steps, then lower N.
  auto better = [](double cost_a, size_t steps_a, int n_a, double cost_b,
                   size_t steps_b, int n_b) {
    if (cost_a != cost_b) return cost_a < cost_b;
    if (steps_a != steps_b) return steps_a < steps_b;
    return n_a < n_b;
  };
  for (size_t e = 0; e < result.entries.size(); ++e) {
    const auto& entry = result.entries[e];
    for (size_t c = 0; c < entry.outcome.candidates.size(); ++c) {
      const auto& cand = entry.outcome.candidates[c];
      if (cand.fitness < base.success_fitness) continue;
      if (!result.has_winner()) {
        result.winner_entry = static_cast<int>(e);
        result.winner_candidate = static_cast<int>(c);
        continue;
      }
      const auto& cur = result.winner();
      const auto& cur_entry = result.entries[result.winner_entry];
      if (better(cand.sequence.total_time(), cand.sequence.steps.size(),
                 entry.n_rows, cur.sequence.total_time(),
                 cur.sequence.steps.size(), cur_entry.n_rows)) {
        result.winner_entry = static_cast<int>(e);
        result.winner_candidate = static_cast<int>(c);
      }
    }
  }
  return result;
}

}  // namespace gatesmith
