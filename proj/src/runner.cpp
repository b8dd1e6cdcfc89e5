#include "gatesmith/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace gatesmith {

void SynthesisOptions::validate() const {
  if (population_size < 100 || population_size > 2000) {
    throw ConfigError("population must be in [100, 2000]");
  }
  if (rows_low > rows_high) throw ConfigError("rows range must be low:high");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  ga_config(rows_low).validate();
  ga_config(rows_high).validate();
}

GaConfig SynthesisOptions::ga_config(int n_rows) const {
  GaConfig config;
  config.population_size = population_size;
  config.generations = generations;
  config.fitness_kind = fitness_kind;
  config.rows = n_rows;
  config.topology = topology;
  config.seed = derive_seed(master_seed, static_cast<uint64_t>(n_rows));
  config.elite_count = elite_count;
  config.success_fitness = success_fitness;
  config.phase_free = phase_free;
  return config;
}

const NResult& RunResult::winner() const {
  if (!has_winner()) throw std::logic_error("run produced no winner");
  return per_n[winner_index];
}

std::string matrix_digest(const Matrix8c& m) {
  std::ostringstream text;
  write_matrix(text, m);
  uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

NResult run_one_n(const Matrix8c& target, const SynthesisOptions& options,
                  int n_rows, std::ostream* log) {
  const GaConfig config = options.ga_config(n_rows);
  if (log) {
    (*log) << "run N=" << n_rows << " seed=" << config.seed << "\n";
    log->flush();
  }
  const RunOutcome outcome = run(target, config, log);

  NResult result;
  result.n_rows = n_rows;
  result.seed = config.seed;
  result.generations_run = outcome.generations_run;
  result.early_stop = outcome.early_stopped;

  const Candidate& best = outcome.candidates.front();
  result.chromosome = best.chromosome;
  result.fitness = best.fitness;

  PulseSequence refined = best.sequence;
  RefineConfig refine;
  refine.phase_free = options.phase_free;
  try {
    refined = hill_climb(best.sequence, target, refine);
    result.refined = true;
  } catch (const RefineFloorError&) {
    result.refined = false;  // keep the decoded sequence as-is
  }
  result.steps = refined;
  result.angles_deg = angles_deg(refined);
  result.total_time = refined.total_time();

  const Matrix8c u = sequence_unitary(refined);
  const double refined_fitness =
      options.phase_free ? fitness_phase_free(u, target, options.fitness_kind)
                         : fitness(u, target, options.fitness_kind);
  result.refined_fitness = refined_fitness;
  result.distance = phase_invariant_distance(u, target).distance;
  result.phase = std::arg((u.adjoint() * target).trace());
  result.meets_threshold = refined_fitness >= options.success_fitness;
  return result;
}

}  // namespace

RunResult synthesize(const Matrix8c& target, const std::string& target_label,
                     const SynthesisOptions& options, std::ostream* log) {
  options.validate();
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  result.target = target_label;
  result.matrix_digest = matrix_digest(target);
  result.options = options;

  const int n_count = options.rows_high - options.rows_low + 1;
  result.per_n.resize(n_count);
  std::vector<std::string> logs(n_count);

  const int workers = std::min(options.threads, n_count);
  if (workers <= 1) {
    for (int i = 0; i < n_count; ++i) {
      std::ostringstream local;
      result.per_n[i] =
          run_one_n(target, options, options.rows_low + i, log ? &local : nullptr);
      logs[i] = local.str();
    }
  } else {
    // Per-N runs are independent; each derives its own seed and owns its
    // evaluator, so parallel execution reproduces the serial results.
    std::vector<std::thread> pool;
    std::atomic_int next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_count; i = next.fetch_add(1)) {
          std::ostringstream local;
          result.per_n[i] = run_one_n(target, options, options.rows_low + i,
                                      log ? &local : nullptr);
          logs[i] = local.str();
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  if (log) {
    for (const auto& text : logs) (*log) << text;
    log->flush();
  }

  // Winner: threshold met, then minimum cost, fewer steps, lower N.
  for (int i = 0; i < n_count; ++i) {
    const NResult& entry = result.per_n[i];
    if (!entry.meets_threshold) continue;
    if (!result.has_winner()) {
      result.winner_index = i;
      continue;
    }
    const NResult& cur = result.winner();
    const auto key = [](const NResult& r) {
      return std::make_tuple(r.total_time, r.steps.steps.size(), r.n_rows);
    };
    if (key(entry) < key(cur)) result.winner_index = i;
  }

  result.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_steps(const PulseSequence& seq) {
  std::string out;
  for (size_t i = 0; i < seq.steps.size(); ++i) {
    if (i) out += '|';
    out += format_step(seq.steps[i]);
  }
  return out;
}

std::string chromosome_token(const Chromosome& c) {
  std::string out;
  for (size_t r = 0; r < c.rows.size(); ++r) {
    if (r) out += '/';
    for (int i = 0; i < 4; ++i) out += static_cast<char>('0' + c.rows[r][i]);
  }
  return out;
}

Chromosome chromosome_from_token(const std::string& token) {
  Chromosome c;
  std::istringstream in(token);
  std::string part;
  while (std::getline(in, part, '/')) {
    if (part.size() != 4) throw std::runtime_error("bad chromosome token");
    std::array<uint8_t, 4> row{};
    for (int i = 0; i < 4; ++i) {
      if (part[i] < '0' || part[i] > '9') {
        throw std::runtime_error("bad chromosome digit");
      }
      row[i] = static_cast<uint8_t>(part[i] - '0');
    }
    c.rows.push_back(row);
  }
  if (c.rows.empty()) throw std::runtime_error("empty chromosome token");
  return c;
}

PulseSequence steps_from_token(const std::string& token) {
  std::string text = token;
  std::replace(text.begin(), text.end(), '|', '\n');
  std::istringstream in(text);
  return parse_sequence(in);
}

}  // namespace

void write_run_result(std::ostream& out, const RunResult& result) {
  const SynthesisOptions& o = result.options;
  out << "format_version=" << result.format_version << '\n';
  out << "target=" << result.target << '\n';
  out << "matrix_digest=" << result.matrix_digest << '\n';
  out << "topology=" << o.topology.name() << '\n';
  out << "population=" << o.population_size << '\n';
  out << "generations=" << o.generations << '\n';
  out << "rows=" << o.rows_low << ':' << o.rows_high << '\n';
  out << "master_seed=" << o.master_seed << '\n';
  out << "fitness=" << fitness_name(o.fitness_kind) << '\n';
  out << "phase_free=" << (o.phase_free ? 1 : 0) << '\n';
  out << "elite=" << o.elite_count << '\n';
  out << "threshold=" << fmt_double(o.success_fitness) << '\n';
  out << "n_count=" << result.per_n.size() << '\n';
  for (const auto& e : result.per_n) {
    const std::string p = "n." + std::to_string(e.n_rows) + ".";
    out << p << "seed=" << e.seed << '\n';
    out << p << "generations_run=" << e.generations_run << '\n';
    out << p << "early_stop=" << (e.early_stop ? 1 : 0) << '\n';
    out << p << "chromosome=" << chromosome_token(e.chromosome) << '\n';
    out << p << "fitness=" << fmt_double(e.fitness) << '\n';
    out << p << "refined=" << (e.refined ? 1 : 0) << '\n';
    out << p << "refined_fitness=" << fmt_double(e.refined_fitness) << '\n';
    out << p << "steps=" << join_steps(e.steps) << '\n';
    std::string angles;
    for (size_t i = 0; i < e.angles_deg.size(); ++i) {
      if (i) angles += ',';
      angles += fmt_double(e.angles_deg[i]);
    }
    out << p << "angles_deg=" << angles << '\n';
    out << p << "total_time=" << fmt_double(e.total_time) << '\n';
    out << p << "phase=" << fmt_double(e.phase) << '\n';
    out << p << "distance=" << fmt_double(e.distance) << '\n';
    out << p << "meets_threshold=" << (e.meets_threshold ? 1 : 0) << '\n';
  }
  if (result.has_winner()) {
    out << "winner=" << result.winner().n_rows << '\n';
  } else {
    out << "winner=none" << '\n';
  }
  out << "wall_time_sec=" << fmt_double(result.wall_time_sec) << '\n';
}

RunResult read_run_result(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("bad run result line: " + line);
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::runtime_error("run result missing field " + key);
    }
    return it->second;
  };

  RunResult result;
  result.format_version = std::stoi(need("format_version"));
  result.target = need("target");
  result.matrix_digest = need("matrix_digest");
  SynthesisOptions& o = result.options;
  o.topology = need("topology") == "full" ? CouplingTopology::full()
                                          : CouplingTopology::linear_chain();
  o.population_size = std::stoi(need("population"));
  o.generations = std::stoi(need("generations"));
  {
    const std::string rows = need("rows");
    const auto colon = rows.find(':');
    if (colon == std::string::npos) throw std::runtime_error("bad rows field");
    o.rows_low = std::stoi(rows.substr(0, colon));
    o.rows_high = std::stoi(rows.substr(colon + 1));
  }
  o.master_seed = std::stoull(need("master_seed"));
  o.fitness_kind = fitness_from_name(need("fitness"));
  o.phase_free = need("phase_free") == "1";
  o.elite_count = std::stoi(need("elite"));
  o.success_fitness = std::stod(need("threshold"));

  const int n_count = std::stoi(need("n_count"));
  result.per_n.resize(n_count);
  for (int i = 0; i < n_count; ++i) {
    NResult& e = result.per_n[i];
    e.n_rows = o.rows_low + i;
    const std::string p = "n." + std::to_string(e.n_rows) + ".";
    e.seed = std::stoull(need(p + "seed"));
    e.generations_run = std::stoi(need(p + "generations_run"));
    e.early_stop = need(p + "early_stop") == "1";
    e.chromosome = chromosome_from_token(need(p + "chromosome"));
    e.fitness = std::stod(need(p + "fitness"));
    e.refined = need(p + "refined") == "1";
    e.refined_fitness = std::stod(need(p + "refined_fitness"));
    e.steps = steps_from_token(need(p + "steps"));
    {
      const std::string angles = need(p + "angles_deg");
      std::istringstream parts(angles);
      std::string tok;
      while (std::getline(parts, tok, ',')) {
        if (!tok.empty()) e.angles_deg.push_back(std::stod(tok));
      }
    }
    e.total_time = std::stod(need(p + "total_time"));
    e.phase = std::stod(need(p + "phase"));
    e.distance = std::stod(need(p + "distance"));
    e.meets_threshold = need(p + "meets_threshold") == "1";
  }
  const std::string winner = need("winner");
  if (winner == "none") {
    result.winner_index = -1;
  } else {
    result.winner_index = std::stoi(winner) - o.rows_low;
  }
  if (kv.count("wall_time_sec")) {
    result.wall_time_sec = std::stod(kv["wall_time_sec"]);
  }
  return result;
}

RunResult read_run_result_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run result: " + path);
  return read_run_result(in);
}

std::optional<std::string> reverify(const RunResult& result, const Matrix8c& target,
                                    double tol) {
  if (matrix_digest(target) != result.matrix_digest) {
    return "target matrix digest mismatch";
  }
  const SynthesisOptions& o = result.options;
  for (const auto& e : result.per_n) {
    std::ostringstream msg;
    msg << "N=" << e.n_rows << ": ";

    // The stored genotype must decode to the stored structure and fitness.
    const PulseSequence decoded = decode(e.chromosome, o.topology);
    const Matrix8c gu = sequence_unitary(decoded);
    const double ga_fitness =
        o.phase_free ? fitness_phase_free(gu, target, o.fitness_kind)
                     : fitness(gu, target, o.fitness_kind);
    if (std::abs(ga_fitness - e.fitness) >
        tol * std::max(1.0, std::abs(e.fitness))) {
      msg << "decoded fitness " << ga_fitness << " != stored " << e.fitness;
      return msg.str();
    }

    // The refined steps must re-simulate to the stored distance and cost.
    const Matrix8c u = sequence_unitary(e.steps);
    const double distance = phase_invariant_distance(u, target).distance;
    if (std::abs(distance - e.distance) > tol) {
      msg << "distance " << distance << " != stored " << e.distance;
      return msg.str();
    }
    if (std::abs(e.steps.total_time() - e.total_time) > tol) {
      msg << "cost " << e.steps.total_time() << " != stored " << e.total_time;
      return msg.str();
    }
  }
  return std::nullopt;
}

std::string run_result_body(const std::string& serialized) {
  std::istringstream in(serialized);
  std::string out, line;
  while (std::getline(in, line)) {
    if (line.rfind("wall_time_sec=", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace gatesmith
