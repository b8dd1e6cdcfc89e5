// gatesmith: synthesis of time-efficient pulse sequences for a three-spin
// system. Subcommands: synthesize, verify, cost, decode, gates.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gatesmith/gate_library.hpp"
#include "gatesmith/runner.hpp"

namespace {

using namespace gatesmith;

constexpr int kExitSuccess = 0;
constexpr int kExitNoCandidate = 2;
constexpr int kExitInputError = 3;

Matrix8c resolve_target(const std::string& spec, std::string& label) {
  for (const auto& name : gate_names()) {
    if (name == spec) {
      label = name;
      return get_gate(name).matrix;
    }
  }
  label = "file";
  return load_matrix_file(spec);
}

struct CommonTargetFlags {
  std::string target;
  std::string topology = "linear";
};

CouplingTopology parse_topology(const std::string& name) {
  if (name == "full") return CouplingTopology::full();
  if (name == "linear") return CouplingTopology::linear_chain();
  throw ConfigError("topology must be 'full' or 'linear'");
}

int cmd_synthesize(const std::string& target_spec, const std::string& topology,
                   int pop, int gens, const std::string& rows, uint64_t seed,
                   const std::string& fitness, bool phase_free, int elite,
                   double threshold, const std::string& out_path, int threads,
                   const std::string& log_path) {
  SynthesisOptions options;
  options.topology = parse_topology(topology);
  options.population_size = pop;
  options.generations = gens;
  const auto colon = rows.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("rows must be given as low:high, e.g. 3:6");
  }
  try {
    options.rows_low = std::stoi(rows.substr(0, colon));
    options.rows_high = std::stoi(rows.substr(colon + 1));
  } catch (...) {
    throw ConfigError("rows must be given as low:high, e.g. 3:6");
  }
  options.master_seed = seed;
  options.fitness_kind = fitness_from_name(fitness);
  options.phase_free = phase_free;
  options.elite_count = elite;
  options.success_fitness = threshold;
  options.threads = threads;
  options.validate();

  std::string label;
  const Matrix8c target = resolve_target(target_spec, label);

  std::ofstream log_file;
  std::ostream* log = nullptr;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) throw std::runtime_error("cannot open log file: " + log_path);
    log = &log_file;
  }

  const RunResult result = synthesize(target, label, options, log);

  for (const auto& e : result.per_n) {
    std::printf("N=%d fitness=%.6g refined_fitness=%.6g cost=%.6g distance=%.3g%s\n",
                e.n_rows, e.fitness, e.refined_fitness, e.total_time, e.distance,
                e.meets_threshold ? " *" : "");
  }
  if (result.has_winner()) {
    const NResult& w = result.winner();
    std::printf("winner: N=%d cost=%.6g /J distance=%.3g hard_pulses=%d\n", w.n_rows,
                w.total_time, w.distance, w.steps.hard_pulse_count());
    std::printf("%s", format_sequence(w.steps).c_str());
  } else {
    std::printf("no candidate met the fitness threshold %.6g\n",
                options.success_fitness);
  }

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    write_run_result(out, result);
  }
  return result.has_winner() ? kExitSuccess : kExitNoCandidate;
}

int cmd_verify(const std::string& seq_path, const std::string& target_spec,
               double tol, bool phase_free_flag) {
  const PulseSequence seq = parse_sequence_file(seq_path);
  std::string label;
  const Matrix8c target = resolve_target(target_spec, label);
  const VerifyReport report = verify(seq, target, tol, phase_free_flag);
  std::printf("steps=%zu total_time=%.10g hard_pulses=%d\n", seq.steps.size(),
              report.total_time, report.hard_pulse_count);
  std::printf("raw_distance=%.6g phase_distance=%.6g phase=%.10g\n",
              report.raw_distance, report.distance, report.phase);
  std::printf("%s (tol %.3g, %s)\n", report.pass ? "PASS" : "FAIL", tol,
              phase_free_flag ? "up to global phase" : "exact");
  return report.pass ? kExitSuccess : kExitNoCandidate;
}

int cmd_cost(const std::string& seq_path) {
  const PulseSequence seq = parse_sequence_file(seq_path);
  for (const auto& step : seq.steps) {
    std::printf("%-28s cost=%.10g\n", format_step(step).c_str(), step.cost);
  }
  std::printf("total_time=%.10g hard_pulses=%d\n", seq.total_time(),
              seq.hard_pulse_count());
  return kExitSuccess;
}

int cmd_decode(const std::string& chrom_path, const std::string& topology) {
  std::ifstream in(chrom_path);
  if (!in) throw std::runtime_error("cannot open chromosome file: " + chrom_path);
  Chromosome chrom;
  try {
    chrom = parse_chromosome(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(chrom_path + ": " + e.what());
  }
  const PulseSequence seq = decode(chrom, parse_topology(topology));
  std::printf("%s", format_sequence(seq).c_str());
  std::printf("total_time=%.10g hard_pulses=%d\n", seq.total_time(),
              seq.hard_pulse_count());
  return kExitSuccess;
}

int cmd_gates() {
  std::printf("%-20s %12s %12s %8s\n", "gate", "conventional", "optimized",
              "ratio");
  for (const auto& name : gate_names()) {
    const GateSpec& spec = get_gate(name);
    std::string conventional = "-";
    std::string optimized = "-";
    std::string ratio = "-";
    char buf[40];
    if (spec.conventional_cost) {
      std::snprintf(buf, sizeof(buf), "%.6g", *spec.conventional_cost);
      conventional = buf;
    }
    if (spec.reference_sequence) {
      std::snprintf(buf, sizeof(buf), "%.6g",
                    spec.reference_sequence->total_time());
      optimized = buf;
    }
    if (spec.conventional_cost && spec.reference_sequence) {
      std::snprintf(buf, sizeof(buf), "%.4g",
                    spec.reference_sequence->total_time() / *spec.conventional_cost);
      ratio = buf;
    }
    std::printf("%-20s %12s %12s %8s   # %s\n", name.c_str(), conventional.c_str(),
                optimized.c_str(), ratio.c_str(), spec.description.c_str());
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse sequence synthesis for three coupled spins"};
  app.require_subcommand(1);

  // synthesize
  auto* synth = app.add_subcommand("synthesize",
                                   "search for a pulse sequence implementing a "
                                   "target unitary");
  std::string target_spec, rows = "3:10", fitness = "f2", out_path, log_path;
  std::string topology = "linear";
  int pop = 500, gens = 50, elite = 5, threads = 1;
  uint64_t seed = 0;
  double threshold = 1000.0;
  bool phase_free = false;
  synth->add_option("--target", target_spec, "gate name or matrix file")
      ->required();
  synth->add_option("--topology", topology, "coupling topology: full|linear");
  synth->add_option("--pop", pop, "population size (100-2000, even)");
  synth->add_option("--gens", gens, "generations per run");
  synth->add_option("--rows", rows, "row sweep low:high, within 3:10");
  synth->add_option("--seed", seed, "master seed")->envname("GATESMITH_SEED");
  synth->add_option("--fitness", fitness, "fitness function: f1|f2|f3");
  synth->add_flag("--phase-free", phase_free,
                  "match targets up to a global phase");
  synth->add_option("--elite", elite, "elite members kept per generation");
  synth->add_option("--threshold", threshold, "success fitness threshold");
  synth->add_option("--out", out_path, "write the run result to this file");
  synth->add_option("--threads", threads, "parallel row-count runs");
  synth->add_option("--log", log_path, "write per-generation log to this file");

  // verify
  auto* verify_cmd = app.add_subcommand("verify",
                                        "check a sequence file against a target");
  std::string v_seq, v_target;
  double v_tol = 1e-9;
  bool v_phase_free = false;
  verify_cmd->add_option("--sequence", v_seq, "sequence file")->required();
  verify_cmd->add_option("--target", v_target, "gate name or matrix file")
      ->required();
  verify_cmd->add_option("--tol", v_tol, "pass tolerance");
  verify_cmd->add_flag("--phase-free", v_phase_free, "compare up to global phase");

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "per-step and total time cost");
  std::string c_seq;
  cost_cmd->add_option("--sequence", c_seq, "sequence file")->required();

  // decode
  auto* decode_cmd =
      app.add_subcommand("decode", "decode a chromosome digit file");
  std::string d_chrom, d_topology = "linear";
  decode_cmd->add_option("--chromosome", d_chrom, "chromosome file")->required();
  decode_cmd->add_option("--topology", d_topology, "coupling topology");

  // gates
  app.add_subcommand("gates", "list built-in gates and their costs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (app.got_subcommand("synthesize")) {
      return cmd_synthesize(target_spec, topology, pop, gens, rows, seed, fitness,
                            phase_free, elite, threshold, out_path, threads,
                            log_path);
    }
    if (app.got_subcommand("verify")) {
      return cmd_verify(v_seq, v_target, v_tol, v_phase_free);
    }
    if (app.got_subcommand("cost")) return cmd_cost(c_seq);
    if (app.got_subcommand("decode")) return cmd_decode(d_chrom, d_topology);
    if (app.got_subcommand("gates")) return cmd_gates();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
