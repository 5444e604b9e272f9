// mvtlab: Taguchi vs. evolutionary optimisation on simulated conversion landscapes.
//
//   mvtlab list-presets
//   mvtlab run setting2-linear --reps 20 --out results/setting2
//   mvtlab run my.cfg --traffic 1000,10000,100000 --seed 7
//   mvtlab validate-array data/arrays/L36.oa --merge 1:2,4:5,7:8
//   mvtlab trace mixed-linear --traffic 100000 --rep 3

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvtlab/config.hpp"
#include "mvtlab/harness.hpp"
#include "mvtlab/report.hpp"
#include "mvtlab/taguchi.hpp"

namespace {

int list_presets() {
  for (const auto& name : mvt::preset_names()) {
    const auto cfg = mvt::preset(name);
    std::cout << name << "\t" << mvt::to_string(cfg.kind) << "\t" << cfg.space.to_string() << "\t"
              << mvt::to_string(cfg.mode) << "\tarray " << cfg.array << "\n";
  }
  return 0;
}

int validate_array(const std::string& source, const std::string& merges) {
  mvt::ExperimentConfig scratch;
  scratch.array = source;
  if (!merges.empty()) {
    // Reuse the config parser's merge syntax.
    scratch.merges = mvt::parse_config("merge = " + merges).merges;
  }
  mvt::OrthogonalArray array;
  try {
    array = mvt::build_array(scratch);
  } catch (const std::invalid_argument& e) {
    std::cout << source << ": INVALID\n" << e.what() << "\n";
    return 1;
  }
  const auto report = mvt::validate(array);
  std::cout << source << ": " << array.row_count() << " rows, levels [";
  for (std::size_t i = 0; i < array.column_levels.size(); ++i) {
    std::cout << (i ? "," : "") << array.column_levels[i];
  }
  std::cout << "]\n" << report.summary();
  std::cout << (report.valid() ? "valid\n" : "INVALID\n");
  return report.valid() ? 0 : 1;
}

struct RunOptions {
  std::string source;
  long long seed = -1;
  int reps = 0;
  std::string traffic;
  bool fixed_evaluator = false;
  std::string out;
  unsigned jobs = 0;
};

mvt::ExperimentConfig configure(const RunOptions& opt) {
  mvt::ExperimentConfig cfg = mvt::resolve_config(opt.source);
  if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.reps > 0) cfg.repetitions = opt.reps;
  if (!opt.traffic.empty()) cfg.traffic = mvt::parse_traffic_list(opt.traffic);
  if (opt.fixed_evaluator) cfg.fixed_evaluator = true;
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (cfg.output_dir.empty()) cfg.output_dir = "results/" + cfg.name;
  cfg.validate();
  return cfg;
}

int run(const RunOptions& opt) {
  const mvt::ExperimentConfig cfg = configure(opt);
  const mvt::Experiment experiment(cfg);
  std::cerr << "running " << cfg.name << " (" << mvt::to_string(cfg.kind) << ", " << cfg.repetitions
            << " repetitions, " << cfg.traffic.size() << " traffic points)\n";
  const auto start = std::chrono::steady_clock::now();
  const mvt::ResultSeries series = mvt::run_experiment(experiment, opt.jobs);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(cfg.output_dir);
  const std::string csv = (dir / (cfg.name + ".csv")).string();
  const std::string svg = (dir / (cfg.name + ".svg")).string();
  const std::string evaluators = (dir / (cfg.name + ".evaluators.json")).string();
  const std::string manifest = (dir / (cfg.name + ".manifest.json")).string();

  mvt::emit_csv(series, csv);
  mvt::emit_svg(series, svg);
  std::string evaluator_json = "[\n";
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    evaluator_json += (rep ? ",\n" : "") + experiment.evaluator_for(rep).to_json();
    if (cfg.fixed_evaluator) break;
  }
  evaluator_json += "\n]\n";
  mvt::write_text_file(evaluators, evaluator_json);
  mvt::write_text_file(manifest, mvt::render_manifest(cfg, {csv, svg, evaluators}));

  std::cout << mvt::render_csv(series);
  std::cerr << "wrote " << csv << ", " << svg << " and manifest in " << seconds << " s\n";
  return 0;
}

int trace(const RunOptions& opt, long long total, int rep) {
  RunOptions adjusted = opt;
  adjusted.traffic = std::to_string(total);
  const mvt::ExperimentConfig cfg = configure(adjusted);
  const mvt::Experiment experiment(cfg);
  const mvt::Evaluator ev = experiment.evaluator_for(rep);
  mvt::Rng rng(experiment.task_seed(rep, 0, 2));
  const auto arm = mvt::run_evolution_arm(experiment, ev, total, rng);
  const std::string text = mvt::render_generation_csv(arm.run, ev);
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    mvt::write_text_file(opt.out, text);
  }
  std::cerr << "winner " << arm.run.winner.to_string() << " true CR " << arm.winner_cr << " (P(beat control) "
            << arm.run.winner_pbc << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Taguchi orthogonal arrays vs. evolutionary optimisation on simulated conversion landscapes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mvt::tool_version());

  RunOptions opt;
  auto* run_cmd = app.add_subcommand("run", "Run a preset or config file and write CSV, SVG and a manifest");
  run_cmd->add_option("source", opt.source, "Preset name or config file")->required();
  run_cmd->add_option("--seed", opt.seed, "Master seed override");
  run_cmd->add_option("--reps", opt.reps, "Repetitions override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--traffic", opt.traffic, "Comma-separated total traffic values, increasing");
  run_cmd->add_flag("--fixed-evaluator", opt.fixed_evaluator, "Use one ground-truth landscape for every repetition");
  run_cmd->add_option("--out", opt.out, "Output directory (default results/<name>)");
  run_cmd->add_option("--jobs,-j", opt.jobs, "Worker threads (0 = all cores)");

  std::string array_source;
  std::string merges;
  auto* validate_cmd = app.add_subcommand("validate-array", "Check an orthogonal array file or bundled array");
  validate_cmd->add_option("file", array_source, "Array file or bundled name (L4, L9, L16, L36)")->required();
  validate_cmd->add_option("--merge", merges, "Column merges applied first, e.g. 1:2,4:5");

  auto* list_cmd = app.add_subcommand("list-presets", "List bundled experiment presets");

  std::string show_source;
  auto* show_cmd = app.add_subcommand("show-config", "Print the canonical text of a preset or config file");
  show_cmd->add_option("source", show_source, "Preset name or config file")->required();

  RunOptions trace_opt;
  long long trace_total = 100000;
  int trace_rep = 0;
  auto* trace_cmd = app.add_subcommand("trace", "Per-generation CSV of one evolution run");
  trace_cmd->add_option("source", trace_opt.source, "Preset name or config file")->required();
  trace_cmd->add_option("--traffic", trace_total, "Total traffic")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--rep", trace_rep, "Repetition whose evaluator is used")->check(CLI::NonNegativeNumber);
  trace_cmd->add_option("--seed", trace_opt.seed, "Master seed override");
  trace_cmd->add_option("--out", trace_opt.out, "Output CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(opt);
    if (*validate_cmd) return validate_array(array_source, merges);
    if (*list_cmd) return list_presets();
    if (*show_cmd) {
      std::cout << mvt::resolve_config(show_source).to_text();
      return 0;
    }
    if (*trace_cmd) return trace(trace_opt, trace_total, trace_rep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
