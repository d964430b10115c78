// Command-line surface: simulate, train, run, evaluate, replay.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "vendor/CLI11.hpp"
#include "vendor/json.hpp"

#include "sentry/engine.hpp"
#include "sentry/metrics.hpp"
#include "sentry/report.hpp"
#include "sentry/simgen.hpp"
#include "sentry/textio.hpp"

namespace fs = std::filesystem;
using namespace sentry;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kDimension = 5,
  kDeterminism = 6,
};

struct CliError {
  int code;
  std::string message;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kIo, "cannot open " + path.string()};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kIo, "cannot write " + path.string()};
  out << content;
}

ScenarioConfig load_scenario(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    if (path.extension() == ".json") return scenario_from_json(text);
    return scenario_from_text(text);
  } catch (const std::exception& e) {
    throw CliError{kFormat, path.string() + ": " + e.what()};
  }
}

std::vector<Frame> load_frames(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<Frame> frames;
  std::istringstream in(text);
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      frames.push_back(line.front() == '{' ? frame_from_jsonl(line) : frame_from_text(line));
    }
  } catch (const std::exception& e) {
    throw CliError{kFormat, path.string() + ": " + e.what()};
  }
  return frames;
}

GroundTruth load_truth(const fs::path& path) {
  try {
    return truth_from_jsonl(read_file(path));
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{kFormat, path.string() + ": " + e.what()};
  }
}

Mlp load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kIo, "cannot open " + path.string()};
  try {
    return Mlp::load(in);
  } catch (const std::exception& e) {
    throw CliError{kFormat, path.string() + ": " + e.what()};
  }
}

std::optional<std::uint64_t> seed_override() {
  if (const char* env = std::getenv("SENTRY_SEED")) return std::stoull(env);
  return std::nullopt;
}

double zone_scale(const Zone& zone, const Position& target) {
  if (const auto* c = std::get_if<Circle>(&zone)) return c->radius;
  double scale = 0.0;
  for (const auto& v : std::get<ConvexPolygon>(zone).vertices)
    scale = std::max(scale, distance(target, v));
  return scale;
}

EngineConfig engine_config_from(const ScenarioConfig& scenario, double theta,
                                std::size_t max_objects, double gate) {
  EngineConfig cfg;
  cfg.target = scenario.target;
  cfg.target_zone = scenario.target_zone;
  cfg.theta = theta;
  cfg.max_objects = max_objects;
  cfg.gate = gate;
  cfg.attrs.area_width = scenario.area_width;
  cfg.attrs.area_height = scenario.area_height;
  const double scale = zone_scale(scenario.target_zone, scenario.target);
  cfg.attrs.s1 = scale / 4.0;
  cfg.analytic_scales = {scale / 4.0, scale / 4.0};
  return cfg;
}

LabelParams label_params_from(const ScenarioConfig& scenario, std::size_t max_objects) {
  LabelParams params;
  params.max_objects = max_objects;
  params.target = scenario.target;
  params.target_zone = scenario.target_zone;
  params.attrs.area_width = scenario.area_width;
  params.attrs.area_height = scenario.area_height;
  params.attrs.s1 = zone_scale(scenario.target_zone, scenario.target) / 4.0;
  return params;
}

void write_scenario_dir(const fs::path& dir, const ScenarioConfig& cfg) {
  fs::create_directories(dir);
  const auto [frames, truth] = generate(cfg);
  std::string frames_text;
  for (const auto& f : frames) frames_text += frame_to_jsonl(f) + "\n";
  write_file(dir / "frames.jsonl", frames_text);
  write_file(dir / "truth.jsonl", truth_to_jsonl(truth));
  write_file(dir / "config.json", scenario_to_json(cfg) + "\n");
}

// --- subcommands ---------------------------------------------------------

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir, std::size_t count) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (const auto seed = seed_override()) cfg.seed = *seed;
  try {
    validate(cfg);
  } catch (const std::exception& e) {
    throw CliError{kFormat, std::string("scenario config: ") + e.what()};
  }
  if (count <= 1) {
    write_scenario_dir(out_dir, cfg);
  } else {
    const std::uint64_t base = cfg.seed;
    for (std::size_t i = 0; i < count; ++i) {
      ScenarioConfig each = cfg;
      each.seed = base + i;
      char name[32];
      std::snprintf(name, sizeof(name), "scenario_%04zu", i);
      write_scenario_dir(out_dir / name, each);
    }
  }
  return kOk;
}

std::vector<fs::path> scenario_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (fs::exists(root / "frames.jsonl")) dirs.push_back(root);
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory() && fs::exists(entry.path() / "frames.jsonl"))
        dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int cmd_train(const fs::path& scenarios_dir, const fs::path& out_path, std::uint64_t seed,
              std::size_t epochs, std::size_t hidden, std::size_t max_objects, double lr,
              std::size_t batch, unsigned jobs) {
  const auto dirs = scenario_dirs(scenarios_dir);
  if (dirs.empty()) throw CliError{kIo, "no scenarios under " + scenarios_dir.string()};
  if (const auto env_seed = seed_override()) seed = *env_seed;

  // Label scenarios in parallel; merge in directory order so the result is
  // independent of the worker count.
  std::vector<std::vector<LabeledExample>> per_scenario(dirs.size());
  std::vector<std::string> errors(dirs.size());
  std::vector<int> codes(dirs.size(), kFormat);
  const unsigned n_workers = std::max(1u, jobs);
  std::vector<std::thread> workers;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < dirs.size(); i = next.fetch_add(1)) {
        try {
          const auto scenario = load_scenario(dirs[i] / "config.json");
          const auto frames = load_frames(dirs[i] / "frames.jsonl");
          const auto truth = load_truth(dirs[i] / "truth.jsonl");
          per_scenario[i] = label_examples(frames, truth, label_params_from(scenario, max_objects));
        } catch (const CliError& e) {
          errors[i] = e.message;
          codes[i] = e.code;
        } catch (const std::invalid_argument& e) {
          errors[i] = dirs[i].string() + ": " + e.what();
          codes[i] = kDimension;
        } catch (const std::exception& e) {
          errors[i] = dirs[i].string() + ": " + e.what();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw CliError{codes[i], errors[i]};

  std::vector<LabeledExample> data;
  for (auto& chunk : per_scenario)
    for (auto& ex : chunk) data.push_back(std::move(ex));
  if (data.empty()) throw CliError{kFormat, "no labeled examples (no in-zone frames?)"};

  Mlp model = Mlp::random(kAttributesPerObject * max_objects, hidden, max_objects, seed);
  TrainConfig cfg;
  cfg.learning_rate = lr;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.batch_size = batch;
  model.train(data, cfg);

  std::ostringstream buf;
  model.save(buf);
  write_file(out_path, buf.str());
  std::cout << "trained on " << data.size() << " examples from " << dirs.size()
            << " scenarios -> " << out_path.string() << "\n";
  return kOk;
}

RunArtifacts execute_run(const fs::path& model_path, const fs::path& frames_path,
                         const fs::path& truth_path, const fs::path& config_path, double theta,
                         double gate) {
  const auto scenario = load_scenario(config_path);
  const auto frames = load_frames(frames_path);
  Mlp model = load_model(model_path);
  if (model.input_dim() != kAttributesPerObject * model.output_dim())
    throw CliError{kDimension, "model dimensions inconsistent with the attribute layout"};

  EngineConfig cfg = engine_config_from(scenario, theta, model.output_dim(), gate);
  if (const auto seed = seed_override()) cfg.retrain.seed = *seed;
  Engine engine(cfg, std::move(model));

  GroundTruth truth;
  TruthOracle oracle = nullptr;
  if (!truth_path.empty()) {
    truth = load_truth(truth_path);
    engine.attach_truth_labels(truth);
    std::vector<ActReport> acts;
    for (const auto& obj : truth.objects) {
      if (!obj.act_time) continue;
      for (const auto& s : obj.trajectory)
        if (s.timestamp == *obj.act_time) { acts.push_back({s.position, *obj.act_time}); break; }
    }
    oracle = [acts](double t_prev, double t_now) {
      std::vector<ActReport> hit;
      for (const auto& a : acts)
        if (t_prev < a.act_time && a.act_time <= t_now) hit.push_back(a);
      return hit;
    };
  }

  RunArtifacts artifacts;
  artifacts.report = engine.run(frames, oracle);
  artifacts.model_path = model_path.string();
  artifacts.frames_path = frames_path.string();
  artifacts.truth_path = truth_path.string();
  artifacts.config_path = config_path.string();
  artifacts.theta = theta;
  artifacts.gate = gate;
  artifacts.seed = scenario.seed;
  return artifacts;
}

int cmd_run(const fs::path& model_path, const fs::path& frames_path, fs::path truth_path,
            fs::path config_path, double theta, double gate, const fs::path& out_path) {
  if (config_path.empty()) config_path = frames_path.parent_path() / "config.json";
  auto artifacts = execute_run(model_path, frames_path, truth_path, config_path, theta, gate);
  const fs::path csv_path = out_path.parent_path() / (out_path.stem().string() + "_scores.csv");
  artifacts.scores_csv = csv_path.string();
  write_file(csv_path, scores_to_csv(artifacts.report));
  write_file(out_path, run_to_json(artifacts) + "\n");
  std::cout << "alerts=" << artifacts.report.alerts.size()
            << " misses=" << artifacts.report.misses.size() << " -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_evaluate(const fs::path& reports_dir, const fs::path& out_path) {
  std::vector<fs::path> report_files;
  if (fs::is_directory(reports_dir)) {
    for (const auto& entry : fs::recursive_directory_iterator(reports_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json" &&
          entry.path().filename() != "config.json" && entry.path().filename() != "eval.json")
        report_files.push_back(entry.path());
  }
  std::sort(report_files.begin(), report_files.end());
  if (report_files.empty()) throw CliError{kIo, "no reports under " + reports_dir.string()};

  std::vector<EvalRow> rows;
  double theta = 0.7;
  for (const auto& path : report_files) {
    RunArtifacts artifacts;
    try {
      artifacts = run_from_json(read_file(path));
    } catch (const CliError&) {
      throw;
    } catch (const std::exception& e) {
      throw CliError{kFormat, path.string() + ": " + e.what()};
    }
    theta = artifacts.theta;
    for (const auto& obj : artifacts.report.objects) {
      if (!obj.hostile) continue;  // unlabeled object (run without truth)
      EvalRow row;
      row.max_p = obj.max_p;
      row.hostile = *obj.hostile;
      row.alerted = obj.first_alert_time.has_value();
      if (row.alerted && obj.zone_entry_time)
        row.time_to_alert = *obj.first_alert_time - *obj.zone_entry_time;
      rows.push_back(row);
    }
  }
  if (rows.empty()) throw CliError{kFormat, "reports carry no truth-labeled objects"};

  EvalReport report;
  try {
    report = evaluate(rows, theta, report_files.size());
  } catch (const std::exception& e) {
    throw CliError{kFormat, std::string("evaluate: ") + e.what()};
  }
  nlohmann::json j{{"roc_auc", report.roc_auc},
                   {"tp", report.tp},
                   {"fp", report.fp},
                   {"tn", report.tn},
                   {"fn", report.fn},
                   {"precision", report.precision},
                   {"recall", report.recall},
                   {"mean_time_to_alert", report.mean_time_to_alert},
                   {"theta", theta},
                   {"n_scenarios", report.n_scenarios},
                   {"n_objects", report.n_objects}};
  write_file(out_path, j.dump(2) + "\n");
  std::cout << "auc=" << report.roc_auc << " tp=" << report.tp << " fp=" << report.fp
            << " tn=" << report.tn << " fn=" << report.fn << " -> " << out_path.string() << "\n";
  return kOk;
}

int cmd_replay(const std::vector<fs::path>& report_paths, unsigned jobs) {
  std::vector<std::string> failures(report_paths.size());
  std::vector<std::string> errors(report_paths.size());
  const unsigned n_workers = std::max(1u, jobs);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < report_paths.size(); i = next.fetch_add(1)) {
        try {
          const auto recorded = run_from_json(read_file(report_paths[i]));
          const auto fresh =
              execute_run(recorded.model_path, recorded.frames_path, recorded.truth_path,
                          recorded.config_path, recorded.theta, recorded.gate);
          if (event_stream(fresh.report) != event_stream(recorded.report))
            failures[i] = report_paths[i].string();
        } catch (const CliError& e) {
          errors[i] = e.message;
        } catch (const std::exception& e) {
          errors[i] = report_paths[i].string() + ": " + e.what();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& err : errors)
    if (!err.empty()) throw CliError{kFormat, err};
  for (const auto& fail : failures)
    if (!fail.empty()) {
      std::cerr << "determinism audit failed: " << fail << "\n";
      return kDeterminism;
    }
  std::cout << "replayed " << report_paths.size() << " report(s): events identical\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hostile-intent detection lab"};
  app.require_subcommand(1);

  std::string config_path, out_path, scenarios_dir, model_path, frames_path, truth_path;
  std::string reports_dir, report_path;
  std::size_t count = 1, epochs = 20, hidden = 16, max_objects = 8, batch = 16;
  std::uint64_t seed = 1;
  double theta = 0.7, lr = 0.05, gate = 60.0;
  unsigned jobs = 1;

  auto* simulate = app.add_subcommand("simulate", "generate synthetic scenarios");
  simulate->add_option("--config", config_path, "scenario config (.json or key=value text)")->required();
  simulate->add_option("--out", out_path, "output directory")->required();
  simulate->add_option("--count", count, "number of scenarios (seeds increment)");

  auto* train = app.add_subcommand("train", "train the classifier on simulated scenarios");
  train->add_option("--scenarios", scenarios_dir, "directory of simulated scenarios")->required();
  train->add_option("--out", out_path, "model checkpoint path")->required();
  train->add_option("--seed", seed, "training seed");
  train->add_option("--epochs", epochs, "training epochs");
  train->add_option("--hidden", hidden, "hidden layer width");
  train->add_option("--max-objects", max_objects, "classifier object slots");
  train->add_option("--lr", lr, "learning rate");
  train->add_option("--batch", batch, "mini-batch size");
  train->add_option("--jobs", jobs, "labeling worker threads");

  auto* run = app.add_subcommand("run", "run the detection engine over frames");
  run->add_option("--model", model_path, "model checkpoint")->required();
  run->add_option("--frames", frames_path, "frames.jsonl")->required();
  run->add_option("--truth", truth_path, "truth.jsonl (enables the act oracle)");
  run->add_option("--config", config_path, "scenario config (default: sibling config.json)");
  run->add_option("--theta", theta, "alert threshold");
  run->add_option("--gate", gate, "association gate, meters");
  run->add_option("--out", out_path, "report path")->required();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "aggregate run reports into metrics");
  evaluate_cmd->add_option("--reports", reports_dir, "directory of run reports")->required();
  evaluate_cmd->add_option("--out", out_path, "eval report path")->required();

  auto* replay = app.add_subcommand("replay", "re-execute runs and audit determinism");
  replay->add_option("--report", report_path, "one run report");
  replay->add_option("--reports", reports_dir, "directory of run reports");
  replay->add_option("--jobs", jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, out_path, count);
    if (train->parsed())
      return cmd_train(scenarios_dir, out_path, seed, epochs, hidden, max_objects, lr, batch, jobs);
    if (run->parsed())
      return cmd_run(model_path, frames_path, truth_path, config_path, theta, gate, out_path);
    if (evaluate_cmd->parsed()) return cmd_evaluate(reports_dir, out_path);
    if (replay->parsed()) {
      std::vector<fs::path> paths;
      if (!report_path.empty()) paths.push_back(report_path);
      if (!reports_dir.empty()) {
        for (const auto& entry : fs::recursive_directory_iterator(reports_dir))
          if (entry.is_regular_file() && entry.path().extension() == ".json" &&
              entry.path().filename() != "config.json" && entry.path().filename() != "eval.json")
            paths.push_back(entry.path());
        std::sort(paths.begin(), paths.end());
      }
      if (paths.empty()) throw CliError{kUsage, "replay needs --report or --reports"};
      return cmd_replay(paths, jobs);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDimension;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormat;
  }
  return kUsage;
}
