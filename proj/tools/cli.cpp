#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dada/config.hpp"
#include "dada/serialization.hpp"

namespace dada {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string preset = "moons";
  std::string method;
};

Method method_arg(const std::string& name) {
  try {
    return parse_method(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig resolve_config(const Options& opt, bool config_required) {
  RunConfig cfg;
  if (!opt.config.empty()) {
    cfg = load_config(opt.config);
  } else if (config_required) {
    throw ConfigError("--config is required");
  }
  if (opt.seed) cfg.set_seed(*opt.seed);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  std::filesystem::create_directories(cfg.output_dir);
  return cfg;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

json dataset_summary(const RunConfig& cfg, const PreparedData& data) {
  const char* source = cfg.source == DataSource::csv ? "csv" : cfg.source == DataSource::moons ? "moons" : "moons100";
  json j{{"source", source},
         {"num_users", data.dataset.num_users()},
         {"feature_dim", data.dataset.feature_dim},
         {"num_stumps", data.stumps.size()}};
  if (data.oracle) j["oracle_mean_neighbors"] = data.oracle->mean_neighbor_count();
  return j;
}

json accuracy_json(const MethodResult& r) {
  return json{{"method", method_name(r.method)},
              {"train_acc", r.train.mean},
              {"test_acc", r.test.mean},
              {"per_user_test_acc", r.test.per_user}};
}

int cmd_gen_data(const Options& opt, std::ostream& out) {
  RunConfig cfg;
  if (!opt.config.empty()) {
    cfg = resolve_config(opt, false);
  } else {
    if (opt.preset == "moons") {
      cfg.source = DataSource::moons;
      cfg.moons = MoonsConfig::standard();
    } else if (opt.preset == "moons100") {
      cfg.source = DataSource::moons100;
      cfg.moons = MoonsConfig::per_user_angles();
    } else {
      throw ConfigError("--preset must be moons or moons100");
    }
    cfg.set_seed(opt.seed.value_or(0));
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    std::filesystem::create_directories(cfg.output_dir);
  }
  if (cfg.source == DataSource::csv) throw ConfigError("gen-data needs a moons data source");
  cfg.validate();
  const MoonsData data = generate_moons(cfg.moons);
  write_csv(data.dataset, cfg.output_dir / "data.csv");
  write_json(oracle_graph(data.angles_deg, cfg.moons.oracle_sigma, cfg.moons.oracle_drop_threshold),
             cfg.output_dir / "oracle_graph.json");
  write_json(json{{"seed", cfg.seed}, {"angles_deg", data.angles_deg}, {"feature_ranges", data.feature_ranges}},
             cfg.output_dir / "meta.json");
  out << "wrote " << (cfg.output_dir / "data.csv").string() << '\n';
  return 0;
}

int cmd_run(const Options& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt, true);
  if (!opt.method.empty()) cfg.method = method_arg(opt.method);
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const std::filesystem::path ckpt_dir = cfg.output_dir / "checkpoints";

  MethodResult result;
  if (cfg.method == Method::dada_learned || cfg.method == Method::dada_oracle) {
    std::filesystem::create_directories(ckpt_dir);
    const PhaseCallback save = [&](std::size_t phase, const Network& net) {
      char name[32];
      std::snprintf(name, sizeof name, "phase_%05zu.json", phase);
      write_json(json(Checkpoint{phase, net.state(), net.graph(), net.ledger()}), ckpt_dir / name);
    };
    result.method = cfg.method;
    if (cfg.method == Method::dada_learned) {
      result.run = run_alternating(data.dataset, data.stumps, cfg.hyper, cfg.schedule, nullptr, save);
    } else {
      if (!data.oracle) throw ConfigError("dada_oracle needs an oracle graph");
      result.run = run_fixed_graph(data.dataset, data.stumps, *data.oracle, cfg.hyper,
                                   cfg.schedule.total_phases * cfg.schedule.model_steps_per_phase,
                                   cfg.schedule.seed, std::max<std::size_t>(cfg.schedule.model_steps_per_phase, 1),
                                   save);
    }
    result.boost_models = result.run->state.models;
    result.train = average_accuracy(result.boost_models, data.dataset, data.stumps, Split::train);
    result.test = average_accuracy(result.boost_models, data.dataset, data.stumps, Split::test);
    result.run->log.write_csv(cfg.output_dir / "metrics.csv");
    write_json(json(result.run->graph), cfg.output_dir / "graph.json");
  } else {
    result = run_method(cfg.method, data.dataset, data.stumps, cfg.hyper, cfg.schedule,
                        data.oracle ? &*data.oracle : nullptr);
  }

  json summary = accuracy_json(result);
  summary["seed"] = cfg.seed;
  summary["hyper"] = cfg.hyper;
  summary["schedule"] = cfg.schedule;
  summary["dataset"] = dataset_summary(cfg, data);
  if (result.run) {
    summary["ledger"] = result.run->ledger;
    summary["model_steps"] = result.run->log.rows.back().global_step;
    summary["graph_activations"] = result.run->graph_activations;
    summary["edges"] = result.run->graph.edge_count();
    summary["mean_neighbors"] = result.run->graph.mean_neighbor_count();
  }
  write_json(summary, cfg.output_dir / "summary.json");
  out << method_name(result.method) << " test accuracy " << fmt(result.test.mean) << '\n';
  return 0;
}

int cmd_baseline(const Options& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt, true);
  const PreparedData data = prepare_data(cfg);
  std::vector<Method> methods;
  if (opt.method.empty() || opt.method == "all") {
    methods = {Method::local_boost, Method::global_boost, Method::local_linear, Method::global_linear};
  } else {
    methods = {method_arg(opt.method)};
  }
  std::string csv = "method,train_acc,test_acc\n";
  json rows = json::array();
  for (Method m : methods) {
    const MethodResult r = run_method(m, data.dataset, data.stumps, cfg.hyper, cfg.schedule,
                                      data.oracle ? &*data.oracle : nullptr);
    csv += std::string(method_name(m)) + ',' + fmt(r.train.mean) + ',' + fmt(r.test.mean) + '\n';
    rows.push_back(accuracy_json(r));
    out << method_name(m) << " test accuracy " << fmt(r.test.mean) << '\n';
  }
  write_text(cfg.output_dir / "baselines.csv", csv);
  write_json(json{{"seed", cfg.seed}, {"hyper", cfg.hyper}, {"dataset", dataset_summary(cfg, data)}, {"results", rows}},
             cfg.output_dir / "summary.json");
  return 0;
}

int cmd_cv(const Options& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt, true);
  if (!opt.method.empty()) cfg.method = method_arg(opt.method);
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const CvResult cv = cross_validate(data.dataset, data.stumps, cfg.cv, cfg.method, cfg.hyper, cfg.schedule,
                                     data.oracle ? &*data.oracle : nullptr);
  std::string csv = "beta,mu,lambda,accuracy\n";
  for (const CvPoint& p : cv.table) {
    csv += fmt(p.beta) + ',' + fmt(p.mu) + ',' + fmt(p.lambda) + ',' + fmt(p.accuracy) + '\n';
  }
  write_text(cfg.output_dir / "cv.csv", csv);
  write_json(json{{"method", method_name(cfg.method)},
                  {"seed", cfg.seed},
                  {"best", cv.best},
                  {"best_accuracy", cv.best_accuracy},
                  {"folds", cfg.cv.folds}},
             cfg.output_dir / "summary.json");
  out << "best beta=" << fmt(cv.best.beta) << " mu=" << fmt(cv.best.mu1) << " lambda=" << fmt(cv.best.lambda)
      << " accuracy " << fmt(cv.best_accuracy) << '\n';
  return 0;
}

int cmd_sweep_kappa(const Options& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt, true);
  const PreparedData data = prepare_data(cfg);
  const KappaSweep sweep = sweep_kappa(data.dataset, data.stumps, cfg.hyper, cfg.kappa_sweep);
  std::string csv = "kappa,rounds,bits,edge_sync_bits,final_h,capped\n";
  json rows = json::array();
  for (const KappaRow& r : sweep.rows) {
    csv += std::to_string(r.kappa) + ',' + std::to_string(r.rounds) + ',' + std::to_string(r.bits) + ',' +
           std::to_string(r.edge_sync_bits) + ',' + fmt(r.final_h) + ',' + (r.capped ? "capped" : "reached") + '\n';
    rows.push_back(json{{"kappa", r.kappa}, {"rounds", r.rounds}, {"bits", r.bits}, {"capped", r.capped}});
    out << "kappa=" << r.kappa << " rounds=" << r.rounds << " bits=" << r.bits << (r.capped ? " (capped)" : "")
        << '\n';
  }
  write_text(cfg.output_dir / "sweep_kappa.csv", csv);
  write_json(json{{"seed", cfg.seed},
                  {"hyper", cfg.hyper},
                  {"h_initial", sweep.h_initial},
                  {"h_star", sweep.h_star},
                  {"target_h", sweep.target_h},
                  {"broadcast_all_weights_bits", broadcast_all_weights_bits(data.dataset.num_users(), cfg.hyper.float_bits)},
                  {"rows", rows}},
             cfg.output_dir / "summary.json");
  return 0;
}

int cmd_sweep_lambda(const Options& opt, std::ostream& out) {
  RunConfig cfg = resolve_config(opt, true);
  const PreparedData data = prepare_data(cfg);
  const std::vector<LambdaRow> rows = sweep_lambda(data.dataset, data.stumps, cfg.hyper, cfg.schedule, cfg.lambda_sweep);
  std::string csv = "lambda,edges,mean_degree,test_acc,h\n";
  for (const LambdaRow& r : rows) {
    csv += fmt(r.lambda) + ',' + std::to_string(r.edges) + ',' + fmt(r.mean_degree) + ',' + fmt(r.test_acc) + ',' +
           fmt(r.h) + '\n';
    out << "lambda=" << fmt(r.lambda) << " edges=" << r.edges << " test_acc=" << fmt(r.test_acc) << '\n';
  }
  write_text(cfg.output_dir / "sweep_lambda.csv", csv);
  write_json(json{{"seed", cfg.seed}, {"hyper", cfg.hyper}, {"lambdas", cfg.lambda_sweep}},
             cfg.output_dir / "summary.json");
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized collaborative boosting simulator", "dada"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool with_method) {
    sub->add_option("-c,--config", opt.config, "config file (.toml or .json)");
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("-o,--out", opt.out, "output directory");
    if (with_method) sub->add_option("-m,--method", opt.method, "method name");
  };
  CLI::App* gen = app.add_subcommand("gen-data", "generate a Moons dataset and its oracle graph");
  add_common(gen, false);
  gen->add_option("--preset", opt.preset, "moons or moons100");
  CLI::App* run = app.add_subcommand("run", "train one method and write metrics");
  add_common(run, true);
  CLI::App* baseline = app.add_subcommand("baseline", "run the baselines (or one with --method)");
  add_common(baseline, true);
  CLI::App* cv = app.add_subcommand("cv", "cross-validate the configured method");
  add_common(cv, true);
  CLI::App* kappa = app.add_subcommand("sweep-kappa", "communication of graph learning per kappa");
  add_common(kappa, false);
  CLI::App* lambda = app.add_subcommand("sweep-lambda", "learned graph per lambda");
  add_common(lambda, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(opt, out);
    if (run->parsed()) return cmd_run(opt, out);
    if (baseline->parsed()) return cmd_baseline(opt, out);
    if (cv->parsed()) return cmd_cv(opt, out);
    if (kappa->parsed()) return cmd_sweep_kappa(opt, out);
    if (lambda->parsed()) return cmd_sweep_lambda(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace dada
