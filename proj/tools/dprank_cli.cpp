// Command-line surface for the debiased ranking toolkit:
// ingest, train, evaluate, sweep, simulate, analyze-exposure, mix,
// export-embeddings.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dprank/dataset.hpp"
#include "dprank/eval.hpp"
#include "dprank/exposure.hpp"
#include "dprank/io.hpp"
#include "dprank/loopsim.hpp"
#include "dprank/rng.hpp"
#include "dprank/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dprank;

namespace {

std::string default_out_root() {
  if (const char* env = std::getenv("DPRANK_OUT_ROOT")) return env;
  return "runs";
}

struct ModelFlags {
  Hyperparams hp;
  std::string loss_name = "dpr";
  std::string neg_strategy = "uniform";
  bool no_resample = false;
  bool no_ufn = false;
  int patience = 10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--loss", loss_name,
                    "bpr|dpr|dpr-|ubpr|relmf|mfdu (dpr- is dpr without UFN)");
    cmd->add_option("--alpha", hp.alpha, "exposure weight, [0,6]");
    cmd->add_option("--beta", hp.beta, "UFN strength");
    cmd->add_flag("--no-ufn", no_ufn, "run dpr without the UFN plugin");
    cmd->add_option("--dim", hp.dim, "embedding dimension");
    cmd->add_option("--lr", hp.lr, "learning rate");
    cmd->add_option("--l2", hp.l2, "L2 regularization weight");
    cmd->add_option("--epochs", hp.epochs, "max training epochs");
    cmd->add_option("--batch-size", hp.batch_size, "mini-batch size");
    cmd->add_option("--negatives", hp.num_negatives,
                    "negative samples per positive");
    cmd->add_option("--neg-strategy", neg_strategy, "uniform|score_sorted");
    cmd->add_flag("--no-resample", no_resample,
                  "keep the same negatives every epoch");
    cmd->add_option("--seed", hp.seed, "master seed");
    cmd->add_option("--patience", patience, "early-stopping patience");
  }

  void resolve() {
    hp.loss = loss_kind_from_string(loss_name);
    if (no_ufn && hp.loss == LossKind::dpr) hp.loss = LossKind::dpr_minus;
  }

  SamplerConfig sampler() const {
    SamplerConfig cfg;
    cfg.num_negatives = hp.num_negatives;
    cfg.resample_each_epoch = !no_resample;
    cfg.strategy = neg_strategy == "score_sorted" ? NegStrategy::score_sorted
                                                  : NegStrategy::uniform;
    cfg.seed = hp.seed;
    return cfg;
  }

  json to_json() const {
    json j;
    j["loss"] = to_string(hp.loss);
    j["alpha"] = hp.alpha;
    j["beta"] = hp.beta;
    j["dim"] = hp.dim;
    j["lr"] = hp.lr;
    j["l2"] = hp.l2;
    j["epochs"] = hp.epochs;
    j["batch_size"] = hp.batch_size;
    j["negatives"] = hp.num_negatives;
    j["neg_strategy"] = neg_strategy;
    j["resample"] = !no_resample;
    j["seed"] = hp.seed;
    j["patience"] = patience;
    return j;
  }
};

void write_config(const std::string& dir, const json& cfg) {
  fs::create_directories(dir);
  std::ofstream(dir + "/config.json") << cfg.dump(2) << "\n";
}

void write_eval_csv(const std::string& path, const std::string& loss,
                    double alpha, double beta, const EvalConfig& cfg,
                    const EvalReport& report) {
  std::ofstream out(path);
  out << "loss,alpha,beta,K,protocol,recall,ndcg,arp,tap,seed\n";
  out << loss << "," << alpha << "," << beta << "," << cfg.k << ","
      << (cfg.protocol == EvalProtocol::full_rank ? "full_rank" : "sampled99")
      << "," << report.recall << "," << report.ndcg << "," << report.arp << ","
      << report.tap << "," << cfg.seed << "\n";
}

int run_ingest(const std::string& input, const std::string& format,
               std::string delim, const std::vector<int>& columns,
               bool skip_header, double threshold, std::uint64_t seed,
               const std::string& out_dir) {
  char d = format == "csv" ? ',' : '\t';
  if (!delim.empty()) d = delim[0];
  ColumnMap map;
  map.user = columns[0];
  map.item = columns[1];
  map.value = columns[2];

  auto raw = load_ratings(input, d, map, skip_header);
  auto ids = reindex(raw);
  const int m = static_cast<int>(ids.user_to_dense.size());
  const int n = static_cast<int>(ids.item_to_dense.size());
  auto ds = binarize(raw, threshold, m, n);
  auto split = leave_one_out_split(ds, seed);
  save_split(out_dir, split, seed);

  // persist the raw->dense id map alongside the split
  json idmap;
  for (const auto& [raw_id, dense] : ids.user_to_dense)
    idmap["users"][std::to_string(raw_id)] = dense;
  for (const auto& [raw_id, dense] : ids.item_to_dense)
    idmap["items"][std::to_string(raw_id)] = dense;
  std::ofstream(out_dir + "/idmap.json") << idmap.dump() << "\n";

  json cfg{{"command", "ingest"},   {"input", input},
           {"threshold", threshold}, {"seed", seed},
           {"skip_header", skip_header}, {"malformed_lines", raw.malformed_lines}};
  write_config(out_dir, cfg);
  std::cout << "ingested " << ds.num_positives() << " positives (" << m << " users, "
            << n << " items), skipped_users=" << split.skipped_users << "\n";
  return 0;
}

int run_train(const std::string& data_dir, ModelFlags& flags,
              const std::string& out_dir) {
  flags.resolve();
  auto split = load_split(data_dir);
  fs::create_directories(out_dir);

  auto result =
      train_with_early_stopping(split, flags.hp, flags.sampler(), flags.patience);

  std::ofstream metrics(out_dir + "/metrics.csv");
  metrics << "epoch,train_loss,val_recall,val_ndcg\n";
  for (const auto& rec : result.history)
    metrics << rec.epoch << "," << rec.train_loss << "," << rec.val_recall
            << "," << rec.val_ndcg << "\n";

  save_checkpoint(out_dir + "/checkpoint.bin", result.params);
  json cfg = flags.to_json();
  cfg["command"] = "train";
  cfg["data_dir"] = data_dir;
  cfg["best_epoch"] = result.best_epoch;
  cfg["best_val_ndcg"] = result.best_val_ndcg;
  write_config(out_dir, cfg);
  std::cout << "trained " << to_string(flags.hp.loss) << ": best epoch "
            << result.best_epoch << ", val NDCG@5 " << result.best_val_ndcg
            << "\n";
  return 0;
}

int run_evaluate(const std::string& data_dir, const std::string& checkpoint,
                 EvalConfig cfg, const std::string& protocol,
                 const std::string& out_path) {
  cfg.protocol = protocol == "sampled99" ? EvalProtocol::sampled99
                                         : EvalProtocol::full_rank;
  auto split = load_split(data_dir);
  auto params = load_checkpoint(checkpoint);
  auto report = evaluate(params, split, cfg, popularity(split.train));
  write_eval_csv(out_path, "checkpoint", 0, 0, cfg, report);
  std::cout << "recall@" << cfg.k << "=" << report.recall << " ndcg@" << cfg.k
            << "=" << report.ndcg << " arp=" << report.arp
            << " tap=" << report.tap << " users=" << report.users_evaluated
            << "\n";
  return 0;
}

int run_sweep(const std::string& data_dir, ModelFlags& flags,
              const std::string& param, const std::vector<double>& grid,
              int eval_k, const std::string& out_dir) {
  if (grid.empty()) throw std::runtime_error("sweep: empty grid");
  flags.resolve();
  auto split = load_split(data_dir);
  fs::create_directories(out_dir);
  std::ofstream out(out_dir + "/sweep.csv");
  out << "param,value,loss,recall,ndcg,arp,tap\n";

  for (double value : grid) {
    Hyperparams hp = flags.hp;
    if (param == "alpha") hp.alpha = value;
    else if (param == "beta") hp.beta = value;
    else throw std::runtime_error("sweep: param must be alpha or beta");

    auto result = train_with_early_stopping(split, hp, flags.sampler(),
                                            flags.patience);
    EvalConfig ecfg;
    ecfg.k = eval_k;
    ecfg.protocol = EvalProtocol::sampled99;
    ecfg.seed = hp.seed;
    auto report =
        evaluate(result.params, split, ecfg, popularity(split.train));
    out << param << "," << value << "," << to_string(hp.loss) << ","
        << report.recall << "," << report.ndcg << "," << report.arp << ","
        << report.tap << "\n";
    std::cout << param << "=" << value << " recall@" << eval_k << "="
              << report.recall << "\n";
  }
  json cfg = flags.to_json();
  cfg["command"] = "sweep";
  cfg["param"] = param;
  cfg["grid"] = grid;
  write_config(out_dir, cfg);
  return 0;
}

int run_simulate(ModelFlags& flags, SimConfig sim,
                 std::vector<std::uint64_t> seeds, const std::string& out_dir) {
  flags.resolve();
  sim.hp = flags.hp;
  sim.sampler = flags.sampler();
  fs::create_directories(out_dir);
  for (auto seed : seeds) {
    SimConfig run_cfg = sim;
    run_cfg.seed = seed;
    auto state = run_simulation(run_cfg);
    std::ofstream out(out_dir + "/" + to_string(flags.hp.loss) + "_seed" +
                      std::to_string(seed) + ".csv");
    out << "loop,new,cumulative,tap,arp\n";
    for (const auto& rec : state.per_loop)
      out << rec.loop << "," << rec.new_interactions << "," << rec.cumulative
          << "," << rec.tap_of_recs << "," << rec.arp_of_recs << "\n";
    std::cout << to_string(flags.hp.loss) << " seed " << seed << ": "
              << (state.aborted ? "aborted" : "done") << ", final cumulative "
              << (state.per_loop.empty() ? 0 : state.per_loop.back().cumulative)
              << "\n";
  }
  json cfg = flags.to_json();
  cfg["command"] = "simulate";
  cfg["loops"] = sim.loops;
  cfg["epochs_per_loop"] = sim.epochs_per_loop;
  cfg["seeds"] = seeds;
  write_config(out_dir, cfg);
  return 0;
}

int run_analyze(const std::string& data_dir, int groups,
                const std::string& out_dir) {
  auto split = load_split(data_dir);
  auto pop = popularity(split.train);
  fs::create_directories(out_dir);

  std::ofstream items(out_dir + "/items.csv");
  items << "item_id,count,normalized,rank,tail_flag\n";
  for (int i = 0; i < pop.num_items(); ++i)
    items << i << "," << pop.counts[i] << "," << pop.normalized[i] << ","
          << pop.rank[i] << "," << (pop.tail_flag[i] ? 1 : 0) << "\n";

  auto shares = exposure_distribution(split.train, groups);
  std::ofstream gcsv(out_dir + "/groups.csv");
  gcsv << "group,share\n";
  for (std::size_t g = 0; g < shares.size(); ++g)
    gcsv << g << "," << shares[g] << "\n";
  std::cout << "wrote " << out_dir << "/items.csv and groups.csv\n";
  return 0;
}

int run_mix(const std::string& mnar_dir, const std::string& mar_dir,
            double pct, std::uint64_t seed, const std::string& out_dir) {
  auto mnar = load_split(mnar_dir);
  auto mar = load_split(mar_dir);
  auto mixed = mix_mar(mnar.train, mar.train, pct, seed);
  SplitDataset out;
  out.train = mixed;
  out.validation = mnar.validation;
  out.test = mnar.test;
  save_split(out_dir, out, seed);
  json cfg{{"command", "mix"}, {"pct", pct}, {"seed", seed},
           {"mnar", mnar_dir}, {"mar", mar_dir}};
  write_config(out_dir, cfg);
  std::cout << "mixed train has " << mixed.num_positives() << " positives\n";
  return 0;
}

int run_export(const std::string& checkpoint, const std::string& out_prefix) {
  auto params = load_checkpoint(checkpoint);
  export_embeddings(out_prefix + "_users.csv", out_prefix + "_items.csv",
                    params);
  std::cout << "wrote " << out_prefix << "_users.csv and " << out_prefix
            << "_items.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"debiased implicit-feedback ranking toolkit"};
  app.require_subcommand(1);

  // ingest
  std::string input, format = "tsv", delim, out_dir;
  std::vector<int> columns{0, 1, 2};
  bool skip_header = false;
  double threshold = 4.0;
  std::uint64_t seed = 42;
  auto* ingest = app.add_subcommand("ingest", "parse, binarize and split a log");
  ingest->add_option("--input", input)->required();
  ingest->add_option("--format", format, "tsv|csv");
  ingest->add_option("--delim", delim, "override delimiter");
  ingest->add_option("--columns", columns, "user item value column indices")
      ->expected(3);
  ingest->add_flag("--skip-header", skip_header);
  ingest->add_option("--threshold", threshold, "binarization threshold");
  ingest->add_option("--seed", seed, "split seed");
  ingest->add_option("--out-dir", out_dir)->required();

  // train
  ModelFlags train_flags;
  std::string train_data, train_out;
  auto* train = app.add_subcommand("train", "train a model on an ingested split");
  train->add_option("--data-dir", train_data)->required();
  train->add_option("--out-dir", train_out);
  train_flags.attach(train);

  // evaluate
  std::string eval_data, eval_ckpt, eval_protocol = "full_rank",
              eval_out = "eval.csv";
  EvalConfig eval_cfg;
  auto* eval = app.add_subcommand("evaluate", "rank and score a checkpoint");
  eval->add_option("--data-dir", eval_data)->required();
  eval->add_option("--checkpoint", eval_ckpt)->required();
  eval->add_option("--k", eval_cfg.k);
  eval->add_option("--protocol", eval_protocol, "full_rank|sampled99");
  eval->add_option("--seed", eval_cfg.seed);
  eval->add_option("--out", eval_out);

  // sweep
  ModelFlags sweep_flags;
  std::string sweep_data, sweep_param = "alpha", sweep_out;
  std::vector<double> sweep_grid;
  int sweep_k = 10;
  auto* sweep = app.add_subcommand("sweep", "grid sweep over alpha or beta");
  sweep->add_option("--data-dir", sweep_data)->required();
  sweep->add_option("--param", sweep_param, "alpha|beta");
  sweep->add_option("--grid", sweep_grid)->required();
  sweep->add_option("--k", sweep_k, "sampled99 cutoff");
  sweep->add_option("--out-dir", sweep_out);
  sweep_flags.attach(sweep);

  // simulate
  ModelFlags sim_flags;
  SimConfig sim;
  std::vector<std::uint64_t> sim_seeds{1};
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "closed feedback-loop simulation");
  simulate->add_option("--users", sim.num_users);
  simulate->add_option("--items", sim.num_items);
  simulate->add_option("--loops", sim.loops);
  simulate->add_option("--epochs-per-loop", sim.epochs_per_loop);
  simulate->add_option("--accept-k", sim.accept_k);
  simulate->add_option("--rec-top", sim.rec_top);
  simulate->add_option("--metric-k", sim.metric_k);
  simulate->add_option("--seeds", sim_seeds);
  simulate->add_option("--out-dir", sim_out);
  sim_flags.attach(simulate);

  // analyze-exposure
  std::string an_data, an_out;
  int an_groups = 10;
  auto* analyze = app.add_subcommand("analyze-exposure",
                                     "popularity and group-share tables");
  analyze->add_option("--data-dir", an_data)->required();
  analyze->add_option("--groups", an_groups);
  analyze->add_option("--out-dir", an_out);

  // mix
  std::string mix_mnar, mix_mar_dir, mix_out;
  double mix_pct = 0.0;
  std::uint64_t mix_seed = 42;
  auto* mix = app.add_subcommand("mix", "mix MAR positives into an MNAR train set");
  mix->add_option("--mnar-dir", mix_mnar)->required();
  mix->add_option("--mar-dir", mix_mar_dir)->required();
  mix->add_option("--pct", mix_pct)->required();
  mix->add_option("--seed", mix_seed);
  mix->add_option("--out-dir", mix_out)->required();

  // export-embeddings
  std::string exp_ckpt, exp_prefix = "embeddings";
  auto* exp = app.add_subcommand("export-embeddings",
                                 "dump user/item factors as CSV");
  exp->add_option("--checkpoint", exp_ckpt)->required();
  exp->add_option("--out-prefix", exp_prefix);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed())
      return run_ingest(input, format, delim, columns, skip_header, threshold,
                        seed, out_dir);
    if (train->parsed()) {
      if (train_out.empty())
        train_out = default_out_root() + "/train_" +
                    std::to_string(train_flags.hp.seed);
      return run_train(train_data, train_flags, train_out);
    }
    if (eval->parsed())
      return run_evaluate(eval_data, eval_ckpt, eval_cfg, eval_protocol,
                          eval_out);
    if (sweep->parsed()) {
      if (sweep_out.empty()) sweep_out = default_out_root() + "/sweep";
      return run_sweep(sweep_data, sweep_flags, sweep_param, sweep_grid,
                       sweep_k, sweep_out);
    }
    if (simulate->parsed()) {
      if (sim_out.empty()) sim_out = default_out_root() + "/sim";
      return run_simulate(sim_flags, sim, sim_seeds, sim_out);
    }
    if (analyze->parsed()) {
      if (an_out.empty()) an_out = default_out_root() + "/exposure";
      return run_analyze(an_data, an_groups, an_out);
    }
    if (mix->parsed())
      return run_mix(mix_mnar, mix_mar_dir, mix_pct, mix_seed, mix_out);
    if (exp->parsed()) return run_export(exp_ckpt, exp_prefix);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
