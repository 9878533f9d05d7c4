// molkd: reaction-pretrained molecular representation toolkit.
//
// Subcommands: pretrain, finetune, rank-eval, query, robustness, interpret,
// split. Options can come from a flat `key = value` config file (--config);
// command-line flags win. MOLKD_THREADS caps --threads.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "molkd/distill.hpp"
#include "molkd/encoder.hpp"
#include "molkd/evalkit.hpp"
#include "molkd/io.hpp"
#include "molkd/parallel.hpp"
#include "molkd/pretrain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace molkd;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitMissingInput = 2;

struct MissingInput {
  std::string path;
};

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw MissingInput{path};
}

// Flags win over config-file values; config values win over defaults.
struct Options {
  std::map<std::string, std::string> config;

  std::string get(const CLI::Option* opt, const std::string& flag_value,
                  const std::string& key) const {
    if (opt->count() > 0) return flag_value;
    auto it = config.find(key);
    return it != config.end() ? it->second : flag_value;
  }
  double get(const CLI::Option* opt, double flag_value, const std::string& key) const {
    if (opt->count() > 0) return flag_value;
    auto it = config.find(key);
    return it != config.end() ? std::stod(it->second) : flag_value;
  }
  int get(const CLI::Option* opt, int flag_value, const std::string& key) const {
    if (opt->count() > 0) return flag_value;
    auto it = config.find(key);
    return it != config.end() ? std::stoi(it->second) : flag_value;
  }
  std::uint64_t get(const CLI::Option* opt, std::uint64_t flag_value,
                    const std::string& key) const {
    if (opt->count() > 0) return flag_value;
    auto it = config.find(key);
    return it != config.end() ? std::stoull(it->second) : flag_value;
  }
};

std::map<std::string, std::string> config_echo(const Options& opts,
                                               std::map<std::string, std::string> extra) {
  std::map<std::string, std::string> echo = opts.config;
  for (auto& [k, v] : extra) echo[k] = v;
  return echo;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string molecule_set_key(const std::vector<MolGraph>& graphs) {
  std::string key;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (i > 0) key += ".";
    key += write_smiles(graphs[i]);
  }
  return key;
}

json ranking_to_json(const RankingResult& r, std::size_t candidates) {
  json j;
  j["queries"] = r.ranks.size();
  j["candidates"] = candidates;
  j["mrr"] = r.mrr;
  j["mr"] = r.mr;
  j["hit@1"] = r.hit1;
  j["hit@3"] = r.hit3;
  j["hit@5"] = r.hit5;
  j["hit@10"] = r.hit10;
  return j;
}

// ---------------------------------------------------------------------------
// pretrain
// ---------------------------------------------------------------------------

struct PretrainArgs {
  std::string config_path, reactions, out = "teacher.ckpt", log_path = "pretrain.log";
  std::string arch = "TAG";
  PretrainConfig cfg;
  CLI::Option *o_seed, *o_epochs, *o_batch, *o_dim, *o_hidden, *o_layers, *o_hops, *o_arch,
      *o_margin, *o_alpha, *o_lr;
};

int run_pretrain_cmd(PretrainArgs& a) {
  Options opts;
  if (!a.config_path.empty()) {
    require_input(a.config_path);
    opts.config = io::load_config_file(a.config_path);
  }
  require_input(a.reactions);

  PretrainConfig cfg = a.cfg;
  cfg.seed = opts.get(a.o_seed, a.cfg.seed, "seed");
  cfg.epochs = opts.get(a.o_epochs, a.cfg.epochs, "epochs");
  cfg.batch_size = opts.get(a.o_batch, a.cfg.batch_size, "batch_size");
  cfg.embedding_dim = opts.get(a.o_dim, a.cfg.embedding_dim, "dim");
  cfg.hidden_dim = opts.get(a.o_hidden, a.cfg.hidden_dim, "hidden_dim");
  cfg.layers = opts.get(a.o_layers, a.cfg.layers, "layers");
  cfg.hops = opts.get(a.o_hops, a.cfg.hops, "hops");
  cfg.arch = arch_from_name(opts.get(a.o_arch, a.arch, "arch"));
  cfg.margin = opts.get(a.o_margin, a.cfg.margin, "margin");
  cfg.yield_exponent = opts.get(a.o_alpha, a.cfg.yield_exponent, "alpha");
  cfg.adam.lr = opts.get(a.o_lr, a.cfg.adam.lr, "lr");
  cfg.validate();

  const std::vector<ReactionRecord> dataset = io::load_reactions_tsv(a.reactions);
  PretrainResult result = run_pretrain(dataset, cfg);

  std::string log;
  for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
    log += std::to_string(e) + "\t" + format_double(result.epoch_mean_loss[e]) + "\n";
  }
  io::atomic_write(a.log_path, log);

  io::TeacherModel model;
  model.params = std::move(result.params);
  model.vocab = std::move(result.vocab);
  model.config_echo = config_echo(
      opts, {{"seed", std::to_string(cfg.seed)},
             {"epochs", std::to_string(cfg.epochs)},
             {"batch_size", std::to_string(cfg.batch_size)},
             {"dim", std::to_string(cfg.embedding_dim)},
             {"arch", arch_name(cfg.arch)},
             {"margin", format_double(cfg.margin)},
             {"alpha", format_double(cfg.yield_exponent)},
             {"lr", format_double(cfg.adam.lr)}});
  io::save_teacher(a.out, model);
  std::cout << "wrote " << a.out << " and " << a.log_path << " ("
            << result.epoch_mean_loss.size() << " epochs)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// finetune
// ---------------------------------------------------------------------------

struct FinetuneArgs {
  std::string config_path, teacher, data, task = "classification";
  std::string train_split, valid_split, test_split;
  std::string out = "predictor.ckpt", report = "finetune_report.json";
  bool no_kd = false;
  bool init_from_teacher = false;
  DistillConfig cfg;
  CLI::Option *o_seed, *o_epochs, *o_batch, *o_beta, *o_tau, *o_sdim, *o_shidden, *o_lr;
};

int run_finetune_cmd(FinetuneArgs& a) {
  Options opts;
  if (!a.config_path.empty()) {
    require_input(a.config_path);
    opts.config = io::load_config_file(a.config_path);
  }
  require_input(a.teacher);
  require_input(a.data);
  require_input(a.train_split);
  require_input(a.valid_split);
  if (!a.test_split.empty()) require_input(a.test_split);

  DistillConfig cfg = a.cfg;
  cfg.seed = opts.get(a.o_seed, a.cfg.seed, "seed");
  cfg.epochs = opts.get(a.o_epochs, a.cfg.epochs, "epochs");
  cfg.batch_size = opts.get(a.o_batch, a.cfg.batch_size, "batch_size");
  cfg.beta = opts.get(a.o_beta, a.cfg.beta, "beta");
  cfg.temperature = opts.get(a.o_tau, a.cfg.temperature, "tau");
  cfg.student_dim = opts.get(a.o_sdim, a.cfg.student_dim, "student_dim");
  cfg.student_hidden = opts.get(a.o_shidden, a.cfg.student_hidden, "student_hidden");
  cfg.adam.lr = opts.get(a.o_lr, a.cfg.adam.lr, "lr");
  cfg.kd_disabled = a.no_kd;
  cfg.init_from_teacher = a.init_from_teacher;
  cfg.task = task_from_name(a.task);
  cfg.validate();

  const io::TeacherModel teacher = io::load_teacher(a.teacher);
  PropertyDataset data = io::load_property_csv(a.data, cfg.task);

  // Surface featurization incompatibilities before training starts.
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    try {
      graph_features(data.records[i].molecule, teacher.vocab);
    } catch (const Error& e) {
      if (e.code() == Errc::unseen_value) {
        throw Error(Errc::vocab_mismatch,
                    "row " + std::to_string(i + 1) +
                        " cannot be featurized against the checkpoint vocabulary: " + e.what());
      }
      throw;
    }
  }

  const auto train_idx = io::load_split_indices(a.train_split, data.records.size());
  const auto valid_idx = io::load_split_indices(a.valid_split, data.records.size());
  std::vector<std::size_t> test_idx;
  if (!a.test_split.empty()) {
    test_idx = io::load_split_indices(a.test_split, data.records.size());
  }

  FinetuneResult result = finetune(data, train_idx, valid_idx, teacher.params, teacher.vocab, cfg);

  json report;
  report["task"] = task_name(cfg.task);
  report["task_names"] = data.task_names;
  report["best_epoch"] = result.best_epoch;
  report["valid_metric"] = result.best_valid_metric;
  report["train_loss"] = result.epoch_train_loss;
  report["valid_curve"] = result.epoch_valid_metric;

  const std::vector<std::size_t>& eval_rows = test_idx.empty() ? valid_idx : test_idx;
  json metrics;
  if (cfg.task == TaskKind::binary_classification) {
    metrics["auc_roc"] = evaluate_predictor(result.predictor, data, eval_rows);
  } else {
    std::vector<double> preds, labels;
    for (std::size_t r : eval_rows) {
      const Tensor s = predict_scores(result.predictor, data.records[r].molecule);
      for (std::size_t t = 0; t < data.task_names.size(); ++t) {
        if (std::isnan(data.records[r].labels[t])) continue;
        preds.push_back(s[t]);
        labels.push_back(data.records[r].labels[t]);
      }
    }
    metrics["rmse"] = rmse(preds, labels);
    metrics["mae"] = mae(preds, labels);
  }
  report["metrics"] = metrics;
  report["evaluated_on"] = test_idx.empty() ? "valid" : "test";

  io::PredictorModel model;
  model.predictor = std::move(result.predictor);
  model.config_echo = config_echo(
      opts, {{"seed", std::to_string(cfg.seed)},
             {"beta", format_double(cfg.beta)},
             {"tau", format_double(cfg.temperature)},
             {"epochs", std::to_string(cfg.epochs)},
             {"kd", cfg.kd_disabled ? "disabled" : "enabled"}});
  io::save_predictor(a.out, model);
  io::atomic_write(a.report, report.dump(2) + "\n");
  std::cout << "wrote " << a.out << " and " << a.report << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// rank-eval
// ---------------------------------------------------------------------------

int run_rank_eval_cmd(const std::string& checkpoint, const std::string& reactions,
                      const std::string& out, int threads) {
  require_input(checkpoint);
  require_input(reactions);
  const io::TeacherModel model = io::load_teacher(checkpoint);
  const std::vector<ReactionRecord> dataset = io::load_reactions_tsv(reactions);

  // Candidate pool: products of the evaluation split, deduplicated by their
  // serialized SMILES key.
  std::vector<const std::vector<MolGraph>*> pool;
  std::map<std::string, std::size_t> pool_index;
  std::vector<std::size_t> target_of_query(dataset.size());
  for (std::size_t q = 0; q < dataset.size(); ++q) {
    const std::string key = molecule_set_key(dataset[q].products);
    auto [it, inserted] = pool_index.try_emplace(key, pool.size());
    if (inserted) pool.push_back(&dataset[q].products);
    target_of_query[q] = it->second;
  }

  const int workers = effective_threads(threads);
  std::vector<Tensor> candidate_embeddings(pool.size());
  parallel_for(pool.size(), workers, [&](std::size_t c) {
    candidate_embeddings[c] = encode_molecule_set(*pool[c], model.vocab, model.params);
  });

  std::vector<std::size_t> ranks(dataset.size());
  parallel_for(dataset.size(), workers, [&](std::size_t q) {
    const Tensor h_r = encode_molecule_set(dataset[q].reactants, model.vocab, model.params);
    std::vector<double> distances(pool.size());
    for (std::size_t c = 0; c < pool.size(); ++c) {
      distances[c] = reaction_score(h_r, candidate_embeddings[c]).value();
    }
    ranks[q] = rank_from_distances(distances, target_of_query[q]);
  });

  const RankingResult result = ranking_metrics(ranks);
  io::atomic_write(out, ranking_to_json(result, pool.size()).dump(2) + "\n");
  std::cout << "wrote " << out << " (" << ranks.size() << " queries, " << pool.size()
            << " candidates)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

int run_query_cmd(const std::string& checkpoint, const std::string& smiles,
                  const std::string& refs, std::size_t k, const std::string& out) {
  require_input(checkpoint);
  require_input(refs);
  const io::TeacherModel model = io::load_teacher(checkpoint);
  const std::vector<ReactionRecord> dataset = io::load_reactions_tsv(refs);

  std::vector<MolGraph> references;
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const ReactionRecord& r : dataset) {
    for (const auto* side : {&r.reactants, &r.products}) {
      for (const MolGraph& g : *side) {
        std::string key = write_smiles(g);
        if (seen.insert(key).second) {
          references.push_back(g);
          keys.push_back(std::move(key));
        }
      }
    }
  }

  const MolGraph query = explicit_hydrogens(parse_smiles(smiles));
  const std::vector<Neighbor> neighbors =
      nearest_molecules(query, references, k, model.vocab, model.params);

  json j = json::array();
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    json row;
    row["rank"] = i + 1;
    row["smiles"] = keys[neighbors[i].index];
    row["cosine_distance"] = neighbors[i].distance;
    j.push_back(std::move(row));
  }
  io::atomic_write(out, j.dump(2) + "\n");
  std::cout << "wrote " << out << " (" << neighbors.size() << " of " << references.size()
            << " references)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// robustness
// ---------------------------------------------------------------------------

int run_robustness_cmd(const std::string& predictor_path, const std::string& perturbations,
                       const std::string& out) {
  require_input(predictor_path);
  require_input(perturbations);
  const io::PredictorModel model = io::load_predictor(predictor_path);
  const PerturbationSet pset = io::load_perturbation_csv(perturbations);

  // Single-output predictors use their lone task; multi-task ones use task 0.
  auto predict = [&](const MolGraph& g) { return predict_scores(model.predictor, g)[0]; };
  const std::map<int, double> deltas = effect_score(predict, pset);

  json per_level;
  for (const auto& [level, delta] : deltas) {
    per_level["level" + std::to_string(level)] = delta;
  }
  json j;
  j["effect_score"] = per_level;
  io::atomic_write(out, j.dump(2) + "\n");
  std::cout << "wrote " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// interpret
// ---------------------------------------------------------------------------

int run_interpret_cmd(const std::string& checkpoint, const std::string& smiles,
                      const std::string& out) {
  require_input(checkpoint);
  const std::string kind = io::checkpoint_kind(checkpoint);
  FeatureVocab vocab;
  EncoderParams encoder;
  if (kind == "predictor") {
    io::PredictorModel model = io::load_predictor(checkpoint);
    vocab = std::move(model.predictor.vocab);
    encoder = std::move(model.predictor.student);
  } else {
    io::TeacherModel model = io::load_teacher(checkpoint);
    vocab = std::move(model.vocab);
    encoder = std::move(model.params);
  }

  const MolGraph g = explicit_hydrogens(parse_smiles(smiles));
  const std::vector<double> weights = atom_weights(g, vocab, encoder);

  std::string csv = "atom_index,element,weight\n";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    char line[64];
    std::snprintf(line, sizeof(line), "%zu,%s,%.10g\n", i, g.atoms[i].element.c_str(),
                  weights[i]);
    csv += line;
  }
  io::atomic_write(out, csv);
  std::cout << "wrote " << out << " (" << weights.size() << " atoms)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

int run_split_cmd(const std::string& data_path, const std::string& out_prefix,
                  std::uint64_t seed, const std::string& ratios) {
  require_input(data_path);
  // Only the row count matters here; load labels as free-form numbers.
  const PropertyDataset data = io::load_property_csv(data_path, TaskKind::regression);
  const std::size_t n = data.records.size();

  std::vector<double> parts;
  for (const std::string& p : [&] {
         std::vector<std::string> out;
         std::size_t start = 0;
         for (std::size_t at = ratios.find(':'); ; at = ratios.find(':', start)) {
           out.push_back(ratios.substr(start, at - start));
           if (at == std::string::npos) break;
           start = at + 1;
         }
         return out;
       }()) {
    parts.push_back(std::stod(p));
  }
  if (parts.size() != 3 || parts[0] <= 0 || parts[1] < 0 || parts[2] < 0) {
    throw Error(Errc::bad_config, "--ratios must look like 8:1:1");
  }
  const double total = parts[0] + parts[1] + parts[2];

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::uint64_t rng = seed;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = splitmix64(rng) % i;
    std::swap(order[i - 1], order[j]);
  }

  const auto n_train = static_cast<std::size_t>(static_cast<double>(n) * parts[0] / total);
  const auto n_valid = static_cast<std::size_t>(static_cast<double>(n) * parts[1] / total);
  auto write_indices = [&](const std::string& name, std::size_t begin, std::size_t end) {
    std::string text;
    for (std::size_t i = begin; i < end; ++i) text += std::to_string(order[i]) + "\n";
    io::atomic_write(out_prefix + name, text);
  };
  write_indices("train.idx", 0, n_train);
  write_indices("valid.idx", n_train, n_train + n_valid);
  write_indices("test.idx", n_train + n_valid, n);
  std::cout << "wrote " << out_prefix << "{train,valid,test}.idx (" << n_train << "/" << n_valid
            << "/" << (n - n_train - n_valid) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molkd: reaction-pretrained molecular representations"};
  app.require_subcommand(1);

  PretrainArgs pre;
  auto* cmd_pre = app.add_subcommand("pretrain", "Pre-train a teacher encoder on reactions");
  cmd_pre->add_option("--config", pre.config_path, "flat key = value config file");
  cmd_pre->add_option("--reactions", pre.reactions, "reaction TSV")->required();
  cmd_pre->add_option("--out", pre.out, "teacher checkpoint path");
  cmd_pre->add_option("--log", pre.log_path, "training log path");
  pre.o_seed = cmd_pre->add_option("--seed", pre.cfg.seed, "PRNG seed");
  pre.o_epochs = cmd_pre->add_option("--epochs", pre.cfg.epochs, "training epochs");
  pre.o_batch = cmd_pre->add_option("--batch-size", pre.cfg.batch_size, "minibatch size");
  pre.o_dim = cmd_pre->add_option("--dim", pre.cfg.embedding_dim, "embedding dimension");
  pre.o_hidden = cmd_pre->add_option("--hidden-dim", pre.cfg.hidden_dim, "hidden dimension");
  pre.o_layers = cmd_pre->add_option("--layers", pre.cfg.layers, "propagation layers");
  pre.o_hops = cmd_pre->add_option("--hops", pre.cfg.hops, "TAG hops per layer");
  pre.o_arch = cmd_pre->add_option("--arch", pre.arch, "TAG, GCN, or GIN");
  pre.o_margin = cmd_pre->add_option("--margin", pre.cfg.margin, "margin gamma");
  pre.o_alpha = cmd_pre->add_option("--alpha", pre.cfg.yield_exponent, "yield exponent alpha");
  pre.o_lr = cmd_pre->add_option("--lr", pre.cfg.adam.lr, "Adam learning rate");

  FinetuneArgs fin;
  auto* cmd_fin = app.add_subcommand("finetune", "Distill the teacher into a property predictor");
  cmd_fin->add_option("--config", fin.config_path, "flat key = value config file");
  cmd_fin->add_option("--teacher", fin.teacher, "teacher checkpoint")->required();
  cmd_fin->add_option("--data", fin.data, "property CSV")->required();
  cmd_fin->add_option("--task", fin.task, "classification or regression");
  cmd_fin->add_option("--train-split", fin.train_split, "train index file")->required();
  cmd_fin->add_option("--valid-split", fin.valid_split, "validation index file")->required();
  cmd_fin->add_option("--test-split", fin.test_split, "test index file");
  cmd_fin->add_option("--out", fin.out, "predictor checkpoint path");
  cmd_fin->add_option("--report", fin.report, "metric report JSON path");
  cmd_fin->add_flag("--no-kd", fin.no_kd, "disable the distillation term");
  cmd_fin->add_flag("--init-from-teacher", fin.init_from_teacher,
                    "start the student from teacher weights");
  fin.o_seed = cmd_fin->add_option("--seed", fin.cfg.seed, "PRNG seed");
  fin.o_epochs = cmd_fin->add_option("--epochs", fin.cfg.epochs, "training epochs");
  fin.o_batch = cmd_fin->add_option("--batch-size", fin.cfg.batch_size, "minibatch size");
  fin.o_beta = cmd_fin->add_option("--beta", fin.cfg.beta, "supervised/distillation mix");
  fin.o_tau = cmd_fin->add_option("--tau", fin.cfg.temperature, "contrastive temperature");
  fin.o_sdim = cmd_fin->add_option("--student-dim", fin.cfg.student_dim, "student output dim");
  fin.o_shidden =
      cmd_fin->add_option("--student-hidden", fin.cfg.student_hidden, "student hidden dim");
  fin.o_lr = cmd_fin->add_option("--lr", fin.cfg.adam.lr, "Adam learning rate");

  std::string re_checkpoint, re_reactions, re_out = "ranking.json";
  int re_threads = 1;
  auto* cmd_rank = app.add_subcommand("rank-eval", "Product-ranking evaluation on a reaction TSV");
  cmd_rank->add_option("--checkpoint", re_checkpoint, "teacher checkpoint")->required();
  cmd_rank->add_option("--reactions", re_reactions, "evaluation reaction TSV")->required();
  cmd_rank->add_option("--out", re_out, "result JSON path");
  cmd_rank->add_option("--threads", re_threads, "worker threads (capped by MOLKD_THREADS)");

  std::string q_checkpoint, q_smiles, q_refs, q_out = "neighbors.json";
  std::size_t q_k = 8;
  auto* cmd_query = app.add_subcommand("query", "Nearest molecules by cosine distance");
  cmd_query->add_option("--checkpoint", q_checkpoint, "teacher checkpoint")->required();
  cmd_query->add_option("--smiles", q_smiles, "query molecule SMILES")->required();
  cmd_query->add_option("--refs", q_refs, "reference reaction TSV")->required();
  cmd_query->add_option("--k", q_k, "neighbors to return");
  cmd_query->add_option("--out", q_out, "result JSON path");

  std::string rb_predictor, rb_perturbations, rb_out = "effect_score.json";
  auto* cmd_robust = app.add_subcommand("robustness", "Perturbation effect score of a predictor");
  cmd_robust->add_option("--predictor", rb_predictor, "predictor checkpoint")->required();
  cmd_robust->add_option("--perturbations", rb_perturbations, "perturbation CSV")->required();
  cmd_robust->add_option("--out", rb_out, "result JSON path");

  std::string in_checkpoint, in_smiles, in_out = "atom_weights.csv";
  auto* cmd_interp = app.add_subcommand("interpret", "Per-atom interpretation weights");
  cmd_interp->add_option("--predictor,--checkpoint", in_checkpoint, "checkpoint")->required();
  cmd_interp->add_option("--smiles", in_smiles, "molecule SMILES")->required();
  cmd_interp->add_option("--out", in_out, "atom-weight CSV path");

  std::string sp_data, sp_prefix = "";
  std::uint64_t sp_seed = 0;
  std::string sp_ratios = "8:1:1";
  auto* cmd_split = app.add_subcommand("split", "Emit a seeded random train/valid/test split");
  cmd_split->add_option("--data", sp_data, "property CSV")->required();
  cmd_split->add_option("--out-prefix", sp_prefix, "output path prefix");
  cmd_split->add_option("--seed", sp_seed, "PRNG seed");
  cmd_split->add_option("--ratios", sp_ratios, "train:valid:test, default 8:1:1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_pre) return run_pretrain_cmd(pre);
    if (*cmd_fin) return run_finetune_cmd(fin);
    if (*cmd_rank) return run_rank_eval_cmd(re_checkpoint, re_reactions, re_out, re_threads);
    if (*cmd_query) return run_query_cmd(q_checkpoint, q_smiles, q_refs, q_k, q_out);
    if (*cmd_robust) return run_robustness_cmd(rb_predictor, rb_perturbations, rb_out);
    if (*cmd_interp) return run_interpret_cmd(in_checkpoint, in_smiles, in_out);
    if (*cmd_split) return run_split_cmd(sp_data, sp_prefix, sp_seed, sp_ratios);
  } catch (const MissingInput& e) {
    std::cerr << "error: missing input file: " << e.path << "\n";
    return kExitMissingInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
