#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drugclip/pipeline.hpp"

namespace {

using namespace drugclip;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmptyResult = 4;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NumericalError:
      return kExitNumerical;
    case ErrorKind::EmptyTestSet:
      return kExitEmptyResult;
    default:
      return kExitInput;
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct TrainArgs {
  std::string trials_path, drugs_path, icd_path, out_path;
  int dim = 64, depth = 3, epochs = 10, batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  bool seed_given = false;
};

int run_train(const TrainArgs& args) {
  if (!args.seed_given) std::cout << "seed " << args.seed << " (default)\n";

  TrainConfig config;
  config.epochs = args.epochs;
  config.batch_size = args.batch;
  config.lr = args.lr;
  config.seed = args.seed;
  config.dim = args.dim;
  config.depth = args.depth;

  TrainResult result = train_files(args.trials_path, args.drugs_path, args.icd_path, config,
                                   args.out_path);

  std::string loss_path = args.out_path + ".loss.csv";
  std::ofstream loss_out(loss_path, std::ios::binary);
  if (!loss_out) throw Error(ErrorKind::FileNotFound, "cannot write " + loss_path);
  loss_out << "epoch,mean_loss\n";
  for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
    loss_out << (i + 1) << "," << format_double(result.epoch_loss[i]) << "\n";
  }

  if (!result.epoch_loss.empty()) {
    std::printf("epoch 1 loss %.6f, epoch %zu loss %.6f\n", result.epoch_loss.front(),
                result.epoch_loss.size(), result.epoch_loss.back());
  }
  std::cout << "checkpoint written to " << args.out_path << "\n";
  std::cout << "loss history written to " << loss_path << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string model_path, trials_path, drugs_path, icd_path, out_path;
  std::string cutoff, cutoff_end;
  std::vector<double> ks;
};

int run_eval(const EvalArgs& args) {
  EvalFilesResult result = evaluate_files(args.model_path, args.trials_path, args.drugs_path,
                                          args.icd_path, args.cutoff, args.cutoff_end, args.ks);

  std::ofstream metrics_out(args.out_path, std::ios::binary);
  if (!metrics_out) throw Error(ErrorKind::FileNotFound, "cannot write " + args.out_path);
  metrics_out << "k_percent,hit_rate,n_queries\n";
  for (const KMetric& m : result.report.metrics) {
    char kbuf[32];
    std::snprintf(kbuf, sizeof kbuf, "%g", m.k_percent);
    metrics_out << kbuf << "," << format_double(m.hit_rate) << "," << m.n_queries << "\n";
  }

  std::string audit_path = args.out_path + ".audit.csv";
  std::ofstream audit_out(audit_path, std::ios::binary);
  if (!audit_out) throw Error(ErrorKind::FileNotFound, "cannot write " + audit_path);
  audit_out << "trial_id,rank,db_size\n";
  for (const TrialRank& r : result.report.ranks) {
    audit_out << r.trial_id << "," << r.rank << "," << r.db_size << "\n";
  }

  std::cout << "drug_db " << result.db_size << " drugs, test " << result.test_count
            << " trials\n";
  for (const KMetric& m : result.report.metrics) {
    std::printf("hit@%g%%  %.4f  (n=%zu)\n", m.k_percent, m.hit_rate, m.n_queries);
  }
  std::printf("mean_rank  %.2f\n", result.report.mean_rank);
  std::cout << "metrics written to " << args.out_path << "\n";
  std::cout << "audit written to " << audit_path << "\n";
  return kExitOk;
}

struct RankArgs {
  std::string model_path, codes, drugs_path;
  std::size_t top = 20;
};

int run_rank(const RankArgs& args) {
  for (const auto& [drug_id, score] :
       rank_files(args.model_path, args.codes, args.drugs_path, args.top)) {
    std::printf("%s\t%.6f\n", drug_id.c_str(), score);
  }
  return kExitOk;
}

int run_parse_smiles(const std::string& smiles) {
  MolGraph graph = parse_smiles(smiles);
  std::cout << "atoms " << graph.atoms.size() << "\n";
  for (std::size_t i = 0; i < graph.atoms.size(); ++i) {
    const Atom& atom = graph.atoms[i];
    std::printf("  %zu\t%s\taromatic=%d\tcharge=%+d\tdegree=%d\n", i, element_symbol(atom.element),
                atom.aromatic ? 1 : 0, atom.formal_charge, atom.degree);
  }
  std::cout << "bonds " << graph.bonds.size() << "\n";
  for (const Bond& bond : graph.bonds) {
    std::printf("  (%d,%d)\tcode=%d\n", bond.a, bond.b, bond.code);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drug-disease contrastive ranking"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model from trial records");
  train_cmd->add_option("--trials", train_args.trials_path, "trial TSV")->required();
  train_cmd->add_option("--drugs", train_args.drugs_path, "drug TSV")->required();
  train_cmd->add_option("--icd", train_args.icd_path, "ICD-10 code CSV")->required();
  train_cmd->add_option("--dim", train_args.dim, "embedding dimension")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--depth", train_args.depth, "message passing rounds")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", train_args.epochs, "training epochs")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--batch", train_args.batch, "batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train_args.lr, "learning rate")->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = train_cmd->add_option("--seed", train_args.seed, "random seed");
  train_cmd->add_option("--out", train_args.out_path, "checkpoint output path")->required();

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "temporal-split ranking evaluation");
  eval_cmd->add_option("--model", eval_args.model_path, "checkpoint path")->required();
  eval_cmd->add_option("--trials", eval_args.trials_path, "trial TSV")->required();
  eval_cmd->add_option("--drugs", eval_args.drugs_path, "drug TSV")->required();
  eval_cmd->add_option("--icd", eval_args.icd_path, "ICD-10 code CSV")->required();
  eval_cmd->add_option("--cutoff", eval_args.cutoff, "test window start (YYYY-MM-DD)")->required();
  eval_cmd->add_option("--cutoff-end", eval_args.cutoff_end, "test window end (YYYY-MM-DD)")
      ->required();
  eval_cmd->add_option("--k", eval_args.ks, "hit@k%% thresholds")
      ->delimiter(',')
      ->default_val(std::vector<double>{10.0, 30.0});
  eval_cmd->add_option("--out", eval_args.out_path, "metrics CSV output path")->required();

  RankArgs rank_args;
  CLI::App* rank_cmd = app.add_subcommand("rank", "rank a drug database for a disease query");
  rank_cmd->add_option("--model", rank_args.model_path, "checkpoint path")->required();
  rank_cmd->add_option("--codes", rank_args.codes, "';'-separated ICD-10 codes")->required();
  rank_cmd->add_option("--drugs", rank_args.drugs_path, "drug TSV")->required();
  rank_cmd->add_option("--top", rank_args.top, "rows to print")->check(CLI::PositiveNumber);

  std::string smiles;
  CLI::App* parse_cmd = app.add_subcommand("parse-smiles", "dump the molecular graph of a SMILES");
  parse_cmd->add_option("smiles", smiles, "SMILES string")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (train_cmd->parsed()) {
      train_args.seed_given = seed_opt->count() > 0;
      return run_train(train_args);
    }
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (rank_cmd->parsed()) return run_rank(rank_args);
    if (parse_cmd->parsed()) return run_parse_smiles(smiles);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
