#include "drugclip/pipeline.hpp"

#include <map>

namespace drugclip {

namespace {

void fill_smiles_from_table(std::vector<TrialRecord>& trials,
                            const std::vector<DrugRecord>& drugs) {
  std::map<std::string, const DrugRecord*> by_id;
  for (const DrugRecord& drug : drugs) by_id[drug.drug_id] = &drug;
  for (TrialRecord& trial : trials) {
    if (trial.smiles.empty()) {
      auto it = by_id.find(trial.drug_id);
      if (it != by_id.end()) trial.smiles = it->second->smiles;
    }
  }
}

}  // namespace

std::vector<DiseaseCode> parse_code_list(const std::string& joined) {
  std::vector<DiseaseCode> codes;
  std::size_t start = 0;
  while (start <= joined.size()) {
    std::size_t at = joined.find(';', start);
    std::string part =
        at == std::string::npos ? joined.substr(start) : joined.substr(start, at - start);
    if (!part.empty()) codes.push_back(normalize_code(part));
    if (at == std::string::npos) break;
    start = at + 1;
  }
  if (codes.empty()) throw Error(ErrorKind::EmptyDiseaseSet, "no codes in '" + joined + "'");
  return codes;
}

Dataset load_training_dataset(const std::string& trials_path, const std::string& drugs_path,
                              const std::string& icd_path) {
  Ontology ontology = load_code_table(icd_path);
  std::vector<TrialRecord> trials = load_trials(trials_path);
  std::vector<DrugRecord> drugs = load_drug_db(drugs_path);
  fill_smiles_from_table(trials, drugs);
  return build_dataset(std::move(trials), std::move(ontology));
}

TrainResult train_files(const std::string& trials_path, const std::string& drugs_path,
                        const std::string& icd_path, const TrainConfig& config,
                        const std::string& out_path) {
  Dataset dataset = load_training_dataset(trials_path, drugs_path, icd_path);
  TrainResult result = train(dataset, config);
  CheckpointConfig ckpt_config{config.dim, config.depth, config.readout, config.seed};
  save_checkpoint(result.params, ckpt_config, dataset.ontology, out_path);
  return result;
}

EvalFilesResult evaluate_files(const std::string& model_path, const std::string& trials_path,
                               const std::string& drugs_path, const std::string& icd_path,
                               const std::string& cutoff, const std::string& cutoff_end,
                               const std::vector<double>& ks) {
  Checkpoint ckpt = load_checkpoint(model_path);
  Ontology ontology = ckpt.make_ontology();
  // validated for well-formedness; encoding uses the checkpoint ontology,
  // whose ids index the embedding table
  load_code_table(icd_path);

  std::vector<TrialRecord> trials = load_trials(trials_path);
  std::vector<DrugRecord> drugs = load_drug_db(drugs_path);
  fill_smiles_from_table(trials, drugs);

  TemporalSplit split = temporal_split(trials, parse_date(cutoff), parse_date(cutoff_end), &drugs);
  if (split.test.empty()) {
    throw Error(ErrorKind::EmptyTestSet,
                "no test trials in [" + cutoff + ", " + cutoff_end + ") after the repurposing filter");
  }

  MpnnConfig config{ckpt.config.depth, ckpt.config.dim, ckpt.config.readout};
  ModelScorer scorer(ckpt.params, config, ontology, split.drug_db);
  EvalFilesResult out;
  out.report = evaluate(scorer, split, ks);
  out.db_size = split.drug_db.size();
  out.test_count = split.test.size();
  return out;
}

std::vector<std::pair<std::string, double>> rank_files(const std::string& model_path,
                                                       const std::string& codes_text,
                                                       const std::string& drugs_path,
                                                       std::size_t top) {
  Checkpoint ckpt = load_checkpoint(model_path);
  Ontology ontology = ckpt.make_ontology();
  std::vector<DiseaseCode> query = parse_code_list(codes_text);

  std::vector<DrugRecord> drugs = load_drug_db(drugs_path);
  std::vector<DrugEntry> db;
  db.reserve(drugs.size());
  for (const DrugRecord& drug : drugs) db.push_back(DrugEntry{drug.drug_id, drug.smiles});

  MpnnConfig config{ckpt.config.depth, ckpt.config.dim, ckpt.config.readout};
  ModelScorer scorer(ckpt.params, config, ontology, std::move(db));
  return top_ranked(scorer, query, top);
}

}  // namespace drugclip
