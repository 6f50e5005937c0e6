#include "drugclip/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drugclip/rng.hpp"

namespace drugclip {

std::string disease_set_key(const std::vector<DiseaseCode>& codes) {
  std::set<std::string> unique;
  for (const DiseaseCode& code : codes) unique.insert(code.canonical);
  std::string key;
  for (const std::string& canonical : unique) {
    if (!key.empty()) key += ';';
    key += canonical;
  }
  return key;
}

void PositiveIndex::add(const std::string& drug_id, const std::vector<DiseaseCode>& codes) {
  pairs_.emplace(drug_id, disease_set_key(codes));
}

bool PositiveIndex::is_positive(const std::string& drug_id, const std::string& set_key) const {
  return pairs_.count({drug_id, set_key}) > 0;
}

PositiveIndex PositiveIndex::from_trials(const std::vector<TrialRecord>& trials) {
  PositiveIndex index;
  for (const TrialRecord& trial : trials) index.add(trial.drug_id, trial.codes);
  return index;
}

Tensor similarity_matrix(const std::vector<Tensor>& drug_embs,
                         const std::vector<Tensor>& disease_embs) {
  if (drug_embs.empty() || drug_embs.size() != disease_embs.size()) {
    throw Error(ErrorKind::ShapeMismatch, "similarity_matrix expects two equal non-empty lists");
  }
  std::size_t b = drug_embs.size();
  Tensor s = Tensor::matrix(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      s.at(i, j) = cosine_similarity(drug_embs[i], disease_embs[j]);
    }
  }
  return s;
}

double bce_loss(const Tensor& similarity, const Tensor& labels) {
  if (!similarity.same_shape(labels)) {
    throw Error(ErrorKind::ShapeMismatch, "bce_loss: " + similarity.shape_string() + " vs " +
                                              labels.shape_string());
  }
  Tape tape(/*grad_enabled=*/false);
  Var s = ag::constant(tape, similarity);
  Var loss = ag::bce_mean(s, labels);
  return tape.value(loss).scalar_value();
}

Tensor label_matrix(const std::vector<TrialRecord>& trials, const PositiveIndex& positives) {
  std::size_t b = trials.size();
  std::vector<std::string> keys;
  keys.reserve(b);
  for (const TrialRecord& trial : trials) keys.push_back(disease_set_key(trial.codes));
  Tensor y = Tensor::matrix(b, b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (i == j || positives.is_positive(trials[i].drug_id, keys[j])) {
        y.at(i, j) = 1.0;
      }
    }
  }
  return y;
}

Batch build_batch(ParamSession& session, const std::vector<TrialRecord>& trials,
                  const Dataset& dataset, const PositiveIndex& positives,
                  const MpnnConfig& config) {
  if (trials.empty()) throw Error(ErrorKind::EmptyDataset, "empty batch");
  Batch batch;
  batch.drug_embeddings.reserve(trials.size());
  batch.disease_embeddings.reserve(trials.size());
  for (const TrialRecord& trial : trials) {
    auto graph = dataset.graphs.find(trial.drug_id);
    if (graph == dataset.graphs.end()) {
      throw Error(ErrorKind::EmptyDataset, "trial " + trial.trial_id + ": no parsed molecule");
    }
    try {
      batch.drug_embeddings.push_back(mpnn_encode(session, graph->second, config));
      batch.disease_embeddings.push_back(encode_disease_set(session, dataset.ontology, trial.codes));
    } catch (const Error& e) {
      throw Error(e.kind(), "trial " + trial.trial_id + ": " + e.what());
    }
  }
  batch.labels = label_matrix(trials, positives);
  return batch;
}

Var batch_loss(const Batch& batch) {
  std::size_t b = batch.drug_embeddings.size();
  std::vector<Var> rows;
  rows.reserve(b);
  for (std::size_t i = 0; i < b; ++i) {
    std::vector<Var> entries;
    entries.reserve(b);
    for (std::size_t j = 0; j < b; ++j) {
      entries.push_back(ag::cosine(batch.drug_embeddings[i], batch.disease_embeddings[j]));
    }
    rows.push_back(ag::concat(entries));
  }
  Var similarity = ag::stack_rows(rows);
  return ag::bce_mean(similarity, batch.labels);
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  if (dataset.trials.empty()) throw Error(ErrorKind::EmptyDataset, "no trials to train on");
  if (config.epochs < 0 || config.batch_size < 1 || !(config.lr > 0.0) || config.dim < 1 ||
      config.depth < 1) {
    throw Error(ErrorKind::InvalidConfig,
                "epochs >= 0, batch_size >= 1, lr > 0, dim >= 1, depth >= 1 required");
  }

  MpnnConfig encoder_config{config.depth, config.dim, config.readout};
  TrainResult result;
  result.encoder_config = encoder_config;
  register_encoder_params(result.params, encoder_config, dataset.ontology.size());
  glorot_init(result.params, config.seed);

  PositiveIndex positives = PositiveIndex::from_trials(dataset.trials);
  AdamState adam;
  AdamConfig adam_config;
  adam_config.lr = config.lr;

  std::vector<std::size_t> order(dataset.trials.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffler(config.seed ^ 0x5eedf00dULL);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(order);
    double epoch_total = 0.0;
    std::size_t batch_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<TrialRecord> batch_trials;
      batch_trials.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) batch_trials.push_back(dataset.trials[order[k]]);

      try {
        Tape tape;
        ParamSession session(tape, result.params);
        Batch batch = build_batch(session, batch_trials, dataset, positives, encoder_config);
        Var loss = batch_loss(batch);
        tape.backward(loss);
        adam_step(result.params, session.gradients(), adam, adam_config);
        epoch_total += tape.value(loss).scalar_value();
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NumericalError) {
          throw Error(ErrorKind::NumericalError,
                      "epoch " + std::to_string(epoch) + " batch " + std::to_string(batch_count) +
                          ": " + e.what());
        }
        throw;
      }
      ++batch_count;
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(batch_count));
  }
  return result;
}

}  // namespace drugclip
