#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drugclip/autodiff.hpp"
#include "drugclip/dataio.hpp"
#include "drugclip/encoders.hpp"
#include "drugclip/optim.hpp"

namespace drugclip {

// Canonical key for a disease set: sorted unique canonical codes joined by
// ';'. Order- and duplication-independent.
std::string disease_set_key(const std::vector<DiseaseCode>& codes);

// (drug id, disease-set key) pairs observed as treatments.
class PositiveIndex {
 public:
  void add(const std::string& drug_id, const std::vector<DiseaseCode>& codes);
  bool is_positive(const std::string& drug_id, const std::string& set_key) const;
  std::size_t size() const { return pairs_.size(); }

  static PositiveIndex from_trials(const std::vector<TrialRecord>& trials);

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

// Pairwise cosine similarities: S[i][j] = cos(drug_i, disease_j).
Tensor similarity_matrix(const std::vector<Tensor>& drug_embs,
                         const std::vector<Tensor>& disease_embs);

// Mean over all entries of the per-pair binary cross entropy on sigmoid(S).
double bce_loss(const Tensor& similarity, const Tensor& labels);

// B x B binary label matrix for one batch: Y[i][j] = 1 iff drug_i paired with
// disease set_j is a known positive. The diagonal is 1 by construction.
Tensor label_matrix(const std::vector<TrialRecord>& trials, const PositiveIndex& positives);

// One batch encoded on the session's tape, ready for the loss.
struct Batch {
  std::vector<Var> drug_embeddings;
  std::vector<Var> disease_embeddings;
  Tensor labels;
};

Batch build_batch(ParamSession& session, const std::vector<TrialRecord>& trials,
                  const Dataset& dataset, const PositiveIndex& positives,
                  const MpnnConfig& config);

// Loss of one encoded batch (differentiable).
Var batch_loss(const Batch& batch);

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  int dim = 64;
  int depth = 3;
  Readout readout = Readout::Sum;
};

struct TrainResult {
  ParameterStore params;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  MpnnConfig encoder_config;
};

// Shuffles trials each epoch with the seeded generator, trains on every
// batch (the final short batch included), and records the mean loss per
// epoch. Deterministic for a fixed seed and dataset.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

}  // namespace drugclip
