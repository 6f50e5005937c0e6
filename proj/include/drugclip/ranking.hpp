#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drugclip/contrastive.hpp"
#include "drugclip/dataio.hpp"

namespace drugclip {

struct DrugEntry {
  std::string drug_id;
  std::string smiles;
};

// Trials partitioned by date. drug_db holds every drug first seen before the
// cutoff (sorted by drug_id); test trials whose drug is not in drug_db are
// removed, so every test query's ground truth is rankable.
struct TemporalSplit {
  std::vector<TrialRecord> train;
  std::vector<TrialRecord> test;
  std::vector<DrugEntry> drug_db;
};

// Partitions trials into train (date < cutoff) and test (cutoff <= date <
// cutoff_end; later trials are out of window). When a drug table is given,
// drugs first tested before the cutoff join drug_db and their table SMILES
// take precedence over trial SMILES.
TemporalSplit temporal_split(const std::vector<TrialRecord>& trials, const Date& cutoff,
                             const Date& cutoff_end,
                             const std::vector<DrugRecord>* drug_table = nullptr);

// Rank counting every tie against the candidate: 1 + |greater| + |equal,
// excluding the candidate itself|.
std::size_t pessimistic_rank(const std::vector<double>& scores, std::size_t candidate);

// true iff rank <= ceil(k_percent/100 * db_size).
bool hit_at_k(std::size_t rank, std::size_t db_size, double k_percent);

// Scores every drug in a fixed database for one disease-code query.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::size_t db_size() const = 0;
  virtual const std::vector<DrugEntry>& db() const = 0;
  // aligned with db() order; must be safe to call from multiple threads
  virtual std::vector<double> score(const std::vector<DiseaseCode>& query,
                                    std::size_t query_index) const = 0;
};

// Trained-model scorer: cosine between cached drug embeddings and the
// encoded disease set.
class ModelScorer : public Scorer {
 public:
  ModelScorer(const ParameterStore& params, const MpnnConfig& config, const Ontology& ontology,
              std::vector<DrugEntry> drug_db);

  std::size_t db_size() const override { return db_.size(); }
  const std::vector<DrugEntry>& db() const override { return db_; }
  std::vector<double> score(const std::vector<DiseaseCode>& query,
                            std::size_t query_index) const override;

 private:
  const ParameterStore& params_;
  MpnnConfig config_;
  const Ontology& ontology_;
  std::vector<DrugEntry> db_;
  std::vector<Tensor> drug_embeddings_;  // cached once, reused per query
};

// Seeded uniform scores; a fresh stream per query index.
class RandomScorer : public Scorer {
 public:
  RandomScorer(std::uint64_t seed, std::vector<DrugEntry> drug_db);
  std::size_t db_size() const override { return db_.size(); }
  const std::vector<DrugEntry>& db() const override { return db_; }
  std::vector<double> score(const std::vector<DiseaseCode>& query,
                            std::size_t query_index) const override;

 private:
  std::uint64_t seed_;
  std::vector<DrugEntry> db_;
};

// Scores each drug by its training-trial frequency, constant across queries.
class PopularityScorer : public Scorer {
 public:
  PopularityScorer(const std::vector<TrialRecord>& train_trials, std::vector<DrugEntry> drug_db);
  std::size_t db_size() const override { return db_.size(); }
  const std::vector<DrugEntry>& db() const override { return db_; }
  std::vector<double> score(const std::vector<DiseaseCode>& query,
                            std::size_t query_index) const override;

 private:
  std::vector<DrugEntry> db_;
  std::vector<double> counts_;
};

struct RankedResult {
  std::vector<DiseaseCode> query;
  std::vector<double> scores;
  std::string ground_truth;
  std::size_t rank = 0;  // 1-based, pessimistic
  std::size_t db_size = 0;
};

// Scores the whole database for one test trial and ranks its ground truth.
RankedResult rank_drugs(const Scorer& scorer, const TrialRecord& trial, std::size_t query_index);

struct KMetric {
  double k_percent = 0.0;
  double hit_rate = 0.0;  // fraction in [0, 1]
  std::size_t n_queries = 0;
};

struct TrialRank {
  std::string trial_id;
  std::size_t rank = 0;
  std::size_t db_size = 0;
};

struct EvalReport {
  std::vector<KMetric> metrics;
  std::vector<TrialRank> ranks;  // one per test trial, in split order
  double mean_rank = 0.0;
};

// Ranks every test trial and averages hit@k over them. Queries may run in
// parallel (capped by DRUGCLIP_THREADS); the report is order-independent.
EvalReport evaluate(const Scorer& scorer, const TemporalSplit& split,
                    const std::vector<double>& ks);

// Top-scored drugs for an ad-hoc query; descending score, ties by drug_id.
std::vector<std::pair<std::string, double>> top_ranked(const Scorer& scorer,
                                                       const std::vector<DiseaseCode>& query,
                                                       std::size_t top);

}  // namespace drugclip
