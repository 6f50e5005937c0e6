#include "drugclip/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <thread>

#include "drugclip/rng.hpp"

namespace drugclip {

namespace {

std::size_t thread_budget(std::size_t jobs) {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DRUGCLIP_THREADS")) {
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) hw = std::min(hw, static_cast<std::size_t>(parsed));
  }
  return std::max<std::size_t>(1, std::min(hw, jobs));
}

// Runs fn(i) for i in [0, jobs); each index is handled exactly once and
// results must be written into per-index slots.
template <typename Fn>
void parallel_for(std::size_t jobs, const Fn& fn) {
  std::size_t threads = thread_budget(jobs);
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < jobs; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace

TemporalSplit temporal_split(const std::vector<TrialRecord>& trials, const Date& cutoff,
                             const Date& cutoff_end, const std::vector<DrugRecord>* drug_table) {
  if (!(cutoff < cutoff_end)) {
    throw Error(ErrorKind::InvalidDateRange,
                cutoff.to_string() + " .. " + cutoff_end.to_string());
  }

  TemporalSplit split;
  // earliest pre-cutoff trial per drug supplies its SMILES
  std::map<std::string, std::pair<Date, std::string>> first_seen;
  for (const TrialRecord& trial : trials) {
    if (trial.date < cutoff) {
      split.train.push_back(trial);
      auto it = first_seen.find(trial.drug_id);
      if (it == first_seen.end() || trial.date < it->second.first) {
        first_seen[trial.drug_id] = {trial.date, trial.smiles};
      }
    }
  }

  std::map<std::string, std::string> db;
  for (const auto& [drug_id, seen] : first_seen) db[drug_id] = seen.second;
  if (drug_table != nullptr) {
    for (const DrugRecord& drug : *drug_table) {
      if (drug.first_tested_date < cutoff) db[drug.drug_id] = drug.smiles;
    }
  }

  for (const TrialRecord& trial : trials) {
    if (!(trial.date < cutoff) && trial.date < cutoff_end && db.count(trial.drug_id) > 0) {
      split.test.push_back(trial);
    }
  }

  split.drug_db.reserve(db.size());
  for (const auto& [drug_id, smiles] : db) split.drug_db.push_back(DrugEntry{drug_id, smiles});
  return split;
}

std::size_t pessimistic_rank(const std::vector<double>& scores, std::size_t candidate) {
  double own = scores[candidate];
  std::size_t rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == candidate) continue;
    if (scores[i] >= own) ++rank;
  }
  return rank;
}

bool hit_at_k(std::size_t rank, std::size_t db_size, double k_percent) {
  if (!(k_percent > 0.0) || k_percent > 100.0) {
    throw Error(ErrorKind::InvalidK, "k_percent must be in (0, 100], got " +
                                         std::to_string(k_percent));
  }
  if (db_size == 0) throw Error(ErrorKind::EmptyDrugDb, "empty drug database");
  // the 1e-9 guard keeps exact products like 10% of 100 from ceiling up on
  // floating-point overshoot
  double exact = k_percent * static_cast<double>(db_size) / 100.0;
  auto threshold = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return rank <= threshold;
}

ModelScorer::ModelScorer(const ParameterStore& params, const MpnnConfig& config,
                         const Ontology& ontology, std::vector<DrugEntry> drug_db)
    : params_(params), config_(config), ontology_(ontology), db_(std::move(drug_db)) {
  if (db_.empty()) throw Error(ErrorKind::EmptyDrugDb, "drug database is empty");
  drug_embeddings_.resize(db_.size());
  std::vector<MolGraph> graphs(db_.size());
  for (std::size_t i = 0; i < db_.size(); ++i) {
    try {
      graphs[i] = parse_smiles(db_[i].smiles);
    } catch (const Error& e) {
      throw Error(e.kind(), "drug " + db_[i].drug_id + ": " + e.what());
    }
  }
  parallel_for(db_.size(), [&](std::size_t i) {
    drug_embeddings_[i] = mpnn_embed(params_, graphs[i], config_);
  });
}

std::vector<double> ModelScorer::score(const std::vector<DiseaseCode>& query,
                                       std::size_t /*query_index*/) const {
  Tensor disease = disease_set_embed(params_, ontology_, query);
  std::vector<double> out(db_.size());
  for (std::size_t i = 0; i < db_.size(); ++i) {
    out[i] = cosine_similarity(drug_embeddings_[i], disease);
  }
  return out;
}

RandomScorer::RandomScorer(std::uint64_t seed, std::vector<DrugEntry> drug_db)
    : seed_(seed), db_(std::move(drug_db)) {
  if (db_.empty()) throw Error(ErrorKind::EmptyDrugDb, "drug database is empty");
}

std::vector<double> RandomScorer::score(const std::vector<DiseaseCode>& /*query*/,
                                        std::size_t query_index) const {
  Rng rng = named_stream(seed_, "query:" + std::to_string(query_index));
  std::vector<double> out(db_.size());
  for (double& s : out) s = rng.next_double();
  return out;
}

PopularityScorer::PopularityScorer(const std::vector<TrialRecord>& train_trials,
                                   std::vector<DrugEntry> drug_db)
    : db_(std::move(drug_db)) {
  if (db_.empty()) throw Error(ErrorKind::EmptyDrugDb, "drug database is empty");
  std::map<std::string, double> counts;
  for (const TrialRecord& trial : train_trials) counts[trial.drug_id] += 1.0;
  counts_.reserve(db_.size());
  for (const DrugEntry& drug : db_) {
    auto it = counts.find(drug.drug_id);
    counts_.push_back(it == counts.end() ? 0.0 : it->second);
  }
}

std::vector<double> PopularityScorer::score(const std::vector<DiseaseCode>& /*query*/,
                                            std::size_t /*query_index*/) const {
  return counts_;
}

RankedResult rank_drugs(const Scorer& scorer, const TrialRecord& trial, std::size_t query_index) {
  RankedResult result;
  result.query = trial.codes;
  result.ground_truth = trial.drug_id;
  result.db_size = scorer.db_size();
  result.scores = scorer.score(trial.codes, query_index);

  const std::vector<DrugEntry>& db = scorer.db();
  std::size_t gt_index = db.size();
  for (std::size_t i = 0; i < db.size(); ++i) {
    if (db[i].drug_id == trial.drug_id) {
      gt_index = i;
      break;
    }
  }
  if (gt_index == db.size()) {
    throw Error(ErrorKind::UnknownCode,
                "ground-truth drug " + trial.drug_id + " is not in the drug database");
  }
  result.rank = pessimistic_rank(result.scores, gt_index);
  return result;
}

EvalReport evaluate(const Scorer& scorer, const TemporalSplit& split,
                    const std::vector<double>& ks) {
  if (split.test.empty()) {
    throw Error(ErrorKind::EmptyTestSet, "no test trials after the repurposing filter");
  }
  for (double k : ks) {
    if (!(k > 0.0) || k > 100.0) {
      throw Error(ErrorKind::InvalidK, "k_percent must be in (0, 100], got " + std::to_string(k));
    }
  }

  std::vector<std::size_t> ranks(split.test.size());
  parallel_for(split.test.size(), [&](std::size_t i) {
    ranks[i] = rank_drugs(scorer, split.test[i], i).rank;
  });

  EvalReport report;
  report.ranks.reserve(split.test.size());
  double rank_total = 0.0;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    report.ranks.push_back(TrialRank{split.test[i].trial_id, ranks[i], scorer.db_size()});
    rank_total += static_cast<double>(ranks[i]);
  }
  report.mean_rank = rank_total / static_cast<double>(split.test.size());

  for (double k : ks) {
    std::size_t hits = 0;
    for (std::size_t rank : ranks) {
      if (hit_at_k(rank, scorer.db_size(), k)) ++hits;
    }
    report.metrics.push_back(KMetric{
        k, static_cast<double>(hits) / static_cast<double>(split.test.size()), split.test.size()});
  }
  return report;
}

std::vector<std::pair<std::string, double>> top_ranked(const Scorer& scorer,
                                                       const std::vector<DiseaseCode>& query,
                                                       std::size_t top) {
  std::vector<double> scores = scorer.score(query, 0);
  const std::vector<DrugEntry>& db = scorer.db();
  std::vector<std::size_t> order(db.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return db[a].drug_id < db[b].drug_id;
  });
  std::size_t keep = std::min(top, order.size());
  std::vector<std::pair<std::string, double>> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    out.emplace_back(db[order[i]].drug_id, scores[order[i]]);
  }
  return out;
}

}  // namespace drugclip
