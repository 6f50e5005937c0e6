#pragma once

#include <string>
#include <vector>

#include "drugclip/autodiff.hpp"
#include "drugclip/molgraph.hpp"
#include "drugclip/ontology.hpp"
#include "drugclip/params.hpp"

namespace drugclip {

enum class Readout { Sum, Mean };

const char* to_string(Readout r);
Readout readout_from_string(const std::string& s);

struct MpnnConfig {
  int depth = 3;    // message-passing rounds
  int dim = 64;     // embedding width
  Readout readout = Readout::Sum;
};

// Registers every parameter both encoders need: the atom-feature projection,
// the two message MLPs, the attention MLP, and one basic embedding per
// ontology code.
void register_encoder_params(ParameterStore& store, const MpnnConfig& config,
                             std::size_t code_count);

// Directed-edge message passing over the molecular graph: depth rounds of
// message updates (messages start at zero), per-node aggregation, then a
// sum or mean readout into one graph-level embedding. node_embeddings, when
// given, receives the per-node vectors in atom order.
Var mpnn_encode(ParamSession& session, const MolGraph& graph, const MpnnConfig& config,
                std::vector<Var>* node_embeddings = nullptr);

// Attention-weighted average of the code's own and its ancestors' basic
// embeddings; the weights are a softmax over a learned score of each
// (ancestor, code) embedding pair. alphas_out, when given, receives the
// attention weights (ancestors shortest-first, the code itself last).
Var gram_encode(ParamSession& session, const Ontology& ontology, const DiseaseCode& code,
                Var* alphas_out = nullptr);

// Mean of gram_encode over the deduplicated set; order-independent.
Var encode_disease_set(ParamSession& session, const Ontology& ontology,
                       const std::vector<DiseaseCode>& codes);

// Inference variants over frozen parameters (no gradient recording).
Tensor mpnn_embed(const ParameterStore& params, const MolGraph& graph, const MpnnConfig& config);
Tensor gram_embed(const ParameterStore& params, const Ontology& ontology, const DiseaseCode& code);
Tensor disease_set_embed(const ParameterStore& params, const Ontology& ontology,
                         const std::vector<DiseaseCode>& codes);

}  // namespace drugclip
