#include "drugclip/encoders.hpp"

#include <set>

namespace drugclip {

const char* to_string(Readout r) { return r == Readout::Sum ? "sum" : "mean"; }

Readout readout_from_string(const std::string& s) {
  if (s == "sum") return Readout::Sum;
  if (s == "mean") return Readout::Mean;
  throw Error(ErrorKind::CorruptCheckpoint, "unknown readout '" + s + "'");
}

namespace {

struct Mlp {
  Var w1, b1, w2, b2;
};

Mlp bind_mlp(ParamSession& session, const std::string& prefix) {
  return Mlp{session[prefix + ".w1"], session[prefix + ".b1"], session[prefix + ".w2"],
             session[prefix + ".b2"]};
}

Var relu_mlp(const Mlp& mlp, Var x) {
  return ag::linear(mlp.w2, mlp.b2, ag::relu(ag::linear(mlp.w1, mlp.b1, x)));
}

Var tanh_mlp(const Mlp& mlp, Var x) {
  return ag::linear(mlp.w2, mlp.b2, ag::tanh(ag::linear(mlp.w1, mlp.b1, x)));
}

}  // namespace

void register_encoder_params(ParameterStore& store, const MpnnConfig& config,
                             std::size_t code_count) {
  std::size_t d = static_cast<std::size_t>(config.dim);
  auto weight = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    store.register_param(name, Tensor::matrix(rows, cols), ParamKind::Weight);
  };
  auto bias = [&](const std::string& name, std::size_t len) {
    store.register_param(name, Tensor::vector(len), ParamKind::Bias);
  };

  weight("atom_proj", d, kAtomFeatureLength);

  // f1: message update, input e_u ++ e_uv ++ summed incoming messages
  weight("f1.w1", d, 2 * d + kBondFeatureLength);
  bias("f1.b1", d);
  weight("f1.w2", d, d);
  bias("f1.b2", d);

  // f2: node aggregation, input e_u ++ summed final messages
  weight("f2.w1", d, 2 * d);
  bias("f2.b1", d);
  weight("f2.w2", d, d);
  bias("f2.b2", d);

  // phi: attention score, input [ancestor embedding ; code embedding]
  weight("phi.w1", d, 2 * d);
  bias("phi.b1", d);
  weight("phi.w2", 1, d);
  bias("phi.b2", 1);

  store.register_param("code_emb", Tensor::matrix(code_count, d), ParamKind::Embedding);
}

Var mpnn_encode(ParamSession& session, const MolGraph& graph, const MpnnConfig& config,
                std::vector<Var>* node_embeddings) {
  Tape& tape = session.tape();
  std::size_t n = graph.atoms.size();
  std::size_t d = static_cast<std::size_t>(config.dim);

  Var proj = session["atom_proj"];
  Mlp f1 = bind_mlp(session, "f1");
  Mlp f2 = bind_mlp(session, "f2");

  // projected node features e_u
  std::vector<Var> node_feat;
  node_feat.reserve(n);
  for (const Atom& atom : graph.atoms) {
    Var raw = ag::constant(tape, atom_features(atom));
    node_feat.push_back(ag::matvec(proj, raw));
  }

  // directed edges: bond k yields edge 2k (a->b) and 2k+1 (b->a)
  std::size_t edge_count = 2 * graph.bonds.size();
  std::vector<int> edge_src(edge_count), edge_dst(edge_count);
  std::vector<Var> edge_feat(edge_count);
  std::vector<std::vector<std::size_t>> incoming(n);  // edge ids ending at node
  for (std::size_t k = 0; k < graph.bonds.size(); ++k) {
    const Bond& bond = graph.bonds[k];
    Var feat = ag::constant(tape, bond_feature(bond.code));
    edge_src[2 * k] = bond.a;
    edge_dst[2 * k] = bond.b;
    edge_feat[2 * k] = feat;
    edge_src[2 * k + 1] = bond.b;
    edge_dst[2 * k + 1] = bond.a;
    edge_feat[2 * k + 1] = feat;
    incoming[static_cast<std::size_t>(bond.b)].push_back(2 * k);
    incoming[static_cast<std::size_t>(bond.a)].push_back(2 * k + 1);
  }

  Var zero = ag::constant(tape, Tensor::vector(d));
  std::vector<Var> messages(edge_count, zero);

  for (int layer = 0; layer < config.depth; ++layer) {
    std::vector<Var> next(edge_count, zero);
    for (std::size_t e = 0; e < edge_count; ++e) {
      int u = edge_src[e];
      int v = edge_dst[e];
      // incoming messages at u, excluding the one that came from v
      std::vector<Var> terms;
      for (std::size_t in_edge : incoming[static_cast<std::size_t>(u)]) {
        if (edge_src[in_edge] == v) continue;
        terms.push_back(messages[in_edge]);
      }
      Var residual = terms.empty() ? zero : ag::sum(terms);
      Var input = ag::concat(std::array{node_feat[static_cast<std::size_t>(u)], edge_feat[e], residual});
      next[e] = relu_mlp(f1, input);
    }
    messages = std::move(next);
  }

  std::vector<Var> node_emb;
  node_emb.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<Var> terms;
    for (std::size_t in_edge : incoming[u]) terms.push_back(messages[in_edge]);
    Var total = terms.empty() ? zero : ag::sum(terms);
    Var input = ag::concat(std::array{node_feat[u], total});
    node_emb.push_back(relu_mlp(f2, input));
  }

  if (node_embeddings != nullptr) *node_embeddings = node_emb;
  return config.readout == Readout::Sum ? ag::sum(node_emb) : ag::mean(node_emb);
}

Var gram_encode(ParamSession& session, const Ontology& ontology, const DiseaseCode& code,
                Var* alphas_out) {
  Tape& tape = session.tape();
  if (!ontology.contains(code.canonical)) {
    throw Error(ErrorKind::UnknownCode, code.canonical);
  }
  Var table = session["code_emb"];
  std::size_t table_rows = tape.value(table).rows();

  // the attention context is the stored part of the chain; ancestor closure
  // is one level, so a minimal table may lack an intermediate prefix
  std::vector<DiseaseCode> chain;
  for (DiseaseCode& ancestor : ancestors(code)) {
    if (ontology.contains(ancestor.canonical)) chain.push_back(std::move(ancestor));
  }
  chain.push_back(code);

  std::vector<Var> basics;
  std::vector<Var> scores;
  basics.reserve(chain.size());
  scores.reserve(chain.size());
  std::size_t self_id = ontology.id_of(code.canonical);
  if (self_id >= table_rows) {
    throw Error(ErrorKind::UnknownCode, code.canonical + " is not covered by the embedding table");
  }
  Var self_emb = ag::row(table, self_id);

  Mlp phi = bind_mlp(session, "phi");
  for (const DiseaseCode& member : chain) {
    std::size_t id = ontology.id_of(member.canonical);
    if (id >= table_rows) {
      throw Error(ErrorKind::UnknownCode,
                  member.canonical + " is not covered by the embedding table");
    }
    Var emb = id == self_id ? self_emb : ag::row(table, id);
    basics.push_back(emb);
    Var score = tanh_mlp(phi, ag::concat(std::array{emb, self_emb}));
    scores.push_back(ag::element(score, 0));
  }

  Var alphas = ag::softmax(ag::concat(scores));
  if (alphas_out != nullptr) *alphas_out = alphas;
  std::vector<Var> weighted;
  weighted.reserve(chain.size());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    weighted.push_back(ag::scale(ag::element(alphas, k), basics[k]));
  }
  return ag::sum(weighted);
}

Var encode_disease_set(ParamSession& session, const Ontology& ontology,
                       const std::vector<DiseaseCode>& codes) {
  std::set<std::string> unique;
  for (const DiseaseCode& code : codes) unique.insert(code.canonical);
  if (unique.empty()) throw Error(ErrorKind::EmptyDiseaseSet, "disease set is empty");
  std::vector<Var> members;
  members.reserve(unique.size());
  for (const std::string& canonical : unique) {
    members.push_back(gram_encode(session, ontology, ontology.get(canonical)));
  }
  return ag::mean(members);
}

Tensor mpnn_embed(const ParameterStore& params, const MolGraph& graph, const MpnnConfig& config) {
  Tape tape(/*grad_enabled=*/false);
  ParamSession session(tape, params);
  Var out = mpnn_encode(session, graph, config);
  return tape.value(out);
}

Tensor gram_embed(const ParameterStore& params, const Ontology& ontology,
                  const DiseaseCode& code) {
  Tape tape(/*grad_enabled=*/false);
  ParamSession session(tape, params);
  Var out = gram_encode(session, ontology, code);
  return tape.value(out);
}

Tensor disease_set_embed(const ParameterStore& params, const Ontology& ontology,
                         const std::vector<DiseaseCode>& codes) {
  Tape tape(/*grad_enabled=*/false);
  ParamSession session(tape, params);
  Var out = encode_disease_set(session, ontology, codes);
  return tape.value(out);
}

}  // namespace drugclip
