#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drugclip/pipeline.hpp"

namespace py = pybind11;
using namespace drugclip;

namespace {

// a loaded checkpoint plus its ontology, ready to embed and score
struct Model {
  Checkpoint ckpt;
  Ontology ontology;
  MpnnConfig config;

  static Model load(const std::string& path) {
    Model model{load_checkpoint(path), {}, {}};
    model.ontology = model.ckpt.make_ontology();
    model.config = MpnnConfig{model.ckpt.config.depth, model.ckpt.config.dim,
                              model.ckpt.config.readout};
    return model;
  }

  std::vector<double> embed_drug(const std::string& smiles) const {
    return mpnn_embed(ckpt.params, parse_smiles(smiles), config).values();
  }

  std::vector<double> embed_codes(const std::string& codes_text) const {
    return disease_set_embed(ckpt.params, ontology, parse_code_list(codes_text)).values();
  }

  double similarity(const std::string& smiles, const std::string& codes_text) const {
    return cosine_similarity(Tensor::from_values(embed_drug(smiles)),
                             Tensor::from_values(embed_codes(codes_text)));
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "drug-disease contrastive ranking core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error");

  py::class_<Atom>(m, "Atom")
      .def_property_readonly("element", [](const Atom& a) { return element_symbol(a.element); })
      .def_readonly("aromatic", &Atom::aromatic)
      .def_readonly("formal_charge", &Atom::formal_charge)
      .def_readonly("degree", &Atom::degree)
      .def("__repr__", [](const Atom& a) {
        return std::string("Atom(") + element_symbol(a.element) +
               (a.aromatic ? ", aromatic" : "") + ")";
      });

  py::class_<Bond>(m, "Bond")
      .def_readonly("a", &Bond::a)
      .def_readonly("b", &Bond::b)
      .def_readonly("code", &Bond::code);

  py::class_<MolGraph>(m, "MolGraph")
      .def_readonly("atoms", &MolGraph::atoms)
      .def_readonly("bonds", &MolGraph::bonds)
      .def_readonly("source", &MolGraph::source);

  py::class_<DiseaseCode>(m, "DiseaseCode")
      .def_readonly("canonical", &DiseaseCode::canonical)
      .def_readonly("display", &DiseaseCode::display)
      .def_readonly("description", &DiseaseCode::description)
      .def("__repr__", [](const DiseaseCode& c) { return "DiseaseCode(" + c.display + ")"; });

  py::class_<Ontology>(m, "Ontology")
      .def_static("load", &load_code_table, py::arg("path"))
      .def("__len__", &Ontology::size)
      .def("contains", &Ontology::contains, py::arg("canonical"))
      .def("id_of", &Ontology::id_of, py::arg("canonical"));

  m.def("parse_smiles", &parse_smiles, py::arg("text"),
        "Parse a single-fragment SMILES string into a molecular graph.");
  m.def("atom_features",
        [](const Atom& atom) { return atom_features(atom).values(); }, py::arg("atom"));
  m.def("bond_feature",
        [](int code) { return bond_feature(code).values(); }, py::arg("code"));
  m.def("normalize_code", &normalize_code, py::arg("text"));
  m.def("ancestors", &ancestors, py::arg("code"));
  m.def("hit_at_k", &hit_at_k, py::arg("rank"), py::arg("db_size"), py::arg("k_percent"));

  m.def(
      "train",
      [](const std::string& trials, const std::string& drugs, const std::string& icd,
         const std::string& out, int dim, int depth, int epochs, int batch, double lr,
         std::uint64_t seed) {
        TrainConfig config;
        config.dim = dim;
        config.depth = depth;
        config.epochs = epochs;
        config.batch_size = batch;
        config.lr = lr;
        config.seed = seed;
        return train_files(trials, drugs, icd, config, out).epoch_loss;
      },
      py::arg("trials"), py::arg("drugs"), py::arg("icd"), py::arg("out"), py::arg("dim") = 64,
      py::arg("depth") = 3, py::arg("epochs") = 10, py::arg("batch") = 32, py::arg("lr") = 1e-3,
      py::arg("seed") = 42,
      "Train from trial/drug/code files, write a checkpoint, return per-epoch losses.");

  m.def(
      "evaluate",
      [](const std::string& model, const std::string& trials, const std::string& drugs,
         const std::string& icd, const std::string& cutoff, const std::string& cutoff_end,
         const std::vector<double>& ks) {
        EvalFilesResult result = evaluate_files(model, trials, drugs, icd, cutoff, cutoff_end, ks);
        std::vector<std::tuple<double, double, std::size_t>> rows;
        rows.reserve(result.report.metrics.size());
        for (const KMetric& metric : result.report.metrics) {
          rows.emplace_back(metric.k_percent, metric.hit_rate, metric.n_queries);
        }
        return rows;
      },
      py::arg("model"), py::arg("trials"), py::arg("drugs"), py::arg("icd"), py::arg("cutoff"),
      py::arg("cutoff_end"), py::arg("ks") = std::vector<double>{10.0, 30.0},
      "Temporal-split evaluation; returns (k_percent, hit_rate, n_queries) rows.");

  m.def("rank", &rank_files, py::arg("model"), py::arg("codes"), py::arg("drugs"),
        py::arg("top") = 20,
        "Rank the drug table for a ';'-separated code query; returns (drug_id, score) pairs.");

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::load, py::arg("path"))
      .def_property_readonly("dim", [](const Model& model) { return model.ckpt.config.dim; })
      .def_property_readonly("depth", [](const Model& model) { return model.ckpt.config.depth; })
      .def("embed_drug", &Model::embed_drug, py::arg("smiles"),
           "Molecular-graph embedding of one SMILES string.")
      .def("embed_codes", &Model::embed_codes, py::arg("codes"),
           "Embedding of a ';'-separated disease-code set.")
      .def("similarity", &Model::similarity, py::arg("smiles"), py::arg("codes"),
           "Cosine score between a drug and a disease-code set.");
}
