#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drugclip/dataio.hpp"
#include "drugclip/encoders.hpp"
#include "drugclip/pipeline.hpp"
#include "support/tmpfiles.hpp"

using namespace drugclip;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

ErrorKind error_kind_of(const std::function<void()>& fn, const std::string& needle = "") {
  try {
    fn();
  } catch (const Error& e) {
    if (!needle.empty()) {
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos,
                    "missing '" << needle << "' in: " << e.what());
    }
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::EmptyInput;
}

const char* kGoodTrials =
    "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\n"
    "NCT001\t2015-06-01\tDB01\tCCO\tG44.311\n"
    "NCT002\t2017-01-15\tDB02\tc1ccccc1\tC34.91;D41.20\n";

}  // namespace

TEST_CASE("date parsing") {
  Date d = parse_date("2015-06-01");
  CHECK(d.year == 2015);
  CHECK(d.month == 6);
  CHECK(d.day == 1);
  CHECK(parse_date("2024-02-29") == Date{2024, 2, 29});
  CHECK(Date{2015, 6, 1} < Date{2015, 6, 2});
  CHECK(Date{2015, 12, 31} < Date{2016, 1, 1});

  for (const char* bad : {"2023-02-29", "2023-13-01", "2023-00-10", "23-01-01", "2023/01/01",
                          "2023-1-1", "garbage", ""}) {
    CAPTURE(bad);
    CHECK(error_kind_of([&] { parse_date(bad); }) == ErrorKind::UnparseableDate);
  }
}

TEST_CASE("load_trials") {
  TempDir dir;
  SUBCASE("field mapping") {
    std::string path = dir.file("trials.tsv");
    write_file(path, kGoodTrials);
    std::vector<TrialRecord> trials = load_trials(path);
    REQUIRE(trials.size() == 2);
    CHECK(trials[0].trial_id == "NCT001");
    CHECK(trials[0].date == Date{2015, 6, 1});
    CHECK(trials[0].drug_id == "DB01");
    CHECK(trials[0].smiles == "CCO");
    REQUIRE(trials[0].codes.size() == 1);
    CHECK(trials[0].codes[0].canonical == "G44311");
    REQUIRE(trials[1].codes.size() == 2);
    CHECK(trials[1].codes[0].canonical == "C3491");
  }
  SUBCASE("empty icd_codes is malformed") {
    std::string path = dir.file("bad.tsv");
    write_file(path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\nNCT001\t2015-06-01\tDB01\tCCO\t\n");
    CHECK(error_kind_of([&] { load_trials(path); }, "line 2") == ErrorKind::MalformedRow);
  }
  SUBCASE("duplicate trial ids") {
    std::string path = dir.file("dup.tsv");
    write_file(path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\n"
               "NCT001\t2015-06-01\tDB01\tCCO\tG44\n"
               "NCT001\t2016-06-01\tDB02\tCC\tG44\n");
    CHECK(error_kind_of([&] { load_trials(path); }, "line 3") == ErrorKind::DuplicateTrialId);
  }
  SUBCASE("wrong column count") {
    std::string path = dir.file("cols.tsv");
    write_file(path, "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\nNCT001\t2015-06-01\tDB01\n");
    CHECK(error_kind_of([&] { load_trials(path); }, "line 2") == ErrorKind::MalformedRow);
  }
  SUBCASE("bad date") {
    std::string path = dir.file("date.tsv");
    write_file(path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\nNCT001\t2015-6-1\tDB01\tCCO\tG44\n");
    CHECK(error_kind_of([&] { load_trials(path); }, "line 2") == ErrorKind::UnparseableDate);
  }
  SUBCASE("bad code") {
    std::string path = dir.file("code.tsv");
    write_file(path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\nNCT001\t2015-06-01\tDB01\tCCO\t4471\n");
    CHECK(error_kind_of([&] { load_trials(path); }, "line 2") == ErrorKind::InvalidCodeFormat);
  }
  SUBCASE("missing file") {
    CHECK(error_kind_of([&] { load_trials(dir.file("nope.tsv")); }) == ErrorKind::FileNotFound);
  }
  SUBCASE("CRLF line endings") {
    std::string path = dir.file("crlf.tsv");
    write_file(path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\r\n"
               "NCT001\t2015-06-01\tDB01\tCCO\tG44.311\r\n");
    std::vector<TrialRecord> trials = load_trials(path);
    REQUIRE(trials.size() == 1);
    CHECK(trials[0].codes[0].canonical == "G44311");
  }
}

TEST_CASE("load_drug_db") {
  TempDir dir;
  SUBCASE("two valid rows") {
    std::string path = dir.file("drugs.tsv");
    write_file(path,
               "drug_id\tsmiles\tfirst_tested_date\nDB01\tCCO\t2010-01-01\nDB02\tCC\t2011-02-03\n");
    std::vector<DrugRecord> drugs = load_drug_db(path);
    REQUIRE(drugs.size() == 2);
    CHECK(drugs[0].drug_id == "DB01");
    CHECK(drugs[1].first_tested_date == Date{2011, 2, 3});
  }
  SUBCASE("duplicate drug id") {
    std::string path = dir.file("dup.tsv");
    write_file(path,
               "drug_id\tsmiles\tfirst_tested_date\nDB01\tCCO\t2010-01-01\nDB01\tCC\t2011-02-03\n");
    CHECK(error_kind_of([&] { load_drug_db(path); }, "line 3") == ErrorKind::DuplicateDrugId);
  }
  SUBCASE("missing column") {
    std::string path = dir.file("cols.tsv");
    write_file(path, "drug_id\tsmiles\tfirst_tested_date\nDB01\tCCO\n");
    CHECK(error_kind_of([&] { load_drug_db(path); }, "line 2") == ErrorKind::MalformedRow);
  }
}

TEST_CASE("build_dataset") {
  TempDir dir;
  SUBCASE("unparseable SMILES drops the trial with a warning") {
    std::string trials_path = dir.file("trials.tsv");
    write_file(trials_path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\n"
               "NCT001\t2015-06-01\tDB01\tCCO\tG44.311\n"
               "NCT002\t2016-06-01\tDB02\tC1CC\tG44.311\n");
    Ontology onto;
    onto.insert(normalize_code("G44.311"));
    Dataset dataset = build_dataset(load_trials(trials_path), std::move(onto));
    CHECK(dataset.trials.size() == 1);
    CHECK(dataset.trials[0].trial_id == "NCT001");
    CHECK(dataset.graphs.count("DB01") == 1);
    CHECK(dataset.graphs.count("DB02") == 0);
  }
  SUBCASE("codes missing from the table are inserted") {
    std::string trials_path = dir.file("trials.tsv");
    write_file(trials_path, kGoodTrials);
    Ontology onto;
    onto.insert(normalize_code("G44.311"));
    Dataset dataset = build_dataset(load_trials(trials_path), std::move(onto));
    CHECK(dataset.ontology.contains("C3491"));
    CHECK(dataset.ontology.contains("C34"));
    CHECK(dataset.ontology.contains("D4120"));
  }
  SUBCASE("empty trial SMILES falls back to the drug table") {
    std::string trials_path = dir.file("trials.tsv");
    write_file(trials_path,
               "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\nNCT001\t2015-06-01\tDB01\t\tG44.311\n");
    std::string drugs_path = dir.file("drugs.tsv");
    write_file(drugs_path, "drug_id\tsmiles\tfirst_tested_date\nDB01\tCCO\t2010-01-01\n");
    std::string icd_path = dir.file("icd.csv");
    write_file(icd_path, "code,description\nG44.311,x\n");
    Dataset dataset = load_training_dataset(trials_path, drugs_path, icd_path);
    REQUIRE(dataset.trials.size() == 1);
    CHECK(dataset.trials[0].smiles == "CCO");
    CHECK(dataset.graphs.at("DB01").atoms.size() == 3);
  }
}

TEST_CASE("checkpoint round trip is bitwise") {
  TempDir dir;
  MpnnConfig config{3, 16, Readout::Sum};
  Ontology onto;
  onto.insert(normalize_code("G44.311"));
  onto.insert(normalize_code("C34.91"));
  ParameterStore store;
  register_encoder_params(store, config, onto.size());
  glorot_init(store, 321);

  CheckpointConfig ckpt_config{16, 3, Readout::Sum, 321};
  std::string path = dir.file("model.ckpt");
  save_checkpoint(store, ckpt_config, onto, path);

  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.format_version == kCheckpointVersion);
  CHECK(loaded.config.dim == 16);
  CHECK(loaded.config.depth == 3);
  CHECK(loaded.config.readout == Readout::Sum);
  CHECK(loaded.config.seed == 321);
  CHECK(loaded.ontology_codes == onto.id_order());
  CHECK(loaded.schema_hash == feature_schema_hash());

  CHECK(loaded.params.size() == store.size());
  for (const auto& [name, entry] : store) {
    const Tensor& restored = loaded.params.at(name);
    REQUIRE(restored.same_shape(entry.value));
    CHECK(loaded.params.kind_of(name) == entry.kind);
    for (std::size_t i = 0; i < restored.size(); ++i) CHECK(restored[i] == entry.value[i]);
  }

  Ontology restored_onto = loaded.make_ontology();
  CHECK(restored_onto.id_order() == onto.id_order());

  SUBCASE("restored encoders reproduce embeddings bitwise") {
    MolGraph graph = parse_smiles("CC(=O)O");
    Tensor a = mpnn_embed(store, graph, config);
    Tensor b = mpnn_embed(loaded.params, graph, config);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("checkpoint error paths") {
  TempDir dir;
  MpnnConfig config{2, 4, Readout::Mean};
  Ontology onto;
  onto.insert(normalize_code("A00"));
  ParameterStore store;
  register_encoder_params(store, config, onto.size());
  glorot_init(store, 5);
  CheckpointConfig ckpt_config{4, 2, Readout::Mean, 5};
  std::string path = dir.file("model.ckpt");
  save_checkpoint(store, ckpt_config, onto, path);
  std::string content = testsupport::read_file(path);

  SUBCASE("missing file") {
    CHECK(error_kind_of([&] { load_checkpoint(dir.file("none.ckpt")); }) ==
          ErrorKind::FileNotFound);
  }
  SUBCASE("truncation") {
    std::string broken = dir.file("trunc.ckpt");
    write_file(broken, content.substr(0, content.size() / 2));
    CHECK(error_kind_of([&] { load_checkpoint(broken); }) == ErrorKind::CorruptCheckpoint);
  }
  SUBCASE("unsupported version") {
    std::string bumped = dir.file("bumped.ckpt");
    std::string edited = content;
    edited.replace(edited.find("drugclip-checkpoint 1"), 21, "drugclip-checkpoint 9");
    write_file(bumped, edited);
    CHECK(error_kind_of([&] { load_checkpoint(bumped); }) == ErrorKind::UnsupportedVersion);
  }
  SUBCASE("schema hash mismatch") {
    std::string mismatched = dir.file("schema.ckpt");
    std::size_t at = content.find("schema ");
    std::size_t end = content.find('\n', at);
    std::string edited = content.substr(0, at) + "schema 1234" + content.substr(end);
    write_file(mismatched, edited);
    CHECK(error_kind_of([&] { load_checkpoint(mismatched); }, "schema") ==
          ErrorKind::CorruptCheckpoint);
  }
  SUBCASE("bad magic") {
    std::string wrong = dir.file("magic.ckpt");
    write_file(wrong, "something-else 1\n");
    CHECK(error_kind_of([&] { load_checkpoint(wrong); }) == ErrorKind::CorruptCheckpoint);
  }
}
