"""Smoke tests for the Python module."""

import pytest

import drugclip


def test_parse_benzene():
    g = drugclip.parse_smiles("c1ccccc1")
    assert len(g.atoms) == 6
    assert len(g.bonds) == 6
    assert all(a.aromatic for a in g.atoms)
    assert all(b.code == 4 for b in g.bonds)


def test_parse_error_raises():
    with pytest.raises(drugclip.Error, match="UnclosedRing"):
        drugclip.parse_smiles("C1CC")


def test_atom_and_bond_features():
    g = drugclip.parse_smiles("C=O")
    feats = drugclip.atom_features(g.atoms[0])
    assert len(feats) == 24
    assert sum(feats) in (3.0, 4.0)
    assert drugclip.bond_feature(4) == [0.0, 0.0, 0.0, 1.0]


def test_code_normalization_and_ancestors():
    code = drugclip.normalize_code("g44.311")
    assert code.canonical == "G44311"
    assert code.display == "G44.311"
    assert [a.canonical for a in drugclip.ancestors(code)] == ["G44", "G4431"]


def test_hit_at_k_boundaries():
    assert drugclip.hit_at_k(10, 100, 10.0)
    assert not drugclip.hit_at_k(11, 100, 10.0)
    assert drugclip.hit_at_k(273, 2727, 10.0)


def test_ontology_load(tmp_path):
    table = tmp_path / "codes.csv"
    table.write_text("code,description\nG44.311,Acute post-traumatic headache\n")
    onto = drugclip.Ontology.load(str(table))
    assert len(onto) == 3
    assert onto.contains("G4431")


@pytest.fixture
def tiny_world(tmp_path):
    trials = tmp_path / "trials.tsv"
    drugs = tmp_path / "drugs.tsv"
    icd = tmp_path / "icd.csv"
    trials.write_text(
        "trial_id\tdate\tdrug_id\tsmiles\ticd_codes\n"
        "T01\t2010-01-01\tD1\tCCO\tA01.1\n"
        "T02\t2011-01-01\tD1\tCCO\tA01.1\n"
        "T03\t2010-02-01\tD2\tc1ccccc1\tB02.2\n"
        "T04\t2011-02-01\tD2\tc1ccccc1\tB02.2\n"
        "T05\t2012-01-01\tD3\tCCN\tC03.3\n"
        "T06\t2021-06-01\tD1\tCCO\tA01.1\n"
        "T07\t2021-07-01\tD2\tc1ccccc1\tB02.2\n"
    )
    drugs.write_text(
        "drug_id\tsmiles\tfirst_tested_date\n"
        "D1\tCCO\t2010-01-01\n"
        "D2\tc1ccccc1\t2010-02-01\n"
        "D3\tCCN\t2012-01-01\n"
    )
    icd.write_text("code,description\nA01.1,a\nB02.2,b\nC03.3,c\n")
    return {"trials": str(trials), "drugs": str(drugs), "icd": str(icd), "dir": tmp_path}


def test_train_eval_rank_round_trip(tiny_world):
    model = str(tiny_world["dir"] / "model.ckpt")
    losses = drugclip.train(
        tiny_world["trials"], tiny_world["drugs"], tiny_world["icd"], model,
        dim=8, depth=1, epochs=3, batch=4, seed=3,
    )
    assert len(losses) == 3

    rows = drugclip.evaluate(
        model, tiny_world["trials"], tiny_world["drugs"], tiny_world["icd"],
        "2021-01-01", "2024-01-01", ks=[50.0, 100.0],
    )
    assert [k for k, _, _ in rows] == [50.0, 100.0]
    assert rows[1][1] == 1.0  # hit@100%
    assert all(n == 2 for _, _, n in rows)

    ranked = drugclip.rank(model, "A01.1", tiny_world["drugs"], top=3)
    assert len(ranked) == 3
    ids = [drug_id for drug_id, _ in ranked]
    assert set(ids) == {"D1", "D2", "D3"}
    scores = [score for _, score in ranked]
    assert scores == sorted(scores, reverse=True)


def test_model_embeddings(tiny_world):
    model_path = str(tiny_world["dir"] / "model.ckpt")
    drugclip.train(
        tiny_world["trials"], tiny_world["drugs"], tiny_world["icd"], model_path,
        dim=8, depth=1, epochs=2, batch=2, seed=5,
    )
    model = drugclip.Model.load(model_path)
    assert model.dim == 8
    assert model.depth == 1

    drug_vec = model.embed_drug("CCO")
    code_vec = model.embed_codes("A01.1")
    assert len(drug_vec) == 8
    assert len(code_vec) == 8

    score = model.similarity("CCO", "A01.1")
    assert -1.0 <= score <= 1.0
    # identical inputs embed identically
    assert model.embed_drug("CCO") == drug_vec


def test_train_is_deterministic(tiny_world):
    model_a = str(tiny_world["dir"] / "a.ckpt")
    model_b = str(tiny_world["dir"] / "b.ckpt")
    kwargs = dict(dim=8, depth=1, epochs=2, batch=4, seed=9)
    drugclip.train(tiny_world["trials"], tiny_world["drugs"], tiny_world["icd"], model_a, **kwargs)
    drugclip.train(tiny_world["trials"], tiny_world["drugs"], tiny_world["icd"], model_b, **kwargs)
    with open(model_a, "rb") as fa, open(model_b, "rb") as fb:
        assert fa.read() == fb.read()
