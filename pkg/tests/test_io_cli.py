import json

import pytest

from smanifolds import cli, corpus, io
from smanifolds.rings import StructuralError


@pytest.mark.parametrize("name", sorted(corpus.BUILDERS))
def test_corpus_documents_round_trip(name):
    text = io.dumps(io.entry_to_doc(corpus.BUILDERS[name]()))
    doc = io.loads(text)
    assert io.dumps(io.canonical(doc)) == text
    assert io.detect_kind(doc) == corpus.BUILDERS[name]().kind.removeprefix("affine_")


def test_loads_rejects_garbage():
    with pytest.raises(StructuralError):
        io.loads("{not json")
    with pytest.raises(StructuralError):
        io.detect_kind({"unrelated": 1})


@pytest.fixture(scope="module")
def docs(tmp_path_factory):
    d = tmp_path_factory.mktemp("docs")

    def make(name, *extra):
        code, text = cli.run(["corpus", name, *extra])
        assert code == 0
        p = d / (name + "_".join(extra).replace("/", "_").replace("=", "_") + ".json")
        p.write_text(text)
        return str(p)
    return make


@pytest.mark.parametrize("argv,doc,code", [
    (["orient"], ("weighted_cross",), 0),
    (["orient"], ("weighted_cross", "--param", "w1=1/4"), 1),
    (["z2class"], ("hawaiian_interval",), 1),
    (["z2class"], ("tetrahedron_boundary",), 0),
    (["homology"], ("hawaiian",), 0),
    (["corners", "simplicial"], ("pyramid_poset",), 1),
    (["corners", "simplicial"], ("teardrop",), 0),
    (["fp", "orient"], ("cross_fibre",), 1),
    (["fp", "check"], ("cross_fibre",), 0),
    (["fp", "check", "--strong"], ("cross_fibre",), 1),
    (["import-cycle"], ("triangle_chain",), 1),
    (["import-cycle", "--relative"], ("triangle_chain",), 0),
    (["import-cycle"], ("pillow_cycle",), 0),
    (["morphism", "bnormal"], ("quadrant_projection",), 0),
    (["morphism", "bnormal"], ("diag_map",), 1),
    (["corners", "validate"], ("circle",), 0),
    (["morphism", "validate"], ("circle",), 2),
])
def test_exit_codes(docs, argv, doc, code):
    # the document goes right after the subcommand words, options follow
    words = [a for a in argv if not a.startswith("--")]
    opts = [a for a in argv if a.startswith("--")]
    got, text = cli.run(words + [docs(*doc)] + opts)
    assert got == code, text
    got_json, text_json = cli.run(["--json"] + words + [docs(*doc)] + opts)
    assert got_json == code
    json.loads(text_json)


def test_homology_report(docs):
    code, text = cli.run(["--json", "homology", docs("tetrahedron_boundary")])
    assert code == 0
    assert "Z" in text


def test_structural_errors_exit_2(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert cli.run(["validate", str(empty)])[0] == 2
    assert cli.run(["homology", str(tmp_path / "missing.json")])[0] == 2
    code, text = cli.run(["--json", "validate", str(empty)])
    assert code == 2 and "error" in json.loads(text)


def test_main_writes_errors_to_stderr(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert cli.main(["validate", str(empty)]) == 2
    out, err = capsys.readouterr()
    assert not out and err.startswith("error:")
    assert cli.main(["tower", "hawaiian", "--m", "3"]) == 0
    out, err = capsys.readouterr()
    assert out and not err


def test_tower_commands(tmp_path):
    code, text = cli.run(["--json", "tower", "hawaiian", "--m", "4"])
    assert code == 0 and json.loads(text)["compatible"]
    code, text = cli.run(["corpus", "hawaiian", "--m", "3"])
    assert code == 0 and json.loads(text)["name"] == "hawaiian"


def test_level_set_on_affine_document(docs):
    code, text = cli.run(["fp", "level-set", docs("line_I_Q"), "--z", "1/2"])
    assert code == 0 and json.loads(text)["n"] == 0
    # a level through a vertex image is rejected as non-generic
    assert cli.run(["fp", "level-set", docs("line_I_Q"), "--z", "1/3"])[0] == 2
