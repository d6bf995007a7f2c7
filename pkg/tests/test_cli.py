import os
import shutil
import subprocess
import sys

import pytest

from cmapstruct.cli import main, read_config
from cmapstruct.export import import_graphml, read_graphml, validate_cxl

from conftest import FIXTURES, REGISTRY, ROOT

CORPUS = str(FIXTURES / "dc-corpus.txt")
WORKED = str(FIXTURES / "worked-example.triples")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_extract_matches_shipped_triples(capsys, tmp_path):
    code, out, err = run(capsys, "extract", "--corpus", CORPUS)
    assert code == 0
    assert out == (FIXTURES / "dc-corpus.triples").read_text()
    assert "325 triples" in err
    target = tmp_path / "t.triples"
    assert run(capsys, "extract", "--corpus", CORPUS, "--jobs", 3, "-o", target)[0] == 0
    assert target.read_text() == out


def test_build_worked(capsys, tmp_path):
    target = tmp_path / "level0.graphml"
    code, _, err = run(capsys, "build", "--triples", WORKED, "--registry", REGISTRY, "-o", target)
    assert code == 0
    assert "6 nodes, 9 edges" in err
    cmap = read_graphml(target)
    assert (len(cmap.nodes), len(cmap.edges)) == (6, 9)


def test_build_with_inverses(capsys):
    code, out, err = run(capsys, "build", "--triples", WORKED, "--registry", REGISTRY, "--infer-inverses")
    assert code == 0
    cmap = import_graphml(out)
    assert cmap.edge("voltage source", "have type", "battery") is not None
    assert cmap.edge("resistor", "component of", "dc circuit") is not None


def test_build_from_corpus_checks_provenance(capsys, tmp_path):
    bad = tmp_path / "bad.triples"
    bad.write_text("lamp | r | wire @ nowhere-9\n")
    code, _, err = run(capsys, "build", "--corpus", CORPUS, "--triples", bad, "--registry", REGISTRY)
    assert code == 2
    assert "nowhere-9" in err


def test_classify(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--triples", WORKED, "--registry", REGISTRY)
    assert code == 0
    assert "have component\tPredicateRelations / Physically Related / Parts" in out
    assert out.endswith("labels: 4; unclassified: 0\n")
    odd = tmp_path / "odd.triples"
    odd.write_text("lamp | glows near | wire\n")
    code, out, err = run(capsys, "classify", "--triples", odd, "--registry", REGISTRY)
    assert code == 1
    assert "glows near\tUNCLASSIFIED" in out and "glows near" in err


def test_level_and_export(capsys, tmp_path):
    m0, m1 = tmp_path / "m0.graphml", tmp_path / "m1.graphml"
    run(capsys, "build", "--triples", WORKED, "--registry", REGISTRY, "-o", m0)
    code, _, err = run(capsys, "level", "--map", m0, "--groups", FIXTURES / "worked-example.groups", "-o", m1)
    assert code == 0 and "level 1: 2 nodes, 1 edges" in err
    code, dot, _ = run(capsys, "export", "--map", m1, "--format", "dot")
    assert code == 0
    assert '"circuit" -> "circuit component" [label="is made of", prov="ex-1,ex-8"];' in dot
    code, cxl, _ = run(capsys, "export", "--map", m0, "--format", "cxl", "--categories",
                       "--registry", REGISTRY)
    assert code == 0 and validate_cxl(cxl) == []
    code, _, err = run(capsys, "export", "--map", m0, "--format", "cxl", "--categories")
    assert code == 2 and "registry" in err


def test_saturate_golden(capsys, tmp_path):
    code, out, _ = run(capsys, "saturate", "--corpus", CORPUS, "--segment-size", 31,
                       "--epsilon", 0, "--window", 2)
    assert code == 0
    assert out == (FIXTURES / "golden" / "saturate-eps0-w2.stdout").read_text()
    csv = tmp_path / "s.csv"
    code, out, _ = run(capsys, "saturate", "--triples", FIXTURES / "dc-corpus.triples", "-o", csv)
    assert out == "plateau: segment 6\n"
    # segmenting by first-seen ids of the triples differs from corpus order,
    # so only the header is compared here
    assert csv.read_text().startswith("segment,new_concepts")


def test_saturate_needs_provenance(capsys, tmp_path):
    bare = tmp_path / "bare.triples"
    bare.write_text("lamp | r | wire\n")
    assert run(capsys, "saturate", "--triples", bare)[0] == 2


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", "--registry", REGISTRY)
    assert code == 0
    assert "relation_count: 55\n" in out and "inverse_pair_member_count: 42\n" in out


def test_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", FIXTURES / "structure")
    assert code == 0 and out.endswith("structure valid\n")
    broken = tmp_path / "broken"
    shutil.copytree(FIXTURES / "structure", broken)
    (broken / "level3.graphml").write_text(
        (broken / "level3.graphml").read_text().replace(
            "</graph>",
            '  <node id="n9"><data key="d_name">stray</data>'
            '<data key="d_display">stray</data></node>\n  </graph>'))
    code, out, _ = run(capsys, "validate", broken)
    assert code == 1
    assert "FAIL singleton" in out and "stray" in out and "dc electrical circuit" in out


def test_pipeline(capsys, tmp_path):
    conf = tmp_path / "p.conf"
    text = (FIXTURES / "pipeline.conf").read_text().replace("fixtures/structure\n", str(tmp_path / "out") + "\n")
    conf.write_text(text)
    # paths in the shipped config are relative to the repository root
    old = os.getcwd()
    os.chdir(ROOT)
    try:
        code, out, _ = run(capsys, "pipeline", "--config", conf)
    finally:
        os.chdir(old)
    assert code == 0
    assert out.startswith("plateau: segment 6\n") and out.endswith("structure valid\n")
    for name in ("level0.graphml", "level1.graphml", "level2.groups", "level3.dot", "saturation.csv"):
        assert (tmp_path / "out" / name).read_bytes() == (FIXTURES / "structure" / name).read_bytes()


def test_pipeline_config_errors(capsys, tmp_path):
    conf = tmp_path / "p.conf"
    conf.write_text("registry = x\nbogus = 1\n")
    code, _, err = run(capsys, "pipeline", "--config", conf)
    assert code == 2 and "bogus" in err
    conf.write_text("just words\n")
    with pytest.raises(Exception):
        read_config(conf)


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["extract"],
    ["saturate", "--corpus", CORPUS, "--segment-size", "0"],
    ["saturate", "--corpus", CORPUS, "--epsilon", "-1"],
    ["export", "--map", "m.graphml", "--format", "svg"],
])
def test_usage_errors_exit_3(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 3


def test_missing_source_is_usage_error(capsys):
    code, _, err = run(capsys, "build", "--registry", REGISTRY)
    assert code == 3 and "--corpus or --triples" in err


def test_usage_error_writes_nothing(capsys, tmp_path):
    target = tmp_path / "never.csv"
    with pytest.raises(SystemExit):
        main(["saturate", "--corpus", CORPUS, "--window", "0", "-o", str(target)])
    assert not target.exists()


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("#S a-1\nlamp\tNN\tlamp\n")
    code, _, err = run(capsys, "extract", "--corpus", bad)
    assert code == 2 and f"{bad}:2:" in err
    assert run(capsys, "extract", "--corpus", tmp_path / "absent.txt")[0] == 2
    assert run(capsys, "validate", tmp_path / "absent")[0] == 2


@pytest.mark.parametrize("sub", ["extract", "classify", "build", "level", "saturate",
                                 "validate", "export", "stats", "pipeline"])
def test_help(capsys, sub):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    assert "usage: cmapstruct " + sub in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmapstruct", "stats", "--registry", str(REGISTRY)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "relation_count: 55" in proc.stdout
