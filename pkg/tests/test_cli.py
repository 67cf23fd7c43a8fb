import pytest

from kwald.cli import COMMANDS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_k0_reports_free_rank_one(capsys, corpus_dir):
    code, out, _ = run(capsys, "k0", "--input", str(corpus_dir / "k0.kw"))
    assert code == 0
    assert "free rank 1, no torsion" in out


def test_theorem_check_flags_circle_against_point(capsys, corpus_dir):
    code, out, _ = run(capsys, "theorem-check", "--input", str(corpus_dir / "complexes.kw"))
    assert code == 1
    assert "[FAIL] circle_vs_point~point.H^1: Z vs 0" in out
    assert "[PASS] torus~sd(torus).H^1: Z^2 vs Z^2" in out


def test_partial_exact_structure_fails(capsys, corpus_dir):
    code, out, _ = run(capsys, "check-exact", "--input", str(corpus_dir / "exact_partial.kw"), "--format", "machine")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].startswith("command\tcheck-exact")
    assert all(l.split("\t")[0] == "record" for l in lines[1:-1])
    assert lines[-1].startswith("summary\tpassed=")


def test_parse_error_exits_two(capsys, tmp_path):
    bad = tmp_path / "bad.kw"
    bad.write_text("begin category x\nobject a\nmorphism f a b\nend\n")
    code, _, err = run(capsys, "check-category", "--input", str(bad))
    assert code == 2
    assert "line 3" in err


def test_missing_file_and_missing_block_exit_two(capsys, tmp_path, corpus_dir):
    assert run(capsys, "k0", "--input", str(tmp_path / "absent.kw"))[0] == 2
    assert run(capsys, "pndp", "--input", str(corpus_dir / "categories.kw"))[0] == 2


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate", "--input", "x"])
    assert e.value.code == 2


def test_every_command_registered():
    assert len(COMMANDS) == 14
