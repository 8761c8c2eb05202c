"""CLI pipeline tests on a small corpus: every subcommand end to end."""

import pytest

from voicecmd.cli import main

LEXICON_TEXT = """\
kant: k a n t
mal: m a l
saym: s ay m
mwul: m wu l
"""

SPECS_TEXT = """\
k: 423:1.0 3260:0.7 snr:30 dur:8-12
a: 259:1.0 839:0.7 snr:30 dur:10-14
n: 120:1.0 1409:0.7 snr:30 dur:8-12
t: 2683:1.0 4727:0.7 snr:30 dur:8-12
wu: 615:1.0 1101:0.7 snr:30 dur:10-14
l: 839:1.0 1768:0.7 snr:30 dur:8-12
s: 4727:1.0 6737:0.7 snr:30 dur:8-12
ay: 1101:1.0 2190:0.7 snr:30 dur:10-14
m: 120:1.0 615:0.7 snr:30 dur:8-12
"""

GRAMMAR_TEXT = """\
mal
saym
mwul
mal saym
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    (root / "words.lex").write_text(LEXICON_TEXT)
    (root / "phones.spec").write_text(SPECS_TEXT)
    (root / "commands.fsn").write_text(GRAMMAR_TEXT)
    return root


def args_common(root):
    return ["--lexicon", str(root / "words.lex")]


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    assert e.value.code == 0
    assert "voicecmd" in capsys.readouterr().out


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as e:
        main(["decode"])          # missing required --model-dir and input
    assert e.value.code == 2


def test_full_pipeline(workspace, capsys):
    root = workspace
    corpus = root / "corpus"
    model_dir = root / "models"

    rc = main(["synth-corpus", "--out-dir", str(corpus),
               "--lexicon", str(root / "words.lex"),
               "--specs", str(root / "phones.spec"),
               "--grammar", str(root / "commands.fsn"),
               "--tokens-per-word", "3", "--test-tokens-per-word", "2",
               "--command-tokens", "2", "--seed", "5",
               "--test-snr-db", "25"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "train manifest" in out and "command manifest" in out

    rc = main(["train-codebooks", "--manifest", str(corpus / "train.manifest"),
               "--model-dir", str(model_dir), "--clusters", "8"])
    assert rc == 0
    assert (model_dir / "codebook-0.txt").exists()
    assert (model_dir / "frontend.cfg").exists()
    capsys.readouterr()

    rc = main(["bootstrap", "--manifest", str(corpus / "train.manifest"),
               "--model-dir", str(model_dir),
               "--lexicon", str(root / "words.lex")])
    assert rc == 0
    assert (model_dir / "hmm-SIL.txt").exists()
    capsys.readouterr()

    rc = main(["train", "--manifest", str(corpus / "train.manifest"),
               "--model-dir", str(model_dir),
               "--lexicon", str(root / "words.lex")])
    assert rc == 0
    iter_lines = [ln for ln in capsys.readouterr().out.splitlines()
                  if ln.startswith("ITER ")]
    assert iter_lines
    lls = [float(ln.split("total_ll=")[1].split()[0]) for ln in iter_lines]
    for prev, now in zip(lls, lls[1:]):
        assert now >= prev - 1e-6

    # decode one of the generated test WAVs against the flat grammar
    flat = root / "flat.fsn"
    flat.write_text("kant\nmal\nsaym\nmwul\n")
    wav = next((corpus / "wav").glob("test_mal_*.wav"))
    rc = main(["decode", "--model-dir", str(model_dir),
               "--lexicon", str(root / "words.lex"),
               "--grammar", str(flat), "--nbest", "3", str(wav)])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("HYP 1 ")
    assert lines[0].split()[3] == "mal"

    rc = main(["evaluate", "--model-dir", str(model_dir),
               "--lexicon", str(root / "words.lex"),
               "--grammar", str(root / "commands.fsn"),
               "--manifest", str(corpus / "commands.manifest")])
    assert rc == 0
    out = capsys.readouterr().out
    metrics = {ln.split()[1]: ln.split()[2] for ln in out.splitlines()
               if ln.startswith("METRIC ")}
    assert float(metrics["top1_accuracy"]) >= 0.5
    assert "top-1 accuracy" in out


def test_decode_missing_file(workspace, capsys):
    root = workspace
    rc = main(["decode", "--model-dir", str(root / "models"),
               "--lexicon", str(root / "words.lex"),
               "--grammar", str(root / "commands.fsn"),
               str(root / "no-such-file.wav")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "no-such-file.wav" in err
