"""Operator text format, job files and the command-line driver."""

import glob
import json
import os
import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from conftest import JOBS, operators
from dmodalg.cli import EXIT_ERROR, EXIT_NOT_SPECIALIZABLE, EXIT_OK, main, parse_job, run
from dmodalg.ring import Operator, RingSpec
from dmodalg.text import ParseError, parse, render

RINGS = [
    RingSpec(1, 1),
    RingSpec(2, 1, "h"),
    RingSpec(1, 2, "t0", ("s",)),
    RingSpec(0, 2, xnames=("x", "y")),
]


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: f"{r.d}-{r.n}-{r.extension}")
@settings(max_examples=400, deadline=None)
@given(data=st.data())
def test_render_then_parse_round_trips(ring, data):
    P = data.draw(operators(ring, max_terms=5, max_exp=3))
    assert parse(render(P), ring) == P


def _random_operator(rng, ring, rank=1):
    terms = {}
    for _ in range(rng.randint(0, 5)):
        mono = (rng.randrange(rank), *(rng.randint(0, 3) for _ in range(ring.nvars)))
        c = mpq(rng.randint(-9, 9), rng.randint(1, 4))
        if c:
            terms[mono] = c
    return Operator(ring, terms, rank)


def test_round_trip_on_ten_thousand_operators():
    rng = random.Random(20261016)
    for k in range(10_000):
        ring = RINGS[k % len(RINGS)]
        P = _random_operator(rng, ring, 1 if k % 5 else 2)
        assert parse(render(P), ring) == P, render(P)


@settings(max_examples=300, deadline=None)
@given(P=operators(RingSpec(1, 1), rank=3, max_exp=2))
def test_vector_round_trip(P):
    assert parse(render(P), P.ring) == P


def test_parser_normalizes_products():
    R = RingSpec(1, 1)
    assert parse("dt1*t1", R) == parse("t1*dt1 + 1", R)
    assert render(parse("dx1*x1 - 1", R)) == "x1*dx1"
    assert render(parse("0", R)) == "0"
    H = RingSpec(1, 0, "h")
    assert parse("dt1*t1", H) == parse("t1*dt1 + h^2", H)


@pytest.mark.parametrize("text,pos", [("x1 + ", 5), ("x1 * * dx1", 5), ("x1 + y", 5), ("(x1 + 1", 7)])
def test_parse_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as e:
        parse(text, RingSpec(1, 1))
    assert e.value.pos == pos


def test_minimal_job():
    job = parse_job("ring t(1) x(0); module [[dt1 + t1]]; command bfunction;")
    doc = run(job, verify=True)
    assert doc["result"]["roots"] == ["0"]
    assert all(doc["verified"].values())


def test_job_grammar_extras():
    job = parse_job("""# comment
        ring t(u) x(x, y);
        shift (0, 1);
        module [[u*du, 0], [0, dx]];   # rows
        bfunction route=h;
    """)
    assert job.ring.tnames == ("u",) and job.ring.xnames == ("x", "y")
    assert job.rank == 2 and job.shift == (0, 1)
    assert job.command == "bfunction" and job.options["route"] == "h"


@pytest.mark.parametrize("text,fragment", [
    ("module [x1]; ring t(0) x(1); command gb;", "ring"),
    ("ring t(0) x(1); ring t(0) x(1); module [x1]; command gb;", "twice"),
    ("ring t(0) x(1); module [x1]; command frobnicate;", "frobnicate"),
    ("ring t(0) x(1); module [x1]; command gb; gb;", "duplicate"),
    ("ring t(0) x(1); module [[x1, 1]]; shift (0); command gb;", "shift"),
])
def test_job_errors(text, fragment):
    with pytest.raises(ParseError) as e:
        parse_job(text)
    assert fragment in str(e.value)


def test_job_error_position_is_absolute():
    text = "ring t(0) x(1);\nmodule [x1 + q];\ncommand gb;"
    with pytest.raises(ParseError) as e:
        parse_job(text)
    assert text[e.value.pos] == "q"


FAST_JOBS = sorted(p for p in glob.glob(os.path.join(JOBS, "*.job")) if "cusp_pair" not in p)


@pytest.mark.parametrize("path", FAST_JOBS, ids=os.path.basename)
def test_bundled_jobs_verify(path, tmp_path, capsys):
    out = tmp_path / "doc.json"
    assert main([path, "--verify", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc == json.loads(capsys.readouterr().out)
    assert set(doc) >= {"command", "ring", "result", "timings_ms", "threads"}


@pytest.mark.slow
def test_cusp_pair_job(capsys):
    assert main([os.path.join(JOBS, "cusp_pair_bfunction.job"), "--verify"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["degree"] == 11


def _write(tmp_path, text):
    p = tmp_path / "job.job"
    p.write_text(text)
    return str(p)


def test_exit_code_not_specializable(tmp_path, capsys):
    path = _write(tmp_path, "ring t(1) x(1); module [dx1]; command restrict;")
    assert main([path]) == EXIT_NOT_SPECIALIZABLE
    assert "not specializable" in capsys.readouterr().err


def test_exit_code_parse_error(tmp_path, capsys):
    path = _write(tmp_path, "ring t(1) x(0); module [dt1 +]; command bfunction;")
    assert main([path]) == EXIT_ERROR
    assert "position" in capsys.readouterr().err


def test_exit_code_missing_file(tmp_path):
    assert main([str(tmp_path / "absent.job")]) == EXIT_ERROR


def test_flags_override_job(tmp_path, capsys):
    path = _write(tmp_path, "ring t(1) x(0); module [t1*dt1 - 2]; command restrict;")
    assert main([path, "--window", "0,3", "--route", "t0"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["window"] == [0, 3]
    assert doc["result"]["dimensions"] == [1, 1]
    assert main([path, "--shift", "0 1"]) == EXIT_ERROR


def test_thread_variable(tmp_path, capsys, monkeypatch):
    path = _write(tmp_path, "ring t(1) x(0); module [dt1]; command bfunction;")
    monkeypatch.setenv("DMOD_THREADS", "4")
    assert main([path]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["threads"] == 4
    monkeypatch.setenv("DMOD_THREADS", "zero")
    assert main([path]) == EXIT_ERROR


def test_standard_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("ring t(0) x(1); module [x1, dx1]; command gb;"))
    assert main(["-"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["result"]["basis"] == ["1"]
