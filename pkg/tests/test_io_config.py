import math

import numpy as np
import pytest

from radialgauss.config import (
    ExperimentSpec,
    SweepSpec,
    load_spec,
    load_sweep,
    parse_lines,
    parse_spec_text,
)
from radialgauss.errors import ConfigError, ParseError
from radialgauss.io import data_section, format_value, read_samples, read_table, write_samples, write_table


def test_format_value_roundtrips_doubles():
    for x in (0.1, 1 / 3, -2.5e-300, 1e308, 5e-324, math.pi):
        assert float(format_value(x)) == x
    assert format_value(3) == "3"
    assert format_value(float("nan")) == "nan"


def test_samples_roundtrip_bit_exact(tmp_path):
    Z = np.random.default_rng(0).standard_normal((50, 3)) * 1e5
    p = tmp_path / "s.csv"
    write_samples(p, Z, ["seed = 1"])
    back, comments = read_samples(p)
    assert np.array_equal(back, Z)
    assert comments == ["seed = 1"]
    raw = p.read_bytes()
    assert raw.startswith(b"# seed = 1\r\nx0,x1,x2\r\n")
    assert raw.count(b"\r\n") == 52
    assert data_section(p).startswith(b"x0,x1,x2\r\n")


def test_quoted_fields(tmp_path):
    p = tmp_path / "t.csv"
    write_table(p, ["a", "b"], [["x,y", 'say "hi"']])
    _, header, rows, _ = read_table(p)
    assert rows == [["x,y", 'say "hi"']]
    assert b'"x,y","say ""hi"""' in p.read_bytes()


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("# only a comment\n", 2),
    ("a,b\r\n1,2\r\n3\r\n", 3),
    ("# c\r\na,b\r\n1,2\r\n1,x\r\n", 4),
    ("a\r\n1\r\nnan\r\n", 3),
])
def test_parse_errors_carry_line_numbers(tmp_path, text, line):
    p = tmp_path / "bad.csv"
    p.write_text(text, newline="")
    with pytest.raises(ParseError) as info:
        read_samples(p)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_parse_lines_rules():
    raw = parse_lines("# comment\n a = 1 \n\nb=x # kept\n", "f")
    assert raw == {"a": ("1", 2), "b": ("x # kept", 4)}
    with pytest.raises(ConfigError, match="f:2"):
        parse_lines("a = 1\na = 2\n", "f")
    with pytest.raises(ConfigError, match="f:1"):
        parse_lines("novalue\n", "f")


def test_spec_defaults_and_overrides():
    s = parse_spec_text("")
    assert s == ExperimentSpec()
    assert s.schedule.total_steps == 20_000 and s.schedule.warmup_steps == 200
    s = parse_spec_text("loss.beta1 = 1\nschedule.total_steps = 500\n", overrides=["seed=4"])
    assert s.loss.beta1 == 1.0 and s.seed == 4 and s.schedule.warmup_steps == 5
    with pytest.raises(ConfigError, match="unknown key"):
        parse_spec_text("loss.gamma = 1\n")
    with pytest.raises(ConfigError):
        parse_spec_text("n_samples = ten\n")
    with pytest.raises(ConfigError):
        parse_spec_text("distribution.name = moon\n")


def test_resolved_lines_reparse_to_same_spec(tmp_path):
    s = parse_spec_text("distribution.name = mixture\ndistribution.alpha = 0.5\nloss.beta1 = 1\n")
    p = tmp_path / "spec.txt"
    p.write_text("\n".join(s.resolved()) + "\n")
    assert load_spec(p) == s


def test_sweep_grid_and_dedup(tmp_path):
    p = tmp_path / "sweep.txt"
    p.write_text(
        "distribution.name = mixture\n"
        "sweep.method = vcreg, radial_vcreg\n"
        "sweep.alpha = 0.5, 0.99\n"
        "sweep.beta1 = 1, 10\n"
        "seeds = 0, 1\n"
    )
    sw = load_sweep(p)
    assert isinstance(sw, SweepSpec)
    # vcreg collapses the beta1 axis
    assert sw.size() == (2 + 4, 2)
    jobs = sw.jobs_list()
    assert len(jobs) == 12
    assert {j.spec.params["alpha"] for j in jobs} == {0.5, 0.99}
    assert all(j.spec.loss.beta1 == 0 for j in jobs if j.method == "vcreg")
    assert len({j.spec.job_index for j in jobs}) == 6
    with pytest.raises(ConfigError):
        load_sweep(p, ["sweep.gamma = 1"])
