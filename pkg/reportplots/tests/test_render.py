"""Each plot kind renders from fixture CSVs and leaves inputs untouched."""
import hashlib
from pathlib import Path

import pytest

from reportplots import SpecError, load_spec, parse_spec_text, render
from reportplots.cli import main

FIXTURES = Path(__file__).parent / "fixtures"

KIND_TO_FIXTURE = {
    "trajectory": "trajectory_2d.csv",
    "energy": "energy.csv",
    "collapse": "collapse.csv",
    "sweep": "sweep.csv",
    "certificate-heatmap": "certificate_field.csv",
}


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_spec(tmp_path, kind, fixture, **extra):
    lines = [f"kind = {kind}", f"input = {FIXTURES / fixture}",
             f"output = {tmp_path / (kind + '.png')}"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    spec_path = tmp_path / f"{kind}.spec"
    spec_path.write_text("\n".join(lines) + "\n")
    return spec_path


@pytest.mark.parametrize("kind,fixture", sorted(KIND_TO_FIXTURE.items()))
def test_kind_renders_and_inputs_untouched(tmp_path, kind, fixture):
    before = sha256(FIXTURES / fixture)
    spec_path = make_spec(tmp_path, kind, fixture)
    image, caption = render(load_spec(spec_path))
    assert Path(image).stat().st_size > 0
    assert Path(caption).read_text().startswith(f"kind: {kind}")
    assert sha256(FIXTURES / fixture) == before


def test_trajectory_4d_without_overlay(tmp_path):
    spec_path = make_spec(tmp_path, "trajectory", "trajectory_4d.csv")
    image, caption = render(load_spec(spec_path))
    assert Path(image).stat().st_size > 0


def test_caption_deterministic(tmp_path):
    spec_path = make_spec(tmp_path, "energy", "energy.csv")
    _, cap1 = render(load_spec(spec_path))
    text1 = Path(cap1).read_text()
    _, cap2 = render(load_spec(spec_path))
    assert Path(cap2).read_text() == text1


def test_missing_column_diagnostics(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    spec_path = tmp_path / "bad.spec"
    spec_path.write_text(
        f"kind = energy\ninput = {bad}\noutput = {tmp_path / 'x.png'}\n")
    with pytest.raises(SpecError, match="missing columns"):
        render(load_spec(spec_path))


def test_empty_csv_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    spec_path = tmp_path / "empty.spec"
    spec_path.write_text(
        f"kind = collapse\ninput = {empty}\noutput = {tmp_path / 'x.png'}\n")
    assert main(["render", "--spec", str(spec_path)]) == 2


def test_spec_validation():
    with pytest.raises(SpecError):
        parse_spec_text("kind = pie-chart\ninput = a\noutput = b\n")
    with pytest.raises(SpecError):
        parse_spec_text("kind = energy\noutput = b\n")


def test_log_axes(tmp_path):
    spec_path = make_spec(tmp_path, "collapse", "collapse.csv", logx="true")
    image, _ = render(load_spec(spec_path))
    assert Path(image).stat().st_size > 0
