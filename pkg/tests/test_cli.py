import csv
import json

import numpy as np
import pytest

from stokesdarcy.cli import build_parser, main


def test_parser_rejects_unknown_case():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["run", "--case", "e", "--level", "1"])
    with pytest.raises(SystemExit):
        parser.parse_args(["run", "--case", "a", "--level", "9"])


def test_run_command_writes_report_and_fields(tmp_path, capsys):
    code = main(["run", "--case", "b", "--level", "1", "--method", "pcg",
                 "--out", str(tmp_path), "--dump-fields"])
    assert code == 0
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert payload["method"] == "pcg"
    assert payload["converged"] is True
    assert "errors" in payload
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["case"] == "b"
    fields = np.load(tmp_path / "fields.npz")
    assert fields["u_f"].shape == (121, 2)
    assert fields["trace"].shape == (11,)


def test_run_command_manual_weights(tmp_path, capsys):
    code = main(["run", "--case", "a", "--level", "1", "--method",
                 "richardson", "--weights", "manual", "--alpha-f", "1e-11",
                 "--alpha-p", "0.99", "--out", str(tmp_path)])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["weights"]["alpha_p"] == 0.99


def test_rho_scan_command(tmp_path, capsys):
    code = main(["rho-scan", "--case", "c", "--level", "1", "--n-k", "64",
                 "--grid", "5", "--out", str(tmp_path)])
    assert code == 0
    with (tmp_path / "rho_scan.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 2 + 64
    assert (tmp_path / "weight_grid.csv").exists()


def test_convergence_command(tmp_path, capsys):
    code = main(["convergence", "--case", "b", "--levels", "1", "2", "3",
                 "--out", str(tmp_path)])
    assert code == 0
    study = json.loads((tmp_path / "convergence.json").read_text())
    assert 2.5 <= study["orders"]["p_p_l2"] <= 3.5
    out = capsys.readouterr().out
    assert "order" in out


def test_element_convention_flag(tmp_path, capsys):
    code = main(["run", "--case", "a", "--level", "1", "--method", "pcg",
                 "--kmax-convention", "element"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["config"]["kmax_convention"] == "element"
    # the coarser band halves k_max, changing the optimal weights
    assert payload["weights"]["alpha_f"] == pytest.approx(2.49e-12, rel=5e-3)
