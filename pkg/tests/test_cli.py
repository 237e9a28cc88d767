import warnings

import numpy as np
import pytest

from pdwg.cli import (ConfigError, RunConfig, export_plot, main, parse_config, parse_levels,
                      run_convergence, sample_points)

HEADER = "inv_h,err_e0,rate_e0,err_eb,rate_eb,err_eh,rate_eh"

CONSTANT_TRANSPORT = """\
level = 2
density = 2
[case]
beta = const 1 1
c = const 0
f = const 0
g = const 1
"""


def test_defaults_from_empty_config():
    cfg = parse_config("")
    assert (cfg.k, cfg.tau1, cfg.tau2, cfg.density) == (1, 1.0, 1.0, 3)
    assert cfg.levels == (0, 1, 2, 3, 4, 5)
    assert cfg.case is None and cfg.inline_case == {}


def test_comments_and_dash_keys():
    cfg = parse_config("# header\ncase = c1_tri_sq  # trailing\nplot-out = p.csv\nlevels = 1,3\n")
    assert cfg.case == "c1_tri_sq" and cfg.plot_out == "p.csv" and cfg.levels == (1, 3)


def test_negative_tau2_warns_but_is_accepted():
    with pytest.warns(UserWarning, match="tau2"):
        cfg = parse_config("tau2 = -1\n")
    assert cfg.tau2 == -1.0


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"line 2: unknown key 'kk'"):
        parse_config("k = 1\nkk = 1\n")


@pytest.mark.parametrize("text,pattern", [
    ("k = 3\n", "k must be 1 or 2"),
    ("tau1 = -0.5\n", "tau1"),
    ("density = 0\n", "density"),
    ("k = two\n", "line 1"),
    ("k = 1\nk = 2\n", "line 2: duplicate"),
    ("[mesh]\n", "line 1: unknown section"),
    ("[case]\nbeta = const 1 1\nfoo = 1\n", "line 3"),
    ("levels = 3..1\n", "line 1"),
    ("just words\n", "line 1"),
])
def test_invalid_configs(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text)


def test_parse_levels_forms():
    assert parse_levels("3") == (0, 1, 2, 3)
    assert parse_levels("2..4") == (2, 3, 4)
    assert parse_levels("0,2,5") == (0, 2, 5)


def test_convergence_csv_and_rows(tmp_path):
    out = tmp_path / "t.csv"
    table = run_convergence(RunConfig(case="c1_tri_sq", levels=(0, 1, 2, 3), out=str(out)))
    lines = out.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) - 1 == len(table.inv_h) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "4", "8"]
    first = lines[1].split(",")
    assert first[2] == first[4] == first[6] == ""
    mant = first[1].split("E")[0]
    assert len(mant.replace(".", "")) == 5
    assert all(len(c.split(".")[1]) == 4 for c in lines[2].split(",")[2::2])


def test_csv_is_byte_identical(tmp_path):
    texts = []
    for name in ("a.csv", "b.csv"):
        cfg = RunConfig(case="c2_tri_l", k=2, levels=(0, 1, 2), out=str(tmp_path / name))
        run_convergence(cfg)
        texts.append((tmp_path / name).read_bytes())
    assert texts[0] == texts[1]


def test_convergence_without_exact_fails():
    with pytest.raises(ConfigError, match="no exact"):
        run_convergence(RunConfig(case="fig_rotation", levels=(0, 1)))


@pytest.mark.parametrize("k,tau,target", [(1, (0.0, 0.0), 2.08), (2, (1.0, 1.0), 3.03)])
def test_convergence_rate_examples(k, tau, target):
    cfg = RunConfig(case="c1_tri_sq", k=k, tau1=tau[0], tau2=tau[1], levels=tuple(range(6)))
    assert abs(run_convergence(cfg).final_rate("err_e0") - target) <= 0.25


def test_density_one_gives_centroids():
    text = export_plot(RunConfig(case="c1_tri_sq", level=0, density=1))
    rows = text.splitlines()
    assert rows[0] == "x,y,lambda0" and len(rows) == 3
    pts = np.array([[float(v) for v in r.split(",")[:2]] for r in rows[1:]])
    pts = pts[np.argsort(pts[:, 0])]
    np.testing.assert_allclose(pts, [[1 / 3, 1 / 3], [2 / 3, 2 / 3]], atol=1e-10)


def test_sample_points_counts():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    quad = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    for d in (1, 2, 3, 4):
        assert sample_points(tri[None], d).shape == (1, d * (d + 1) // 2, 2)
        assert sample_points(quad[None], d).shape == (1, d * d, 2)
        p = sample_points(tri[None], d)[0]
        assert np.all(p > 0) and np.all(p.sum(axis=1) < 1)


def test_constant_transport_export():
    text = export_plot(parse_config(CONSTANT_TRANSPORT))
    data = np.loadtxt(text.splitlines()[1:], delimiter=",")
    assert data.shape == (32 * 3, 3)
    assert np.abs(data[:, 2] - 1.0).max() <= 1e-8


def test_rotation_export_spans_square(tmp_path):
    out = tmp_path / "rot.csv"
    export_plot(RunConfig(case="fig_rotation", level=3, plot_out=str(out)))
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.all(np.isfinite(data))
    lo, hi = data[:, :2].min(axis=0), data[:, :2].max(axis=0)
    assert np.all(lo >= 0) and np.all(hi <= 1)
    assert np.all(lo < 0.05) and np.all(hi > 0.95)


def test_crack_export_samples_each_side():
    text = export_plot(RunConfig(case="fig_crack", level=1, density=2))
    data = np.loadtxt(text.splitlines()[1:], delimiter=",")
    assert data.shape == (4 * 4 * 2 * 3, 3)
    assert np.all(np.isfinite(data[:, 2]))


def test_main_list_and_solve(capsys):
    assert main(["list-cases"]) == 0
    assert "c1_tri_sq" in capsys.readouterr().out
    assert main(["solve", "--case", "c1_rect_sq", "--element", "rect", "--level", "1"]) == 0
    out = capsys.readouterr().out
    assert "6 cells" not in out and "24 cells" in out and "|eps_0|" in out


def test_main_convergence_writes_csv(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["convergence", "--case", "c3_disc", "--levels", "2", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == HEADER
    assert "order" in capsys.readouterr().out


def test_main_config_file_with_override(tmp_path, capsys):
    conf = tmp_path / "run.cfg"
    conf.write_text("case = c1_tri_sq\nk = 2\nlevels = 1\n")
    assert main(["convergence", "--config", str(conf), "--k", "1"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


@pytest.mark.parametrize("argv,code", [
    (["solve", "--case", "nope"], 2),
    (["solve"], 2),
    (["convergence", "--case", "fig_disc", "--levels", "1"], 2),
    (["solve", "--config", "/nonexistent/x.cfg"], 2),
    (["solve", "--case", "fig_rotation", "--level", "0", "--tau1", "0"], 1),
])
def test_main_exit_codes(argv, code, capsys):
    assert main(argv) == code
    assert "pdwg: error" in capsys.readouterr().err


def test_bad_flag_value_exits_nonzero():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--element", "hex"])
    assert info.value.code != 0


def test_no_warning_for_default_config():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_config("tau2 = 0\n")
