"""Exit codes and output of the oia-sim command line."""

from oiasim import ManifoldParams, threshold_numeric
from oiasim.cli import main


def test_list_names_every_experiment(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("fig2_sumrate_d1", "fig3_eligible_users",
                 "fig4_threshold_compare", "fig5_sumrate_d2",
                 "fig6_oia_vs_ia", "fig7_complexity_table"):
        assert name in out


def test_threshold_closed_form_value(capsys):
    rc = main(["threshold", "--method", "closed_form_d1", "--d", "1",
               "--nr", "2", "--K", "1000"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "0.00689081863"


def test_threshold_numeric_value(capsys):
    rc = main(["threshold", "--method", "numeric", "--d", "2",
               "--nr", "4", "--K", "100"])
    assert rc == 0
    printed = capsys.readouterr().out.strip()
    assert printed == "%.9g" % threshold_numeric(100, ManifoldParams(4, 2)).x


def test_run_with_config_and_out(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("trials = 2\nsnr_db_grid = 0,5\n", encoding="utf-8")
    out = tmp_path / "rows.csv"
    rc = main(["run", "fig2_sumrate_d1", "--config", str(cfg),
               "--out", str(out)])
    assert rc == 0
    assert f"wrote 6 rows to {out}" in capsys.readouterr().out
    assert out.exists()


def test_run_seed_changes_output(tmp_path):
    outs = []
    for seed in ("1", "1", "2"):
        out = tmp_path / f"s{len(outs)}.csv"
        rc = main(["run", "fig7_complexity_table", "--seed", seed,
                   "--out", str(out)])
        assert rc == 0
        outs.append(out.read_text(encoding="utf-8").splitlines()[1:])
    # the flop table is deterministic: seed must not change it
    assert outs[0] == outs[1] == outs[2]


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main(["run", "fig9_mystery"]) == 2
    assert "error:" in capsys.readouterr().err
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("wat = 1\n", encoding="utf-8")
    assert main(["run", "fig2_sumrate_d1", "--config", str(cfg)]) == 2
    assert main(["threshold", "--method", "closed_form_d1", "--d", "2",
                 "--nr", "4", "--K", "100"]) == 2


def test_runtime_errors_exit_3(tmp_path, capsys):
    assert main(["threshold", "--method", "lambert", "--d", "2",
                 "--nr", "4", "--K", "2"]) == 3
    assert "error:" in capsys.readouterr().err
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not dir", encoding="utf-8")
    rc = main(["run", "fig7_complexity_table",
               "--out", str(blocker / "x.csv")])
    assert rc == 3
