import csv
import json
import math

import numpy as np
import pytest

from authdist.cli import main
from authdist.regions_gaussian import GaussianScenario, envelope_dr, inner_bound_dr, qe_dr
from authdist.regions_layered import LayeredScenario, single_layer_bounds


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_region_binary_csv(tmp_path):
    out = tmp_path / "rb.csv"
    assert main(["region-binary", "--p", "0.2", "--resolution", "101",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 101
    step = 0.5 / 100
    hits = [r for r in rows if abs(float(r["de"]) - 0.2) <= step]
    assert any(abs(float(r["dr"]) - 0.2) <= 2 * step for r in hits)
    for r in rows:
        assert float(r["dr_qe"]) >= float(r["dr"]) - 1e-6
        assert float(r["dr_noauth"]) == 0.2


def test_region_binary_signature_corner(tmp_path):
    out = tmp_path / "rb0.csv"
    assert main(["region-binary", "--p", "0.0", "--resolution", "21",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert all(float(r["dr"]) == 0.0 for r in rows)


def test_region_gaussian_csv(tmp_path):
    out = tmp_path / "rg.csv"
    assert main(["region-gaussian", "--snr-db", "30", "--snr-db", "40",
                 "--resolution", "61", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 2 * 3 * 61
    by_curve = {}
    for r in rows:
        key = (r["snr_db"], r["curve"], r["de_over_n_db"])
        by_curve[key] = float(r["dr_over_n_db"])
    for (snr, curve, de), dr in by_curve.items():
        if curve == "inner":
            assert dr <= by_curve[(snr, "envelope", de)] + 1e-9
    # 30 dB: envelope within 20% of the inner bound at De = 20 dB above noise
    scn = GaussianScenario(1000.0, 1.0)
    ratio = envelope_dr(scn, 100.0) / inner_bound_dr(scn, 100.0)
    assert ratio < 1.2
    # 40 dB: quantize-and-embed pays about SNR/2 at De = sigma_n2
    scn40 = GaussianScenario(1e4, 1.0)
    loss = (1.0 / 1e4) * qe_dr(scn40, 1.0) / inner_bound_dr(scn40, 1.0)
    assert loss == pytest.approx(0.5, abs=0.02)


def test_region_layered_csv(tmp_path):
    out = tmp_path / "rl.csv"
    assert main(["region-layered", "--snr-db", "30", "--sigma-v-db", "10",
                 "--de-db", "0", "--de-db", "5", "--resolution", "30",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    scn = LayeredScenario(1000.0, 1.0, 10.0)
    layered = {}
    for r in rows:
        de_db = float(r["de_db"])
        drf = 10 ** (float(r["drf_db"]) / 10)
        drc = 10 ** (float(r["drc_db"]) / 10)
        drc_lo, drf_lo = single_layer_bounds(scn, 10 ** (de_db / 10))
        assert drc >= drc_lo - 1e-6 and drf >= drf_lo - 1e-6
        layered.setdefault((de_db, r["kind"]), []).append((drf, drc))
    # coarse corners improve with the encoding budget (curves march downward)
    assert (min(c for _, c in layered[(5.0, "layered")])
            < min(c for _, c in layered[(0.0, "layered")]))
    # time-sharing rows are dominated by the layered frontier
    for de_db in (0.0, 5.0):
        pts = sorted(layered[(de_db, "layered")])
        fs = [f for f, _ in pts]
        cs = [c for _, c in pts]
        for f, c in layered[(de_db, "timeshare")]:
            assert float(np.interp(f, fs, cs)) <= c + 1e-6


def test_sim_manifest_rerun_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["sim", "binary", "--n", "16", "--tau", "0.2", "--gamma", "0.25",
            "--p", "0.08", "--delta", "0.12", "--trials", "300",
            "--seed", "7", "--seed-secret", "8",
            "--attacker", "substitute_codeword", "--out", str(out1)]
    assert main(argv) == 0
    assert main(["sim", "--from-manifest", str(out1), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    body = json.dumps(doc["results"], sort_keys=True, indent=2)
    import hashlib
    assert doc["manifest"]["output_checksum"] == hashlib.sha256(body.encode()).hexdigest()


def test_sim_gaussian_and_pk_commands(tmp_path):
    out = tmp_path / "g.json"
    assert main(["sim", "gaussian", "--n", "8", "--rate", "1.5", "--snr-db", "20",
                 "--trials", "200", "--seed", "3", "--seed-secret", "4",
                 "--attacker", "substitute_codeword", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    ratio = doc["results"]["admissible_size"] / doc["results"]["codebook_size"]
    assert doc["results"]["attack_rate"] == pytest.approx(ratio, abs=0.1)
    lo, hi = doc["results"]["attack_rate_ci95"]
    assert lo <= doc["results"]["attack_rate"] <= hi

    out_pk = tmp_path / "pk.json"
    assert main(["sim", "pk", "--n", "16", "--trials", "200", "--p", "0.0",
                 "--seed", "5", "--seed-secret", "6",
                 "--attacker", "substitute_codeword", "--tag-bits", "64",
                 "--out", str(out_pk)]) == 0
    doc = json.loads(out_pk.read_text())
    assert doc["results"]["tag_forgeries_accepted"] == 0


def test_exit_codes(tmp_path):
    # missing seeds on a sim command
    assert main(["sim", "binary", "--trials", "10", "--out", str(tmp_path / "x.json")]) == 2
    # configuration error: tractability cap exceeded before any work starts
    assert main(["sim", "binary", "--n", "60", "--tau", "0.2", "--gamma", "0.25",
                 "--trials", "10", "--seed", "1", "--seed-secret", "2",
                 "--out", str(tmp_path / "y.json")]) == 2
    # i/o error: unwritable output path
    assert main(["region-binary", "--p", "0.2", "--resolution", "11",
                 "--out", str(tmp_path / "no_dir" / "z.csv")]) == 3


def test_optimize_command(tmp_path):
    out = tmp_path / "opt.json"
    assert main(["optimize", "--de", "0.2", "--dr", "0.2", "--p", "0.2",
                 "--restarts", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["results"]["r_star"] >= -1e-3
    for row in doc["results"]["witness_u_given_s"]:
        assert sum(row) == pytest.approx(1.0, abs=1e-9)
    assert doc["manifest"]["params"]["cardinality"] == 7
