"""Instance files, campaign determinism, and the command line interface."""

import json
import os

import numpy as np
import pytest

from domlab import Instance, gen_instance, positivity_check
from domlab.campaign import CampaignConfig, report_payload, run_campaign, shrink_witness, witness_margin
from domlab.cli import main
from domlab.instances import KINDS


def test_gen_deterministic():
    a = gen_instance("random_pair", {"blocks": [2, 2]}, seed=5)
    b = gen_instance("random_pair", {"blocks": [2, 2]}, seed=5)
    assert np.array_equal(a.a_matrix, b.a_matrix)
    assert np.array_equal(a.b_matrix, b.b_matrix)
    c = gen_instance("random_pair", {"blocks": [2, 2]}, seed=6)
    assert not np.array_equal(a.a_matrix, c.a_matrix)
    with pytest.raises(ValueError):
        gen_instance("nonsense", {}, 0)


def test_roundtrip_bit_exact(tmp_path):
    for kind in KINDS:
        params = {"d": 3} if kind in ("perturbed_pair", "commutative_random") else {"blocks": [2, 1]}
        inst = gen_instance(kind, params, seed=7)
        path = tmp_path / f"{kind}.json"
        inst.save(path)
        loaded = Instance.load(path)
        assert np.array_equal(loaded.a_matrix, inst.a_matrix)
        assert np.array_equal(loaded.b_matrix, inst.b_matrix)
        loaded.save(tmp_path / "again.json")
        assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_derivation_example_certified():
    inst = gen_instance("derivation_example", {"blocks": [2, 1]}, seed=3)
    assert inst.metadata["certified_dominating"]
    for op in (inst.form_a(), inst.form_b()):
        assert positivity_check(op, "criterion").ok
        assert positivity_check(op, "direct").ok


def test_dephasing_parameters():
    inst = gen_instance("derivation_example",
                        {"blocks": [2], "b_blocks": [[[1.0, 0.0], [0.0, -1.0]]],
                         "lambdas": [0.0]}, seed=0)
    b = inst.form_b()
    # diagonal matrix units fixed, off-diagonal ones decay at rate 4
    eig = np.sort(b.eigvals)
    assert np.allclose(eig, [0.0, 0.0, 4.0, 4.0], atol=1e-12)
    one = np.zeros(4, dtype=complex)
    one[0] = one[3] = 1.0
    assert np.allclose(b.evolve(1.3, one[None])[0], one, atol=1e-12)


def _campaign_cfg(tmp_path, threads=None):
    paths = []
    for i in range(3):
        inst = gen_instance("commutative_random", {"d": 3}, seed=i)
        p = tmp_path / f"i{i}.json"
        inst.save(p)
        paths.append(str(p))
    return CampaignConfig(instances=paths,
                          criteria=["direct", "thm21:iii", "oracle", "thm41:criterion_ii"],
                          samples=300, seed=9, threads=threads)


def test_campaign_determinism_serial_vs_parallel(tmp_path):
    serial = run_campaign(_campaign_cfg(tmp_path))
    parallel = run_campaign(_campaign_cfg(tmp_path, threads=4))
    assert report_payload(serial) == report_payload(parallel)
    assert serial["summary"]["exit_code"] == 0


def test_campaign_env_thread_count(tmp_path, monkeypatch):
    monkeypatch.setenv("DOMLAB_THREADS", "3")
    report = run_campaign(_campaign_cfg(tmp_path))
    monkeypatch.delenv("DOMLAB_THREADS")
    assert report_payload(report) == report_payload(run_campaign(_campaign_cfg(tmp_path)))


def test_campaign_precondition_failure_not_fatal(tmp_path):
    inst = gen_instance("adversarial", {"flavor": "nonreal"}, seed=2)
    p = tmp_path / "bad.json"
    inst.save(p)
    cfg = CampaignConfig(instances=[str(p)], criteria=["thm21:iii"], samples=100)
    report = run_campaign(cfg)
    entry = report["results"]["instance_000"]["criteria"]["thm21:iii"]
    assert entry["status"] == "precondition_failed"


def test_shrink_witness_commutative(tmp_path):
    inst = gen_instance("perturbed_pair", {"d": 6}, seed=4)
    cfg = CampaignConfig(instances=[inst], criteria=["thm21:iii"], samples=10000, seed=1)
    report = run_campaign(cfg)
    entry = report["results"]["instance_000"]["criteria"]["thm21:iii"]
    assert entry["status"] == "violation"
    w = entry["witness"]
    from domlab.verdicts import Witness
    vectors = {k: np.asarray(v)[..., 0] + 1j * np.asarray(v)[..., 1]
               for k, v in w["vectors"].items()}
    witness = Witness(vectors=vectors, margin=w["margin"], index=w["index"])
    shrunk = shrink_witness(inst, "thm21:iii", witness)
    assert shrunk.margin < -1e-8
    nnz_before = sum(int(np.count_nonzero(np.abs(v) > 1e-12)) for v in vectors.values())
    nnz_after = sum(int(np.count_nonzero(np.abs(v) > 1e-12)) for v in shrunk.vectors.values())
    assert nnz_after <= nnz_before
    # margin is reproducible from the shrunk vectors
    assert witness_margin(inst, "thm21:iii", shrunk) == pytest.approx(shrunk.margin)


def test_shrink_returns_original_when_not_violating():
    inst = gen_instance("commutative_random", {"d": 3}, seed=0)
    from domlab.verdicts import Witness
    w = Witness(vectors={"u": np.zeros(3, dtype=complex), "v": np.ones(3, dtype=complex)},
                margin=0.0)
    out = shrink_witness(inst, "thm21:iii", w)
    assert out.margin >= -1e-8


def test_cli_gen_check_pass(tmp_path, capsys):
    f = str(tmp_path / "inst.json")
    assert main(["gen", "--kind", "derivation_example", "--blocks", "2,1", "--seed", "3",
                 "-o", f]) == 0
    assert main(["check", f, "--criterion", "thm21:iii", "--samples", "500"]) == 0
    out = capsys.readouterr().out
    assert "pass" in out


def test_cli_check_violation_and_shrink(tmp_path, capsys):
    f = str(tmp_path / "per.json")
    wf = str(tmp_path / "wit.json")
    assert main(["gen", "--kind", "perturbed_pair", "--blocks", "1,1,1,1", "--seed", "11",
                 "--eps", "0.3", "-o", f]) == 0
    code = main(["check", f, "--criterion", "thm21:iii", "--samples", "10000",
                 "--witness-out", wf])
    assert code == 1
    assert os.path.exists(wf)
    assert main(["shrink", f, "--witness", wf, "-o", str(tmp_path / "shrunk.json")]) == 1
    out = capsys.readouterr().out
    assert "shrunk witness" in out


def test_cli_equiv_report(tmp_path, capsys):
    f = str(tmp_path / "c.json")
    rep = str(tmp_path / "report.json")
    assert main(["gen", "--kind", "commutative_random", "--blocks", "1,1,1", "--seed", "2",
                 "-o", f]) == 0
    code = main(["equiv", f, "--criteria", "direct,thm21:iii,oracle", "--samples", "300",
                 "--report", rep])
    assert code == 0
    doc = json.loads(open(rep).read())
    assert doc["equivalence"]["instance_000"]["unanimous"]


def test_cli_error_exit_code(tmp_path, capsys):
    assert main(["check", str(tmp_path / "missing.json"), "--criterion", "direct"]) == 3


def test_cli_t_grid_parsing():
    from domlab.cli import _parse_t_grid
    assert _parse_t_grid("log:1e-2:5:7") == [1e-2, 5.0, 7]
    assert _parse_t_grid("0.1,1,10") == [0.1, 10.0, 3]
    with pytest.raises(ValueError):
        _parse_t_grid("42")
