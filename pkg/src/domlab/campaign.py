"""Campaign orchestration: run criteria over instance corpora, report, shrink.

A campaign is reproducible from (config, instance files) exactly: every task
derives its randomness from (campaign seed, instance index, criterion index),
so serial and threaded runs produce byte-identical report payloads.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import domination as dom
from . import spaces
from .errors import CommutativityError, DomLabError, HypothesisError
from .forms import ProductForm, positivity_check
from .ideals import Subspace, check_generalized_ideal, check_ideal_modulus_implication, check_mvv_ideal
from .instances import Instance, gen_instance
from .invariance import ExactSet, ProductConeSet, check_invariance
from .verdicts import PRECONDITION_FAILED, Verdict, Witness

DOMINATION_CRITERIA = (
    "direct",
    "thm21:ii", "thm21:iii", "thm21:iv", "thm21:v", "thm21:vi",
    "thm21:vii", "thm21:vii_corrected",
    "thm31:direct", "thm31:ii", "thm31:iii_c_sampled", "thm31:iii_c_exact",
    "thm41:direct", "thm41:criterion_ii",
    "oracle",
)
OTHER_CRITERIA = (
    "positivity:a", "positivity:b",
    "barthelemy:i", "barthelemy:ii", "barthelemy:iii", "barthelemy:iv",
    "barthelemy:v", "barthelemy:vi",
    "ideal:def", "ideal:prop12", "ideal:mvv",
)
ALL_CRITERIA = DOMINATION_CRITERIA + OTHER_CRITERIA

EXIT_PASS, EXIT_VIOLATION, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3


@dataclass
class CampaignConfig:
    instances: list = field(default_factory=list)  # paths or inline generation specs
    criteria: list = field(default_factory=lambda: ["direct", "thm21:iii"])
    samples: int = 1000
    tol: float = 1e-8
    t_grid: list = field(default_factory=lambda: [1e-3, 10.0, 13])
    theta_points: int = 64
    seed: int = 0
    threads: int | None = None

    def resolved_t_grid(self) -> np.ndarray:
        lo, hi, n = self.t_grid
        return np.geomspace(float(lo), float(hi), int(n))

    def resolved_theta_grid(self) -> np.ndarray:
        return np.linspace(0.0, 2.0 * np.pi, int(self.theta_points), endpoint=False)

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "criteria": list(self.criteria),
            "samples": self.samples,
            "tol": self.tol,
            "t_grid": list(self.t_grid),
            "theta_points": self.theta_points,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CampaignConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in doc.items() if k in known})


def load_instance(spec) -> Instance:
    if isinstance(spec, Instance):
        return spec
    if isinstance(spec, (str, Path)):
        return Instance.load(spec)
    if isinstance(spec, dict):
        return gen_instance(spec["kind"], spec.get("params", {}), spec.get("seed", 0))
    raise TypeError(f"cannot interpret instance spec {spec!r}")


def run_criterion(inst: Instance, criterion: str, cfg: CampaignConfig, seed: int) -> Verdict:
    """Dispatch one criterion on one instance; hypothesis failures become verdicts."""
    t_grid = cfg.resolved_t_grid()
    theta_grid = cfg.resolved_theta_grid()
    n = cfg.samples
    tol = cfg.tol
    try:
        if criterion == "direct":
            return dom.check_domination_direct(inst.domination(), t_grid, n, tol, seed)
        if criterion.startswith("thm21:"):
            return dom.check_thm21(inst.domination(), criterion.split(":", 1)[1], n, tol, seed)
        if criterion.startswith("thm31:"):
            name = criterion.split(":", 1)[1]
            name = "iii_c_exact_commutative" if name == "iii_c_exact" else name
            return dom.check_thm31(inst.domination(), name, n, t_grid, tol, seed)
        if criterion.startswith("thm41:"):
            mode = criterion.split(":", 1)[1]
            return dom.check_thm41(inst.domination(), theta_grid, t_grid,
                                   max(n // 10, 50), tol, seed, mode)
        if criterion == "oracle":
            return dom.commutative_matrix_domination(inst.domination(), t_grid)
        if criterion.startswith("positivity:"):
            which = criterion.split(":", 1)[1]
            op = inst.form_a() if which == "a" else inst.form_b()
            return positivity_check(op, "criterion", n, t_grid, max(tol, 1e-9), seed)
        if criterion.startswith("barthelemy:"):
            cond = criterion.split(":", 1)[1]
            di = inst.domination()
            cform = ProductForm(di.a, di.b)
            space = di.space

            def proj(x):
                d = space.dim
                ut, vt = dom.project_C_vec(space, x[..., :d], x[..., d:])
                return np.concatenate([ut, vt], axis=-1)

            cset = ExactSet(2 * space.dim, proj, "order_interval")
            c0 = ProductConeSet(space) if cond in ("v", "vi") else None
            return check_invariance(cform, cset, cond, c0, min(n, 500), t_grid, tol, seed)
        if criterion.startswith("ideal:"):
            variant = criterion.split(":", 1)[1]
            if "U" not in inst.subspaces or "V" not in inst.subspaces:
                return Verdict(PRECONDITION_FAILED, float("nan"), 0,
                               notes=["instance carries no subspaces U, V"])
            u_sub = Subspace(inst.space, inst.subspaces["U"])
            v_sub = Subspace(inst.space, inst.subspaces["V"])
            if variant in ("def", "definition"):
                return check_generalized_ideal(u_sub, v_sub, "definition", n, tol, seed)
            if variant == "prop12":
                return check_generalized_ideal(u_sub, v_sub, "prop12", n, tol, seed)
            if variant == "modulus":
                return check_ideal_modulus_implication(u_sub, v_sub, n, tol, seed)
            if variant == "mvv":
                return check_mvv_ideal(u_sub, v_sub, n, tol, seed)
            raise ValueError(f"unknown ideal variant {variant!r}")
        raise ValueError(f"unknown criterion {criterion!r}")
    except (HypothesisError, CommutativityError) as exc:
        return Verdict(PRECONDITION_FAILED, float("nan"), 0, notes=[str(exc)])


def run_campaign(config: CampaignConfig) -> dict:
    """Execute all configured criteria over the corpus and assemble the report."""
    t0 = time.perf_counter()
    instances = [load_instance(s) for s in config.instances]
    criteria = list(config.criteria)
    tasks = [(ii, ci) for ii in range(len(instances)) for ci in range(len(criteria))]

    def work(task):
        ii, ci = task
        seed = (config.seed * 1_000_003 + ii * 1009 + ci) % (2**31)
        return run_criterion(instances[ii], criteria[ci], config, seed)

    n_threads = config.threads or int(os.environ.get("DOMLAB_THREADS", "1"))
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            verdicts = list(pool.map(work, tasks))
    else:
        verdicts = [work(t) for t in tasks]

    results = {}
    warnings = []
    for (ii, ci), verdict in zip(tasks, verdicts):
        key = f"instance_{ii:03d}"
        results.setdefault(key, {"kind": instances[ii].kind, "seed": instances[ii].seed,
                                 "blocks": list(instances[ii].space.blocks),
                                 "criteria": {}})
        results[key]["criteria"][criteria[ci]] = verdict.to_dict()

    equivalence = {}
    for key, entry in results.items():
        statuses = {c: v["status"] for c, v in entry["criteria"].items()
                    if c in DOMINATION_CRITERIA}
        decided = {c: s for c, s in statuses.items() if s in ("pass", "violation")}
        unanimous = len(set(decided.values())) <= 1
        equivalence[key] = {"statuses": statuses, "unanimous": unanimous}

    vii_probe = None
    if "thm21:vii" in criteria and "thm21:vii_corrected" in criteria:
        printed = [results[k]["criteria"]["thm21:vii"]["status"] for k in results]
        corrected = [results[k]["criteria"]["thm21:vii_corrected"]["status"] for k in results]
        disagreements = [k for k, p, c in zip(results, printed, corrected) if p != c]
        vii_probe = {
            "printed_matches_corrected": not disagreements,
            "disagreeing_instances": disagreements,
            "finding": ("printed (vii) unanimous with the corrected variant"
                        if not disagreements else
                        "printed (vii) disagrees with the corrected variant; "
                        "the corrected variant tracks the other criteria"),
        }

    all_statuses = [v["status"] for e in results.values() for v in e["criteria"].values()]
    if "violation" in all_statuses:
        exit_code = EXIT_VIOLATION
    elif "inconclusive" in all_statuses:
        exit_code = EXIT_INCONCLUSIVE
    else:
        exit_code = EXIT_PASS
    report = {
        "config": config.to_dict(),
        "results": results,
        "equivalence": equivalence,
        "summary": {
            "instances": len(instances),
            "criteria": criteria,
            "status_counts": {s: all_statuses.count(s) for s in sorted(set(all_statuses))},
            "exit_code": exit_code,
        },
        "warnings": warnings,
        "wall_clock_s": round(time.perf_counter() - t0, 3),
    }
    if vii_probe is not None:
        report["vii_probe"] = vii_probe
    return report


def report_payload(report: dict) -> str:
    """Deterministic serialization of the numeric payload (no wall clock)."""
    doc = {k: v for k, v in report.items() if k != "wall_clock_s"}
    return json.dumps(doc, sort_keys=True)


def save_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# witness shrinking
# ---------------------------------------------------------------------------

def _scalar(x) -> float:
    return float(np.asarray(x).reshape(-1)[0])


def witness_margin(inst: Instance, criterion: str, w: Witness) -> float:
    """Re-evaluate the criterion margin for a single witness sample."""
    di = inst.domination()
    space = di.space
    u = np.asarray(w.vectors.get("u"), dtype=complex).reshape(1, -1)
    v = w.vectors.get("v")
    v = None if v is None else np.asarray(v, dtype=complex).reshape(1, -1)
    if criterion == "direct":
        t = w.t if w.t is not None else 1.0
        tu = di.a.evolve(t, u)
        sv = di.b.evolve(t, v)
        vals = [_scalar(spaces.cone_margin_vec(space, sv - tu) / (1 + spaces.norm_vec(space, sv - tu))),
                _scalar(spaces.cone_margin_vec(space, sv + tu) / (1 + spaces.norm_vec(space, sv + tu)))]
        return min(vals)
    if criterion.startswith("thm21:"):
        name = criterion.split(":", 1)[1]
        uh, vh, ut, vt = dom.hat_tilde_vec(space, spaces.real_part_vec(space, u),
                                           spaces.real_part_vec(space, v))
        a, b = di.a, di.b
        au, bv = _scalar(a.quad(u)), _scalar(b.quad(v))
        pairs = {
            "ii": (_scalar(a.quad(u - uh) + b.quad(v + vh)), au + bv),
            "iii": (_scalar(a.quad(ut) + b.quad(vt)), au + bv),
            "iv": (_scalar(b.pair(v, vh).real), _scalar(a.pair(u, uh).real)),
            "v": (_scalar(a.pair(u, ut).real + b.pair(v, vt).real), au + bv),
            "vi": (_scalar(a.quad(uh) + b.quad(vh)),
                   _scalar(a.pair(u, uh).real - b.pair(v, vh).real)),
            "vii": (_scalar(a.quad(ut) + b.quad(ut)),
                    _scalar(a.pair(u, ut).real + b.pair(v, vt).real)),
            "vii_corrected": (_scalar(a.quad(ut) + b.quad(vt)),
                              _scalar(a.pair(u, ut).real + b.pair(v, vt).real)),
        }
        lhs, rhs = pairs[name]
        return (rhs - lhs) / (1.0 + abs(lhs) + abs(rhs))
    if criterion == "thm31:iii_c_sampled":
        val = _scalar(di.a.pair(u, v).real - di.b.pair(u, v).real)
        return val / (1.0 + abs(val))
    if criterion == "thm31:ii":
        meet = spaces.inf_vec(space, u, v)
        join = u + v - meet
        lhs = _scalar(di.a.quad(0.5 * (u + meet)) + di.b.quad(0.5 * (v + join)))
        rhs = _scalar(di.a.quad(u) + di.b.quad(v))
        return (rhs - lhs) / (1.0 + abs(lhs) + abs(rhs))
    if criterion == "thm31:direct":
        t = w.t if w.t is not None else 1.0
        diff = di.b.evolve(t, u) - di.a.evolve(t, u)
        return _scalar(spaces.cone_margin_vec(space, diff) / (1 + spaces.norm_vec(space, diff)))
    if criterion.startswith("thm41:"):
        t = w.t if w.t is not None else 1.0
        th = w.theta if w.theta is not None else 0.0
        if criterion.endswith("direct"):
            diff = di.b.evolve(t, v) - spaces.real_part_vec(
                space, np.exp(1j * th) * di.a.evolve(t, u))
            return _scalar(spaces.cone_margin_vec(space, diff) / (1 + spaces.norm_vec(space, diff)))
        from .invariance import ThetaConstraint, dykstra_project

        if space.is_commutative:
            pu, pv = dom.project_theta_cap_commutative(space, u, v)
        else:
            theta_grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
            x = np.concatenate([u, v], axis=-1)
            oracles = [ThetaConstraint(space, _scalar(a)) for a in theta_grid]
            px, _ = dykstra_project(oracles, x, tol=1e-10)
            pu, pv = px[..., :space.dim], px[..., space.dim:]
        lhs = _scalar(di.a.quad(pu) + di.b.quad(pv))
        rhs = _scalar(di.a.quad(u) + di.b.quad(v))
        return (rhs - lhs) / (1.0 + abs(lhs) + abs(rhs))
    raise ValueError(f"cannot re-evaluate criterion {criterion!r}")


def shrink_witness(inst: Instance, criterion: str, w: Witness, tol: float = 1e-8) -> Witness:
    """Greedily zero blocks, then eigencomponents, while the violation persists."""
    margin = witness_margin(inst, criterion, w)
    if margin >= -tol:
        out = Witness(dict(w.vectors), margin, w.index, w.t, w.theta)
        return out
    space = inst.space
    vectors = {k: np.asarray(val, dtype=complex).reshape(-1).copy()
               for k, val in w.vectors.items() if k in ("u", "v")}

    def current_margin():
        trial = Witness(dict(vectors), 0.0, w.index, w.t, w.theta)
        return witness_margin(inst, criterion, trial)

    # pass 1: whole blocks, jointly across the carried vectors
    for k in range(len(space.blocks)):
        sl = slice(space.offsets[k], space.offsets[k + 1])
        saved = {name: vec[sl].copy() for name, vec in vectors.items()}
        for vec in vectors.values():
            vec[sl] = 0.0
        if current_margin() >= -tol:
            for name, vec in vectors.items():
                vec[sl] = saved[name]
    # pass 2: eigencomponents of each Hermitian part, per block
    for name, vec in vectors.items():
        for k, n in enumerate(space.blocks):
            if n == 1:
                continue
            sl = slice(space.offsets[k], space.offsets[k + 1])
            m = vec[sl].reshape(n, n)
            h = 0.5 * (m + m.conj().T)
            wvals, wvecs = np.linalg.eigh(h)
            for idx in range(n):
                saved = wvals[idx]
                wvals[idx] = 0.0
                vec[sl] = (wvecs * wvals) @ wvecs.conj().T + (m - h)
                if current_margin() >= -tol:
                    wvals[idx] = saved
                    vec[sl] = (wvecs * wvals) @ wvecs.conj().T + (m - h)
    final = current_margin()
    if final >= -tol:
        return w  # shrinking lost the violation; keep the original
    return Witness(dict(vectors), float(final), w.index, w.t, w.theta)
