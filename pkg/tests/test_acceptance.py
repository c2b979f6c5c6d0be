"""Acceptance criteria; each test records one PASS/FAIL line for the terminal summary."""
from contextlib import contextmanager
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from renorm import (DEFAULT, Day, RotationCircle, complex_structure_report, complexify_norm,
                    enumerate_tip_candidates, evaluate_batch, group_closure, isometry_group_report,
                    kalton_projections, l2_canonical_form, pimple_norm, tips)
from renorm import serialize as S
from renorm.cli import RunManifest, run_command
from renorm.complex_structures import canonical_residual, standard_complex_structure
from renorm.corpus import factory_c2, factory_c4, factory_q8, pimple_corpus, single_pair
from renorm.group_rep import (central_involutions, classical_rep, corpus, coset_split, cyclic,
                              fini_rep_list, is_homomorphism, klein, quaternion, sign_product_table)
from renorm.jarosz import c2_report, double_norm_build, to_real
from renorm.matrix_groups import groups_isomorphic
from renorm.norms import WeightedLp

from conftest import ACCEPTANCE_LINES
from oracles import day_brute_force, polygon_gauge

TOL = DEFAULT.pimple_tol
FALSIFIER_FLOOR = 1e-4


@contextmanager
def criterion(number, title):
    """Record 'PASS'/'FAIL' with details for criterion ``number``."""
    info = {}
    t0 = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        ACCEPTANCE_LINES[number] = (f"[FAIL] {number:2d}. {title} ({time.perf_counter() - t0:.1f} s): "
                                    f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        print(ACCEPTANCE_LINES[number])
        raise
    detail = ", ".join(f"{k}={v}" for k, v in info.items())
    ACCEPTANCE_LINES[number] = f"[PASS] {number:2d}. {title} ({time.perf_counter() - t0:.1f} s) {detail}"
    print(ACCEPTANCE_LINES[number])


def test_c01_day_oracle():
    with criterion(1, "Day norm equals tuple enumeration") as info:
        t0 = time.perf_counter()
        worst = 0.0
        for n in range(1, 7):
            X = np.random.default_rng(100 + n).standard_normal((1000, n))
            worst = max(worst, float(np.max(np.abs(Day(n).eval_many(X) - day_brute_force(X)))))
        elapsed = time.perf_counter() - t0
        info.update(worst=f"{worst:.1e}")
        assert worst <= 1e-12
        assert elapsed < 10


def test_c02_double_norm_values():
    with criterion(2, "double-norm exact values") as info:
        n2, n1 = double_norm_build(2, 2), double_norm_build(2, 1)
        got = [n2(to_real([2, 1])), n2(to_real([1, 1])), n1(to_real([1, 1j])), n1(to_real([1, -1j]))]
        want = [5.0, 3.0, np.sqrt(5.0), 2.5]
        err = max(abs(a - b) for a, b in zip(got, want))
        info.update(worst=f"{err:.1e}")
        assert err <= 1e-12


def test_c03_c2_norm():
    with criterion(3, "C^2 norm identities, conjugation forms, falsifier") as info:
        t0 = time.perf_counter()
        rep = c2_report(count=64, starts=200, steps=300, seed=0)
        elapsed = time.perf_counter() - t0
        ident = rep["identities"]
        forms = rep["conjugation_forms"]
        residual = rep["falsifier"]["best_residual"]
        info.update(identities=f"{max(ident.values()):.1e}", rejected=f"{sum(f['rejected'] for f in forms)}/{len(forms)}",
                    falsifier=f"{residual:.2e}")
        assert max(ident.values()) <= 1e-10
        assert rep["all_forms_rejected"]
        assert all(np.shape(f["witness"]) == (4,) for f in forms)
        assert residual > FALSIFIER_FLOOR
        assert elapsed < 300


def test_c04_pimple_sandwich_and_tips():
    with criterion(4, "pimple sandwich, tips, certificates, polygon oracle") as info:
        worst = {"sandwich": 0.0, "tips": 0.0, "gap": 0.0, "polygon": 0.0}
        for name, spec in pimple_corpus().items():
            X = np.random.default_rng(7).standard_normal((1000, spec.dim))
            evs = evaluate_batch(spec, X)
            v = np.array([e.value for e in evs])
            lower = np.array([e.lower for e in evs])
            b = spec.base.eval_many(X)
            worst["sandwich"] = max(worst["sandwich"], float(np.max(v - b)),
                                    float(np.max(min(spec.lambdas) * b - v)))
            worst["gap"] = max(worst["gap"], float(np.max(v - lower)))
            tv = pimple_norm(spec).eval_many(spec.points)
            worst["tips"] = max(worst["tips"], float(np.max(np.abs(tv - spec.lambdas))))
            if spec.dim == 2:
                worst["polygon"] = max(worst["polygon"], float(np.max(np.abs(v - polygon_gauge(spec, X)))))
        info.update({k: f"{w:.1e}" for k, w in worst.items()})
        assert worst["sandwich"] <= 10 * TOL
        assert worst["tips"] <= 10 * TOL
        assert worst["gap"] <= 10 * TOL
        assert worst["polygon"] <= 1e-6


def test_c05_isometry_group_collapse():
    with criterion(5, "isometry groups collapse to the prescribed group") as info:
        t0 = time.perf_counter()
        cases = [("pair", single_pair(), 4, klein()), ("C2", factory_c2()[0], 2, cyclic(2)),
                 ("C4", factory_c4()[0], 4, cyclic(4)), ("Q8", factory_q8()[0], 8, quaternion())]
        for label, spec, order, table in cases:
            rep = isometry_group_report(spec, table.table, starts=200, steps=300)
            info[label] = f"order {rep.order}, residual {rep.falsifier.best_residual:.1e}"
            assert rep.order == order, label
            assert rep.target_isomorphic, label
            assert rep.falsifier.best_residual > FALSIFIER_FLOOR, label
        # (b) and (c) ask for exactly the prescribed matrices
        for spec in (factory_c2()[0], factory_c4()[0]):
            G = group_closure(enumerate_tip_candidates(spec))
            assert all(spec.group.index_of(g) is not None for g in G.elements)
        assert time.perf_counter() - t0 < 600


def test_c06_representation_pipeline():
    with criterion(6, "representation formulas and end-to-end pipeline") as info:
        for table in corpus():
            assert table.order <= 16
            assert is_homomorphism(sign_product_table(table), fini_rep_list(table))
            for j in central_involutions(table):
                mats = classical_rep(coset_split(table, j))
                assert is_homomorphism(table, mats)
                assert np.array_equal(mats[j], -np.eye(table.order // 2, dtype=np.int64))
        for group, dim, order in (("cyclic4", 2, 4), ("quaternion8", 4, 8)):
            status, text = run_command(RunManifest(["represent"], params={"group": group, "dim": dim}))
            rep = json.loads(text)["report"]
            info[group] = f"order {rep['isometry_order']}, isomorphic {rep['isomorphic']}"
            assert status == 0
            assert rep["homomorphism_exact"] and rep["representation"]["T_j_is_minus_id"]
            assert rep["isometry_order"] == order and rep["isomorphic"]
            assert rep["isometry_group"]["falsifier"]["best_residual"] > FALSIFIER_FLOOR


def test_c07_complex_structures():
    with criterion(7, "complex structures up to isometric conjugacy") as info:
        spec = factory_c4()[0]
        G = group_closure(enumerate_tip_candidates(spec))
        rep = complex_structure_report(G)
        info["C4"] = f"{len(rep.roots)} roots / {len(rep.classes)} classes"
        assert len(rep.roots) == 2 and len(rep.classes) == 2
        norm, J, c = complexify_norm(WeightedLp(3, [1.0, 2.0]))
        sq = complex_structure_report(group_closure([J, c]), norm)
        info["square"] = f"{len(sq.roots)} roots / {len(sq.classes)} classes"
        assert len(sq.roots) == 2 and len(sq.classes) == 1
        assert np.array_equal(c @ sq.roots[0] @ c, sq.roots[1])


def test_c08_canonical_form():
    with criterion(8, "canonical form round trips") as info:
        t0 = time.perf_counter()
        rng = np.random.default_rng(8)
        worst = 0.0
        for n in range(2, 11, 2):
            J = standard_complex_structure(n)
            for _ in range(100):
                q, r = np.linalg.qr(rng.standard_normal((n, n)))
                Q = q * np.sign(np.diag(r))
                A = Q @ J @ Q.T
                worst = max(worst, *canonical_residual(A, l2_canonical_form(A)))
        info.update(worst=f"{worst:.1e}")
        assert worst <= 1e-10
        assert time.perf_counter() - t0 < 10


def test_c09_kalton_identities():
    with criterion(9, "commuting complex structure identities") as info:
        rng = np.random.default_rng(9)
        worst = 0.0
        for n in range(2, 11, 2):
            J = standard_complex_structure(n)
            for k in range(n // 2 + 1):
                # block construction: B agrees with A on k planes and is opposite on the rest
                signs = np.repeat(np.r_[np.ones(k), -np.ones(n // 2 - k)], 2)
                perm = np.eye(n)[rng.permutation(n // 2).repeat(2) * 2 + np.tile([0, 1], n // 2)]
                A = perm @ J @ perm.T
                B = perm @ (J * signs[:, None]) @ perm.T
                worst = max(worst, kalton_projections(A, B).worst)
        info.update(worst=f"{worst:.1e}")
        assert worst <= 1e-12


MANIFESTS = [
    {"command": ["norm", "eval"], "inputs": {"file": "day.json"}, "params": {"x": ["1,1,0,0", "0.3,-2,1,5"]}},
    {"command": ["pimple", "build"], "params": {"group": "cyclic4", "dim": 2}},
    {"command": ["isometries", "falsify"], "inputs": {"spec": "pair.json"}, "params": {"starts": 4, "steps": 60},
     "seed": 17},
    {"command": ["jarosz", "c2"], "params": {"count": 8, "starts": 2, "steps": 40}, "seed": 3},
    {"command": ["represent"], "params": {"group": "cyclic4", "dim": 2, "starts": 2, "steps": 40}},
]


def test_c10_determinism(tmp_path):
    with criterion(10, "repeated manifests give identical bytes") as info:
        S.dump(S.norm_to_dict(Day(4)), tmp_path / "day.json")
        S.dump(S.pimple_spec_to_dict(single_pair()), tmp_path / "pair.json")
        for k, doc in enumerate(MANIFESTS):
            doc = dict(doc, inputs={n: str(tmp_path / p) for n, p in doc.get("inputs", {}).items()})
            path = tmp_path / f"m{k}.json"
            S.dump(doc, path)
            outs = [run_command(RunManifest.from_dict(S.load(path))) for _ in range(2)]
            proc = subprocess.run([sys.executable, "-m", "renorm", "run", str(path)],
                                  capture_output=True, text=True, check=False)
            assert outs[0][0] == 0 and proc.returncode == 0
            assert outs[0][1] == outs[1][1] == proc.stdout, doc["command"]
        info.update(manifests=len(MANIFESTS))
