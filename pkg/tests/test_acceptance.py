"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL
line and enforcing its stated exactness and runtime budget.

Every assertion here is an exact rational comparison; the runtime budgets are
wall-clock upper bounds taken from the criteria, not performance targets.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

from weaksdp import (
    WeakCertificate,
    asymptote_witness,
    check_reformulation,
    frobenius_norm_squared,
    infer_structure,
    inner_product_matrix,
    invert_provenance,
    large_certificate,
    large_instance,
    me_instance,
    motzkin_sos,
    propagate_zero_rows,
    psd_certify,
    read_native,
    read_sdpa,
    reformulated,
    sieve_detect,
    three_by_three,
    validate_echelon,
    verify_weak_infeasibility,
    write_native,
    write_sdpa,
)
from weaksdp.formats import NativeBundle, write_cbf

from oracles import confirm_infeasible_psd_system
from test_formats import parse_cbf


@contextmanager
def criterion(number: int, description: str, budget_seconds: float):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"FAIL criterion {number}: {description}")
        raise
    elapsed = time.time() - start
    assert elapsed < budget_seconds, (
        f"criterion {number} exceeded its {budget_seconds}s budget ({elapsed:.1f}s)"
    )
    print(f"PASS criterion {number}: {description} ({elapsed:.2f}s)")


def test_criterion_1_minimal_example_regression():
    with criterion(1, "minimal 2x2 example verifies with k = l = 1, forces row 1", 1.0):
        raw, cert = me_instance()
        report = verify_weak_infeasibility(cert)
        assert report.passed
        assert cert.k == 1 and cert.l == 1
        trace = propagate_zero_rows(cert.clean, cert.k, cert.p_structure)
        assert trace.forced == frozenset({1})


def test_criterion_2_large_example_regression():
    with criterion(2, "4x4 disguised example: printed (G, T) reach b' = (0,0,-1,-12), k = l = 2", 1.0):
        raw, g, t = large_instance()
        clean = reformulated(raw, g, t)
        assert clean.b == (0, 0, -1, -12)
        prefix_structure = infer_structure(clean.A[:3])
        assert prefix_structure is not None and len(prefix_structure.blocks) == 3
        assert validate_echelon(clean.A[:3], prefix_structure).ok
        assert check_reformulation(raw, g, t, clean)
        cert = large_certificate()
        assert cert.k == 2 and cert.l == 2
        assert verify_weak_infeasibility(cert).passed


def test_criterion_3_sos_system_regression():
    with criterion(3, "sum-of-squares sextic system: exact certificate equations, sieve succeeds", 1.0):
        inst, xseq = motzkin_sos()
        assert all(v == 0 for v in inst.apply(xseq[0]))
        assert all(v == 0 for v in inst.apply(xseq[1]))
        assert inst.apply(xseq[2]) == inst.b
        assert inst.b[4] == -3  # the x^2 y^2 matching row
        detection = sieve_detect(inst)
        assert detection is not None and detection.k == 4


def test_criterion_4_three_by_three_regression():
    with criterion(4, "3x3 overlapping family verifies for alpha in {1, -2, 3/5} with b_3 = 0", 1.0):
        for alpha in (1, -2, Fraction(3, 5)):
            instance = three_by_three(alpha)
            assert instance.clean.b[2] == 0
            report = verify_weak_infeasibility(WeakCertificate.from_instance(instance))
            assert report.passed


def test_criterion_5_generator_soundness(sweep):
    instances, build_seconds = sweep
    with criterion(5, "200 seeded instances all verify; clean pattern exact; disguises round-trip", 300.0):
        assert build_seconds < 300.0, f"generation took {build_seconds:.1f}s"
        assert len(instances) == 200
        ns = {cfg.n for cfg, *_ in instances}
        assert min(ns) == 2 and max(ns) == 40
        assert {cfg.k for cfg, *_ in instances} == {1, 2, 3, 4, 5}
        assert {cfg.l for cfg, *_ in instances} == {1, 2, 3, 4, 5}
        assert {cfg.m - cfg.k - 1 for cfg, *_ in instances} == {0, 1, 2, 3, 4, 5}
        assert {cfg.messy for cfg, *_ in instances} == {True, False}

        for cfg, instance, cert, report in instances:
            assert report.passed, f"seed {cfg.seed} failed verification"
            assert not (instance.p_structure.blocks[0] & instance.q_structure.union())
            assert not (instance.q_structure.blocks[0] & instance.p_structure.union())
            table = inner_product_matrix(instance.clean, instance.xseq)
            for i in range(cfg.k + 1):
                for j in range(cfg.l + 1):
                    expected = -1 if (i, j) == (cfg.k, cfg.l) else 0
                    assert table[i][j] == expected
            for i in range(cfg.k + 1, cfg.m):
                assert table[i][: cfg.l] == [0] * cfg.l
                assert table[i][cfg.l] == instance.clean.b[i]
            if cfg.messy:
                g_inv, t_inv = invert_provenance(instance.provenance)
                assert check_reformulation(instance.provenance.messy, g_inv, t_inv, instance.clean)


def test_criterion_6_brute_force_oracle_agreement(sweep):
    instances, _ = sweep
    with criterion(6, "independent entry-propagation oracle confirms every n <= 3 prefix infeasible", 60.0):
        tiny = [(cfg, inst) for cfg, inst, _, _ in instances if cfg.n <= 3]
        assert len(tiny) >= 50
        for cfg, instance in tiny:
            prefix = instance.clean.A[: cfg.k + 1]
            rhs = instance.clean.b[: cfg.k + 1]
            assert confirm_infeasible_psd_system(prefix, rhs), f"seed {cfg.seed}"


def test_criterion_7_asymptote_property(sweep):
    instances, _ = sweep
    with criterion(7, "50 instances x four tolerances: exact PSD witness within eps of the constraint set", 120.0):
        chosen = [inst for cfg, inst, _, _ in instances if cfg.n <= 14][:50]
        assert len(chosen) == 50
        tolerances = (Fraction(1), Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))
        for instance in chosen:
            for eps in tolerances:
                witness = asymptote_witness(
                    instance.clean, instance.xseq, instance.q_structure, eps
                )
                assert psd_certify(witness.x_out).is_psd
                assert instance.clean.apply(witness.x_out.sub(witness.x_delta)) == instance.clean.b
                assert frobenius_norm_squared(witness.x_delta) <= eps * eps


def test_criterion_8_format_roundtrips(sweep, tmp_path):
    instances, _ = sweep
    with criterion(8, "native identity on 100 bundles; SDPA identity on integer data; CBF re-parse", 60.0):
        bundles = []
        for cfg, instance, cert, _ in instances[:100]:
            bundles.append(NativeBundle(
                instance=instance.raw, certificate=cert, generation={"seed": cfg.seed},
            ))
        for idx, bundle in enumerate(bundles):
            path = tmp_path / f"b{idx}.wsdp"
            write_native(bundle, path)
            assert read_native(path) == bundle

        for idx, (cfg, instance, _, _) in enumerate(instances[:40]):
            raw = instance.raw
            assert all(v.denominator == 1 for a in raw.A for row in a.to_rows() for v in row)
            assert all(v.denominator == 1 for v in raw.b)
            path = tmp_path / f"s{idx}.dat-s"
            write_sdpa(raw, path)
            assert read_sdpa(path) == raw

        for idx, (cfg, instance, _, _) in enumerate(instances[:20]):
            raw = instance.raw
            path = tmp_path / f"c{idx}.cbf"
            write_cbf(raw, path)
            doc = parse_cbf(path)
            expected = sorted(
                (ci, i - 1, j - 1, raw.A[ci].at(i, j))
                for ci in range(raw.m)
                for i in range(1, raw.n + 1)
                for j in range(1, i + 1)
                if raw.A[ci].at(i, j) != 0
            )
            assert doc["fcoord"] == expected


def test_criterion_9_sieve_asymmetry(default_library):
    root, manifest, build_seconds = default_library
    print(f"(library build: {build_seconds:.1f}s)")
    with criterion(9, "sieve detects 100% of clean library instances and 0% of messy ones", 60.0):
        assert manifest["count"] == 80
        clean_total = messy_total = clean_hit = messy_hit = 0
        for entry in manifest["instances"]:
            bundle = read_native(root / entry["files"]["native"])
            detection = sieve_detect(bundle.instance)
            if entry["kind"] == "clean":
                clean_total += 1
                clean_hit += detection is not None
            else:
                messy_total += 1
                messy_hit += detection is not None
        assert clean_total == 40 and messy_total == 40
        assert clean_hit == clean_total, "sieve missed a clean instance"
        assert messy_hit == 0, "sieve cracked a disguised instance"


def test_criterion_10_no_solver_is_invoked(default_library):
    # solver success/failure studies are out of scope by design: the artifact
    # substitutes exact certificate verification (criteria 1-9) and emits the
    # solver-ready inputs an external study would need
    root, manifest, _ = default_library
    with criterion(10, "no solver dependency; solver-ready .dat-s/.cbf emitted for every instance", 30.0):
        for entry in manifest["instances"]:
            assert (root / entry["files"]["sdpa"]).exists()
            assert (root / entry["files"]["cbf"]).exists()
        import weaksdp

        source_root = Path(weaksdp.__file__).parent
        for source_file in source_root.glob("*.py"):
            text = source_file.read_text()
            assert "import mosek" not in text
            assert "subprocess" not in text
