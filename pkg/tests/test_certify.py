from fractions import Fraction

from weaksdp import (
    GenConfig,
    Matrix,
    SdpInstance,
    SymMatrix,
    WeakCertificate,
    check_infeasibility_cert,
    check_reformulation,
    generate,
    inverse,
    large_certificate,
    large_instance,
    me_instance,
    motzkin_certificate,
    motzkin_sos,
    permuted_instance,
    reformulated,
    sieve_detect,
    three_by_three,
    verify_weak_infeasibility,
)


class TestCheckReformulation:
    def test_identity(self):
        raw, _ = me_instance()
        assert check_reformulation(raw, Matrix.identity(2), Matrix.identity(2), raw)

    def test_printed_large_pair(self):
        raw, g, t = large_instance()
        clean = reformulated(raw, g, t)
        assert clean.b == (0, 0, -1, -12)
        assert check_reformulation(raw, g, t, clean)

    def test_single_entry_perturbation_fails(self):
        raw, g, t = large_instance()
        clean = reformulated(raw, g, t)
        rows = t.to_rows()
        rows[0][0] += 1
        assert not check_reformulation(raw, g, Matrix.from_rows(rows), clean)

    def test_singular_row_ops_rejected(self):
        raw, _ = me_instance()
        assert not check_reformulation(raw, Matrix.zeros(2, 2), Matrix.identity(2), raw)

    def test_equivalence_under_inversion(self):
        # (G, T) maps raw to clean iff (G^-1, T^-1) maps clean to raw
        raw, g, t = large_instance()
        clean = reformulated(raw, g, t)
        assert check_reformulation(raw, g, t, clean)
        assert check_reformulation(clean, inverse(g), inverse(t), raw)


class TestVerifyWeakInfeasibility:
    def test_minimal_example_passes(self):
        _, cert = me_instance()
        report = verify_weak_infeasibility(cert)
        assert report.passed
        assert cert.k == 1 and cert.l == 1

    def test_large_example_passes_with_k_l_two(self):
        cert = large_certificate()
        report = verify_weak_infeasibility(cert)
        assert report.passed
        assert cert.k == 2 and cert.l == 2

    def test_dropping_first_x_fails(self):
        _, cert = me_instance()
        truncated = WeakCertificate(
            raw=cert.raw,
            row_ops=cert.row_ops,
            transform=cert.transform,
            clean=cert.clean,
            k=cert.k,
            xseq=cert.xseq[1:],
            p_structure=cert.p_structure,
            q_structure=type(cert.q_structure)(2, (cert.q_structure.blocks[0],)),
        )
        report = verify_weak_infeasibility(truncated)
        assert not report.passed
        failed = [c.name for c in report.checks if not c.passed]
        assert "sequence length l >= 1" in failed

    def test_report_is_machine_readable(self):
        import json

        _, cert = me_instance()
        doc = json.loads(verify_weak_infeasibility(cert).to_json())
        assert doc["passed"] is True
        assert len(doc["checks"]) == 5


class TestSieveDetect:
    def test_sos_system_detected_without_reformulation(self):
        inst, _ = motzkin_sos()
        detection = sieve_detect(inst)
        assert detection is not None
        assert detection.k == 4
        assert detection.permutation[:5] == (1, 2, 3, 4, 5)
        assert [sorted(b) for b in detection.structure.blocks] == [[1], [2], [3], [4], [5]]

    def test_minimal_clean_system_detected(self):
        _, cert = me_instance()
        detection = sieve_detect(cert.clean)
        assert detection is not None and detection.k == 1
        # the contradiction row has an empty diagonal block
        assert detection.structure.blocks[1] == frozenset()

    def test_disguised_system_not_detected(self):
        raw, _, _ = large_instance()
        assert sieve_detect(raw) is None

    def test_detection_implies_valid_prefix(self):
        for seed in (0, 1, 2, 3):
            instance = generate(GenConfig(n=5, m=4, k=2, l=1, seed=seed))
            detection = sieve_detect(instance.clean)
            assert detection is not None
            reordered = permuted_instance(instance.clean, detection.permutation)
            assert check_infeasibility_cert(reordered, detection.k, detection.structure)

    def test_stalls_without_zero_rhs_rows(self):
        inst = SdpInstance(2, (SymMatrix.identity(2),), (5,))
        assert sieve_detect(inst) is None


class TestCertificateFromInstance:
    def test_clean_instance_gets_identity_reformulation(self):
        instance = three_by_three(Fraction(3, 5))
        cert = WeakCertificate.from_instance(instance)
        assert cert.raw == instance.clean
        assert cert.row_ops == Matrix.identity(3)
        assert verify_weak_infeasibility(cert).passed

    def test_messy_instance_inverts_disguise(self):
        instance = generate(GenConfig(n=5, m=4, k=1, l=2, seed=10, messy=True))
        cert = WeakCertificate.from_instance(instance)
        assert cert.raw == instance.provenance.messy
        assert verify_weak_infeasibility(cert).passed

    def test_sos_certificate(self):
        cert = motzkin_certificate()
        assert verify_weak_infeasibility(cert).passed
        assert cert.k == 4 and cert.l == 2
