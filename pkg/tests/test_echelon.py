from fractions import Fraction

import pytest

from weaksdp import (
    EchelonSequence,
    SdpInstance,
    Structure,
    SymBuilder,
    SymMatrix,
    asymptote_witness,
    check_infeasibility_cert,
    check_not_strong_cert,
    check_strong_infeasibility_cert,
    frobenius_norm_squared,
    infer_structure,
    me_instance,
    motzkin_prefix_length,
    motzkin_sos,
    propagate_zero_rows,
    psd_certify,
    validate_echelon,
)
from weaksdp.paper_instances import motzkin_monomial_groups

from oracles import rational_grid, search_strong_infeasibility_multiplier


def sym(rows):
    return SymMatrix.from_rows(rows)


def blocks(n, *sets):
    return Structure(n, tuple(frozenset(s) for s in sets))


ME_CLEAN = SdpInstance(
    2,
    (sym([[1, 0], [0, 0]]), sym([[0, Fraction(-1, 2)], [Fraction(-1, 2), 0]])),
    (0, -1),
)
ME_X = (sym([[0, 0], [0, 1]]), sym([[0, 1], [1, 0]]))


class TestStructure:
    def test_disjointness_enforced(self):
        with pytest.raises(ValueError):
            blocks(3, {1, 2}, {2})

    def test_range_enforced(self):
        with pytest.raises(ValueError):
            blocks(2, {3})

    def test_residual(self):
        s = blocks(4, {1}, {3})
        assert s.residual() == {2, 4}


class TestValidateEchelon:
    def test_minimal_pair_passes(self):
        report = validate_echelon(ME_CLEAN.A, blocks(2, {1}, set()))
        assert report.ok

    def test_sos_prefix_passes(self):
        inst, _ = motzkin_sos()
        report = validate_echelon(inst.A[:5], blocks(8, {1}, {2}, {3}, {4}, {5}))
        assert report.ok

    def test_nonpositive_diagonal_fails(self):
        report = validate_echelon([sym([[0, 1], [1, 0]])], blocks(2, {1}))
        assert not report.ok
        assert report.violation.matrix_index == 1
        assert report.violation.position == (1, 1)
        assert "positive" in report.violation.rule

    def test_offdiagonal_inside_block_fails(self):
        report = validate_echelon([sym([[1, 1], [1, 1]])], blocks(2, {1, 2}))
        assert not report.ok
        assert report.violation.position == (1, 2)

    def test_stray_entry_fails(self):
        report = validate_echelon([sym([[1, 0, 0], [0, 0, 2], [0, 2, 0]])], blocks(3, {1}))
        assert not report.ok
        assert report.violation.position == (2, 3)

    def test_count_mismatch_raises(self):
        with pytest.raises(ValueError):
            validate_echelon([SymMatrix.identity(2)], blocks(2, {1}, {2}))


class TestEchelonSequence:
    def test_construction_validates(self):
        seq = EchelonSequence(ME_X, blocks(2, {2}, set()))
        assert len(seq) == 2

    def test_invalid_sequence_rejected(self):
        with pytest.raises(ValueError):
            EchelonSequence((sym([[0, 1], [1, 0]]),), blocks(2, {1}))


class TestInferStructure:
    def test_minimal_sequence(self):
        structure = infer_structure(ME_X)
        assert structure is not None
        assert structure.blocks == (frozenset({2}), frozenset())

    def test_idempotent_with_validation(self):
        # whenever inference succeeds, validation against the inferred
        # structure passes (inference re-validates before returning)
        inst, xseq = motzkin_sos()
        for family in (inst.A[:5], xseq, ME_X):
            structure = infer_structure(family)
            assert structure is not None
            assert validate_echelon(family, structure).ok

    def test_empty_list(self):
        structure = infer_structure(())
        assert structure is not None and structure.blocks == ()

    def test_non_echelon_returns_none(self):
        assert infer_structure([sym([[0, 1], [1, 0]])]) is None

    def test_sos_sequence(self):
        _, xseq = motzkin_sos()
        structure = infer_structure(xseq)
        assert structure.blocks == (frozenset({8}), frozenset({3, 4}), frozenset({5, 6, 7}))


class TestInfeasibilityCert:
    def test_minimal_example(self):
        assert check_infeasibility_cert(ME_CLEAN, 1, blocks(2, {1}, set()))

    def test_sos_system_with_rhs_minus_three(self):
        inst, _ = motzkin_sos()
        k = motzkin_prefix_length()
        assert k == 4
        assert inst.b[4] == -3
        assert check_infeasibility_cert(inst, 4, blocks(8, {1}, {2}, {3}, {4}, {5}))

    def test_zero_contradiction_row_rejected(self):
        inst = SdpInstance(2, ME_CLEAN.A, (0, 0))
        assert not check_infeasibility_cert(inst, 1, blocks(2, {1}, set()))

    def test_malformed_structure_raises(self):
        with pytest.raises(ValueError):
            check_infeasibility_cert(ME_CLEAN, 1, blocks(2, {1}))


class TestPropagateZeroRows:
    def test_minimal_example_forces_first_row(self):
        trace = propagate_zero_rows(ME_CLEAN, 1, blocks(2, {1}, set()))
        assert trace.forced == {1}
        assert [s.constraint for s in trace.steps] == [1]
        assert trace.final_rhs == -1

    def test_sos_system_forces_four_rows(self):
        inst, _ = motzkin_sos()
        trace = propagate_zero_rows(inst, 4, blocks(8, {1}, {2}, {3}, {4}, {5}))
        assert trace.forced == {1, 2, 3, 4}
        assert trace.final_rhs == -3

    def test_k_zero_forces_nothing(self):
        inst = SdpInstance(1, (SymMatrix.diag([1]),), (-1,))
        trace = propagate_zero_rows(inst, 0, blocks(1, {1}))
        assert trace.forced == frozenset()
        assert trace.steps == ()

    def test_precondition_enforced(self):
        bad = SdpInstance(2, ME_CLEAN.A, (0, 1))
        with pytest.raises(ValueError):
            propagate_zero_rows(bad, 1, blocks(2, {1}, set()))


class TestNotStrongCert:
    def test_minimal_example(self):
        assert check_not_strong_cert(ME_CLEAN, ME_X, blocks(2, {2}, set()))

    def test_sos_system(self):
        inst, xseq = motzkin_sos()
        structure = infer_structure(xseq)
        assert check_not_strong_cert(inst, xseq, structure)

    def test_perturbed_last_member_fails(self):
        x2 = ME_X[1].add(SymMatrix.unit(2, 1, 1))
        assert not check_not_strong_cert(ME_CLEAN, (ME_X[0], x2), blocks(2, {2}, set()))

    def test_short_sequence_raises(self):
        with pytest.raises(ValueError):
            check_not_strong_cert(ME_CLEAN, (ME_X[0],), blocks(2, {2}))


class TestAsymptoteWitness:
    def test_minimal_example_eps_one(self):
        w = asymptote_witness(ME_CLEAN, ME_X, blocks(2, {2}, set()), 1)
        assert psd_certify(w.x_out).is_psd
        assert ME_CLEAN.apply(w.x_out.sub(w.x_delta)) == ME_CLEAN.b
        assert frobenius_norm_squared(w.x_delta) <= 1
        assert w.x_out.at(2, 2) >= 1 and w.x_out.at(1, 1) <= 1

    def test_two_by_two_determinant_condition(self):
        eps = Fraction(1, 10)
        w = asymptote_witness(ME_CLEAN, ME_X, blocks(2, {2}, set()), eps)
        gamma = w.gammas[0]
        assert frobenius_norm_squared(w.x_delta) <= eps * eps
        assert w.delta * gamma > 1  # 2x2 leading determinant is positive
        assert gamma > 10

    def test_no_residual_block_means_zero_padding(self):
        x1 = sym([[0, 0], [0, 1]])
        x2 = sym([[1, 0], [0, 0]])
        inst = SdpInstance(2, (SymMatrix.zeros(2),), (0,))
        structure = blocks(2, {2}, {1})
        w = asymptote_witness(inst, (x1, x2), structure, Fraction(1, 100))
        assert w.x_delta == SymMatrix.zeros(2)
        assert w.delta == 0
        assert psd_certify(w.x_out).is_psd

    def test_nonpositive_eps_rejected(self):
        with pytest.raises(ValueError):
            asymptote_witness(ME_CLEAN, ME_X, blocks(2, {2}, set()), 0)


class TestNormalizeContradictionRow:
    def test_sos_row_rescaled_to_minus_one(self):
        from weaksdp import normalize_contradiction_row

        inst, xseq = motzkin_sos()
        normalized = normalize_contradiction_row(inst, 4)
        assert normalized.b[4] == -1
        assert check_infeasibility_cert(normalized, 4, blocks(8, {1}, {2}, {3}, {4}, {5}))
        # the scaled row still matches the witness sequence exactly
        assert check_not_strong_cert(normalized, xseq, infer_structure(xseq))

    def test_nonnegative_row_rejected(self):
        from weaksdp import normalize_contradiction_row

        with pytest.raises(ValueError):
            normalize_contradiction_row(SdpInstance(1, (SymMatrix.diag([1]),), (0,)), 0)


class TestStrongInfeasibilityCert:
    def test_zero_multiplier_rejected(self):
        assert not check_strong_infeasibility_cert(ME_CLEAN, (0, 0))

    def test_wrong_inner_product_rejected(self):
        # b^T y = -2 here, so the certificate must be refused even though the
        # matrix combination is psd
        inst = SdpInstance(1, (SymMatrix.diag([1]),), (-2,))
        assert not check_strong_infeasibility_cert(inst, (1,))

    def test_fixed_level_sos_variant_is_strongly_infeasible(self):
        # adding the constant-monomial row at level 1 makes the system strongly
        # infeasible; a monomial-evaluation search finds an exact multiplier
        inst, _ = motzkin_sos()
        groups = motzkin_monomial_groups()[1]

        def monomial_of(mat):
            for mono, pairs in groups.items():
                builder = SymBuilder(8)
                for (i, j) in pairs:
                    builder.add(i, j, 1)
                if builder.freeze() == mat:
                    return mono
            raise AssertionError("constraint is not a monomial-matching row")

        fixed = SdpInstance(
            8,
            inst.A + (SymMatrix.unit(8, 8, 8),),
            inst.b + (Fraction(0),),  # constant row at level 1: E_88 . X = 1 - 1
        )
        monomials = [monomial_of(mat) for mat in inst.A] + [(0, 0)]
        y = search_strong_infeasibility_multiplier((fixed, monomials), rational_grid(2))
        assert y is not None
        assert check_strong_infeasibility_cert(fixed, y)

    def test_weakly_infeasible_system_has_no_eval_certificate(self):
        raw, cert = me_instance()
        assert not check_strong_infeasibility_cert(cert.clean, (1, 0))
        assert not check_strong_infeasibility_cert(cert.clean, (0, 1))
