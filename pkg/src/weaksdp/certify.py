"""Full weak-infeasibility certificates: reformulation checking, end-to-end
verification, and a sieve detector for systems already in echelon form.

A certificate bundles a raw instance with the pair (G, T) of exact matrices
encoding elementary row operations and a congruence transform, the resulting
clean system, the prefix length k, and the echelon sequence X_1..X_{l+1}.
Verification re-derives everything from the raw data with exact arithmetic:
no step trusts a stored intermediate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .exact import Matrix, SymMatrix, congruence
from .echelon import (
    SdpInstance,
    Structure,
    check_infeasibility_cert,
    check_not_strong_cert,
    validate_echelon,
)
from .linalg import determinant

_ZERO = Fraction(0)


@dataclass(frozen=True)
class WeakCertificate:
    """Everything a third party needs to confirm weak infeasibility of `raw`.

    `row_ops` (G, m x m) and `transform` (T, n x n) map raw to clean:
    clean_i = T^T (sum_j G[i][j] raw_j) T and clean_b = G raw_b.
    """

    raw: SdpInstance
    row_ops: Matrix
    transform: Matrix
    clean: SdpInstance
    k: int
    xseq: tuple[SymMatrix, ...]
    p_structure: Structure
    q_structure: Structure

    def __post_init__(self):
        object.__setattr__(self, "xseq", tuple(self.xseq))

    @property
    def l(self) -> int:
        return len(self.xseq) - 1

    @classmethod
    def from_instance(cls, instance) -> "WeakCertificate":
        """Certificate for a generated instance.

        For a disguised instance the published system is the messy one and
        (G, T) are the exact inverses of the disguise; for a clean instance
        the reformulation is the identity.
        """
        from .generator import WeakInstance, invert_provenance

        if not isinstance(instance, WeakInstance):
            raise TypeError("expected a WeakInstance")
        if instance.provenance is not None:
            g, t = invert_provenance(instance.provenance)
            raw = instance.provenance.messy
        else:
            g = Matrix.identity(instance.clean.m)
            t = Matrix.identity(instance.clean.n)
            raw = instance.clean
        return cls(
            raw=raw,
            row_ops=g,
            transform=t,
            clean=instance.clean,
            k=instance.k,
            xseq=instance.xseq,
            p_structure=instance.p_structure,
            q_structure=instance.q_structure,
        )


def check_reformulation(raw: SdpInstance, g: Matrix, t: Matrix, clean: SdpInstance) -> bool:
    """Exact check that (G, T) turns `raw` into `clean`.

    Requires det G != 0 and det T != 0, then verifies entrywise that
    clean_i = T^T (sum_j g_ij raw_j) T for every i and clean_b = G raw_b.
    """
    if raw.n != clean.n or raw.m != clean.m:
        raise ValueError("raw and clean instances differ in shape")
    if g.rows != raw.m or g.cols != raw.m or t.rows != raw.n or t.cols != raw.n:
        raise ValueError("reformulation matrices have inconsistent dimensions")
    if determinant(g) == 0 or determinant(t) == 0:
        return False
    if tuple(g.mul_vec(raw.b)) != clean.b:
        return False
    for i in range(1, raw.m + 1):
        combo = SymMatrix.zeros(raw.n)
        for j in range(1, raw.m + 1):
            gij = g.at(i, j)
            if gij != 0:
                combo = combo.add(raw.A[j - 1].scale(gij))
        if congruence(combo, t) != clean.A[i - 1]:
            return False
    return True


@dataclass(frozen=True)
class SubCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    """Itemized result of the full verification; machine-readable for CI gates."""

    checks: tuple[SubCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "checks": [
                    {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
                ],
            },
            indent=2,
        )

    def summary(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  ({c.detail})" if c.detail else "")
                 for c in self.checks]
        lines.append("verification: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _echelon_detail(matrices, structure) -> str:
    report = validate_echelon(matrices, structure)
    if report.ok:
        return ""
    v = report.violation
    return f"matrix {v.matrix_index} entry {v.position}: {v.rule}"


def verify_weak_infeasibility(cert: WeakCertificate) -> VerificationReport:
    """Run every sub-check of the certificate and report them individually.

    Passes iff k >= 1, l >= 1, (G, T) exactly reformulates raw into clean, the
    clean (k+1)-prefix proves infeasibility, and the X sequence proves the
    instance is not strongly infeasible.
    """
    checks: list[SubCheck] = []
    k_ok = cert.k >= 1
    checks.append(SubCheck("prefix length k >= 1", k_ok, f"k = {cert.k}"))
    l_ok = len(cert.xseq) >= 2
    checks.append(SubCheck("sequence length l >= 1", l_ok, f"l = {len(cert.xseq) - 1}"))

    try:
        reform_ok = check_reformulation(cert.raw, cert.row_ops, cert.transform, cert.clean)
        reform_detail = "" if reform_ok else "reformulation identities fail or a matrix is singular"
    except ValueError as exc:
        reform_ok = False
        reform_detail = str(exc)
    checks.append(SubCheck("reformulation (G, T)", reform_ok, reform_detail))

    infeas_ok = False
    infeas_detail = ""
    if k_ok:
        try:
            infeas_ok = check_infeasibility_cert(cert.clean, cert.k, cert.p_structure)
            if not infeas_ok:
                bad = _echelon_detail(cert.clean.A[: cert.k + 1], cert.p_structure)
                infeas_detail = bad or (
                    f"right-hand side prefix {tuple(map(str, cert.clean.b[: cert.k + 1]))} "
                    "is not (0, ..., 0, negative)"
                )
        except ValueError as exc:
            infeas_detail = str(exc)
    else:
        infeas_detail = "skipped: k < 1"
    checks.append(SubCheck("infeasibility prefix", infeas_ok, infeas_detail))

    ns_ok = False
    ns_detail = ""
    if l_ok:
        try:
            ns_ok = check_not_strong_cert(cert.clean, cert.xseq, cert.q_structure)
            if not ns_ok:
                bad = _echelon_detail(cert.xseq, cert.q_structure)
                if bad:
                    ns_detail = bad
                else:
                    for j, x in enumerate(cert.xseq, start=1):
                        image = cert.clean.apply(x)
                        want = cert.clean.b if j == len(cert.xseq) else (_ZERO,) * cert.clean.m
                        for row, (got, expect) in enumerate(zip(image, want), start=1):
                            if got != expect:
                                ns_detail = (
                                    f"A_{row} . X_{j} = {got}, expected {expect}"
                                )
                                break
                        if ns_detail:
                            break
        except ValueError as exc:
            ns_detail = str(exc)
    else:
        ns_detail = "skipped: l < 1"
    checks.append(SubCheck("closeness certificate", ns_ok, ns_detail))
    return VerificationReport(tuple(checks))


@dataclass(frozen=True)
class SieveDetection:
    """Echelon prefix found by greedy facial reduction on an instance as given.

    `permutation` lists constraint indices with the detected prefix first;
    `structure` has k+1 blocks (the final one may be empty) and the permuted
    prefix passes the infeasibility check with it.
    """

    k: int
    structure: Structure
    permutation: tuple[int, ...]


def _restricted_diagonal(mat: SymMatrix, survivors: list[int]) -> tuple[frozenset[int], bool]:
    """Support and diagonal-nonnegativity of a matrix restricted to survivors."""
    support = set()
    for ri, r in enumerate(survivors):
        d = mat.at(r, r)
        if d < 0:
            return frozenset(), False
        if d > 0:
            support.add(r)
        for s in survivors[ri + 1:]:
            if mat.at(r, s) != 0:
                return frozenset(), False
    return frozenset(support), True


def sieve_detect(inst: SdpInstance) -> SieveDetection | None:
    """Greedy facial-reduction sieve over the constraints as given.

    Repeatedly eliminate the support of a constraint with zero right-hand side
    whose restriction to surviving indices is diagonal and nonnegative;
    succeed as soon as some constraint restricted to the survivors is diagonal
    nonnegative with a negative right-hand side (its product with any PSD
    matrix supported on the survivors is nonnegative, a contradiction). The
    final support may be empty. Returns None when the scan stalls, which is
    the expected outcome on disguised instances.
    """
    survivors = list(range(1, inst.n + 1))
    used: list[int] = []
    blocks: list[frozenset[int]] = []
    pending = list(range(1, inst.m + 1))
    while True:
        for i in pending:
            support, diagonal = _restricted_diagonal(inst.A[i - 1], survivors)
            if diagonal and inst.b[i - 1] < 0:
                permutation = tuple(used) + (i,) + tuple(j for j in pending if j != i)
                structure = Structure(inst.n, tuple(blocks) + (support,))
                return SieveDetection(k=len(used), structure=structure, permutation=permutation)
        for i in pending:
            if inst.b[i - 1] != 0:
                continue
            support, diagonal = _restricted_diagonal(inst.A[i - 1], survivors)
            if diagonal and support:
                used.append(i)
                blocks.append(support)
                pending.remove(i)
                survivors = [s for s in survivors if s not in support]
                break
        else:
            return None


def permuted_instance(inst: SdpInstance, permutation: tuple[int, ...]) -> SdpInstance:
    """Reorder constraints by the given 1-based permutation."""
    return SdpInstance(
        inst.n,
        tuple(inst.A[i - 1] for i in permutation),
        tuple(inst.b[i - 1] for i in permutation),
    )
