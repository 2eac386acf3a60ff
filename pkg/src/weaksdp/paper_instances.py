"""Built-in reference instances and the library builder.

Each constructor returns exact data together with enough certificate material
to re-verify it from scratch. `library_build` produces a clean/messy paired
collection across four size categories, exporting every instance in the
native, SDPA and CBF formats plus block renderings, with a manifest recording
seeds, configurations and verification status.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exact import Matrix, SymMatrix, SymBuilder, congruence, rational
from .echelon import SdpInstance, Structure, cell_region, infer_structure
from .certify import WeakCertificate, verify_weak_infeasibility
from .generator import GenConfig, WeakInstance, generate
from .formats import NativeBundle, render_blocks, write_cbf, write_native, write_sdpa
from .linalg import solve_linear
from .prng import SplitMix64, derive_seed

_ZERO = Fraction(0)


def me_instance() -> tuple[SdpInstance, WeakCertificate]:
    """Minimal 2x2 weakly infeasible system: x11 = 0, x12 = 1, X psd.

    The certificate rescales the second row by -1/2 (no congruence needed) and
    pairs it with the sequence X_1 = diag(0, 1), X_2 = the swap matrix; k = l = 1.
    """
    a1 = SymMatrix.from_rows([[1, 0], [0, 0]])
    a2 = SymMatrix.from_rows([[0, 1], [1, 0]])
    raw = SdpInstance(2, (a1, a2), (0, 2))
    g = Matrix.from_rows([[1, 0], [0, Fraction(-1, 2)]])
    t = Matrix.identity(2)
    clean = SdpInstance(2, (a1, a2.scale(Fraction(-1, 2))), (0, -1))
    x1 = SymMatrix.from_rows([[0, 0], [0, 1]])
    x2 = SymMatrix.from_rows([[0, 1], [1, 0]])
    cert = WeakCertificate(
        raw=raw,
        row_ops=g,
        transform=t,
        clean=clean,
        k=1,
        xseq=(x1, x2),
        p_structure=Structure(2, (frozenset({1}), frozenset())),
        q_structure=Structure(2, (frozenset({2}), frozenset())),
    )
    return raw, cert


def large_instance() -> tuple[SdpInstance, Matrix, Matrix]:
    """A 4x4, four-constraint system that hides its structure, with the row-op
    matrix G and congruence T that expose it: applying (G, T) yields right-hand
    side (0, 0, -1, -12) and a three-constraint echelon prefix."""
    a1 = SymMatrix.from_rows([
        [8, -1, -9, -2],
        [-1, -26, 3, 39],
        [-9, 3, 10, 3],
        [-2, 39, 3, -16],
    ])
    a2 = SymMatrix.from_rows([
        [5, -3, -6, -2],
        [-3, -6, 5, 21],
        [-6, 5, 7, 2],
        [-2, 21, 2, -11],
    ])
    a3 = SymMatrix.from_rows([
        [-6, -3, 7, 4],
        [-3, 34, 1, -43],
        [7, 1, -8, -5],
        [4, -43, -5, 18],
    ])
    a4 = SymMatrix.from_rows([
        [5, 4, -9, -6],
        [4, -28, 6, 48],
        [-9, 6, 13, 5],
        [-6, 48, 5, -21],
    ])
    raw = SdpInstance(4, (a1, a2, a3, a4), (-44, -22, 44, -68))
    g = Matrix.from_rows([
        [1, 0, 1, 0],
        [0, 2, 1, 0],
        [1, 1, 3, 1],
        [0, 0, 1, 1],
    ]).scale(Fraction(1, 2))
    t = Matrix.from_rows([
        [-1, 1, 1, 1],
        [0, 1, 0, 0],
        [0, -1, 0, 1],
        [0, 0, -1, 0],
    ])
    return raw, g, t


def reformulated(raw: SdpInstance, g: Matrix, t: Matrix) -> SdpInstance:
    """Apply row operations G and congruence T: row i becomes T^T (sum_j g_ij A_j) T."""
    out = []
    for i in range(1, raw.m + 1):
        combo = SymMatrix.zeros(raw.n)
        for j in range(1, raw.m + 1):
            gij = g.at(i, j)
            if gij != 0:
                combo = combo.add(raw.A[j - 1].scale(gij))
        out.append(congruence(combo, t))
    return SdpInstance(raw.n, tuple(out), g.mul_vec(raw.b))


def _echelon_member_solving(
    inst: SdpInstance,
    structure: Structure,
    index: int,
    target: tuple[Fraction, ...],
    pinned: dict[tuple[int, int], Fraction] | None = None,
) -> SymMatrix:
    """An echelon-form matrix (member `index` of the structure) with prescribed
    image under the instance map, found by exact elimination over the free
    cells. `pinned` fixes chosen cells to given values before solving."""
    n = inst.n
    pinned = pinned or {}
    block = structure.blocks[index - 1]
    cells = []
    for r in range(1, n + 1):
        for s in range(r, n + 1):
            region = cell_region(structure, index, r, s)
            if region == "arbitrary" or (r == s and r in block):
                if (r, s) not in pinned:
                    cells.append((r, s))
            elif (r, s) in pinned:
                raise ValueError(f"cell ({r},{s}) must be zero in member {index}")
    adjusted = list(target)
    for row, mat in enumerate(inst.A):
        for (r, s), value in pinned.items():
            adjusted[row] -= mat.at(r, s) * value * (1 if r == s else 2)
    system = Matrix(
        inst.m,
        len(cells),
        tuple(
            mat.at(r, s) * (1 if r == s else 2)
            for mat in inst.A
            for (r, s) in cells
        ),
    )
    solution = solve_linear(system, tuple(adjusted))
    if solution is None:
        raise ValueError("no echelon member matches the requested image")
    diag_positions = [idx for idx, (r, s) in enumerate(cells) if r == s and r in block]

    def assemble(values) -> SymMatrix:
        builder = SymBuilder(n)
        for (r, s), v in pinned.items():
            builder.set(r, s, v)
        for (r, s), v in zip(cells, values):
            builder.set(r, s, v)
        return builder.freeze()

    candidates = [solution.particular]
    for v in solution.nullspace:
        for c in (1, 2, 3, -1, -2, -3):
            candidates.append(tuple(p + c * w for p, w in zip(solution.particular, v)))
    if solution.nullspace:
        bulk = solution.particular
        for v in solution.nullspace:
            bulk = tuple(p + w for p, w in zip(bulk, v))
        candidates.append(bulk)
    for values in candidates:
        if all(values[pos] > 0 for pos in diag_positions):
            return assemble(values)
    raise ValueError("could not make the block diagonal positive")


def large_certificate() -> WeakCertificate:
    """Full certificate for `large_instance`: k = l = 2 with overlapping blocks.

    The pinned cells below are the values the block-filling construction
    assigns when it repairs the base equations for this system; the remaining
    free entries are solved for exactly.
    """
    raw, g, t = large_instance()
    clean = reformulated(raw, g, t)
    p_structure = infer_structure(clean.A[:3])
    if p_structure is None:
        raise AssertionError("reformulated prefix is not in echelon form")
    q_structure = Structure(4, (frozenset({4}), frozenset({2}), frozenset({3})))
    zero = (_ZERO,) * clean.m
    pins: dict[int, dict[tuple[int, int], Fraction]] = {
        2: {(1, 4): Fraction(-1), (2, 4): Fraction(1)},
        3: {(1, 4): Fraction(0), (2, 4): Fraction(-5)},
    }
    xseq = tuple(
        _echelon_member_solving(
            clean, q_structure, j, zero if j < 3 else clean.b, pinned=pins.get(j)
        )
        for j in (1, 2, 3)
    )
    return WeakCertificate(
        raw=raw,
        row_ops=g,
        transform=t,
        clean=clean,
        k=2,
        xseq=xseq,
        p_structure=p_structure,
        q_structure=q_structure,
    )


def three_by_three(alpha) -> WeakInstance:
    """The 3x3 family with overlapping blocks that purely disjoint schemes miss.

    A_2 carries alpha at (1, 3) and X_2 carries beta = -1/alpha there, so
    A_2 . X_2 = 2 alpha beta + 1 = -1; the third constraint is orthogonal to
    X_1 with right-hand side A_3 . X_2 = 0.
    """
    alpha = rational(alpha)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    beta = -1 / alpha
    a1 = SymMatrix.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    a2 = SymMatrix.from_rows([[0, 0, alpha], [0, 1, 0], [alpha, 0, 0]])
    a3 = SymMatrix.from_rows([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    x1 = SymMatrix.from_rows([[0, 0, 0], [0, 0, 0], [0, 0, 1]])
    x2 = SymMatrix.from_rows([[0, 0, beta], [0, 1, 0], [beta, 0, 0]])
    return WeakInstance(
        clean=SdpInstance(3, (a1, a2, a3), (0, -1, 0)),
        xseq=(x1, x2),
        p_structure=Structure(3, (frozenset({1}), frozenset({2}))),
        q_structure=Structure(3, (frozenset({3}), frozenset({2}))),
        k=1,
        l=1,
    )


# --- sum-of-squares system for the Motzkin-type sextic ----------------------

_BASE_MONOMIALS: tuple[tuple[int, int], ...] = (
    (2, 0), (0, 2), (1, 0), (0, 1), (1, 1), (1, 2), (2, 1),
)
_CUBICS: tuple[tuple[int, int], ...] = ((3, 0), (0, 3))
# sextic 1 - 3 x^2 y^2 + x^2 y^4 + x^4 y^2; the constant pairs with the
# objective row and is deliberately absent from the feasibility system
_TARGET_COEFFS = {(2, 2): Fraction(-3), (2, 4): Fraction(1), (4, 2): Fraction(1)}


def motzkin_monomial_groups(include_cubics: bool = False):
    """Monomial vector z and the grouping of z z^T cells by their product.

    Returns (z, groups) where groups maps each nonconstant exponent pair to
    the list of (i, j) positions (i <= j, 1-based) producing it.
    """
    z = list(_BASE_MONOMIALS) + (list(_CUBICS) if include_cubics else []) + [(0, 0)]
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(len(z)):
        for j in range(i, len(z)):
            mono = (z[i][0] + z[j][0], z[i][1] + z[j][1])
            if mono == (0, 0):
                continue
            groups.setdefault(mono, []).append((i + 1, j + 1))
    return z, groups


def motzkin_sos(include_cubics: bool = False) -> tuple[SdpInstance, tuple[SymMatrix, ...]]:
    """SOS coefficient-matching system for the sextic, already in echelon form.

    One constraint per distinct nonconstant monomial of z z^T, matching its
    coefficient in the sextic; the right-hand side of the x^2 y^2 row is -3.
    The returned sequence (X_1, X_2, X_3) satisfies A X_1 = A X_2 = 0 and
    A X_3 = b exactly. The infeasibility prefix is the first five constraints
    (seven with `include_cubics`).
    """
    z, groups = motzkin_monomial_groups(include_cubics)
    dim = len(z)
    const = dim
    named = ([(6, 0), (0, 6)] if include_cubics else []) + [
        (4, 0), (0, 4), (2, 0), (0, 2), (2, 2)
    ]
    rest = sorted((m for m in groups if m not in set(named)), key=lambda m: (m[0] + m[1], m))
    ordering = named + rest
    matrices = []
    b = []
    for mono in ordering:
        builder = SymBuilder(dim)
        for (i, j) in groups[mono]:
            builder.add(i, j, 1)
        matrices.append(builder.freeze())
        b.append(_TARGET_COEFFS.get(mono, _ZERO))
    inst = SdpInstance(dim, tuple(matrices), tuple(b))

    x1 = SymMatrix.unit(dim, const, const)
    x2b = SymBuilder(dim)
    x2b.set(3, 3, 2)
    x2b.set(4, 4, 2)
    x2b.set(1, const, -1)
    x2b.set(2, const, -1)
    x3b = SymBuilder(dim)
    for i in (5, 6, 7):
        x3b.set(i, i, 1)
    x3b.set(4, 7, -1)
    x3b.set(3, 6, -1)
    return inst, (x1, x2b.freeze(), x3b.freeze())


def motzkin_prefix_length(include_cubics: bool = False) -> int:
    """k of the built-in infeasibility prefix (the contradiction row is k+1)."""
    return 6 if include_cubics else 4


def motzkin_certificate(include_cubics: bool = False) -> WeakCertificate:
    """Identity-reformulation certificate: the system is born in echelon form."""
    inst, xseq = motzkin_sos(include_cubics)
    k = motzkin_prefix_length(include_cubics)
    p_structure = infer_structure(inst.A[: k + 1])
    q_structure = infer_structure(xseq)
    if p_structure is None or q_structure is None:
        raise AssertionError("built-in system lost its echelon form")
    return WeakCertificate(
        raw=inst,
        row_ops=Matrix.identity(inst.m),
        transform=Matrix.identity(inst.n),
        clean=inst,
        k=k,
        xseq=xseq,
        p_structure=p_structure,
        q_structure=q_structure,
    )


# --- library ----------------------------------------------------------------


@dataclass(frozen=True)
class LibraryProfile:
    """Sizes and counts for one library build; categories are (label, n, m)."""

    name: str
    categories: tuple[tuple[str, int, int], ...]
    pairs_per_category: int
    base_seed: int
    entry_range: int = 3
    block_size_range: tuple[int, int] = (1, 2)
    mess_magnitude: int = 2


LIBRARY_PROFILES = {
    "default": LibraryProfile(
        name="default",
        categories=(("miniature", 5, 4), ("small", 10, 8), ("medium", 20, 15), ("large", 40, 25)),
        pairs_per_category=10,
        base_seed=0x5EED_2026,
    ),
    "smoke": LibraryProfile(
        name="smoke",
        categories=(("miniature", 5, 4), ("small", 10, 8)),
        pairs_per_category=2,
        base_seed=0x5EED_2026,
    ),
}


def _config_json(cfg: GenConfig) -> dict:
    return json.loads(json.dumps(dataclasses.asdict(cfg)))


def library_build(root, profile="default") -> dict:
    """Generate, verify and export the paired clean/messy instance library.

    Every instance is verified before anything is written; the manifest lists
    per-instance seeds, configurations, file paths and verification status.
    Rebuilding with the same profile reproduces every file byte for byte.
    """
    if isinstance(profile, str):
        profile = LIBRARY_PROFILES[profile]
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for cat_index, (label, n, m) in enumerate(profile.categories, start=1):
        cat_dir = root / label
        cat_dir.mkdir(exist_ok=True)
        image_dir = cat_dir / "images"
        for pair_index in range(1, profile.pairs_per_category + 1):
            rng = SplitMix64(derive_seed(profile.base_seed, cat_index * 1000 + pair_index))
            k = rng.randint(1, min(3, m - 1, n - 1))
            l = rng.randint(1, min(3, n - 1))
            seed = rng.next_u64()
            for kind in ("clean", "messy"):
                cfg = GenConfig(
                    n=n, m=m, k=k, l=l, seed=seed,
                    entry_range=profile.entry_range,
                    block_size_range=profile.block_size_range,
                    mess_magnitude=profile.mess_magnitude,
                    messy=(kind == "messy"),
                )
                instance = generate(cfg)
                cert = WeakCertificate.from_instance(instance)
                report = verify_weak_infeasibility(cert)
                if not report.passed:
                    raise RuntimeError(f"library instance failed verification:\n{report.summary()}")
                name = f"{label}-{kind}-{pair_index:02d}"
                bundle = NativeBundle(
                    instance=instance.raw,
                    certificate=cert,
                    generation={"seed": seed, "config": _config_json(cfg)},
                    label=name,
                )
                native_path = cat_dir / f"{name}.wsdp"
                sdpa_path = cat_dir / f"{name}.dat-s"
                cbf_path = cat_dir / f"{name}.cbf"
                write_native(bundle, native_path)
                write_sdpa(instance.raw, sdpa_path, label=name)
                write_cbf(instance.raw, cbf_path, label=name)
                images = render_blocks(
                    instance.clean.A[: k + 1], instance.p_structure, image_dir, stem=f"{name}_A"
                )
                images += render_blocks(
                    instance.xseq, instance.q_structure, image_dir, stem=f"{name}_X"
                )
                entries.append({
                    "name": name,
                    "category": label,
                    "kind": kind,
                    "n": n,
                    "m": m,
                    "k": k,
                    "l": l,
                    "seed": seed,
                    "config": _config_json(cfg),
                    "files": {
                        "native": str(native_path.relative_to(root)),
                        "sdpa": str(sdpa_path.relative_to(root)),
                        "cbf": str(cbf_path.relative_to(root)),
                        "images": [str(p.relative_to(root)) for p in images],
                    },
                    "verification": "pass",
                })
    manifest = {"profile": profile.name, "count": len(entries), "instances": entries}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="ascii")
    return manifest
