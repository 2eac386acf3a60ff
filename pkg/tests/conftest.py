from __future__ import annotations

import pytest

from weaksdp import (
    GenConfig,
    SplitMix64,
    WeakCertificate,
    generate,
    library_build,
    verify_weak_infeasibility,
)

SWEEP_SEED = 0xACCE97


def build_sweep_configs() -> list[GenConfig]:
    """200 deterministic configurations spanning n in [2, 40], k, l in [1, 5],
    m in [k+1, k+6], clean and messy, both overlap policies."""
    rng = SplitMix64(SWEEP_SEED)
    configs: list[GenConfig] = []

    def policy(n: int, k: int, l: int) -> str:
        if k + l <= n and rng.randint(0, 1) == 0:
            return "disjoint-only"
        return "overlapping-allowed"

    for i in range(60):  # tiny instances feed the brute-force oracle
        n = rng.randint(2, 3)
        k = l = 1
        m = k + 1 + rng.randint(0, 5)
        configs.append(GenConfig(
            n=n, m=m, k=k, l=l, seed=rng.next_u64(), entry_range=3,
            structure_overlap_policy=policy(n, k, l), messy=(i % 2 == 0),
        ))
    for i in range(110):
        n = rng.randint(4, 16)
        k = rng.randint(1, min(5, n - 1))
        l = rng.randint(1, min(5, n - 1))
        m = k + 1 + rng.randint(0, 5)
        configs.append(GenConfig(
            n=n, m=m, k=k, l=l, seed=rng.next_u64(), entry_range=3,
            structure_overlap_policy=policy(n, k, l), messy=(i % 2 == 0),
        ))
    for i in range(30):
        n = rng.randint(17, 40)
        k = rng.randint(1, 5)
        l = rng.randint(1, 5)
        m = k + 1 + rng.randint(0, 5)
        configs.append(GenConfig(
            n=n, m=m, k=k, l=l, seed=rng.next_u64(), entry_range=3,
            structure_overlap_policy=policy(n, k, l), messy=(i % 2 == 0),
        ))
    assert len(configs) == 200
    return configs


@pytest.fixture(scope="session")
def sweep():
    """Generated and verified instances for every sweep configuration, plus the
    wall-clock seconds the generation and verification took."""
    import time

    start = time.time()
    out = []
    for cfg in build_sweep_configs():
        instance = generate(cfg)
        cert = WeakCertificate.from_instance(instance)
        report = verify_weak_infeasibility(cert)
        out.append((cfg, instance, cert, report))
    return out, time.time() - start


@pytest.fixture(scope="session")
def default_library(tmp_path_factory):
    import time

    root = tmp_path_factory.mktemp("library")
    start = time.time()
    manifest = library_build(root, "default")
    return root, manifest, time.time() - start
