import numpy as np
import pytest

from skinspec import PerturbedDimerParams, ResonatorChain


@pytest.fixture(scope="session")
def fig1_params() -> PerturbedDimerParams:
    """The running example coefficients used throughout the reports."""
    return PerturbedDimerParams(
        alpha1=1.0, alpha2=2.0, beta1=3.0, beta2=4.0, gamma1=4.0, gamma2=5.0,
        a=9.0, b=10.0,
    )


@pytest.fixture(scope="session")
def dimer_chain_50() -> ResonatorChain:
    """Reference dimer chain: 25 dimers, ell=1, s1=1, s2=2, gamma=1."""
    return ResonatorChain.dimer(50)


def random_admissible(rng: np.random.Generator, with_corners: bool = True) -> PerturbedDimerParams:
    """Random parameters satisfying gamma_i * beta_i > 0 (signs may differ per pair)."""
    alpha1, alpha2 = rng.uniform(-2.0, 2.0, 2)
    s1 = rng.choice([-1.0, 1.0])
    s2 = rng.choice([-1.0, 1.0])
    beta1 = s1 * rng.uniform(0.3, 2.0)
    gamma1 = s1 * rng.uniform(0.3, 2.0)
    beta2 = s2 * rng.uniform(0.3, 2.0)
    gamma2 = s2 * rng.uniform(0.3, 2.0)
    a, b = rng.uniform(-3.0, 3.0, 2) if with_corners else (0.0, 0.0)
    return PerturbedDimerParams(alpha1, alpha2, beta1, beta2, gamma1, gamma2, a, b)


def random_equal_length_chain(rng: np.random.Generator) -> ResonatorChain:
    """Random chain with a common resonator length and per-site gammas."""
    n = int(rng.integers(2, 40))
    ell = rng.uniform(0.3, 2.0)
    spacings = rng.uniform(0.2, 3.0, n - 1)
    if rng.random() < 0.5:
        gammas = rng.uniform(0.2, 2.0, n) * rng.choice([-1.0, 1.0], n)
    else:
        g = rng.uniform(0.2, 2.0) * rng.choice([-1.0, 1.0])
        gammas = np.full(n, g)
    return ResonatorChain(
        np.full(n, ell), spacings, gammas,
        delta=rng.uniform(1e-4, 0.5), v=1.0, v_b=rng.uniform(0.5, 2.0),
    )
