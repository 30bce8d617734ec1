import pytest

from fib3pow2.reduction import ProofConfig, run_full_proof, stage1_reduce


@pytest.fixture(scope="session")
def stage1():
    return stage1_reduce()


@pytest.fixture(scope="session")
def certificate():
    """Full run with the count the exact search produces."""
    return run_full_proof(ProofConfig(expect_count=225))


@pytest.fixture(scope="session")
def default_certificate():
    return run_full_proof(ProofConfig())
