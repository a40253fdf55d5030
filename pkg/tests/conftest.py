"""Shared fixtures: the standard systems, potentials and a wired container."""

import math

import pytest

from ergolab.config.settings import AppSettings
from ergolab.core.container import build_container
from ergolab.core.domain.symbolic import ShiftSystem
from ergolab.core.services.decomposition_service import DecompositionService
from ergolab.core.services.entropy_service import EntropyService
from ergolab.core.services.equilibrium_service import EquilibriumService
from ergolab.core.services.ldp_service import LDPService
from ergolab.core.services.potential_service import PotentialService
from ergolab.core.services.pressure_service import PressureService
from ergolab.core.services.suspension_service import SuspensionService
from ergolab.core.services.symbolic_service import SymbolicService
from ergolab.infrastructure.potentials import LocallyConstantPotential
from ergolab.infrastructure.rules import BetaShiftRule, FullShiftRule, SFTRule



@pytest.fixture
def container():
    """A container with the default settings."""
    return build_container(AppSettings())


@pytest.fixture
def symbolic(container):
    return container.get(SymbolicService)


@pytest.fixture
def potentials(container):
    return container.get(PotentialService)


@pytest.fixture
def pressure_service(container):
    return container.get(PressureService)


@pytest.fixture
def equilibrium(container):
    return container.get(EquilibriumService)


@pytest.fixture
def decomposition(container):
    return container.get(DecompositionService)


@pytest.fixture
def entropy(container):
    return container.get(EntropyService)


@pytest.fixture
def suspension(container):
    return container.get(SuspensionService)


@pytest.fixture
def ldp(container):
    return container.get(LDPService)


@pytest.fixture
def full2():
    return ShiftSystem(FullShiftRule(2))


@pytest.fixture
def golden():
    """The golden-mean SFT forbidding 11."""
    return ShiftSystem(SFTRule.forbidding(2, [(1, 1)]))


@pytest.fixture
def golden_beta_rule():
    return BetaShiftRule((1, 0), periodic=True)


@pytest.fixture
def golden_beta(golden_beta_rule):
    return ShiftSystem(golden_beta_rule)


@pytest.fixture
def zero():
    return LocallyConstantPotential.constant(0.0, 2)


@pytest.fixture
def weighted():
    """phi(x) = log 2 when x_0 = 1; pressure log 3 on the full 2-shift."""
    return LocallyConstantPotential(1, {(0,): 0.0, (1,): math.log(2)}, name="weighted")
