"""Unit tests for the dependency injection container."""

import pytest

from ergolab.core.container import Container
from ergolab.core.interfaces.base import ConfigurationError
from ergolab.core.services.decomposition_service import DecompositionService
from ergolab.core.services.entropy_service import EntropyService
from ergolab.core.services.equilibrium_service import EquilibriumService


class _Left:
    def __init__(self, right: object) -> None:
        self.right = right


class _Right:
    def __init__(self, left: object) -> None:
        self.left = left


class TestContainer:
    """Test cases for service resolution."""

    def test_singletons_are_shared(self, container):
        # Act
        decomposition = container.get(DecompositionService)

        # Assert
        assert decomposition.entropy is container.get(EntropyService)
        assert decomposition.equilibrium is container.get(EquilibriumService)
        assert container.get(DecompositionService) is decomposition

    def test_unregistered_services_are_rejected(self):
        with pytest.raises(ValueError, match="not registered"):
            Container().get(EntropyService)

    def test_circular_dependencies_are_reported(self):
        # Arrange
        container = Container()
        container.register_factory(_Left, lambda: _Left(container.get(_Right)))
        container.register_factory(_Right, lambda: _Right(container.get(_Left)))

        # Act & Assert
        with pytest.raises(ConfigurationError, match="_Left -> _Right -> _Left"):
            container.get(_Left)
