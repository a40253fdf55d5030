"""Dependency injection container wiring the ergolab services."""

from typing import Any, Callable, Dict, List, Optional, Tuple, Type, TypeVar
import inspect

from ..config.settings import AppSettings
from .domain.symbolic import WordBudget
from .interfaces.base import ConfigurationError
from .services.decomposition_service import DecompositionService
from .services.entropy_service import EntropyService
from .services.equilibrium_service import EquilibriumService
from .services.ldp_service import LDPService
from .services.potential_service import PotentialService
from .services.pressure_service import PressureService
from .services.suspension_service import SuspensionService
from .services.symbolic_service import SymbolicService

T = TypeVar("T")


class Container:
    """Dependency injection container for one experiment's services.

    Services are resolved lazily; singletons share their caches (word layers,
    presentations, canonical points) for the lifetime of the container.
    """

    def __init__(self) -> None:
        self._services: Dict[Type, Tuple[Type, bool]] = {}
        self._singletons: Dict[Type, Any] = {}
        self._factories: Dict[Type, Tuple[Callable[[], Any], bool]] = {}
        self._resolving: List[Type] = []

    def register(self, interface: Type[T], implementation: Type[T], singleton: bool = False) -> None:
        """Register a service class whose constructor is resolved from annotations."""
        self._services[interface] = (implementation, singleton)

    def register_factory(self, interface: Type[T], factory: Callable[[], T], singleton: bool = False) -> None:
        """Register a factory for services that take numeric settings."""
        self._factories[interface] = (factory, singleton)

    def register_instance(self, interface: Type[T], instance: T) -> None:
        """Register a specific instance (settings, the word budget) as a singleton."""
        self._singletons[interface] = instance

    def get(self, interface: Type[T]) -> T:
        """Get a service instance, building its dependencies first."""
        # Check if we have a singleton instance
        if interface in self._singletons:
            return self._singletons[interface]

        if interface in self._resolving:
            chain = " -> ".join(t.__name__ for t in self._resolving + [interface])
            raise ConfigurationError(f"Circular service dependency: {chain}")

        self._resolving.append(interface)
        try:
            # Check if we have a factory
            if interface in self._factories:
                factory, is_singleton = self._factories[interface]
                instance = factory()
            else:
                # Check if we have a registered service
                if interface not in self._services:
                    raise ValueError(f"Service {interface.__name__} not registered")
                implementation, is_singleton = self._services[interface]
                instance = self._create_instance(implementation)
        finally:
            self._resolving.pop()

        if is_singleton:
            self._singletons[interface] = instance
        return instance

    def _create_instance(self, implementation: Type[T]) -> T:
        """Create an instance, resolving annotated constructor parameters."""
        # Get constructor signature
        sig = inspect.signature(implementation.__init__)

        # Build constructor arguments
        kwargs = {}
        for param_name, param in sig.parameters.items():
            if param_name == "self":
                continue

            # Try to resolve the parameter type
            if param.annotation != inspect.Parameter.empty:
                try:
                    kwargs[param_name] = self.get(param.annotation)
                except ValueError:
                    # Unregistered scalars keep their defaults; anything else is an error
                    if param.default == inspect.Parameter.empty:
                        raise ValueError(
                            f"Cannot resolve dependency {param.annotation} for {implementation.__name__}"
                        )

        return implementation(**kwargs)

    def clear(self) -> None:
        """Clear all registrations and drop the cached singletons."""
        self._services.clear()
        self._singletons.clear()
        self._factories.clear()


def build_container(settings: Optional[AppSettings] = None) -> Container:
    """Wire every service for one experiment; each container owns its own word budget."""
    settings = settings or AppSettings()
    numerics = settings.numerics
    container = Container()
    container.register_instance(AppSettings, settings)
    container.register_instance(WordBudget, WordBudget(settings.budget.word_budget))
    container.register_factory(
        SymbolicService,
        lambda: SymbolicService(container.get(WordBudget), numerics.metric_horizon),
        singleton=True,
    )
    container.register(PotentialService, PotentialService, singleton=True)
    container.register(PressureService, PressureService, singleton=True)
    container.register_factory(
        EquilibriumService,
        lambda: EquilibriumService(
            container.get(PotentialService),
            eigen_residual=numerics.eigen_residual,
            spectral_gap_warning=numerics.spectral_gap_warning,
            variational_tolerance=numerics.variational_tolerance,
            power_tolerance=numerics.power_tolerance,
            power_iterations=numerics.power_iterations,
            gibbs_q_budget=numerics.gibbs_q_budget,
        ),
        singleton=True,
    )
    container.register(DecompositionService, DecompositionService, singleton=True)
    container.register_factory(
        EntropyService,
        lambda: EntropyService(container.get(EquilibriumService), numerics.entropy_tolerance),
        singleton=True,
    )
    container.register_factory(
        SuspensionService,
        lambda: SuspensionService(
            container.get(EquilibriumService),
            grid_divisor=numerics.flow_grid_divisor,
            sample_pairs=numerics.time_ball_pairs,
            seed=numerics.seed,
            bisection_tolerance=numerics.bisection_tolerance,
        ),
        singleton=True,
    )
    container.register_factory(
        LDPService,
        lambda: LDPService(
            container.get(EquilibriumService),
            monte_carlo_samples=numerics.monte_carlo_samples,
            seed=numerics.seed,
        ),
        singleton=True,
    )
    return container
