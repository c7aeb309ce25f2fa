"""Name-addressable catalog of plants."""

import importlib
from collections.abc import Callable

from regtrig.systems.base import LtiSpec, PlantCatalogEntry


class SystemCatalog:
    """
    Lookup service mapping scenario names to catalog entries.

    Built-in systems are imported lazily from their modules; further systems can
    be registered with a factory.
    """

    _SYSTEM_INFO: dict[str, dict[str, str]] = {
        "planar_s5": {
            "module": "regtrig.systems.planar",
            "factory": "example_planar",
            "description": "planar plant, two parameters, backstepping control",
        },
        "disturbed_s6": {
            "module": "regtrig.systems.disturbed",
            "factory": "example_disturbed",
            "description": "scalar-parameter plant with sinusoidal disturbances",
        },
        "lti_custom": {
            "module": "regtrig.systems.lti",
            "factory": "example_lti",
            "description": "linear plant with parameter-affine dynamics and norm trigger",
        },
    }

    def __init__(self) -> None:
        self._cache: dict[str, PlantCatalogEntry] = {}
        self._custom: dict[str, tuple[Callable[..., PlantCatalogEntry], str]] = {}

    def _factory(self, name: str) -> Callable[..., PlantCatalogEntry]:
        if name in self._custom:
            return self._custom[name][0]
        if name not in self._SYSTEM_INFO:
            raise ValueError(
                f"Unknown system '{name}'. Available systems: {self.list_systems()}"
            )
        info = self._SYSTEM_INFO[name]
        module = importlib.import_module(info["module"])
        return getattr(module, info["factory"])

    def get(self, name: str, lti_spec: LtiSpec | None = None) -> PlantCatalogEntry:
        """
        Build or fetch the entry for ``name``.

        Args:
            name: Catalog name.
            lti_spec: Linear plant description, only for "lti_custom".

        Raises:
            ValueError: If the name is unknown or a spec is given for another system.
        """
        if lti_spec is not None:
            if name != "lti_custom":
                raise ValueError(f"an LTI spec only applies to 'lti_custom', not '{name}'")
            return self._factory(name)(lti_spec)
        if name not in self._cache:
            self._cache[name] = self._factory(name)()
        return self._cache[name]

    def register(
        self, name: str, factory: Callable[..., PlantCatalogEntry], description: str = ""
    ) -> None:
        if name in self._SYSTEM_INFO or name in self._custom:
            raise ValueError(f"System '{name}' already exists")
        self._custom[name] = (factory, description)

    def unregister(self, name: str) -> None:
        if name in self._SYSTEM_INFO:
            raise ValueError(f"Cannot unregister built-in system '{name}'")
        if name not in self._custom:
            raise ValueError(f"System '{name}' not found")
        del self._custom[name]
        self._cache.pop(name, None)

    def list_systems(self) -> list[str]:
        return sorted([*self._SYSTEM_INFO, *self._custom])

    def describe(self) -> dict[str, str]:
        out = {name: info["description"] for name, info in self._SYSTEM_INFO.items()}
        out.update({name: desc for name, (_, desc) in self._custom.items()})
        return out


_catalog = SystemCatalog()


def get_system(name: str, lti_spec: LtiSpec | None = None) -> PlantCatalogEntry:
    return _catalog.get(name, lti_spec)


def list_systems() -> list[str]:
    return _catalog.list_systems()


def describe_systems() -> dict[str, str]:
    """Map each catalog name to its one-line description."""
    return _catalog.describe()


def register_system(
    name: str, factory: Callable[..., PlantCatalogEntry], description: str = ""
) -> None:
    _catalog.register(name, factory, description)


def unregister_system(name: str) -> None:
    _catalog.unregister(name)
