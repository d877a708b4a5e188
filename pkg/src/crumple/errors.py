"""Exception hierarchy shared across the package."""


class CrumpleError(Exception):
    """Base class for every error raised by crumple."""


class ObjParseError(CrumpleError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyMeshError(CrumpleError, ValueError):
    pass


class DimensionalityError(CrumpleError, ValueError):
    """Point set is too small or lies in a plane/line."""


class InvalidTargetError(CrumpleError, ValueError):
    pass


class DegenerateSolidError(CrumpleError, ValueError):
    pass


class ConfigurationError(CrumpleError, ValueError):
    pass


class StaleBindingError(CrumpleError, ValueError):
    """Binding table was built for different vertex/control counts."""


class AssemblyError(CrumpleError, ValueError):
    pass


class SimulationDiverged(CrumpleError, RuntimeError):
    def __init__(self, step, node, message=None):
        self.step = step
        self.node = node
        super().__init__(message or f"non-finite position at step {step}, node {node}")


class SnapshotDecodeError(CrumpleError, ValueError):
    pass


class BindingFormatError(CrumpleError, ValueError):
    pass


class ScenarioError(CrumpleError, ValueError):
    pass
