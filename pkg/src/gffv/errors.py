"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid grid, model, quadrature or run configuration."""


class NumericsError(RuntimeError):
    """A numerical contract was violated at run time (CFL breach,
    non-finite values, incompatible reference grids, ...)."""
