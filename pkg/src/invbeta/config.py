from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Every numeric tolerance, step size and truncation cap in one place."""

    quantile_abs_tol: float = 1e-13
    max_newton_iters: int = 100
    fd_rel_step: float = 1e-4
    series_tail_tol: float = 1e-12
    series_max_terms: int = 200_000
    quad_abs_tol: float = 1e-10

    def __post_init__(self):
        for name in ("quantile_abs_tol", "fd_rel_step", "series_tail_tol", "quad_abs_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_newton_iters < 10:
            raise ValueError("max_newton_iters must be at least 10")
        if self.series_max_terms < 10:
            raise ValueError("series_max_terms must be at least 10")

    def replace(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return asdict(self)


DEFAULT_TOL = ToleranceConfig()
