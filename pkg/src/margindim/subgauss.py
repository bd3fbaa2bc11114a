"""Sub-Gaussian product samplers, twin constructions, and moment verifiers.

A product distribution is described by per-coordinate marginals plus an
optional orthonormal basis rotation; draws are deterministic functions of
(spec, m, seed).  The module also houses the pair of label distributions
with identical covariance diag(1, 1/2, ..., 1/2) but wildly different
learning behavior: a "D" mixture of a full hypercube and a one-coordinate
impulse, and a "P" product of scaled sign variables.

Moment-inequality verifiers prefer closed-form moment generating functions
(evaluated in log space to avoid overflow); Monte Carlo is used only for
the squared-norm MGF bound, with the standard error reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import seed_path, stream

__all__ = [
    "MarginalSpec",
    "LabelRule",
    "ProductDistributionSpec",
    "TwinDistributionSpec",
    "MixtureGaussianSpec",
    "PlantedMarginSpec",
    "iid_product",
    "parse_distribution_spec",
    "verify_relative_moment",
    "find_min_relative_moment",
    "verify_squared_norm_mgf",
    "SquaredNormMgfReport",
    "twin_direction_log_mgf",
    "twin_direction_second_moment",
    "twin_subgaussian_direction_check",
]

MARGINAL_KINDS = ("gaussian", "rademacher", "uniform_interval", "fixed")

# Relative moments used to build moment matrices: gaussian and rademacher
# variables satisfy E[exp(tX)] <= exp(t^2 E[X^2]/2) exactly; uniform-on-
# interval variables are covered by rho = 3/2.  "fixed" marginals are not
# sub-Gaussian at all (nonzero constants fail the inequality at small t);
# the nominal 1.0 is only used to form trace bounds for degenerate demos.
_DEFAULT_RHO = {"gaussian": 1.0, "rademacher": 1.0,
                "uniform_interval": 1.5, "fixed": 1.0}

_BASIS_ORTHO_TOL = 1e-10


def _log_cosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _log_sinh_over_x(x):
    """log(sinh(x)/x), even in x, stable for both tiny and large |x|."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x < 1e-4
    xs = x[small]
    out[small] = np.log1p(xs * xs / 6.0 + xs ** 4 / 120.0)
    xl = x[~small]
    out[~small] = xl + np.log1p(-np.exp(-2.0 * xl)) - math.log(2.0) - np.log(xl)
    return out


@dataclass(frozen=True)
class MarginalSpec:
    """One coordinate law: gaussian(sigma), rademacher(b),
    uniform_interval(b) on [-b, b], or fixed(c)."""

    kind: str
    scale: float

    def __post_init__(self):
        if self.kind not in MARGINAL_KINDS:
            raise ValueError(f"unknown marginal kind {self.kind!r}")
        if self.kind != "fixed" and not self.scale > 0:
            raise ValueError(f"{self.kind} scale must be positive")

    @property
    def second_moment(self) -> float:
        s = self.scale
        if self.kind == "uniform_interval":
            return s * s / 3.0
        return s * s  # gaussian variance, rademacher b^2, fixed c^2

    @property
    def relative_moment(self) -> float:
        return _DEFAULT_RHO[self.kind]

    def log_mgf(self, t):
        """Closed-form log E[exp(tX)]."""
        t = np.asarray(t, dtype=float)
        s = self.scale
        if self.kind == "gaussian":
            return 0.5 * (t * s) ** 2
        if self.kind == "rademacher":
            return _log_cosh(t * s)
        if self.kind == "uniform_interval":
            return _log_sinh_over_x(t * s)
        return t * s  # fixed

    def sample(self, rng, size):
        s = self.scale
        if self.kind == "gaussian":
            return rng.standard_normal(size) * s
        if self.kind == "rademacher":
            return (2.0 * rng.integers(0, 2, size=size) - 1.0) * s
        if self.kind == "uniform_interval":
            return rng.uniform(-s, s, size=size)
        return np.full(size, float(s))

    def to_config(self) -> dict:
        key = {"gaussian": "sigma", "rademacher": "b",
               "uniform_interval": "b", "fixed": "c"}[self.kind]
        return {"kind": self.kind, key: self.scale}


def _constant_label():
    return LabelRule(kind="constant", value=1)


@dataclass(frozen=True, eq=False)
class LabelRule:
    """Either a constant label or y = sign(<w_star, x>) with unit w_star."""

    kind: str = "constant"
    value: int = 1
    w_star: np.ndarray | None = None

    def __eq__(self, other):
        if not isinstance(other, LabelRule):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "constant":
            return self.value == other.value
        return np.array_equal(self.w_star, other.w_star)

    def __post_init__(self):
        if self.kind not in ("constant", "linear"):
            raise ValueError(f"unknown label rule {self.kind!r}")
        if self.kind == "constant":
            if self.value not in (-1, 1):
                raise ValueError("constant label must be +-1")
        else:
            w = np.asarray(self.w_star, dtype=float)
            if abs(np.linalg.norm(w) - 1.0) > 1e-8:
                raise ValueError("w_star must be a unit vector")
            w.flags.writeable = False
            object.__setattr__(self, "w_star", w)

    def apply(self, X) -> np.ndarray:
        if self.kind == "constant":
            return np.full(X.shape[0], float(self.value))
        return np.where(X @ self.w_star >= 0, 1.0, -1.0)

    def to_config(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value}
        return {"kind": "linear", "w_star": [float(v) for v in self.w_star]}


@dataclass(frozen=True, eq=False)
class ProductDistributionSpec:
    """Independent marginals in an orthonormal basis, with a label rule."""

    marginals: tuple
    basis: np.ndarray | None = None
    label: LabelRule = field(default_factory=_constant_label)

    def __eq__(self, other):
        if not isinstance(other, ProductDistributionSpec):
            return NotImplemented
        same_basis = ((self.basis is None and other.basis is None)
                      or (self.basis is not None and other.basis is not None
                          and np.array_equal(self.basis, other.basis)))
        return (self.marginals == other.marginals and same_basis
                and self.label == other.label)

    def __post_init__(self):
        marginals = tuple(self.marginals)
        if not marginals:
            raise ValueError("need at least one marginal")
        if not all(isinstance(mg, MarginalSpec) for mg in marginals):
            raise ValueError("marginals must be MarginalSpec instances")
        object.__setattr__(self, "marginals", marginals)
        if self.basis is not None:
            A = np.asarray(self.basis, dtype=float)
            d = len(marginals)
            if A.shape != (d, d):
                raise ValueError(f"basis must be {d}x{d}")
            if np.linalg.norm(A.T @ A - np.eye(d)) > _BASIS_ORTHO_TOL:
                raise ValueError("basis is not orthogonal")
            A.flags.writeable = False
            object.__setattr__(self, "basis", A)

    @property
    def d(self) -> int:
        return len(self.marginals)

    @property
    def second_moments(self) -> np.ndarray:
        """Per-coordinate E[Z_i^2] in the independent basis."""
        return np.array([mg.second_moment for mg in self.marginals])

    @property
    def rho(self) -> float:
        return max(mg.relative_moment for mg in self.marginals)

    def analytic_spectrum(self) -> np.ndarray:
        # basis rotation leaves eigenvalues of E[XX^T] unchanged
        return np.sort(self.second_moments)[::-1]

    def moment_matrix_trace(self) -> float:
        return self.rho ** 2 * float(self.second_moments.sum())

    def moment_matrix_lambda_max(self) -> float:
        return self.rho ** 2 * float(self.second_moments.max())

    def _draw_coords(self, rng, m):
        first = self.marginals[0]
        if all(mg == first for mg in self.marginals):
            return first.sample(rng, (m, self.d))
        Z = np.empty((m, self.d))
        for j, mg in enumerate(self.marginals):
            Z[:, j] = mg.sample(rng, m)
        return Z

    def sample(self, m, seed):
        """Draw m labeled points; bit-identical for equal (spec, m, seed)."""
        rng = stream(*seed_path(seed))
        Z = self._draw_coords(rng, int(m))
        X = Z if self.basis is None else Z @ self.basis.T
        return X, self.label.apply(X)

    def loss_star(self, gamma) -> float | None:
        return None

    def optimal_direction(self) -> np.ndarray | None:
        if self.label.kind == "linear":
            return self.label.w_star
        return None

    def to_config(self) -> dict:
        cfg = {}
        first = self.marginals[0]
        if all(mg == first for mg in self.marginals):
            iid = dict(first.to_config())
            iid["d"] = self.d
            cfg["iid"] = iid
        else:
            cfg["marginals"] = [mg.to_config() for mg in self.marginals]
        if self.basis is not None:
            cfg["basis"] = [[float(v) for v in row] for row in self.basis]
        cfg["label"] = self.label.to_config()
        return cfg


@dataclass(frozen=True)
class TwinDistributionSpec:
    """The covariance twins: selector "D" (hypercube/impulse mixture) or
    "P" (product of signs scaled (1, 1/sqrt(2), ...)); labels y = x_1."""

    selector: str
    d: int

    def __post_init__(self):
        if self.selector not in ("D", "P"):
            raise ValueError("selector must be 'D' or 'P'")
        if self.d <= 1:
            raise ValueError("d must exceed 1")

    def sample(self, m, seed):
        rng = stream(*seed_path(seed))
        m = int(m)
        signs = 2.0 * rng.integers(0, 2, size=(m, self.d)) - 1.0
        if self.selector == "D":
            # balanced mixture: impulse rows keep only the first coordinate
            impulse = rng.integers(0, 2, size=m) == 0
            X = signs
            X[impulse, 1:] = 0.0
        else:
            X = signs
            X[:, 1:] /= math.sqrt(2.0)
        return X, X[:, 0].copy()

    def analytic_spectrum(self) -> np.ndarray:
        lam = np.full(self.d, 0.5)
        lam[0] = 1.0
        return lam

    def loss_star(self, gamma) -> float | None:
        # e1 attains margin exactly 1 on every point of either twin
        return 0.0 if gamma <= 1.0 else None

    def optimal_direction(self) -> np.ndarray:
        e1 = np.zeros(self.d)
        e1[0] = 1.0
        return e1

    def to_config(self) -> dict:
        return {"twin": self.selector, "d": self.d}


@dataclass(frozen=True)
class MixtureGaussianSpec:
    """Two spherical Gaussian classes at +-v e1: P[X | Y=y] = N(y v e1, I_d)."""

    d: int
    v: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not self.v > 0:
            raise ValueError("v must be positive")

    def sample(self, m, seed):
        rng = stream(*seed_path(seed))
        m = int(m)
        y = 2.0 * rng.integers(0, 2, size=m) - 1.0
        X = rng.standard_normal((m, self.d))
        X[:, 0] += self.v * y
        return X, y

    def analytic_spectrum(self) -> np.ndarray:
        lam = np.ones(self.d)
        lam[0] = 1.0 + self.v * self.v
        return lam

    def loss_star(self, gamma) -> float | None:
        return None  # estimated by Monte Carlo along optimal_direction

    def optimal_direction(self) -> np.ndarray:
        e1 = np.zeros(self.d)
        e1[0] = 1.0
        return e1

    def to_config(self) -> dict:
        return {"mixture": {"d": self.d, "v": self.v}}


@dataclass(frozen=True)
class PlantedMarginSpec:
    """Standard Gaussian shifted by gamma along w_star in the label direction,
    so every point clears margin gamma strictly and loss*_gamma = 0."""

    d: int
    margin: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not self.margin > 0:
            raise ValueError("margin must be positive")

    def sample(self, m, seed):
        rng = stream(*seed_path(seed))
        m = int(m)
        Z = rng.standard_normal((m, self.d))
        y = np.where(Z[:, 0] >= 0, 1.0, -1.0)
        Z[:, 0] += self.margin * y
        return Z, y

    def analytic_spectrum(self) -> np.ndarray:
        lam = np.ones(self.d)
        g = self.margin
        lam[0] = 1.0 + g * g + 2.0 * g * math.sqrt(2.0 / math.pi)
        return lam

    def loss_star(self, gamma) -> float | None:
        return 0.0 if gamma <= self.margin else None

    def optimal_direction(self) -> np.ndarray:
        e1 = np.zeros(self.d)
        e1[0] = 1.0
        return e1

    def to_config(self) -> dict:
        return {"planted": {"d": self.d, "gamma": self.margin}}


def iid_product(kind, scale, d, label=None, basis=None) -> ProductDistributionSpec:
    """d independent copies of one marginal."""
    marginals = tuple(MarginalSpec(kind, scale) for _ in range(int(d)))
    return ProductDistributionSpec(marginals=marginals, basis=basis,
                                   label=label or _constant_label())


_MARGINAL_PARAM_KEYS = ("sigma", "b", "c", "scale")


def _parse_marginal(obj) -> MarginalSpec:
    kind = obj.get("kind")
    for key in _MARGINAL_PARAM_KEYS:
        if key in obj:
            return MarginalSpec(kind=kind, scale=float(obj[key]))
    raise ValueError(f"marginal {obj!r} is missing its scale parameter")


def _parse_label(obj) -> LabelRule:
    if obj is None:
        return _constant_label()
    if obj.get("kind") == "linear":
        return LabelRule(kind="linear", w_star=np.asarray(obj["w_star"], float))
    return LabelRule(kind="constant", value=int(obj.get("value", 1)))


def parse_distribution_spec(obj: dict):
    """Build a sampler spec from its JSON form.

    Accepted shapes: {"marginals": [...], "basis": ..., "label": ...},
    {"iid": {"kind": ..., <scale>, "d": ...}, "label": ...},
    {"twin": "D"|"P", "d": ...}, {"mixture": {"d": ..., "v": ...}},
    and {"planted": {"d": ..., "gamma": ...}}.
    """
    if "twin" in obj:
        return TwinDistributionSpec(selector=obj["twin"], d=int(obj["d"]))
    if "mixture" in obj:
        mix = obj["mixture"]
        return MixtureGaussianSpec(d=int(mix["d"]), v=float(mix["v"]))
    if "planted" in obj:
        pl = obj["planted"]
        return PlantedMarginSpec(d=int(pl["d"]), margin=float(pl["gamma"]))
    label = _parse_label(obj.get("label"))
    basis = obj.get("basis")
    if basis in (None, "identity"):
        basis = None
    elif isinstance(basis, str):
        from .reportio import load_matrix
        basis = load_matrix(basis)
    else:
        basis = np.asarray(basis, dtype=float)
    if "iid" in obj:
        iid = dict(obj["iid"])
        d = int(iid.pop("d"))
        return iid_product(iid["kind"],
                           _parse_marginal(iid).scale, d,
                           label=label, basis=basis)
    if "marginals" in obj:
        marginals = tuple(_parse_marginal(mg) for mg in obj["marginals"])
        return ProductDistributionSpec(marginals=marginals, basis=basis,
                                       label=label)
    raise ValueError(f"unrecognized distribution spec: {sorted(obj)}")


# --- moment verifiers -------------------------------------------------------

def verify_relative_moment(marginal: MarginalSpec, rho: float, t_grid) -> bool:
    """Check E[exp(tX)] <= exp(t^2 rho^2 E[X^2] / 2) on every grid point.

    Both sides are closed forms compared in log space; no Monte Carlo.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        raise ValueError("t_grid must be non-empty")
    lhs = marginal.log_mgf(t)
    rhs = 0.5 * (rho * rho) * marginal.second_moment * t * t
    slack = 1e-12 * np.maximum(1.0, np.abs(rhs))
    return bool(np.all(lhs <= rhs + slack))


def find_min_relative_moment(marginal: MarginalSpec, t_grid,
                             lo: float = 1e-3, hi: float = 8.0,
                             iters: int = 60) -> float:
    """Smallest rho (to bisection precision) passing the grid check."""
    if not verify_relative_moment(marginal, hi, t_grid):
        raise ValueError(f"no relative moment below {hi} passes the grid")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if verify_relative_moment(marginal, mid, t_grid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SquaredNormMgfReport:
    t: float
    t_max: float
    trials: int
    empirical_mgf: float
    stderr: float
    bound: float
    passed: bool


def verify_squared_norm_mgf(spec: ProductDistributionSpec, t: float,
                            trials: int, seed) -> SquaredNormMgfReport:
    """Monte Carlo check of E[exp(t |X|^2)] <= exp(2 t trace(B)).

    B is the moment matrix rho^2 diag(second moments) rotated by the basis;
    admissible t is (0, 1/(4 lambda_max(B))].  Passes when the estimate
    minus three standard errors stays below the bound.
    """
    trials = int(trials)
    if trials < 10_000:
        raise ValueError("need at least 10^4 trials for a stable estimate")
    t_max = 1.0 / (4.0 * spec.moment_matrix_lambda_max())
    if not 0 < t <= t_max:
        raise ValueError(f"t must lie in (0, {t_max:.6g}] for this spec, got {t}")
    total = 0.0
    total_sq = 0.0
    done = 0
    batch_size = 4096
    path = seed_path(seed)
    for batch_idx, start in enumerate(range(0, trials, batch_size)):
        n = min(batch_size, trials - start)
        X, _ = spec.sample(n, path + (batch_idx,))
        vals = np.exp(t * np.einsum("ij,ij->i", X, X))
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += n
    mean = total / done
    var = max(0.0, total_sq / done - mean * mean)
    stderr = math.sqrt(var / done)
    bound = math.exp(2.0 * t * spec.moment_matrix_trace())
    return SquaredNormMgfReport(
        t=float(t), t_max=t_max, trials=done, empirical_mgf=mean,
        stderr=stderr, bound=bound, passed=bool(mean - 3.0 * stderr <= bound))


# --- twin direction checks --------------------------------------------------

def twin_direction_log_mgf(selector: str, d: int, u, t):
    """Closed-form log E[exp(t <u, X>)] for either twin."""
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    tu = np.outer(np.atleast_1d(t), u)
    if selector == "D":
        log_a = _log_cosh(tu).sum(axis=1)
        log_b = _log_cosh(np.atleast_1d(t) * u[0])
        out = np.logaddexp(log_a, log_b) - math.log(2.0)
    elif selector == "P":
        tu[:, 1:] /= math.sqrt(2.0)
        out = _log_cosh(tu).sum(axis=1)
    else:
        raise ValueError("selector must be 'D' or 'P'")
    return out if t.ndim else float(out[0])


def twin_direction_second_moment(selector: str, d: int, u) -> float:
    u = np.asarray(u, dtype=float)
    if selector == "D":
        return 0.5 * float(u @ u + u[0] * u[0])
    if selector == "P":
        return float(u[0] ** 2 + 0.5 * (u[1:] @ u[1:]))
    raise ValueError("selector must be 'D' or 'P'")


def twin_subgaussian_direction_check(selector: str, d: int, u, t_grid) -> bool:
    """Verify the direction <u, X> is sub-Gaussian with relative moment
    sqrt(2): log MGF <= t^2 E[<u,X>^2] at every grid point."""
    u = np.asarray(u, dtype=float)
    if u.size != d:
        raise ValueError(f"u must have length {d}")
    if abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise ValueError("u must be a unit vector")
    t = np.asarray(t_grid, dtype=float)
    lhs = twin_direction_log_mgf(selector, d, u, t)
    rhs = t * t * twin_direction_second_moment(selector, d, u)
    slack = 1e-12 * np.maximum(1.0, np.abs(rhs))
    return bool(np.all(lhs <= rhs + slack))
