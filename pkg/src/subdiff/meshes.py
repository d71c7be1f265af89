"""Temporal and spatial meshes.

Three temporal mesh families are provided:

* a three-piece graded mesh with two hand-placed initial nodes

      t_1 = T N^(-2/a),   t_2 = t_1 + T N^(-3/(2a)),
      t_j = t_2 + T (1 - N^(-2/a) - N^(-3/(2a))) ((j-2)/(N-2))^(1/a),  3 <= j <= N,

  which resolves the initial layer without piling nodes onto t = 0;
* the standard power-graded mesh t_j = T (j/N)^r used by the L1 schemes;
* the uniform mesh (power mesh with r = 1).

The spatial mesh is always uniform, x_i = i h with h = l/M.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, MeshConstructionError

# Reject degenerate gradings where the first node underflows toward zero.
_MIN_FIRST_NODE = 1e-300

THREE_PIECE = "three-piece"
POWER = "power"
UNIFORM = "uniform"


@dataclass(frozen=True)
class TemporalMesh:
    """Nodes t_0 = 0 < t_1 < ... < t_N = T of a temporal mesh."""

    nodes: np.ndarray
    alpha: float
    T: float
    kind: str
    r: float | None = None
    steps: np.ndarray = field(init=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        steps = np.diff(nodes)
        object.__setattr__(self, "steps", steps)
        if nodes[0] != 0.0:
            raise MeshConstructionError(f"t_0 must be 0, got {nodes[0]}")
        if nodes[-1] != self.T:
            raise MeshConstructionError(f"t_N must equal T={self.T}, got {nodes[-1]}")
        if np.any(steps <= 0.0):
            j = int(np.argmin(steps))
            raise MeshConstructionError(
                f"mesh is not strictly increasing at step {j + 1} (dt={steps[j]})"
            )

    @property
    def N(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class SpatialMesh:
    """Uniform spatial nodes x_i = i h on [0, l], h = l/M."""

    nodes: np.ndarray
    M: int
    l: float
    h: float


def build_three_piece_mesh(alpha: float, T: float, N: int) -> TemporalMesh:
    """Three-piece graded temporal mesh on [0, T].

    Requires N >= 4 so all three branches of the node formula are populated.
    The last node is pinned to T exactly, so fractional powers of node
    differences near the endpoint cannot go negative by rounding.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must be in (0, 1), got {alpha}")
    if T <= 0.0:
        raise InvalidArgumentError(f"T must be positive, got {T}")
    if N < 4:
        raise InvalidArgumentError(f"three-piece mesh needs N >= 4, got {N}")

    n = float(N)
    first = n ** (-2.0 / alpha)
    second = n ** (-3.0 / (2.0 * alpha))
    if T * first < _MIN_FIRST_NODE:
        raise InvalidArgumentError(
            f"t_1 = T*N^(-2/alpha) = {T * first:.3e} underflows below "
            f"{_MIN_FIRST_NODE}; refuse to build a degenerate mesh"
        )

    nodes = np.empty(N + 1)
    nodes[0] = 0.0
    nodes[1] = T * first
    nodes[2] = T * first + T * second
    j = np.arange(3, N + 1, dtype=float)
    tail = T * (1.0 - first - second)
    nodes[3:] = nodes[2] + tail * ((j - 2.0) / (N - 2.0)) ** (1.0 / alpha)
    nodes[N] = T
    return TemporalMesh(nodes=nodes, alpha=alpha, T=T, kind=THREE_PIECE)


def build_power_mesh(T: float, N: int, r: float, alpha: float = float("nan")) -> TemporalMesh:
    """Power-graded temporal mesh t_j = T (j/N)^r (uniform when r = 1).

    r < 1 is admitted: the preprocessed-L1 optimum (2-a)/(2a) drops below 1
    for a > 2/3 and the tabulated baseline results use it as is.
    """
    if T <= 0.0:
        raise InvalidArgumentError(f"T must be positive, got {T}")
    if N < 1:
        raise InvalidArgumentError(f"N must be >= 1, got {N}")
    if r <= 0.0:
        raise InvalidArgumentError(f"grading exponent r must be positive, got {r}")

    j = np.arange(N + 1, dtype=float)
    nodes = T * (j / N) ** r
    nodes[N] = T
    kind = UNIFORM if r == 1.0 else POWER
    return TemporalMesh(nodes=nodes, alpha=alpha, T=T, kind=kind, r=r)


def build_spatial_mesh(l: float, M: int) -> SpatialMesh:
    """Uniform spatial mesh with M cells on [0, l]."""
    if l <= 0.0:
        raise InvalidArgumentError(f"domain length must be positive, got {l}")
    if M < 2:
        raise InvalidArgumentError(f"spatial mesh needs M >= 2, got {M}")
    h = l / M
    nodes = np.arange(M + 1, dtype=float) * h
    nodes[M] = l
    return SpatialMesh(nodes=nodes, M=M, l=l, h=h)
