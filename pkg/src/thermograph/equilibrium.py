"""Equilibrium (Parry) measure of a finite connected loaded graph.

The weight matrix of a strongly connected graph is irreducible, so it has
a positive spectral radius with positive left/right eigenvectors.  The
equilibrium measure is the stationary Markov chain they induce:
P(u -> w) = W(u,w) r_w / (lambda r_u) with stationary law pi = l * r.
The Kac diagnostic ties this measure back to the first-return series:
the stationary mass of the base vertex is the reciprocal mean return
time, 1/(z* phi'(z*)) at the unit root z*.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import cycle_series
from .errors import NoConvergence, NotConnected
from .graph_core import LoadedGraph


@dataclass(frozen=True)
class PerronData:
    """Spectral radius with positive eigenvectors of the weight matrix.

    Vectors are aligned with graph.vertices; r is normalized to 1 at the
    smallest vertex and l so that l . r = 1.  Residuals are the relative
    infinity-norm defects of the two eigen-equations.
    """

    lam: float
    r: np.ndarray
    l: np.ndarray
    residual_right: float
    residual_left: float
    iterations: int


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Stationary Markov measure on the path space of a finite graph."""

    graph: LoadedGraph
    lam: float
    pi: np.ndarray
    P: np.ndarray

    def pi_of(self, v: int) -> float:
        """Stationary mass at an ambient vertex label (0 if absent)."""
        if not self.graph.has_vertex(v):
            return 0.0
        return float(self.pi[self.graph.vertex_index(v)])

    def transition(self, u: int, t: int) -> float:
        if not (self.graph.has_vertex(u) and self.graph.has_vertex(t)):
            return 0.0
        return float(self.P[self.graph.vertex_index(u),
                            self.graph.vertex_index(t)])


def perron_data(graph: LoadedGraph, tol: float = 1e-12,
                max_iter: int = 100_000) -> PerronData:
    """Two-sided shifted power iteration on the weight matrix.

    The diagonal shift removes periodicity (a pure 2-cycle alternates
    unshifted); deterministic all-ones start.  Residuals above 1e-10
    refuse rather than return a doubtful measure.
    """
    if not graph.connected:
        raise NotConnected("equilibrium data needs a strongly connected graph")
    A = graph.dense_matrix()
    lam, x, y, res_r, res_l, iters = K.power_iteration(A, tol, max_iter)
    if not (res_r <= 1e-10 and res_l <= 1e-10) or not np.isfinite(lam):
        raise NoConvergence(
            f"power iteration residuals ({res_r:.2e}, {res_l:.2e}) "
            f"after {iters} iterations"
        )
    if lam <= 0.0 or np.any(x <= 0.0) or np.any(y <= 0.0):
        raise NoConvergence("eigen-data not strictly positive")
    r = x / x[0]
    l = y / float(y @ r)
    return PerronData(lam=float(lam), r=r, l=l,
                      residual_right=float(res_r), residual_left=float(res_l),
                      iterations=int(iters))


def parry_measure(graph: LoadedGraph) -> EquilibriumMeasure:
    """Transition kernel and stationary law from the Perron eigendata."""
    pd = perron_data(graph)
    A = graph.dense_matrix()
    P = A * pd.r[None, :] / (pd.lam * pd.r[:, None])
    pi = pd.l * pd.r
    return EquilibriumMeasure(graph=graph, lam=pd.lam, pi=pi, P=P)


def cylinder_measure(measure: EquilibriumMeasure, word) -> float:
    """Probability of the cylinder of paths starting with the given word.

    Words that are not paths of the graph get probability 0; the empty
    word denotes the whole space.
    """
    word = tuple(word)
    if not word:
        return 1.0
    g = measure.graph
    if not g.has_vertex(word[0]):
        return 0.0
    p = measure.pi_of(word[0])
    for u, t in zip(word, word[1:]):
        if not g.has_edge(u, t):
            return 0.0
        p *= measure.transition(u, t)
    return float(p)


def kac_residual(graph: LoadedGraph, v: int) -> float:
    """|pi_v - 1/(z* phi'(z*))|: stationary mass against mean return time."""
    z, series, scale = cycle_series._unit_root_and_series(graph, v)
    dphi = scale * cycle_series.eval_series(series, scale * z, 1)
    measure = parry_measure(graph)
    return abs(measure.pi_of(v) - 1.0 / (z * dphi))


def measure_to_json(measure: EquilibriumMeasure) -> str:
    """{"lambda":..., "pi": {vertex: mass}, "P": [{"from","to","p"}]}."""
    g = measure.graph
    obj = {
        "lambda": measure.lam,
        "pi": {str(v): measure.pi_of(v) for v in g.vertices},
        "P": [
            {"from": e.src, "to": e.dst, "p": measure.transition(e.src, e.dst)}
            for e in g.edges()
        ],
    }
    return json.dumps(obj, indent=2) + "\n"
