"""Pre-shock inviscid Burgers solutions by the method of characteristics.

For ``u_t + u u_x = 0`` with ``u0(x) = -a sin(x)`` the solution is constant
along ``x = xi + t u0(xi)`` until the first crossing of characteristics at
``T* = -1 / min u0' = 1 / a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CharacteristicSolution",
    "ConvergenceError",
    "burgers_blowup_time",
    "burgers_eval",
    "burgers_grad_norm",
]


class ConvergenceError(RuntimeError):
    pass


def burgers_blowup_time(amplitude: float) -> float:
    """Gradient catastrophe time of ``u0 = -amplitude * sin(x)``."""
    if not amplitude > 0:
        raise ValueError("amplitude must be positive")
    return 1.0 / amplitude


@dataclass(frozen=True)
class CharacteristicSolution:
    amplitude: float = 1.0
    tol: float = 1e-13
    max_iter: int = 100
    margin: float = 1e-3

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")

    def u0(self, xi):
        return -self.amplitude * np.sin(xi)

    def du0(self, xi):
        return -self.amplitude * np.cos(xi)

    @property
    def blowup_time(self) -> float:
        return burgers_blowup_time(self.amplitude) if self.amplitude > 0 else np.inf

    def _check_time(self, t: float) -> None:
        if t < 0:
            raise ValueError("t must be non-negative")
        if t >= self.blowup_time * (1 - self.margin):
            raise ValueError(f"t={t} is too close to or beyond the blow-up time {self.blowup_time}")

    def foot(self, x, t: float) -> np.ndarray:
        """Foot ``xi`` of the characteristic through ``(x, t)``.

        Safeguarded Newton: iterates start at ``xi = x`` and fall back to
        bisection whenever a Newton update leaves the bracket
        ``[x - t a, x + t a]``, which always contains the root.
        """
        self._check_time(t)
        x = np.asarray(x, dtype=float)
        if t == 0 or self.amplitude == 0:
            return x.copy()
        spread = t * abs(self.amplitude)
        lo, hi = x - spread, x + spread
        xi = x.copy()
        for _ in range(self.max_iter):
            f = xi + t * self.u0(xi) - x
            done = np.abs(f) < self.tol
            if np.all(done):
                return xi
            pos = f > 0
            hi = np.where(pos, xi, hi)
            lo = np.where(pos, lo, xi)
            step = xi - f / (1 + t * self.du0(xi))
            inside = (step > lo) & (step < hi)
            xi = np.where(done, xi, np.where(inside, step, 0.5 * (lo + hi)))
        f = xi + t * self.u0(xi) - x
        if np.any(np.abs(f) >= self.tol):
            raise ConvergenceError(f"characteristic solve did not converge at t={t}")
        return xi


def burgers_eval(x, t: float, sol: CharacteristicSolution | None = None) -> np.ndarray:
    """``u(x, t)`` before the shock forms."""
    sol = sol or CharacteristicSolution()
    return sol.u0(sol.foot(x, t))


def _xi_integral(sol: CharacteristicSolution, t: float, nodes: int) -> float:
    # u_x^2 dx = u0'(xi)^2 / (1 + t u0'(xi)) dxi; periodic trapezoid rule in xi.
    xi = -np.pi + 2 * np.pi * np.arange(nodes) / nodes
    d = sol.du0(xi)
    return float(2 * np.pi * np.mean(d * d / (1 + t * d)))


def burgers_grad_norm(t: float, sol: CharacteristicSolution | None = None, nodes: int = 4096, rtol: float = 1e-8) -> float:
    """``||u_x(., t)||_L2`` over one period, by quadrature in characteristic coordinates.

    The node count is doubled from ``nodes`` until two successive values agree
    to ``rtol``.
    """
    sol = sol or CharacteristicSolution()
    if t >= sol.blowup_time:
        raise ValueError(f"t={t} is at or beyond the blow-up time {sol.blowup_time}")
    if t < 0:
        raise ValueError("t must be non-negative")
    if sol.amplitude == 0:
        return 0.0
    prev = _xi_integral(sol, t, nodes)
    for _ in range(20):
        nodes *= 2
        cur = _xi_integral(sol, t, nodes)
        if abs(cur - prev) <= rtol * abs(cur):
            return float(np.sqrt(cur))
        prev = cur
    raise ConvergenceError(f"quadrature did not converge at t={t}")
