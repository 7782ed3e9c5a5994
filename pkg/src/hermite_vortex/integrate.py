"""Fixed-step classical Runge-Kutta integration."""

from __future__ import annotations

import numpy as np

__all__ = ["rk4_step", "step_count", "NumericalAbort"]


class NumericalAbort(RuntimeError):
    """Raised when the state stops being finite; carries the last good state."""

    def __init__(self, message, t, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


def rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(T, dt):
    """Number of uniform steps covering ``[0, T]`` with step close to ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")
    if T == 0:
        return 0
    return max(1, int(np.rint(T / dt)))
