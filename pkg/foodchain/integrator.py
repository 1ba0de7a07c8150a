"""
Explicit embedded Runge-Kutta pair of orders 5 and 4 (Dormand-Prince) with
proportional-integral step-size control.

The stepper is driven one attempt at a time by the caller, which owns the
time grid (jump times, horizon) and any rescaling of the state between steps.
"""
from __future__ import annotations

import math

import numpy as np

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4
_A_ROWS = tuple(np.array(row) for row in A)


class DormandPrince54:
    """
    Autonomous stepper for y' = rhs(y).

    The last stage is evaluated at the new point, so the derivative there is
    handed back and reused as the first stage of the next step (FSAL).
    """
    order = 5

    def __init__(self, rhs, rtol, atol, safety=0.9, min_factor=0.2, max_factor=5.0, beta=0.04):
        if rtol <= 0 or atol <= 0:
            raise ValueError("tolerances must be positive")
        self.rhs = rhs
        self.rtol = rtol
        self.atol = atol
        self.safety = safety
        self.min_factor = min_factor
        self.max_factor = max_factor
        self.beta = beta
        self.alpha = 1.0 / self.order - 0.75 * beta
        self._err_prev = 1e-4
        self.evaluations = 0

    def attempt(self, y, f, h):
        """One trial step. Returns (y_new, f_new, error norm)."""
        K = np.empty((7, y.size))
        K[0] = f
        for s in range(1, 7):
            ys = y + h * (_A_ROWS[s] @ K[:s])
            K[s] = self.rhs(ys)
        self.evaluations += 6
        y_new = ys
        f_new = K[6]
        err = h * (E @ K)
        scale = self.atol + self.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = math.sqrt(float(np.mean((err / scale) ** 2)))
        return y_new, f_new, err_norm

    def next_step(self, h, err_norm, accepted):
        """PI controller: h * safety * err^-alpha * err_prev^beta, clipped"""
        if err_norm == 0.0:
            factor = self.max_factor
        elif accepted:
            factor = self.safety * err_norm ** -self.alpha * self._err_prev ** self.beta
            factor = min(self.max_factor, max(self.min_factor, factor))
        else:
            factor = max(self.min_factor, self.safety * err_norm ** -self.alpha)
        if accepted:
            self._err_prev = max(err_norm, 1e-4)
        return h * factor

    def initial_step(self, y, f, cap):
        """Hairer's starting-step heuristic, clipped to `cap`"""
        scale = self.atol + self.rtol * np.abs(y)
        d0 = math.sqrt(float(np.mean((y / scale) ** 2)))
        d1 = math.sqrt(float(np.mean((f / scale) ** 2)))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(h0, cap)


def hermite_midpoint(y0, y1, f0, f1, h):
    """Cubic Hermite interpolant at the middle of a step"""
    return 0.5 * (y0 + y1) + 0.125 * h * (f0 - f1)
