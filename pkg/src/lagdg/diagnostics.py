"""Error norms, energy error, and reflection ratio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ErrorReport:
    e1: float
    e2: float
    einf: float
    relative: bool


def error_norms(num, ref, relative: bool = False) -> ErrorReport:
    """Discrete l1/l2/linf norms of num - ref, optionally relative to ref."""
    num = np.asarray(num, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if num.shape != ref.shape:
        raise ValueError(f"sample shapes differ: {num.shape} vs {ref.shape}")
    diff = num - ref
    e1 = float(np.sum(np.abs(diff)))
    e2 = float(np.sqrt(np.sum(diff**2)))
    einf = float(np.max(np.abs(diff))) if diff.size else 0.0
    if relative:
        n1 = float(np.sum(np.abs(ref)))
        n2 = float(np.sqrt(np.sum(ref**2)))
        ninf = float(np.max(np.abs(ref))) if ref.size else 0.0
        if min(n1, n2, ninf) == 0.0:
            raise ValueError("relative error requested but the reference norm is zero")
        e1, e2, einf = e1 / n1, e2 / n2, einf / ninf
    return ErrorReport(e1, e2, einf, relative)


def energy_error(h, h_ref, u, u_ref, grav: float, H: float) -> float:
    """Mean pointwise energy discrepancy (1/N) sum (g dh^2 + H du^2) / 2."""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    h_ref = np.asarray(h_ref, dtype=float)
    u_ref = np.asarray(u_ref, dtype=float)
    if not (h.shape == h_ref.shape == u.shape == u_ref.shape):
        raise ValueError("field sample shapes differ")
    return float(np.mean(0.5 * (grav * (h - h_ref) ** 2 + H * (u - u_ref) ** 2)))


def reflection_ratio(e_en: float, e_en_wall: float) -> float:
    """sqrt of the energy-error ratio against the solid-wall reference."""
    if e_en_wall <= 0:
        raise ValueError("wall-reference energy error must be positive")
    if e_en < 0:
        raise ValueError("energy error cannot be negative")
    return float(np.sqrt(e_en / e_en_wall))
