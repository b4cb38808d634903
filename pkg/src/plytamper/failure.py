"""Progressive ply-failure simulation (first-ply failure and beyond).

Repeatedly: solve the laminate under the reference load, get one Tsai-Wu
strength ratio per surviving ply (at the ply mid-thickness), knock out the
plies tied at the minimum, zero their stiffness contribution and go again.
Each knockout records a "rung": the load multiplier at which that group
fails, measured against the *original* load. The resulting ladder is the
laminate's failure fingerprint: widely spaced rungs mean progressive
failure (survivors give warning), tightly packed rungs mean the stack lets
go essentially at once.

Rung multipliers are not guaranteed to increase monotonically — load
redistribution after a knockout can make the next group fail at a lower
multiplier than the one before it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from plytamper.clt import (
    Laminate,
    LaminateSingularError,
    LoadCase,
    RCOND_COLLAPSED,
    StrengthRatioRootError,
    ply_z_planes,
    stiffness_stack,
    tsai_wu_params,
)

#: Relative tolerance for "tied at the minimum strength ratio". Symmetric
#: ply pairs tie exactly in theory; floating point needs a window.
TIE_REL_TOL = 1e-9

#: Default ladder-gap threshold separating catastrophic from progressive.
GAP_RATIO_THRESHOLD = 0.05


class FailureMode(Enum):
    """Shape of a failure ladder."""

    PROGRESSIVE = "progressive"
    CATASTROPHIC = "catastrophic"


@dataclass(frozen=True)
class FailureRung:
    """One step of the ladder: a ply group and the multiplier killing it.

    ``force_multiplier`` scales the reference load; the actual failure
    force is ``force_multiplier * load``. ``flagged`` marks a terminal rung
    forced by a singular post-knockout system rather than computed — its
    plies never got a strength ratio of their own.
    """

    force_multiplier: float
    failed_plies: tuple[int, ...]
    flagged: bool = False


@dataclass(frozen=True)
class FailureLadder:
    """Ordered failure rungs of a laminate under a fixed reference load."""

    rungs: tuple[FailureRung, ...]
    load: LoadCase
    sr_history: tuple[tuple[float, ...], ...]  # one row per iteration

    @property
    def first_multiplier(self) -> float:
        return self.rungs[0].force_multiplier

    @property
    def last_multiplier(self) -> float:
        return self.rungs[-1].force_multiplier

    def force_n(self, rung_index: int) -> tuple[float, float, float]:
        """Force resultants (N/m) at which the given rung fails."""
        mult = self.rungs[rung_index].force_multiplier
        return tuple(mult * v for v in self.load.n)

    def force_m(self, rung_index: int) -> tuple[float, float, float]:
        mult = self.rungs[rung_index].force_multiplier
        return tuple(mult * v for v in self.load.m)


def ties_at_minimum(sr_values, rel_tol: float = TIE_REL_TOL) -> set[int]:
    """Indices whose strength ratio ties the minimum within ``rel_tol``.

    Infinite entries (unloaded or failed plies) are skipped. Raises
    ValueError when every entry is infinite — nothing carries load.
    """
    values = [float(v) for v in sr_values]
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        raise ValueError("no loaded ply: all strength ratios are infinite")
    low = min(finite)
    return {
        i for i, v in enumerate(values)
        if math.isfinite(v) and v - low <= rel_tol * low
    }


def classify_failure_mode(
    ladder: FailureLadder,
    gap_ratio_threshold: float = GAP_RATIO_THRESHOLD,
) -> FailureMode:
    """Label a ladder catastrophic or progressive by its force spread.

    The gap ratio is (last rung - first rung) / first rung, measured on
    multipliers (equivalently on forces — the reference load cancels).
    Below the threshold the whole stack fails almost at once. A single-rung
    ladder is catastrophic by definition.
    """
    first = ladder.first_multiplier
    last = ladder.last_multiplier
    gap_ratio = (last - first) / first
    if gap_ratio < gap_ratio_threshold:
        return FailureMode.CATASTROPHIC
    return FailureMode.PROGRESSIVE


# =============================================================================
# Vectorized per-iteration core
# =============================================================================

def _solve_system(stack: np.ndarray, h: np.ndarray, load_vec: np.ndarray,
                  rcond_threshold: float):
    """Assemble and solve the 6x6 laminate system for one iteration."""
    w1 = h[1:] - h[:-1]
    w2 = h[1:] ** 2 - h[:-1] ** 2
    w3 = h[1:] ** 3 - h[:-1] ** 3
    a = np.einsum("kij,k->ij", stack, w1)
    b = 0.5 * np.einsum("kij,k->ij", stack, w2)
    d = np.einsum("kij,k->ij", stack, w3) / 3.0
    k6 = np.block([[a, b], [b, d]])
    sv = np.linalg.svd(k6, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < rcond_threshold:
        raise LaminateSingularError("laminate system is numerically singular")
    solution = np.linalg.solve(k6, load_vec)
    return solution[:3], solution[3:]


def _stress_transform_stack(angles_deg: np.ndarray) -> np.ndarray:
    """Per-ply stress transformation matrices as an (n, 3, 3) array."""
    theta = np.radians(angles_deg)
    c, s = np.cos(theta), np.sin(theta)
    t = np.empty((len(angles_deg), 3, 3))
    t[:, 0, 0] = c * c
    t[:, 0, 1] = s * s
    t[:, 0, 2] = 2.0 * c * s
    t[:, 1, 0] = s * s
    t[:, 1, 1] = c * c
    t[:, 1, 2] = -2.0 * c * s
    t[:, 2, 0] = -s * c
    t[:, 2, 1] = s * c
    t[:, 2, 2] = c * c - s * s
    return t


def _strength_ratios(local_stress: np.ndarray, tw: np.ndarray) -> np.ndarray:
    """Vectorized positive-root strength ratios; exact-zero rows get +inf.

    ``tw`` is an (n, 6) array of per-ply (h1, h2, h11, h22, h66, h12).
    """
    s1, s2, t12 = local_stress[:, 0], local_stress[:, 1], local_stress[:, 2]
    h1, h2, h11, h22, h66, h12 = (tw[:, i] for i in range(6))
    a = h1 * s1 + h2 * s2
    b = h11 * s1 * s1 + h22 * s2 * s2 + h66 * t12 * t12 + 2.0 * h12 * s1 * s2
    zero = (s1 == 0.0) & (s2 == 0.0) & (t12 == 0.0)
    disc = a * a + 4.0 * b
    bad = ~zero & ((b <= 0.0) | (disc < 0.0))
    if np.any(bad):
        raise StrengthRatioRootError(
            f"no positive strength-ratio root for plies {np.where(bad)[0]}"
        )
    safe_b = np.where(zero, 1.0, b)
    sr = (-a + np.sqrt(np.where(zero, 0.0, disc))) / (2.0 * safe_b)
    return np.where(zero, np.inf, sr)


def _tw_array(lam: Laminate) -> np.ndarray:
    rows = []
    for ply in lam.plies:
        h = tsai_wu_params(ply.material)
        rows.append((h.h1, h.h2, h.h11, h.h22, h.h66, h.h12))
    return np.array(rows)


def _iteration_sr(lam: Laminate, load_vec: np.ndarray, active: np.ndarray,
                  tw: np.ndarray, t_stack: np.ndarray, h: np.ndarray,
                  z_mid: np.ndarray, rcond_threshold: float) -> np.ndarray:
    """Strength ratios of every ply for one knockout iteration.

    Failed plies have a zeroed stiffness, so their recovered stress is
    exactly zero and they come back as +inf — which the tie search skips.
    """
    stack = stiffness_stack(lam, active)
    eps0, kappa = _solve_system(stack, h, load_vec, rcond_threshold)
    global_strain = eps0[None, :] + z_mid[:, None] * kappa[None, :]
    global_stress = np.einsum("kij,kj->ki", stack, global_strain)
    local_stress = np.einsum("kij,kj->ki", t_stack, global_stress)
    return _strength_ratios(local_stress, tw)


def first_ply_failure(lam: Laminate, load: LoadCase,
                      rcond_threshold: float = RCOND_COLLAPSED):
    """Multiplier of the first failure plus the per-ply strength ratios.

    The cheap entry point for search loops that only monitor the first
    rung: one system solve, no knockout iteration.

    Returns
    -------
    (float, ndarray)
        Minimum strength ratio (= first-rung force multiplier against the
        given load) and the full per-ply strength-ratio array.
    """
    if load.is_zero:
        raise ValueError("failure analysis needs a nonzero load")
    h = ply_z_planes(lam)
    sr = _iteration_sr(
        lam,
        load.as_vector(),
        np.ones(lam.n_plies, dtype=bool),
        _tw_array(lam),
        _stress_transform_stack(np.array(lam.angles)),
        h,
        (h[:-1] + h[1:]) / 2.0,
        rcond_threshold,
    )
    finite = sr[np.isfinite(sr)]
    if finite.size == 0:
        raise ValueError("no loaded ply: all strength ratios are infinite")
    return float(finite.min()), sr


def simulate_progressive_failure(
    lam: Laminate,
    load: LoadCase,
    rcond_threshold: float = RCOND_COLLAPSED,
) -> FailureLadder:
    """Knock plies out group by group until the whole stack has failed.

    Parameters
    ----------
    lam : Laminate
        The intact laminate.
    load : LoadCase
        Reference load; must be nonzero. Rung multipliers scale this load.
    rcond_threshold : float
        Reciprocal-condition cutoff below which the remaining stack is
        considered collapsed.

    Returns
    -------
    FailureLadder
        One rung per knockout group. If a knockout leaves a numerically
        singular system, the survivors are reported together in a final
        rung flagged ``flagged=True`` at the previous rung's multiplier.

    Raises
    ------
    ValueError
        For an all-zero load.
    LaminateSingularError
        If the intact laminate is already singular.
    """
    if load.is_zero:
        raise ValueError("failure analysis needs a nonzero load")

    n = lam.n_plies
    load_vec = load.as_vector()
    tw = _tw_array(lam)
    t_stack = _stress_transform_stack(np.array(lam.angles))
    h = ply_z_planes(lam)
    z_mid = (h[:-1] + h[1:]) / 2.0

    active = np.ones(n, dtype=bool)
    rungs: list[FailureRung] = []
    history: list[tuple[float, ...]] = []

    while active.any():
        try:
            sr = _iteration_sr(lam, load_vec, active, tw, t_stack, h, z_mid,
                               rcond_threshold)
        except LaminateSingularError:
            if not rungs:
                raise
            rungs.append(FailureRung(
                force_multiplier=rungs[-1].force_multiplier,
                failed_plies=tuple(int(i) for i in np.where(active)[0]),
                flagged=True,
            ))
            active[:] = False
            break

        history.append(tuple(float(v) for v in sr))
        group = ties_at_minimum(sr)
        multiplier = min(float(sr[i]) for i in group)
        rungs.append(FailureRung(
            force_multiplier=multiplier,
            failed_plies=tuple(sorted(group)),
        ))
        for i in group:
            active[i] = False

    return FailureLadder(rungs=tuple(rungs), load=load,
                         sr_history=tuple(history))
