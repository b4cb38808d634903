"""Classical laminate theory for thin composite stacks under in-plane loads.

Implements the standard CLT chain for a laminate built from unidirectional
plies: reduced stiffness [Q] of a lamina in its fiber axes, rotation into
laminate axes [Qbar], A/B/D assembly over the stack, the mid-plane
strain/curvature solution for applied force and moment resultants, per-ply
stress recovery at the ply mid-thickness, and Tsai-Wu strength ratios.

Formulation follows the usual textbook treatment (e.g. A. K. Kaw,
*Mechanics of Composite Materials*, 2nd ed., CRC Press, 2006).

Conventions used throughout:

* Plies are listed **top to bottom**. The through-thickness coordinate z is
  **positive downward**, so the first end-plane sits at z = -H/2 and the
  last at z = +H/2 for total thickness H.
* Angles are in **degrees** at every public interface and are normalized to
  [-90, 90] (a fiber direction is a line, so theta and theta +/- 180 deg are
  the same ply).
* Units are SI: Pa, m, N/m for force resultants, N*m/m for moment
  resultants. File loaders are responsible for unit conversion.

One deliberate deviation from a common misprint: the quadratic transverse
term of the Tsai-Wu polynomial is ``H22 * sigma2**2``. Some printed sources
typeset ``H11`` on that term, which is inconsistent with the definition of
the strength parameters; ``H22`` is used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class LaminateSingularError(ArithmeticError):
    """The assembled laminate system is singular (laminate has collapsed)."""


class StrengthRatioRootError(ArithmeticError):
    """The strength-ratio quadratic has no positive real root.

    This cannot happen for valid Tsai-Wu parameters (the quadratic
    coefficient is a positive-definite form of the stress), so it indicates
    corrupt inputs rather than a physical state.
    """


def normalize_angle(angle_deg: float) -> float:
    """Map an angle in degrees onto the canonical [-90, 90] fiber range.

    Uses round-half-to-even so that +90 and -90 are both fixed points:
    91 -> -89, 135 -> -45, -135 -> 45, 90 -> 90, -90 -> -90.
    """
    return float(angle_deg) - 180.0 * round(float(angle_deg) / 180.0)


# =============================================================================
# Domain records
# =============================================================================

@dataclass(frozen=True)
class MaterialProperties:
    """Elastic constants and ultimate strengths of a unidirectional lamina.

    Parameters
    ----------
    e1, e2 : float
        Young's moduli along (1) and across (2) the fiber direction [Pa].
    g12 : float
        In-plane shear modulus [Pa].
    nu12 : float
        Major Poisson's ratio (loading along 1, contraction along 2).
    sigma1t_ult, sigma1c_ult : float
        Ultimate tensile/compressive stress in the fiber direction [Pa].
        Compressive strengths are magnitudes (positive numbers).
    sigma2t_ult, sigma2c_ult : float
        Ultimate tensile/compressive stress transverse to the fiber [Pa].
    tau12_ult : float
        Ultimate in-plane shear stress [Pa].
    """

    e1: float
    e2: float
    g12: float
    nu12: float
    sigma1t_ult: float
    sigma1c_ult: float
    sigma2t_ult: float
    sigma2c_ult: float
    tau12_ult: float

    def __post_init__(self) -> None:
        for name in ("e1", "e2", "g12", "sigma1t_ult", "sigma1c_ult",
                     "sigma2t_ult", "sigma2c_ult", "tau12_ult"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if 1.0 - self.nu12 * self.nu21 <= 0.0:
            raise ValueError(
                "unstable material: 1 - nu12*nu21 must be positive "
                f"(nu12={self.nu12}, nu21={self.nu21})"
            )

    @property
    def nu21(self) -> float:
        """Minor Poisson's ratio, from the reciprocity relation."""
        return self.nu12 * self.e2 / self.e1


@dataclass(frozen=True)
class Ply:
    """A single unidirectional layer: orientation, thickness, material.

    The angle is normalized into [-90, 90] on construction.
    """

    angle: float
    thickness: float
    material: MaterialProperties

    def __post_init__(self) -> None:
        if not self.thickness > 0.0:
            raise ValueError("ply thickness must be strictly positive")
        object.__setattr__(self, "angle", normalize_angle(self.angle))


@dataclass(frozen=True)
class Laminate:
    """An ordered stack of plies, listed top to bottom."""

    plies: tuple[Ply, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "plies", tuple(self.plies))
        if len(self.plies) == 0:
            raise ValueError("laminate needs at least one ply")

    @classmethod
    def from_angles(cls, material: MaterialProperties, thickness: float,
                    angles_deg) -> "Laminate":
        """Build a uniform-thickness single-material stack from angles."""
        return cls(tuple(Ply(a, thickness, material) for a in angles_deg))

    def with_angles(self, angles_deg) -> "Laminate":
        """Copy of this laminate with new ply angles, all else unchanged."""
        angles = tuple(angles_deg)
        if len(angles) != len(self.plies):
            raise ValueError("angle count does not match ply count")
        return Laminate(tuple(
            Ply(a, p.thickness, p.material)
            for a, p in zip(angles, self.plies)
        ))

    @property
    def n_plies(self) -> int:
        return len(self.plies)

    @property
    def angles(self) -> tuple[float, ...]:
        return tuple(p.angle for p in self.plies)

    @property
    def total_thickness(self) -> float:
        return sum(p.thickness for p in self.plies)

    @property
    def is_symmetric(self) -> bool:
        """True when (angle, thickness, material) mirror about the mid-plane."""
        return self.plies == self.plies[::-1]


@dataclass(frozen=True)
class LoadCase:
    """Force and moment resultants per unit width.

    ``n`` is (Nx, Ny, Nxy) in N/m, ``m`` is (Mx, My, Mxy) in N*m/m.
    An all-zero load is a legal value (it solves to the trivial state);
    failure analysis rejects it separately.
    """

    n: tuple[float, float, float]
    m: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", tuple(float(v) for v in self.n))
        object.__setattr__(self, "m", tuple(float(v) for v in self.m))
        if len(self.n) != 3 or len(self.m) != 3:
            raise ValueError("n and m must each have three components")

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.n) and all(v == 0.0 for v in self.m)

    def as_vector(self) -> np.ndarray:
        """The stacked (N, M) right-hand side of the laminate system."""
        return np.array(self.n + self.m, dtype=float)

    def scaled(self, factor: float) -> "LoadCase":
        return LoadCase(tuple(factor * v for v in self.n),
                        tuple(factor * v for v in self.m))


@dataclass(frozen=True)
class AbdMatrices:
    """Extensional (A), coupling (B) and bending (D) stiffness matrices."""

    a: np.ndarray   # 3x3, N/m
    b: np.ndarray   # 3x3, N
    d: np.ndarray   # 3x3, N*m

    def as_matrix(self) -> np.ndarray:
        """The full 6x6 system matrix [[A, B], [B, D]]."""
        top = np.hstack([self.a, self.b])
        bottom = np.hstack([self.b, self.d])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class MidplaneState:
    """Mid-plane strains (dimensionless) and curvatures (1/m)."""

    strain0: np.ndarray    # (eps_x0, eps_y0, gamma_xy0)
    curvature: np.ndarray  # (k_x, k_y, k_xy)


@dataclass(frozen=True)
class PlyStressState:
    """Strain and stress of one ply, in laminate (x-y) and fiber (1-2) axes.

    Evaluated at the ply's mid-thickness coordinate ``z``. Shear strains are
    engineering shear strains.
    """

    global_strain: np.ndarray   # (eps_x, eps_y, gamma_xy)
    global_stress: np.ndarray   # (sigma_x, sigma_y, tau_xy), Pa
    local_strain: np.ndarray    # (eps_1, eps_2, gamma_12)
    local_stress: np.ndarray    # (sigma_1, sigma_2, tau_12), Pa
    z: float                    # m, positive downward


@dataclass(frozen=True)
class TsaiWuParams:
    """Tsai-Wu strength parameters of a lamina.

    h6 is identically zero (shear strength is direction-independent in the
    1-2 plane); h11, h22, h66 are positive; h12 is the usual negative
    interaction term -0.5*sqrt(h11*h22).
    """

    h1: float
    h2: float
    h6: float
    h11: float
    h22: float
    h66: float
    h12: float


# =============================================================================
# Stiffness construction and rotation
# =============================================================================

#: Reuter matrix: converts engineering shear strain to tensor form and back.
REUTER = np.diag([1.0, 1.0, 2.0])
_REUTER_INV = np.diag([1.0, 1.0, 0.5])


def reduced_stiffness(mat: MaterialProperties) -> np.ndarray:
    """Reduced stiffness matrix [Q] of a lamina in its fiber axes.

    Parameters
    ----------
    mat : MaterialProperties
        Lamina elastic constants.

    Returns
    -------
    ndarray, shape (3, 3)
        [[Q11, Q12, 0], [Q12, Q22, 0], [0, 0, Q66]] in Pa, with
        Q11 = E1/(1 - nu12*nu21), Q12 = nu12*E2/(1 - nu12*nu21),
        Q22 = E2/(1 - nu12*nu21) and Q66 = G12.
    """
    denom = 1.0 - mat.nu12 * mat.nu21
    q11 = mat.e1 / denom
    q12 = mat.nu12 * mat.e2 / denom
    q22 = mat.e2 / denom
    return np.array([
        [q11, q12, 0.0],
        [q12, q22, 0.0],
        [0.0, 0.0, mat.g12],
    ])


def transformation_matrix(angle_deg: float) -> np.ndarray:
    """Stress transformation matrix [T] for a rotation of ``angle_deg``.

    Maps laminate-axis stress to fiber-axis stress:
    (sigma_1, sigma_2, tau_12) = [T] (sigma_x, sigma_y, tau_xy).
    """
    theta = math.radians(angle_deg)
    c = math.cos(theta)
    s = math.sin(theta)
    return np.array([
        [c * c, s * s, 2.0 * c * s],
        [s * s, c * c, -2.0 * s * c],
        [-s * c, s * c, c * c - s * s],
    ])


def strain_transformation_matrix(angle_deg: float) -> np.ndarray:
    """Engineering-strain transformation [R][T][R]^-1 for ``angle_deg``.

    Maps laminate-axis engineering strain to fiber-axis engineering strain.
    """
    t = transformation_matrix(angle_deg)
    return np.linalg.multi_dot([REUTER, t, _REUTER_INV])


def transform_stiffness(q: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate a reduced stiffness matrix into laminate axes.

    Computes [Qbar] = [T]^-1 [Q] [R] [T] [R]^-1 for a ply whose fibers run
    at ``angle_deg`` to the laminate x axis. The result is symmetric and
    generally has nonzero normal/shear coupling entries (1,3) and (2,3).
    """
    t = transformation_matrix(angle_deg)
    return np.linalg.multi_dot(
        [np.linalg.inv(t), q, REUTER, t, _REUTER_INV]
    )


@lru_cache(maxsize=None)
def ply_stiffness(mat: MaterialProperties, angle_deg: float) -> np.ndarray:
    """Cached [Qbar] for a (material, angle) pair.

    The returned array is marked read-only; callers that need to modify it
    must copy. The cache makes repeated re-assembly over rotated stacks
    (failure iteration, tamper searches) cheap.
    """
    qbar = transform_stiffness(reduced_stiffness(mat), angle_deg)
    qbar.setflags(write=False)
    return qbar


# =============================================================================
# Laminate assembly and solution
# =============================================================================

def ply_z_planes(lam: Laminate) -> np.ndarray:
    """End-plane z coordinates h_0..h_n of the stack, top to bottom.

    Strictly increasing from -H/2 to +H/2 (z positive downward). The k-th
    ply occupies [h_{k-1}, h_k].
    """
    thicknesses = np.array([p.thickness for p in lam.plies])
    h = np.concatenate([[0.0], np.cumsum(thicknesses)])
    return h - h[-1] / 2.0


def stiffness_stack(lam: Laminate, active=None) -> np.ndarray:
    """Per-ply [Qbar] as an (n, 3, 3) array; deactivated plies are zeroed.

    A ply with ``active[k] == False`` has failed: it contributes nothing to
    the stiffness but still occupies its z band (geometry never changes).
    """
    stack = np.stack([ply_stiffness(p.material, p.angle) for p in lam.plies])
    if active is not None:
        active = np.asarray(active, dtype=bool)
        if active.shape != (lam.n_plies,):
            raise ValueError("active mask length does not match ply count")
        stack = np.where(active[:, None, None], stack, 0.0)
    return stack


def assemble_abd(lam: Laminate, active=None) -> AbdMatrices:
    """Assemble the A, B, D stiffness matrices of a laminate.

    Parameters
    ----------
    lam : Laminate
        The stack to assemble.
    active : sequence of bool, optional
        Per-ply activity mask. Inactive (failed) plies contribute a zero
        [Qbar]; the z planes are unchanged. Defaults to all active.

    Returns
    -------
    AbdMatrices
        A = sum Qbar_k (h_k - h_{k-1}),
        B = 1/2 sum Qbar_k (h_k^2 - h_{k-1}^2),
        D = 1/3 sum Qbar_k (h_k^3 - h_{k-1}^3).
    """
    stack = stiffness_stack(lam, active)
    h = ply_z_planes(lam)
    w1 = h[1:] - h[:-1]
    w2 = h[1:] ** 2 - h[:-1] ** 2
    w3 = h[1:] ** 3 - h[:-1] ** 3
    a = np.einsum("kij,k->ij", stack, w1)
    b = 0.5 * np.einsum("kij,k->ij", stack, w2)
    d = np.einsum("kij,k->ij", stack, w3) / 3.0
    return AbdMatrices(a=a, b=b, d=d)


#: Reciprocal-condition threshold below which the 6x6 laminate system is
#: treated as collapsed. No physical laminate with surviving plies gets
#: anywhere near this.
RCOND_COLLAPSED = 1e-12


def solve_midplane(abd: AbdMatrices, load: LoadCase,
                   rcond_threshold: float = RCOND_COLLAPSED) -> MidplaneState:
    """Solve [N; M] = [[A, B], [B, D]] [eps0; k] for the mid-plane state.

    Raises
    ------
    LaminateSingularError
        If the 6x6 system's reciprocal condition number falls below
        ``rcond_threshold`` (all-plies-failed and near-collapsed states).
    """
    k6 = abd.as_matrix()
    if not np.all(np.isfinite(k6)):
        raise LaminateSingularError("non-finite stiffness matrix")
    sv = np.linalg.svd(k6, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < rcond_threshold:
        raise LaminateSingularError(
            f"laminate system is numerically singular (rcond ~ "
            f"{0.0 if sv[0] == 0.0 else sv[-1] / sv[0]:.3e})"
        )
    solution = np.linalg.solve(k6, load.as_vector())
    return MidplaneState(strain0=solution[:3], curvature=solution[3:])


def ply_stress_state(lam: Laminate, ply_index: int,
                     state: MidplaneState) -> PlyStressState:
    """Recover one ply's strain/stress state at its mid-thickness.

    Global strain follows eps(z) = eps0 + z*k; global stress uses the ply's
    [Qbar]; fiber-axis values come from the stress and engineering-strain
    transformations.
    """
    if not 0 <= ply_index < lam.n_plies:
        raise ValueError(f"ply index {ply_index} out of range")
    ply = lam.plies[ply_index]
    h = ply_z_planes(lam)
    z = 0.5 * (h[ply_index] + h[ply_index + 1])
    global_strain = state.strain0 + z * state.curvature
    global_stress = ply_stiffness(ply.material, ply.angle) @ global_strain
    t = transformation_matrix(ply.angle)
    local_stress = t @ global_stress
    local_strain = strain_transformation_matrix(ply.angle) @ global_strain
    return PlyStressState(
        global_strain=global_strain,
        global_stress=global_stress,
        local_strain=local_strain,
        local_stress=local_stress,
        z=float(z),
    )


# =============================================================================
# Tsai-Wu failure criterion
# =============================================================================

@lru_cache(maxsize=None)
def tsai_wu_params(mat: MaterialProperties) -> TsaiWuParams:
    """Tsai-Wu strength parameters from the five ultimate strengths."""
    h1 = 1.0 / mat.sigma1t_ult - 1.0 / mat.sigma1c_ult
    h2 = 1.0 / mat.sigma2t_ult - 1.0 / mat.sigma2c_ult
    h11 = 1.0 / (mat.sigma1t_ult * mat.sigma1c_ult)
    h22 = 1.0 / (mat.sigma2t_ult * mat.sigma2c_ult)
    h66 = 1.0 / mat.tau12_ult ** 2
    h12 = -0.5 * math.sqrt(h11 * h22)
    return TsaiWuParams(h1=h1, h2=h2, h6=0.0,
                        h11=h11, h22=h22, h66=h66, h12=h12)


def _tsai_wu_coefficients(local_stress, h: TsaiWuParams):
    """Linear (a) and quadratic (b) coefficients of the scaled criterion.

    Scaling the stress by a factor SR turns the failure polynomial into
    a*SR + b*SR**2 = 1; b is a positive-definite quadratic form of the
    stress (h12**2 = h11*h22/4 < h11*h22), so b > 0 whenever stress != 0.
    """
    s1, s2, t12 = (float(v) for v in local_stress)
    a = h.h1 * s1 + h.h2 * s2 + h.h6 * t12
    b = (h.h11 * s1 * s1 + h.h22 * s2 * s2 + h.h66 * t12 * t12
         + 2.0 * h.h12 * s1 * s2)
    return a, b


def strength_ratio(local_stress, h: TsaiWuParams) -> float:
    """Factor by which the given fiber-axis stress can scale before failure.

    Solves b*SR**2 + a*SR - 1 = 0 for its positive root. An exactly
    unloaded ply returns +inf (it never fails under scaling); values above
    1 mean the ply is safe at the applied load.

    Raises
    ------
    StrengthRatioRootError
        If no positive real root exists for a nonzero stress. This would
        require invalid strength parameters.
    """
    s1, s2, t12 = (float(v) for v in local_stress)
    if s1 == 0.0 and s2 == 0.0 and t12 == 0.0:
        return math.inf
    a, b = _tsai_wu_coefficients(local_stress, h)
    disc = a * a + 4.0 * b
    if b <= 0.0 or disc < 0.0:
        raise StrengthRatioRootError(
            f"no positive root for stress {local_stress!r} (a={a}, b={b})"
        )
    return (-a + math.sqrt(disc)) / (2.0 * b)


def tsai_wu_check(local_stress, h: TsaiWuParams) -> bool:
    """True when the lamina is safe under the given fiber-axis stress.

    Evaluates the failure polynomial directly (not via the strength ratio):
    the lamina is safe while a + b < 1, where a and b are the linear and
    quadratic Tsai-Wu combinations. Boundary states (polynomial exactly 1,
    equivalently SR exactly 1) count as failed.
    """
    a, b = _tsai_wu_coefficients(local_stress, h)
    return a + b < 1.0
