"""Quasi-linear system matrices for the three 13-moment models.

Variable ordering throughout:

    w = (rho, u1, u2, u3, p11, p12, p13, p22, p23, p33, q1, q2, q3)

Three closures are covered: the plain 13-moment closure (Grad13) with its
fully nonlinear stress convection, and two regularizations that share a
partially linearized stress block and differ from each other only in the
heat-flux rows.  The projection variant is TrivialR13; the final one
(FinalR13) has a coefficient matrix that factorizes as

    A_d^R = D^-1 (M_d + u_d I) D

with D state-dependent but M_d depending only on (theta, z, T).  That
factorization is the content of the global-hyperbolicity result and is
verified here on every assembly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .errors import DomainError, SingularD
from .state import (EquilibriumParams, MomentState5, MomentState13,
                    state13_from_state5)

W_NAMES = ("rho", "u1", "u2", "u3", "p11", "p12", "p13", "p22", "p23", "p33",
           "q1", "q2", "q3")

# slot of p_ij in w for i <= j
_PSLOT = {(1, 1): 4, (1, 2): 5, (1, 3): 6, (2, 2): 7, (2, 3): 8, (3, 3): 9}


def pslot(i: int, j: int) -> int:
    return _PSLOT[(min(i, j), max(i, j))]


class SystemKind(enum.Enum):
    Grad13 = "Grad13"
    TrivialR13 = "TrivialR13"
    FinalR13 = "FinalR13"


@dataclass(frozen=True, eq=False)
class LiDerivedCoeffs:
    """Scalar coefficients derived from the li values at one equilibrium.

    frakB_low enters the reduced 5x5 block (built from orders 1/2..5/2),
    frakB_high the regularization factors (orders 3/2..7/2); they only
    coincide in the classical limit.  a1..a3 are the reduced-system entries
    at the supplied (sigma11, p11).
    """

    frakB: float
    frakB_low: float
    frakB_high: float
    frakD: float
    m1: float
    m2: float
    m3: float
    a1: float
    a2: float
    a3: float


def _bundle(eq: EquilibriumParams) -> Dict[str, float]:
    """Every li-ratio and chain-rule coefficient the assemblies need."""
    li = eq.li
    L1, L3, L5, L7, L9 = li[0.5], li[1.5], li[2.5], li[3.5], li[4.5]
    T = eq.T
    c: Dict[str, float] = {"L1": L1, "L3": L3, "L5": L5, "L7": L7, "L9": L9}
    c["L13"] = L1 / L3
    c["L35"] = L3 / L5
    c["L53"] = L5 / L3
    c["L75"] = L7 / L5
    c["L97"] = L9 / L7
    c["r"] = L3 * L7 / L5 ** 2
    c["r2"] = L5 * L9 / L7 ** 2
    c["Delta"] = 1.5 * c["L35"] - 2.5 * c["L13"]      # < 0 in-domain
    c["phi"] = T * c["L75"]
    c["psi"] = T * c["L97"]
    c["b_low"] = 2.0 / (5.0 - 3.0 * L3 ** 2 / (L1 * L5))
    c["b_high"] = 2.0 / (5.0 - 3.0 * L5 ** 2 / (L3 * L7))
    c["dfrak"] = 2.5 * (1.0 - c["r"])
    c["cfrak"] = 3.5 * c["L97"] - 2.5 * c["L75"]
    c["tfrak"] = 2.5 * T * ((7.0 * c["L75"] - 3.0 * c["L13"]) * (c["b_low"] / 2.0)
                            - c["L75"])
    # chain-rule derivatives through (rho, p) <-> (z, T)
    D = c["Delta"]
    c["rho_phi_rho"] = T * (7.0 * c["r"] - 5.0) / (2.0 * D)
    c["p_phi_p"] = T * (1.5 * (1.0 - c["r"]) - c["L13"] * c["L75"]) / D
    c["rho_psi_rho"] = T * (c["L35"] * c["L97"] - 2.5 * (1.0 - c["r2"])) / D
    c["p_psi_p"] = T * (1.5 * (1.0 - c["r2"]) - c["L13"] * c["L97"]) / D
    c["T"] = T
    return c


def _a_coeffs(c: Dict[str, float], rho: float, p: float, p11: float):
    """Reduced-system entries a1, a2, a3 at (rho, p, p11)."""
    T = c["T"]
    b = c["b_low"]
    L1, L3, L5, L7, L9 = c["L1"], c["L3"], c["L5"], c["L7"], c["L9"]
    sig11 = p11 - p
    a1 = (5.0 * p * T * b / (2.0 * rho)) * (3.5 * L3 ** 2 * L7 / (L1 * L5 ** 2)
                                            - 2.5 * L3 / L1) \
        + (7.0 * sig11 * T * b / (2.0 * rho)) * (
            L3 ** 2 * L9 / (L1 * L5 * L7)
            - 2.5 * (L3 / L1 - L3 * L5 * L9 / (L1 * L7 ** 2)))
    a2 = 3.5 * T * c["L97"] - 1.5 * p / rho - p11 / rho
    a3 = 2.5 * T * ((1.0 + b) * c["L75"]
                    - 1.5 * b * (L3 / L1) * (1.0 - c["r"])) \
        + 3.5 * T * ((sig11 * b / p - 1.0) * c["L97"]
                     - 1.5 * b * (L3 / L1) * (sig11 / p) * (1.0 - c["r2"]))
    return a1, a2, a3


def li_derived_coeffs(eq: EquilibriumParams,
                      state5: Optional[MomentState5] = None) -> LiDerivedCoeffs:
    """Named coefficient set; a1..a3 default to their equilibrium values."""
    c = _bundle(eq)
    rho, p = eq.rho, eq.p
    p11 = p if state5 is None else state5.p11
    if state5 is not None:
        rho, p = state5.rho, state5.p
    a1, a2, a3 = _a_coeffs(c, rho, p, p11)
    b = c["b_high"]
    m2 = 0.5 * (1.0 - c["L5"] ** 2 / (c["L3"] * c["L7"]))
    m3 = 2.5 * c["p_phi_p"] / (3.0 * b)
    return LiDerivedCoeffs(frakB=3.5 * c["L9"] / c["L5"] - 2.5 * c["L7"] ** 2 / c["L5"] ** 2,
                           frakB_low=c["b_low"], frakB_high=b,
                           frakD=c["dfrak"], m1=c["phi"], m2=m2, m3=m3,
                           a1=a1, a2=a2, a3=a3)


def _require_consistent(state_rho: float, state_p: float, eq: EquilibriumParams):
    if (abs(state_rho - eq.rho) > 1e-6 * eq.rho
            or abs(state_p - eq.p) > 1e-6 * eq.p):
        raise DomainError(
            "equilibrium parameters do not fit the state's (rho, p); "
            "use fit_state to obtain matching parameters")


# ---------------------------------------------------------------------------
# assemblies

def assemble_A_grad_3d(state: MomentState13, eq: EquilibriumParams,
                       d: int = 1) -> np.ndarray:
    """Coefficient matrix A_d of the plain 13-moment closure, axis d in 1..3."""
    _require_consistent(state.rho, state.p, eq)
    c = _bundle(eq)
    rho, u, p, q = state.rho, state.u, state.p, state.q
    sig = state.sigma
    P = state.p_ij
    A = u[d - 1] * np.eye(13)
    A[0, d] += rho
    for i in (1, 2, 3):
        A[i, pslot(i, d)] += 1.0 / rho
    for (i, j), row in _PSLOT.items():
        for k in (1, 2, 3):
            A[row, k] += (P[i - 1, j - 1] * (k == d)
                          + P[d - 1, j - 1] * (i == k)
                          + P[d - 1, i - 1] * (j == k))
            A[row, 9 + k] += 0.4 * ((i == j) * (k == d) + (i == d) * (j == k)
                                    + (j == d) * (i == k))
    phi, psi = c["phi"], c["psi"]
    phi_rho, phi_p = c["rho_phi_rho"] / rho, c["p_phi_p"] / p
    psi_rho, psi_p = c["rho_psi_rho"] / rho, c["p_psi_p"] / p
    for i in (1, 2, 3):
        row = 9 + i
        A[row, 0] += (i == d) * 2.5 * p * phi_rho + 3.5 * sig[i - 1, d - 1] * psi_rho
        for k in (1, 2, 3):
            A[row, k] += (1.4 * q[i - 1] * (k == d) + 1.4 * q[d - 1] * (i == k)
                          + 0.4 * (i == d) * q[k - 1])
        for j in (1, 2, 3):
            A[row, pslot(j, d)] += -(c["dfrak"] * p * (i == j)
                                     + sig[i - 1, j - 1]) / rho
        A[row, pslot(i, d)] += 3.5 * psi - 2.5 * phi
        for m in (1, 2, 3):
            A[row, pslot(m, m)] += ((i == d) * (2.5 * (phi + p * phi_p) - 3.5 * psi)
                                    + 3.5 * sig[i - 1, d - 1] * psi_p) / 3.0
    return A


def _reg_common(state: MomentState13, d: int) -> np.ndarray:
    """Shared rows of both regularizations: everything except heat flux."""
    rho, u, p = state.rho, state.u, state.p
    sig = state.sigma
    A = u[d - 1] * np.eye(13)
    A[0, d] += rho
    for i in (1, 2, 3):
        A[i, pslot(i, d)] += 1.0 / rho
    for (i, j), row in _PSLOT.items():
        for k in (1, 2, 3):
            A[row, k] += (p * ((j == d) * (i == k) + (i == d) * (j == k))
                          + 0.4 * (sig[k - 1, i - 1] * (j == d)
                                   + sig[k - 1, j - 1] * (i == d))
                          + (i == j) * (p * (k == d) + 0.4 * sig[k - 1, d - 1]))
            A[row, 9 + k] += 0.4 * ((i == j) * (k == d) + (i == d) * (j == k)
                                    + (j == d) * (i == k))
    return A


def _assemble_A_final(state: MomentState13, eq: EquilibriumParams,
                      d: int = 1) -> np.ndarray:
    c = _bundle(eq)
    rho, p = state.rho, state.p
    sig = state.sigma
    A = _reg_common(state, d)
    Tc = c["T"] * c["cfrak"]
    for i in (1, 2, 3):
        row = 9 + i
        A[row, 0] += (i == d) * 2.5 * c["rho_phi_rho"] * p / rho
        for j in (1, 2, 3):
            A[row, pslot(j, d)] += -(c["dfrak"] * p * (i == j)
                                     + sig[i - 1, j - 1]) / rho
        A[row, pslot(i, d)] += Tc
        for m in (1, 2, 3):
            A[row, pslot(m, m)] += (i == d) * (2.5 * c["p_phi_p"] - Tc) / 3.0
    return A


def assemble_A_trivial(state: MomentState13, eq: EquilibriumParams,
                       d: int = 1) -> np.ndarray:
    """Coefficient matrix of the projection-everywhere regularization."""
    _require_consistent(state.rho, state.p, eq)
    c = _bundle(eq)
    rho, p = state.rho, state.p
    sig = state.sigma
    A = _reg_common(state, d)
    Tc = c["T"] * c["cfrak"]
    for i in (1, 2, 3):
        row = 9 + i
        A[row, 0] += -(i == d) * c["tfrak"] * p / rho
        for j in (1, 2, 3):
            A[row, pslot(j, d)] += -(c["dfrak"] * p * (i == j)
                                     + sig[i - 1, j - 1]) / rho
        A[row, pslot(i, d)] += Tc
        for m in (1, 2, 3):
            A[row, pslot(m, m)] += (i == d) * (c["tfrak"] - Tc) / 3.0
    return A


def assemble_D(state: MomentState13, eq: EquilibriumParams) -> np.ndarray:
    """State-dependent left factor D of the final regularization."""
    _require_consistent(state.rho, state.p, eq)
    c = _bundle(eq)
    rho, p = state.rho, state.p
    sig = state.sigma
    b = c["b_high"]
    D = np.eye(13)
    for i in (1, 2, 3):
        D[i, i] = rho
    for m in (1, 2, 3):
        row = pslot(m, m)
        D[row, 0] = -(p / rho) * b
        for n in (1, 2, 3):
            D[row, pslot(n, n)] = (1.0 if n == m else 0.0) + (b - 1.0) / 3.0
    for i in (1, 2, 3):
        row = 9 + i
        for k in (1, 2, 3):
            D[row, k] = c["dfrak"] * p * (i == k) + sig[i - 1, k - 1]
    return D


def axis_permutation_matrix(d: int) -> np.ndarray:
    """Representation P of the axis swap 1 <-> d on w; P^T M1 P gives M_d."""
    if d == 2:
        sw = {1: 2, 2: 1, 4: 7, 7: 4, 6: 8, 8: 6, 10: 11, 11: 10}
    elif d == 3:
        sw = {1: 3, 3: 1, 4: 9, 9: 4, 5: 8, 8: 5, 10: 12, 12: 10}
    else:
        sw = {}
    P = np.zeros((13, 13))
    for i in range(13):
        P[i, sw.get(i, i)] = 1.0
    return P


def assemble_M(eq: EquilibriumParams, d: int = 1) -> np.ndarray:
    """Constant-in-state factor M_d; depends only on (theta, z, T)."""
    c = _bundle(eq)
    T = c["T"]
    b = c["b_high"]
    m1 = c["phi"]
    m2 = 0.5 * (1.0 - c["L5"] ** 2 / (c["L3"] * c["L7"]))
    m3 = 2.5 * c["p_phi_p"] / (3.0 * b)
    Tc = T * c["cfrak"]
    Mrho = 2.5 * T * T * c["L53"] * (2.0 * c["r"] - 1.0
                                     - c["L13"] * c["L75"]) / c["Delta"]
    M = np.zeros((13, 13))
    M[0, 1] = 1.0
    M[1, 0] = T * c["L53"]
    M[1, 4] = 1.0 + m2
    M[1, 7] = M[1, 9] = m2
    M[2, 5] = 1.0
    M[3, 6] = 1.0
    M[4, 1] = 2.0 * m1
    M[4, 10] = 2.0 * b / 3.0 + 8.0 / 15.0
    M[5, 2] = m1
    M[5, 11] = 0.4
    M[6, 3] = m1
    M[6, 12] = 0.4
    M[7, 10] = 2.0 * b / 3.0 - 4.0 / 15.0
    M[9, 10] = 2.0 * b / 3.0 - 4.0 / 15.0
    M[10, 0] = Mrho
    M[10, 4] = m3 + (2.0 / 3.0) * Tc
    M[10, 7] = M[10, 9] = m3 - Tc / 3.0
    M[11, 5] = Tc
    M[12, 6] = Tc
    if d != 1:
        P = axis_permutation_matrix(d)
        M = P.T @ M @ P
    return M


@dataclass(frozen=True, eq=False)
class SystemMatrices:
    """Assembled matrices of one model along one direction."""

    kind: SystemKind
    direction: np.ndarray
    A: np.ndarray
    D: Optional[np.ndarray] = None
    M: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None


def _as_direction(d_or_n) -> np.ndarray:
    n = np.zeros(3)
    if isinstance(d_or_n, (int, np.integer)):
        n[int(d_or_n) - 1] = 1.0
        return n
    n = np.asarray(d_or_n, dtype=float).reshape(3)
    norm = float(np.linalg.norm(n))
    if norm == 0.0:
        raise DomainError("direction vector must be nonzero")
    return n / norm


def assemble_A(kind: SystemKind, state: MomentState13, eq: EquilibriumParams,
               d: int = 1) -> np.ndarray:
    """Axis-d coefficient matrix of the requested model."""
    if kind is SystemKind.Grad13:
        return assemble_A_grad_3d(state, eq, d)
    if kind is SystemKind.TrivialR13:
        return assemble_A_trivial(state, eq, d)
    _require_consistent(state.rho, state.p, eq)
    return _assemble_A_final(state, eq, d)


def assemble_A_direction(kind: SystemKind, state: MomentState13,
                         eq: EquilibriumParams, n) -> np.ndarray:
    """Coefficient matrix along an arbitrary unit direction n (sum of axes)."""
    n = _as_direction(n)
    A = np.zeros((13, 13))
    for d in (1, 2, 3):
        if n[d - 1] != 0.0:
            A += n[d - 1] * assemble_A(kind, state, eq, d)
    return A


def assemble_A_regularized(state: MomentState13, eq: EquilibriumParams,
                           d=1) -> SystemMatrices:
    """Final regularization along axis d or unit direction d=(n1,n2,n3).

    Returns A together with its factors D, M and B = D A - u_n D, and checks
    the factorization D A = (M + u_n I) D on the spot.
    """
    n = _as_direction(d)
    _require_consistent(state.rho, state.p, eq)
    A = np.zeros((13, 13))
    M = np.zeros((13, 13))
    for ax in (1, 2, 3):
        if n[ax - 1] != 0.0:
            A += n[ax - 1] * _assemble_A_final(state, eq, ax)
            M += n[ax - 1] * assemble_M(eq, ax)
    D = assemble_D(state, eq)
    sv = np.linalg.svd(D, compute_uv=False)
    if sv[-1] <= 1e-13 * sv[0]:
        raise SingularD(f"condition number {sv[0] / max(sv[-1], 1e-300):.3e}")
    un = float(state.u @ n)
    B = D @ A - un * D
    resid = np.max(np.abs(B - M @ D))
    if resid > 1e-10 * max(1.0, np.max(np.abs(D @ A))):
        raise SingularD(f"factorization residual {resid:.3e} (bug signal)")
    return SystemMatrices(kind=SystemKind.FinalR13, direction=n, A=A, D=D, M=M, B=B)


def qbgk_source(state: MomentState13, tau: float) -> np.ndarray:
    """Relaxation source in w coordinates: -sigma_ij/tau and -q_i/tau slots."""
    if not tau > 0.0:
        raise DomainError(f"relaxation time must be positive, got {tau}")
    sig = state.sigma
    Q = np.zeros(13)
    for (i, j), row in _PSLOT.items():
        Q[row] = -sig[i - 1, j - 1] / tau
    Q[10:13] = -state.q / tau
    return Q


# ---------------------------------------------------------------------------
# 1D reduction

def assemble_A5_grad(state5: MomentState5, eq: EquilibriumParams) -> np.ndarray:
    """Closed-form 5x5 matrix of the 1D-reduced plain closure."""
    _require_consistent(state5.rho, state5.p, eq)
    c = _bundle(eq)
    rho, u1, p11, q1, p = state5.rho, state5.u1, state5.p11, state5.q1, state5.p
    a1, a2, a3 = _a_coeffs(c, rho, p, p11)
    return np.array([
        [u1, rho, 0.0, 0.0, 0.0],
        [0.0, u1, 1.0 / rho, 0.0, 0.0],
        [0.0, 3.0 * p11, u1, 1.2, 0.0],
        [-a1, 3.2 * q1, a2, u1, a3],
        [0.0, p + (2.0 / 3.0) * p11, 0.0, 2.0 / 3.0, u1]])


# selection and embedding between w (13) and w5 = (rho, u1, p11, q1, p)
S_REDUCE = np.zeros((5, 13))
S_REDUCE[0, 0] = S_REDUCE[1, 1] = S_REDUCE[2, 4] = S_REDUCE[3, 10] = 1.0
S_REDUCE[4, 4] = S_REDUCE[4, 7] = S_REDUCE[4, 9] = 1.0 / 3.0
T_EMBED = np.zeros((13, 5))
T_EMBED[0, 0] = T_EMBED[1, 1] = T_EMBED[4, 2] = T_EMBED[10, 3] = 1.0
T_EMBED[7, 4] = T_EMBED[9, 4] = 1.5
T_EMBED[7, 2] = T_EMBED[9, 2] = -0.5


def reduce_to_1d(kind: SystemKind, state5: MomentState5,
                 eq: EquilibriumParams) -> np.ndarray:
    """5x5 convection matrix of the chosen model on the 1D-symmetric manifold."""
    state = state13_from_state5(state5)
    A = assemble_A(kind, state, eq, 1)
    return S_REDUCE @ A @ T_EMBED


def state_to_w(state: MomentState13) -> np.ndarray:
    w = np.empty(13)
    w[0] = state.rho
    w[1:4] = state.u
    for (i, j), row in _PSLOT.items():
        w[row] = state.p_ij[i - 1, j - 1]
    w[10:13] = state.q
    return w


def w_to_state13(w: np.ndarray) -> MomentState13:
    P = np.empty((3, 3))
    for (i, j), row in _PSLOT.items():
        P[i - 1, j - 1] = P[j - 1, i - 1] = w[row]
    return MomentState13(rho=w[0], u=w[1:4], p_ij=P, q=w[10:13])
