"""Interior Elimination

Damped Newton on the strongly convex interior problem min_{z_C} K(z_C, z_B),
whose stationarity condition is ∂K/∂z_C = 0 (zero nodal currents at the
central nodes).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from kronred.errors import NonConvergenceError, OutOfIntervalError, SingularHessianError
from kronred.network.potential import (Network, edge_currents, edge_slopes, edge_voltages,
                                       k_value, nodal_currents, weighted_laplacian)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    """Newton settings; defaults leave headroom under 1e-8 acceptance tolerances."""
    tol: float = 1e-10
    max_iterations: int = 100
    armijo: float = 1e-4
    max_halvings: int = 60


DEFAULT_OPTIONS = SolverOptions()


@dataclass(frozen=True)
class SolveResult:
    """Interior potentials at the solution and the boundary currents ∂K/∂z_B there."""
    z_C: np.ndarray
    J_B: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    z: np.ndarray


def interior_blocks(net: Network, z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(K_CC, K_CB, K_BB) blocks of the weighted Laplacian at z."""
    hessian = weighted_laplacian(net, z)
    central, boundary = list(net.partition.central), list(net.partition.boundary)
    return (hessian[np.ix_(central, central)],
            hessian[np.ix_(central, boundary)],
            hessian[np.ix_(boundary, boundary)])


def _cholesky(matrix: np.ndarray):
    try:
        return linalg.cho_factor(matrix, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularHessianError("interior Hessian is not positive definite") from exc


def _offending_edge(net: Network, z) -> Optional[OutOfIntervalError]:
    try:
        edge_voltages(net, z)
    except OutOfIntervalError as exc:
        return exc
    return None


def solve_interior(net: Network, z_boundary, init=None,
                   options: SolverOptions = DEFAULT_OPTIONS) -> SolveResult:
    """
    Solves ∂K/∂z_C(z_C, z_B) = 0 for z_C.

    Newton steps come from a Cholesky solve with the interior Hessian block;
    the full step is tried first and halved until the Armijo condition holds
    and every edge voltage stays in its validity interval. The start point is
    the boundary mean unless `init` is given.

    Raises:
        OutOfIntervalError: the start point, or every backtracked trial,
            leaves a validity interval (names the edge).
        NonConvergenceError: iteration cap reached; carries the last iterate.
        SingularHessianError: the interior block failed to factor.
    """
    z_boundary = np.asarray(z_boundary, dtype=float)
    if z_boundary.shape != (net.partition.n_boundary,):
        raise ValueError(f"expected {net.partition.n_boundary} boundary potentials, got {z_boundary.shape}")
    boundary, central = list(net.partition.boundary), list(net.partition.central)

    if not central:
        z = net.assemble(z_boundary, [])
        return SolveResult(np.zeros(0), nodal_currents(net, z)[boundary], 0, 0.0, True, z)

    z_central = (np.full(len(central), z_boundary.mean()) if init is None
                 else np.array(init, dtype=float))
    z = net.assemble(z_boundary, z_central)
    incidence = net.incidence.astype(float)
    y = edge_voltages(net, z)
    value = None
    residual = float("inf")

    for iteration in range(options.max_iterations + 1):
        currents = incidence @ edge_currents(net, y)
        gradient = currents[central]
        residual = float(np.abs(gradient).max())
        if residual <= options.tol:
            logger.debug("interior solve converged in %d iterations", iteration)
            return SolveResult(z[central].copy(), currents[boundary], iteration, residual, True, z)
        if iteration == options.max_iterations:
            break

        hessian = (incidence * edge_slopes(net, y)) @ incidence.T
        step = -linalg.cho_solve(_cholesky(hessian[np.ix_(central, central)]), gradient)
        decrement = float(gradient @ step)
        if value is None:
            value = k_value(net, z)

        alpha = 1.0
        accepted = False
        last_trial = z
        for _ in range(options.max_halvings):
            trial = z.copy()
            trial[central] = z[central] + alpha * step
            last_trial = trial
            trial_y = incidence.T @ trial
            inside = all(law.contains(v) for law, v in zip(net.laws, trial_y))
            if inside:
                # below rounding of K the Newton step is taken as is
                if -decrement <= 1e-12 * (1.0 + abs(value)):
                    accepted, trial_value = True, None
                    break
                trial_value = k_value(net, trial)
                if trial_value <= value + options.armijo * alpha * decrement:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            failure = _offending_edge(net, last_trial)
            if failure is not None:
                raise failure
            raise NonConvergenceError("line search failed to reduce K; suspected Assumption 1 violation",
                                      last_iterate=z[central].copy(), residual=residual)
        z = trial
        y = incidence.T @ z
        value = trial_value

    logger.warning("interior solve hit %d iterations, residual %.3e", options.max_iterations, residual)
    raise NonConvergenceError(
        f"no convergence after {options.max_iterations} iterations (residual {residual:.3e}); "
        "suspected Assumption 1 or validity-interval failure",
        last_iterate=z[central].copy(), residual=residual)


def interior_hessian_check(net: Network, z) -> float:
    """Smallest eigenvalue of ∂²K/∂z_C² at z (inf without central nodes)."""
    if not net.partition.central:
        return float("inf")
    block, _, _ = interior_blocks(net, z)
    return float(np.linalg.eigvalsh(block)[0])


def sensitivity(net: Network, z_boundary, solution: Optional[SolveResult] = None) -> np.ndarray:
    """
    ∂z_C/∂z_B = -[∂²K/∂z_C²]⁻¹ ∂²K/∂z_B∂z_C at the interior solution.

    Rows sum to one (shifting every boundary potential shifts the interior).
    """
    solution = solution or solve_interior(net, z_boundary)
    if not net.partition.central:
        return np.zeros((0, net.partition.n_boundary))
    block_cc, block_cb, _ = interior_blocks(net, solution.z)
    return -linalg.cho_solve(_cholesky(block_cc), block_cb)


def reduced_potential(net: Network, z_boundary, solution: Optional[SolveResult] = None) -> float:
    """K̂(z_B) = K(z_C(z_B), z_B)."""
    solution = solution or solve_interior(net, z_boundary)
    return k_value(net, solution.z)
