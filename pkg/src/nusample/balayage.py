"""Balayage coefficient systems and compact-spectrum windows.

Sweeping a point mass at y onto a sampling set E, relative to a spectrum, is
realized here as a finite fit: find coefficients a_x with

    sum_{x in E} a_x exp(-2 pi i x . g)  ~  exp(-2 pi i y . g)

on a quadrature grid over the enlarged spectrum.  The fit is an l1-regularized
least-squares problem solved by iteratively reweighted least squares; it
succeeds only when the sup-norm residual over the grid meets the requested
tolerance, which is the empirical stand-in for "balayage is possible at this
density".  The maximal l1 coefficient mass over a sample of centers estimates
the balayage constant of the pair (E, enlarged spectrum).

The window h that glues the swept coefficients into a pointwise identity has
h(0) = 1 and a transform supported exactly in the closed eps-ball.  It is
built as the normalized square of the inverse transform of a smooth bump on
the eps/2-ball: support containment, nonnegativity of the spectral profile,
and |h| <= h(0) = 1 all hold by construction, and smoothness of the bump
gives super-polynomial time decay.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .geometry import SpectralGrid, as_points
from .sampling import SamplingSet
from .spectral import TrigPolynomial, eval_trigpoly


class BalayageInfeasibleError(RuntimeError):
    """Raised when no coefficient system meets the fit tolerance."""

    def __init__(self, y, residual: float, eta: float):
        self.y = y
        self.residual = residual
        self.eta = eta
        super().__init__(f"infeasible at tolerance: residual {residual:.3e} > eta {eta:.3e} at y={y}")


# -- windows -----------------------------------------------------------------


def _bump(r: np.ndarray) -> np.ndarray:
    """exp(-1/(1-r^2)) on r < 1, zero outside; C^infinity with compact support."""
    out = np.zeros_like(r)
    inside = np.abs(r) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


@dataclass(frozen=True, eq=False)
class InghamWindow:
    """Integrable window with h(0)=1 and transform supported in the eps-ball.

    h(x) = |B(x)|^2 / B(0)^2 where B is the inverse transform (by midpoint
    quadrature) of a smooth radial bump supported on the eps/2-ball.  The
    quadrature turns the spectral profile into a discrete measure whose
    support still lies inside the eps/2-ball, so the product spectrum of h
    stays inside the closed eps-ball exactly.
    """

    eps: float
    dim: int
    bump_nodes: np.ndarray     # (m, dim) quadrature nodes of the bump
    bump_values: np.ndarray    # (m,)
    bump_cell: float           # cell volume
    profile_nodes: np.ndarray  # spectral-profile sample points of h-hat
    profile_values: np.ndarray
    l2_norm: float             # L2 norm of h (via Parseval on the profile)

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, self.dim)
        phases = np.exp(2j * np.pi * (pts @ self.bump_nodes.T))
        b = phases @ (self.bump_values * self.bump_cell)
        b0 = float(np.sum(self.bump_values) * self.bump_cell)
        vals = np.abs(b) ** 2 / b0**2
        return vals if vals.size > 1 else float(vals[0])

    def spectral_profile_at(self, gamma) -> np.ndarray:
        """h-hat by interpolation on its profile; exactly zero outside the ball."""
        pts = as_points(gamma, self.dim)
        r = np.linalg.norm(pts, axis=1)
        if self.dim == 1:
            vals = np.interp(pts[:, 0], self.profile_nodes[:, 0], self.profile_values,
                             left=0.0, right=0.0)
        else:
            prof_r = np.linalg.norm(self.profile_nodes, axis=1)
            order = np.argsort(prof_r)
            vals = np.interp(r, prof_r[order], self.profile_values[order], left=None, right=0.0)
        vals = np.where(r > self.eps, 0.0, vals)
        return vals if vals.size > 1 else float(vals[0])


def default_enlargement(spectrum) -> float:
    """Default enlargement radius for sweep grids: 5% of the spectrum diameter."""
    return 0.05 * spectrum.diameter()


def ingham_window(eps: float, dim: int = 1, profile_nodes: int = 401) -> InghamWindow:
    """Construct the self-convolved-bump window for a given support radius."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    half = eps / 2.0
    n = int(profile_nodes)
    edges = np.linspace(-half, half, n + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    step = edges[1] - edges[0]
    if dim == 1:
        nodes = centers.reshape(-1, 1)
        vals = _bump(np.abs(centers) / half)
        cell = step
        psi = np.convolve(vals, vals) * cell   # direct: keeps exact nonnegativity
        psi_nodes = (np.arange(psi.size) - (psi.size - 1) / 2.0) * step
        psi_nodes = psi_nodes.reshape(-1, 1)
    else:
        gx, gy = np.meshgrid(centers, centers, indexing="ij")
        r = np.sqrt(gx**2 + gy**2)
        grid_vals = _bump(r / half)
        cell = step**2
        psi2 = fftconvolve(grid_vals, grid_vals) * cell
        m = psi2.shape[0]
        ax = (np.arange(m) - (m - 1) / 2.0) * step
        px, py = np.meshgrid(ax, ax, indexing="ij")
        keep = psi2 > 0
        psi = psi2[keep]
        psi_nodes = np.stack([px[keep], py[keep]], axis=1)
        keep_b = grid_vals > 0
        nodes = np.stack([gx[keep_b], gy[keep_b]], axis=1)
        vals = grid_vals[keep_b]
    total = float(np.sum(psi) * cell)          # integral of the self-convolution
    profile = psi / total                      # h-hat, integrates to 1
    l2 = float(np.sqrt(np.sum(profile**2) * cell))
    return InghamWindow(eps=float(eps), dim=dim, bump_nodes=nodes, bump_values=vals,
                        bump_cell=cell, profile_nodes=psi_nodes, profile_values=profile,
                        l2_norm=l2)


# -- coefficient solves -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BalayageSolution:
    """Coefficients sweeping a point mass at ``y`` onto the sampling set."""

    y: np.ndarray
    sampling_set: SamplingSet
    coeffs: np.ndarray
    fit_residual: float     # sup over grid nodes of the exponential mismatch
    l1_mass: float

    def to_json(self) -> dict:
        return {
            "y": self.y.tolist(),
            "coeffs_re": self.coeffs.real.tolist(),
            "coeffs_im": self.coeffs.imag.tolist(),
            "fit_residual": self.fit_residual,
            "l1_mass": self.l1_mass,
        }


class BalayageSolver:
    """Shared machinery for repeated sweeps of different centers onto one set.

    Precomputes the exponential system on the grid and memoizes solutions per
    center.  Individual solves are deterministic; solves for distinct centers
    are independent, so a thread pool may run them concurrently (the cache
    only ever inserts distinct keys).
    """

    def __init__(self, sampling_set: SamplingSet, grid: SpectralGrid,
                 eta: float = 1e-6, reg: float = 1e-12,
                 spectral_cutoff: float = 1e-10, max_irls: int = 20):
        if sampling_set.size == 0:
            raise ValueError("empty sampling set")
        if eta <= 0:
            raise ValueError("eta must be positive")
        self.sampling_set = sampling_set
        self.grid = grid
        self.eta = float(eta)
        self.reg = float(reg)
        self.cutoff = float(spectral_cutoff)
        self.max_irls = int(max_irls)
        x = sampling_set.points
        g = grid.nodes
        self._phi = np.exp(-2j * np.pi * (g @ x.T))        # (nodes, points)
        self._sqw = np.sqrt(grid.weights)
        b_mat = self._sqw[:, None] * self._phi
        self._gram = b_mat.conj().T @ b_mat
        # truncated pseudo-inverse of the weighted system, shared across solves
        u, s, vh = np.linalg.svd(b_mat, full_matrices=False)
        keep = s > self.cutoff * s[0]
        self._pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
        self._cache: dict[bytes, BalayageSolution] = {}

    def _target(self, y: np.ndarray) -> np.ndarray:
        return np.exp(-2j * np.pi * (self.grid.nodes @ y))

    def solve_rhs(self, b: np.ndarray) -> tuple[np.ndarray, float]:
        """l1-regularized weighted least squares against an arbitrary target.

        Starts from the truncated-SVD least-squares solution of the weighted
        exponential system (relative singular-value cutoff 1e-10) and, when
        the l1 weight is positive, polishes it by iteratively reweighted
        least squares to a stationary point of

            || sqrt(w) (Phi a - b) ||^2 + reg * sum |a_x| .

        Returns (coefficients, sup-norm residual over the grid nodes).
        """
        a0 = self._pinv @ (self._sqw * b)
        r0 = float(np.max(np.abs(self._phi @ a0 - b)))
        if self.reg <= 0:
            return a0, r0
        a = a0
        rhs = self._phi.conj().T @ (self.grid.weights * b)
        for _ in range(self.max_irls):
            maj = np.maximum(np.abs(a), 1e-6 * max(np.max(np.abs(a)), 1e-300))
            m = self._gram + np.diag(0.5 * self.reg / maj)
            vals, vecs = np.linalg.eigh(m)
            keep = vals > 1e-15 * vals[-1]
            inv = np.zeros_like(vals)
            inv[keep] = 1.0 / vals[keep]
            a_new = vecs @ (inv * (vecs.conj().T @ rhs))
            done = np.max(np.abs(a_new - a)) <= 1e-11 * max(np.max(np.abs(a_new)), 1e-30)
            a = a_new
            if done:
                break
        r1 = float(np.max(np.abs(self._phi @ a - b)))
        # keep the sparser stationary point only while it stays feasible;
        # the l1 weight must not turn a feasible sweep into a failure
        if r1 <= max(self.eta, r0):
            return a, r1
        return a0, r0

    def solve(self, y) -> BalayageSolution:
        yv = as_points(y, self.sampling_set.dim)[0]
        key = yv.tobytes()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        match = np.all(self.sampling_set.points == yv, axis=1)
        if match.any():
            # a point mass already supported on E is its own sweep
            coeffs = np.zeros(self.sampling_set.size, dtype=complex)
            coeffs[int(np.argmax(match))] = 1.0
            sol = BalayageSolution(y=yv, sampling_set=self.sampling_set, coeffs=coeffs,
                                   fit_residual=0.0, l1_mass=1.0)
        else:
            coeffs, residual = self.solve_rhs(self._target(yv))
            if residual > self.eta:
                raise BalayageInfeasibleError(yv, residual, self.eta)
            sol = BalayageSolution(y=yv, sampling_set=self.sampling_set, coeffs=coeffs,
                                   fit_residual=residual, l1_mass=float(np.sum(np.abs(coeffs))))
        self._cache[key] = sol
        return sol

    def solve_many(self, ys, max_workers: int | None = None) -> list[BalayageSolution]:
        pts = as_points(ys, self.sampling_set.dim)
        if max_workers and max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                return list(pool.map(self.solve, pts))
        return [self.solve(p) for p in pts]


def solve_balayage(sampling_set: SamplingSet, grid: SpectralGrid, y,
                   eta: float = 1e-6, reg: float = 1e-8) -> BalayageSolution:
    """One-shot sweep of a point mass at ``y``; see :class:`BalayageSolver`."""
    return BalayageSolver(sampling_set, grid, eta=eta, reg=reg).solve(y)


@dataclass(frozen=True)
class BalayageConstant:
    value: float          # max l1 mass over the sampled centers
    argmax_y: np.ndarray
    masses: np.ndarray    # per-center l1 masses, in input order


def balayage_constant(sampling_set: SamplingSet, grid: SpectralGrid, ysample,
                      eta: float = 1e-6, reg: float = 1e-8,
                      max_workers: int | None = None,
                      solver: BalayageSolver | None = None) -> BalayageConstant:
    """Estimate the balayage constant as the max l1 mass over sampled centers.

    Any infeasible center propagates as :class:`BalayageInfeasibleError` with
    the offending y attached.
    """
    if solver is None:
        solver = BalayageSolver(sampling_set, grid, eta=eta, reg=reg)
    sols = solver.solve_many(ysample, max_workers=max_workers)
    masses = np.array([s.l1_mass for s in sols])
    k = int(np.argmax(masses))
    return BalayageConstant(value=float(masses[k]), argmax_y=sols[k].y, masses=masses)


def fundamental_identity_residual(poly: TrigPolynomial, sampling_set: SamplingSet,
                                  grid: SpectralGrid, window: InghamWindow, ysample,
                                  eta: float = 1e-6, reg: float = 1e-8,
                                  max_workers: int | None = None,
                                  solver: BalayageSolver | None = None) -> float:
    """Sup over sampled centers of |f(y) - sum_x f(x) a_x(y) h(x-y)| / max|f|.

    The polynomial's frequencies must lie in the base spectrum and the window
    must have been built with the same enlargement radius used by the grid;
    under those hypotheses the identity holds up to the fit residual times the
    polynomial's coefficient mass.  Returns 0 for the zero polynomial.
    """
    if solver is None:
        solver = BalayageSolver(sampling_set, grid, eta=eta, reg=reg)
    ys = as_points(ysample, sampling_set.dim)
    f_at_y = np.atleast_1d(eval_trigpoly(poly, ys))
    scale = float(np.max(np.abs(f_at_y)))
    if scale == 0.0:
        return 0.0
    f_at_x = np.atleast_1d(eval_trigpoly(poly, sampling_set.points))
    worst = 0.0
    sols = solver.solve_many(ys, max_workers=max_workers)
    for yv, fy, sol in zip(ys, f_at_y, sols):
        hvals = np.atleast_1d(window(sampling_set.points - yv))
        recon = np.sum(f_at_x * sol.coeffs * hvals)
        worst = max(worst, abs(fy - recon))
    return worst / scale


@dataclass(frozen=True)
class LpBoundReport:
    lhs: float        # sum_x |k_x|^p
    norm_p: float     # integral of |k|^p
    ratio: float      # lhs / norm_p


def lp_balayage_bound(sampling_set: SamplingSet, grid: SpectralGrid, window: InghamWindow,
                      k_nodes, k_weights, k_values, p: float,
                      eta: float = 1e-6, reg: float = 1e-8,
                      max_workers: int | None = None,
                      solver: BalayageSolver | None = None) -> LpBoundReport:
    """Empirical p-th power bound for the sampled sweep of a test function.

    Each sample value k_x = integral of a_x(y) h(x-y) k(y) dy is computed by
    quadrature over the test function's grid, sweeping every quadrature node
    (solutions are memoized in the solver).  Returns the ratio of the sampled
    p-energy to the function's own p-norm, for empirical boundedness checks.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    if solver is None:
        solver = BalayageSolver(sampling_set, grid, eta=eta, reg=reg)
    ys = as_points(k_nodes, sampling_set.dim)
    wts = np.asarray(k_weights, dtype=float)
    kv = np.asarray(k_values, dtype=complex)
    sols = solver.solve_many(ys, max_workers=max_workers)
    kx = np.zeros(sampling_set.size, dtype=complex)
    for yv, wt, val, sol in zip(ys, wts, kv, sols):
        if val == 0.0:
            continue
        hvals = np.atleast_1d(window(sampling_set.points - yv))
        kx += sol.coeffs * hvals * (wt * val)
    lhs = float(np.sum(np.abs(kx) ** p))
    norm_p = float(np.sum(wts * np.abs(kv) ** p))
    ratio = lhs / norm_p if norm_p > 0 else 0.0
    return LpBoundReport(lhs=lhs, norm_p=norm_p, ratio=ratio)
