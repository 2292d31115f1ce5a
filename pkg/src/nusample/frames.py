"""Fourier-frame engine on the discretized Paley-Wiener model.

Analysis maps a spectral coefficient vector to its time samples on a point
set; synthesis stacks sampled exponentials back into a coefficient vector.
Frame bounds are the extreme singular values squared of the weighted analysis
matrix, either over the full coefficient space or compressed to a subspace of
time-localized signals.  The subspace matters: a finite sampling window can
never frame the full discretized space (the analysis map has finite rank), so
tightness statements are made for signals concentrated away from the window
edge, built here from smoothly tapered, shifted spectral envelopes.

Also included: conjugate-gradient reconstruction from samples, the dilation
inequality checker (three dilates, one sampling set), the weighted frame
inequality checker, and the covering-criterion experiment.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (CoveringReport, SpectralGrid, SpectrumSet,
                       build_grid, covering_check, polar_set, scale)
from .sampling import SamplingSet
from .spectral import BandlimitedSignal

_EIG_FLOOR = 1e-12
_DENSE_CAPACITY = 4096


class NotAFrameError(RuntimeError):
    """Raised when the lower bound is numerically zero at the current scale."""


class CapacityError(RuntimeError):
    """Raised when a dense solve would exceed the supported grid size."""


@dataclass(frozen=True, eq=False)
class SampleVector:
    """Time-domain samples of a signal on a sampling set."""

    sampling_set: SamplingSet
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape != (self.sampling_set.size,):
            raise ValueError("sample vector length does not match the set")


@dataclass(frozen=True)
class FrameReport:
    lower: float
    upper: float
    condition: float
    node_count: int
    sample_count: int
    method: str

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "condition": None if np.isinf(self.condition) else self.condition,
            "node_count": self.node_count,
            "sample_count": self.sample_count,
            "method": self.method,
        }


def _exp_matrix(sampling_set: SamplingSet, grid: SpectralGrid) -> np.ndarray:
    """E[x, k] = exp(2 pi i x . g_k), shape (samples, nodes)."""
    return np.exp(2j * np.pi * (sampling_set.points @ grid.nodes.T))


def analysis(signal: BandlimitedSignal, sampling_set: SamplingSet) -> SampleVector:
    """Sample the signal on the set: values are the spectral quadratures of the
    coefficients against the sampled exponentials."""
    e = _exp_matrix(sampling_set, signal.grid)
    vals = e @ (signal.grid.weights * signal.coeffs)
    return SampleVector(sampling_set=sampling_set, values=vals)


def frame_operator_apply(samples: SampleVector, grid: SpectralGrid) -> BandlimitedSignal:
    """Synthesis: coefficients G_k = sum_x v_x exp(-2 pi i x . g_k).

    Composing with :func:`analysis` yields the discrete frame operator; the
    two maps are adjoint with respect to the weighted spectral inner product
    and the plain sample-space dot product.
    """
    e = _exp_matrix(samples.sampling_set, grid)
    coeffs = e.conj().T @ samples.values
    return BandlimitedSignal(grid=grid, coeffs=coeffs)


synthesis = frame_operator_apply


def frame_bounds(sampling_set: SamplingSet, grid: SpectralGrid,
                 subspace: np.ndarray | None = None,
                 floor: float = _EIG_FLOOR) -> FrameReport:
    """Extreme frame constants of the sampled exponential system.

    Without a subspace the bounds are taken over the whole coefficient space;
    the lower bound is then zero whenever the set has fewer points than the
    grid has nodes.  Passing an orthonormal ``subspace`` (columns in the
    sqrt-weight coordinates, e.g. from :func:`interior_taper_subspace`)
    compresses the operator to time-localized signals, which is how tightness
    of truncated sampling windows is measured.

    The discrete model is periodic: samples separated by (node count) x
    (node spacing) along an axis alias onto the same row, so the node count
    per axis should exceed the sampling window extent in those units.

    A lower value below ``floor`` (relative to the upper) is reported as 0,
    i.e. not a frame at this scale.
    """
    if grid.size > _DENSE_CAPACITY:
        raise CapacityError(f"grid size {grid.size} exceeds dense capacity {_DENSE_CAPACITY}")
    e = _exp_matrix(sampling_set, grid)                 # (samples, nodes)
    u = e * np.sqrt(grid.weights)[None, :]              # (samples, nodes)
    if subspace is None:
        svals = np.linalg.svd(u, compute_uv=False)
        upper = float(svals[0] ** 2)
        lower = float(svals[-1] ** 2) if sampling_set.size >= grid.size else 0.0
        method = "dense-svd"
    else:
        q = np.asarray(subspace)
        if q.shape[0] != grid.size:
            raise ValueError("subspace rows must match grid size")
        c = u @ q                                       # (samples, rank)
        svals = np.linalg.svd(c, compute_uv=False)
        upper = float(svals[0] ** 2)
        lower = float(svals[-1] ** 2) if sampling_set.size >= q.shape[1] else 0.0
        method = f"dense-svd/subspace-{q.shape[1]}"
    if lower < floor * max(upper, 1.0):
        lower = 0.0
    condition = np.inf if lower == 0.0 else upper / lower
    return FrameReport(lower=lower, upper=upper, condition=condition,
                       node_count=grid.size, sample_count=sampling_set.size, method=method)


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C^infinity transition: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    lo = np.exp(-1.0 / np.maximum(t, 1e-300))
    hi = np.exp(-1.0 / np.maximum(1.0 - t, 1e-300))
    return lo / (lo + hi)


def interior_taper_subspace(grid: SpectralGrid, window, margin: float,
                            spacing: float | None = None, rolloff: float = 0.6,
                            rank_tol: float = 1e-3) -> np.ndarray:
    """Orthonormal basis (in sqrt-weight coordinates) of tapered shifts.

    Columns span signals of the form  taper(g) * exp(-2 pi i x0 . g)  with
    shift centers x0 on a grid inside the window shrunk by ``margin``.  The
    taper is a smooth cutoff that is 1 on the inner (1 - rolloff) fraction of
    the spectrum (measured in the gauge) and vanishes at its boundary, so the
    basis signals decay rapidly in time and stay concentrated near their
    centers.  Near-dependent directions are dropped at ``rank_tol``.
    """
    spec = grid.spectrum
    dim = spec.dim
    win = np.asarray(window, dtype=float).reshape(dim, 2)
    bbox = spec.bounding_box()
    half = bbox[:, 1]
    if spacing is None:
        steps = 0.8 / (2.0 * half)
    else:
        steps = np.broadcast_to(np.asarray(spacing, dtype=float), (dim,))
    axes = []
    for (lo, hi), st in zip(win, steps):
        lo_m, hi_m = lo + margin, hi - margin
        if hi_m < lo_m:
            raise ValueError("margin leaves no interior room in the window")
        axes.append(np.arange(lo_m, hi_m + st / 2.0, st))
    mesh = np.meshgrid(*axes, indexing="ij")
    shifts = np.stack([m.ravel() for m in mesh], axis=1)
    taper = _smooth_step((1.0 - spec.gauge(grid.nodes)) / rolloff)
    basis = (np.sqrt(grid.weights) * taper)[:, None] * np.exp(
        -2j * np.pi * (grid.nodes @ shifts.T))
    q, svals, _ = np.linalg.svd(basis, full_matrices=False)
    rank = int(np.sum(svals > rank_tol * svals[0]))
    return q[:, :rank]


def subspace_signal(grid: SpectralGrid, subspace: np.ndarray, coeffs) -> BandlimitedSignal:
    """Signal with sqrt-weight coordinates Q @ coeffs, unit normalized."""
    u = subspace @ np.asarray(coeffs, dtype=complex)
    f = u / np.sqrt(grid.weights)
    sig = BandlimitedSignal(grid=grid, coeffs=f)
    n = sig.norm()
    if n == 0:
        raise ValueError("zero subspace coefficient vector")
    return BandlimitedSignal(grid=grid, coeffs=f / n)


def random_subspace_signal(grid: SpectralGrid, subspace: np.ndarray, seed: int) -> BandlimitedSignal:
    rng = np.random.default_rng(seed)
    r = subspace.shape[1]
    c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
    return subspace_signal(grid, subspace, c)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    signal: BandlimitedSignal
    iterations: int
    residual: float
    converged: bool
    history: list | None = None   # per-iteration relative residuals

    def __post_init__(self):
        if self.history is None:
            object.__setattr__(self, "history", [])


def reconstruct(samples: SampleVector, grid: SpectralGrid,
                tol: float = 1e-8, max_iter: int = 200) -> ReconstructionResult:
    """Least-squares signal recovery from samples by conjugate gradients.

    Solves the normal equations of the sampling map.  When the set has fewer
    points than the grid has nodes the smaller sample-space system is solved
    and the minimal-norm interpolant returned; otherwise CG runs on the
    spectral-side frame operator.  Non-convergence returns the best iterate
    flagged unconverged; a numerically vanishing lower bound raises
    :class:`NotAFrameError`.
    """
    ss = samples.sampling_set
    v = samples.values
    e = _exp_matrix(ss, grid)               # (samples, nodes)
    w = grid.weights
    if not np.any(v):
        return ReconstructionResult(
            signal=BandlimitedSignal(grid=grid, coeffs=np.zeros(grid.size, dtype=complex)),
            iterations=0, residual=0.0, converged=True, history=[])

    if ss.size < grid.size:
        # sample-space normal equations: G c = v with G the sampled-sinc Gram
        def apply_op(c):
            return e @ (w * (e.conj().T @ c))
        b = v
        def to_signal(c):
            return BandlimitedSignal(grid=grid, coeffs=e.conj().T @ c)
        dot = lambda a, bb: complex(np.vdot(bb, a))
    else:
        # spectral-space frame operator S F = synthesis(v)
        def apply_op(f):
            return e.conj().T @ (e @ (w * f))
        b = e.conj().T @ v
        def to_signal(f):
            return BandlimitedSignal(grid=grid, coeffs=f)
        dot = lambda a, bb: complex(np.vdot(bb, w * a))

    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = dot(r, r).real
    bnorm = np.sqrt(dot(b, b).real)
    it = 0
    converged = False
    history = []
    for it in range(1, max_iter + 1):
        sp = apply_op(p)
        pap = dot(p, sp).real
        pp = dot(p, p).real
        if pap <= 1e-14 * pp:
            if np.sqrt(rs) <= tol * bnorm:
                converged = True
                break
            raise NotAFrameError("not a frame at this scale: frame operator is singular "
                                 "along the current search direction")
        alpha = rs / pap
        x = x + alpha * p
        r = r - alpha * sp
        rs_new = dot(r, r).real
        history.append(float(np.sqrt(max(rs_new, 0.0)) / bnorm))
        if np.sqrt(rs_new) <= tol * bnorm:
            rs = rs_new
            converged = True
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    residual = float(np.sqrt(max(rs, 0.0)) / bnorm)
    return ReconstructionResult(signal=to_signal(x), iterations=it,
                                residual=residual, converged=converged, history=history)


# -- dilation and weighted inequality checkers --------------------------------


def dilation_grid(spectrum: SpectrumSet, sixths: int) -> SpectralGrid:
    """Integer-spaced symmetric grid whose node set is closed under the
    dilations g -> 2g and g -> 3g (node count 12*sixths + 1, d=1 only)."""
    if spectrum.dim != 1:
        raise ValueError("dilation grids are one-dimensional")
    if sixths < 1:
        raise ValueError("sixths must be >= 1")
    n = 6 * sixths
    h = spectrum.bounding_box()[0, 1]
    step = h / n
    nodes = (step * np.arange(-n, n + 1)).reshape(-1, 1)
    weights = np.full(nodes.shape[0], step)
    return SpectralGrid(nodes=nodes, weights=weights, spectrum=spectrum)


def _dilation_indices(grid: SpectralGrid) -> tuple[np.ndarray, float]:
    nodes = grid.nodes[:, 0]
    step = nodes[1] - nodes[0]
    idx = np.rint(nodes / step).astype(int)
    if not np.allclose(nodes, idx * step, atol=1e-9 * max(abs(nodes[-1]), 1.0)):
        raise ValueError("grid is not integer-spaced; dilations would need interpolation")
    if np.max(np.abs(np.diff(idx))) != 1 or 0 not in idx:
        raise ValueError("grid is not a symmetric consecutive integer grid")
    return idx, step


def _dilate_coeffs(signal: BandlimitedSignal, factor: int) -> np.ndarray:
    """Coefficient vector of g -> F(factor * g) by exact node lookup."""
    idx, _ = _dilation_indices(signal.grid)
    pos = {j: k for k, j in enumerate(idx)}
    out = np.zeros_like(signal.coeffs)
    for k, j in enumerate(idx):
        src = pos.get(factor * j)
        if src is not None:
            out[k] = signal.coeffs[src]
    return out


@dataclass(frozen=True)
class DilateCheck:
    lhs: float
    mid: float
    rhs: float
    lower_const: float | None
    upper_const: float | None
    lower_ok: bool | None
    upper_ok: bool | None


def three_dilate_check(signal: BandlimitedSignal, sampling_set: SamplingSet,
                       lower_const: float | None = None,
                       upper_const: float | None = None,
                       slack: float = 1e-9) -> DilateCheck:
    """Dilation inequality data for one signal and one sampling set.

    lhs = integral over the spectrum of |F(g) + F(2g) + F(3g)|^2, divided by
    the norm of F; mid = sum over j = 1,2,3 of (1/j) times the root sampled
    energy of f(x/j) on the set; rhs = norm of F.  When constants are given,
    checks sqrt(lower_const) * lhs <= mid <= sqrt(upper_const) * rhs.  The lhs
    ratio is not scale-invariant; the inequality is checked exactly in this
    printed shape.  Requires a dilation-closed grid (see :func:`dilation_grid`).
    """
    grid = signal.grid
    w = grid.weights
    j_f = signal.coeffs + _dilate_coeffs(signal, 2) + _dilate_coeffs(signal, 3)
    norm_f = signal.norm()
    if norm_f == 0.0:
        return DilateCheck(0.0, 0.0, 0.0, lower_const, upper_const,
                           None if lower_const is None else True,
                           None if upper_const is None else True)
    lhs = float(np.sum(w * np.abs(j_f) ** 2)) / norm_f
    mid = 0.0
    for j in (1, 2, 3):
        ej = np.exp(2j * np.pi * ((sampling_set.points / j) @ grid.nodes.T))
        samples = ej @ (w * signal.coeffs)
        mid += (1.0 / j) * float(np.sqrt(np.sum(np.abs(samples) ** 2)))
    rhs = norm_f
    lower_ok = None if lower_const is None else bool(
        np.sqrt(lower_const) * lhs <= mid * (1.0 + slack))
    upper_ok = None if upper_const is None else bool(
        mid <= np.sqrt(upper_const) * rhs * (1.0 + slack))
    return DilateCheck(lhs=lhs, mid=mid, rhs=rhs, lower_const=lower_const,
                       upper_const=upper_const, lower_ok=lower_ok, upper_ok=upper_ok)


@dataclass(frozen=True)
class WeightedCheck:
    lhs: float
    mid: float
    rhs: float
    lower_ok: bool
    upper_ok: bool
    lower_const: float
    bessel_bound: float


def weighted_frame_check(signal: BandlimitedSignal, weight_values,
                         sampling_set: SamplingSet,
                         balayage_k: float, window_l2: float,
                         bessel_bound: float | None = None,
                         slack: float = 1e-9) -> WeightedCheck:
    """Weighted frame inequality data for one signal, weight, and set.

    lhs = A * (integral |F|^2 G)^2 / integral |F|^2 with A = 1/(K * ||h||_2)^2
    assembled from the measured balayage constant and the window norm;
    mid = sampled energy of (F G)-check on the set; rhs = B * sup(G)^2 *
    integral |F|^2 with B the upper frame (Bessel) bound of the set over the
    full grid.  Asserts lhs <= mid <= rhs up to the slack.
    """
    g_vals = np.asarray(weight_values, dtype=float)
    if g_vals.shape != (signal.grid.size,):
        raise ValueError("weight must be sampled on the signal grid")
    if np.any(g_vals < 0):
        raise ValueError("weight must be nonnegative")
    w = signal.grid.weights
    norm_sq = signal.norm_sq()
    a_const = 1.0 / (balayage_k * window_l2) ** 2
    weighted_energy = float(np.sum(w * np.abs(signal.coeffs) ** 2 * g_vals))
    lhs = a_const * weighted_energy**2 / norm_sq if norm_sq > 0 else 0.0
    fg = BandlimitedSignal(grid=signal.grid, coeffs=signal.coeffs * g_vals)
    sampled = analysis(fg, sampling_set).values
    mid = float(np.sum(np.abs(sampled) ** 2))
    if bessel_bound is None:
        bessel_bound = frame_bounds(sampling_set, signal.grid).upper
    rhs = bessel_bound * float(np.max(g_vals)) ** 2 * norm_sq
    return WeightedCheck(lhs=lhs, mid=mid, rhs=rhs,
                         lower_ok=bool(lhs <= mid * (1.0 + slack)),
                         upper_ok=bool(mid <= rhs * (1.0 + slack)),
                         lower_const=a_const, bessel_bound=bessel_bound)


# -- covering experiment -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoveringExperiment:
    covering: CoveringReport
    rho_ok: bool
    report: FrameReport

    @property
    def prediction_applies(self) -> bool:
        return self.covering.covered and self.rho_ok

    @property
    def frame_confirmed(self) -> bool:
        return self.report.lower > 0.0


def covering_frame_experiment(spectrum: SpectrumSet, sampling_set: SamplingSet,
                              rho: float, region, resolution: float,
                              grid_nodes: int = 64, margin: float = 5.0,
                              spacing: float | None = None) -> CoveringExperiment:
    """Covering criterion versus measured frame bounds on the shrunk spectrum.

    Checks that translates of the polar body by the sampling points cover the
    region, that rho < 1/4, and estimates frame bounds for the rho-scaled
    spectrum on an interior-tapered subspace.  When both the covering and the
    rho condition hold, the covering criterion predicts a positive lower
    bound; the report is attached either way.
    """
    polar = polar_set(spectrum)
    cov = covering_check(sampling_set, polar, region, resolution)
    rho_ok = rho < 0.25
    grid = build_grid(scale(spectrum, rho), grid_nodes)
    q = interior_taper_subspace(grid, sampling_set.window, margin=margin, spacing=spacing)
    report = frame_bounds(sampling_set, grid, subspace=q)
    return CoveringExperiment(covering=cov, rho_ok=rho_ok, report=report)


# -- binary dump ---------------------------------------------------------------


def dump_matrix(path, matrix: np.ndarray) -> None:
    """Dense row-major little-endian float64 dump with an int64 header
    (rows, cols, is_complex); complex matrices interleave re, im per entry."""
    m = np.ascontiguousarray(matrix)
    is_complex = np.iscomplexobj(m)
    header = np.array([m.shape[0], m.shape[1], int(is_complex)], dtype="<i8")
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        if is_complex:
            inter = np.empty((m.shape[0], m.shape[1] * 2), dtype="<f8")
            inter[:, 0::2] = m.real
            inter[:, 1::2] = m.imag
            fh.write(inter.tobytes())
        else:
            fh.write(m.astype("<f8").tobytes())


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = np.frombuffer(fh.read(24), dtype="<i8")
        rows, cols, is_complex = (int(v) for v in header)
        data = np.frombuffer(fh.read(), dtype="<f8")
    if is_complex:
        data = data.reshape(rows, cols * 2)
        return data[:, 0::2] + 1j * data[:, 1::2]
    return data.reshape(rows, cols)
