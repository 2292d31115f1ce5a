"""Discretized Paley-Wiener space.

Bandlimited signals are stored frequency-first: a complex coefficient vector
on a spectral quadrature grid.  Time-domain values are always derived through
the inverse-transform quadrature

    f(x) = sum_k w_k F(g_k) exp(2 pi i x . g_k),

so quadrature error is the one controlled approximation in the model.
Trigonometric polynomials (finite character sums with frequencies inside the
spectrum) are kept separate because their time evaluation is exact.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .geometry import SpectralGrid, SpectrumSet, as_points, build_grid


@dataclass(frozen=True, eq=False)
class BandlimitedSignal:
    """Spectral coefficient vector over a grid; one coefficient per node."""

    grid: SpectralGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        object.__setattr__(self, "coeffs", c)
        if c.shape != (self.grid.size,):
            raise ValueError("coefficient length does not match grid size")

    @property
    def spectrum(self) -> SpectrumSet:
        return self.grid.spectrum

    def norm_sq(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.coeffs) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))


def evaluate(signal: BandlimitedSignal, x) -> complex | np.ndarray:
    """Time-domain value(s) sum_k w_k F_k exp(2 pi i x . g_k).

    Accepts a single point or an (m, dim) array; returns a complex scalar or
    an (m,) vector.  Summation runs in node-index order.
    """
    pts = as_points(x, signal.grid.spectrum.dim)
    phases = np.exp(2j * np.pi * (pts @ signal.grid.nodes.T))
    vals = phases @ (signal.grid.weights * signal.coeffs)
    if np.ndim(x) == 0 or (np.ndim(x) == 1 and signal.grid.spectrum.dim > 1):
        return complex(vals[0])
    return vals


def pw_inner(f: BandlimitedSignal, g: BandlimitedSignal) -> complex:
    """Weighted spectral inner product sum_k w_k F_k conj(G_k)."""
    if not f.grid.same_as(g.grid):
        raise ValueError("grid mismatch in pw_inner")
    return complex(np.sum(f.grid.weights * f.coeffs * np.conj(g.coeffs)))


def random_pw_signal(spectrum: SpectrumSet, nodes: int, seed: int) -> BandlimitedSignal:
    """Complex-normal coefficients on a fresh grid, normalized to unit norm."""
    grid = build_grid(spectrum, nodes)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    sig = BandlimitedSignal(grid=grid, coeffs=c)
    return BandlimitedSignal(grid=grid, coeffs=c / sig.norm())


def random_coeff_signal(grid: SpectralGrid, seed: int) -> BandlimitedSignal:
    """Unit-norm random signal on an existing grid."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    sig = BandlimitedSignal(grid=grid, coeffs=c)
    return BandlimitedSignal(grid=grid, coeffs=c / sig.norm())


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Finite character sum sum_j c_j exp(2 pi i x . l_j), l_j in the spectrum."""

    frequencies: np.ndarray   # (m, dim)
    coefficients: np.ndarray  # (m,) complex
    spectrum: SpectrumSet

    def __post_init__(self):
        freqs = as_points(self.frequencies, self.spectrum.dim)
        coefs = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coefs)
        if coefs.shape != (freqs.shape[0],):
            raise ValueError("coefficient/frequency length mismatch")
        if not np.all(self.spectrum.contains(freqs)):
            raise ValueError("trig polynomial frequency outside the spectrum")


def eval_trigpoly(poly: TrigPolynomial, x) -> complex | np.ndarray:
    """Exact evaluation (no quadrature)."""
    pts = as_points(x, poly.spectrum.dim)
    vals = np.exp(2j * np.pi * (pts @ poly.frequencies.T)) @ poly.coefficients
    if np.ndim(x) == 0 or (np.ndim(x) == 1 and poly.spectrum.dim > 1):
        return complex(vals[0])
    return vals


def random_trig_polynomial(spectrum: SpectrumSet, n_terms: int, seed: int) -> TrigPolynomial:
    """Random frequencies uniform over the spectrum, complex-normal coefficients."""
    rng = np.random.default_rng(seed)
    bbox = spectrum.bounding_box()
    freqs = np.empty((0, spectrum.dim))
    while freqs.shape[0] < n_terms:
        cand = rng.uniform(bbox[:, 0], bbox[:, 1], size=(4 * n_terms, spectrum.dim))
        cand = cand[spectrum.contains(cand)]
        freqs = np.vstack([freqs, cand])[:n_terms]
    coefs = rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)
    return TrigPolynomial(frequencies=freqs, coefficients=coefs, spectrum=spectrum)


# -- serialization ---------------------------------------------------------

def signal_to_json(signal: BandlimitedSignal) -> dict:
    return {
        "dim": signal.spectrum.dim,
        "spectrum": signal.spectrum.to_json(),
        "nodes": signal.grid.nodes.tolist(),
        "weights": signal.grid.weights.tolist(),
        "coeffs_re": signal.coeffs.real.tolist(),
        "coeffs_im": signal.coeffs.imag.tolist(),
    }


def signal_from_json(data: dict) -> BandlimitedSignal:
    spectrum = SpectrumSet.from_json(data["spectrum"])
    grid = SpectralGrid(nodes=np.asarray(data["nodes"], dtype=float),
                        weights=np.asarray(data["weights"], dtype=float),
                        spectrum=spectrum)
    coeffs = np.asarray(data["coeffs_re"], dtype=float) + 1j * np.asarray(data["coeffs_im"], dtype=float)
    return BandlimitedSignal(grid=grid, coeffs=coeffs)


def signal_save_json(signal: BandlimitedSignal, path) -> None:
    with open(path, "w") as fh:
        json.dump(signal_to_json(signal), fh, sort_keys=True)


def signal_to_csv(signal: BandlimitedSignal, path) -> None:
    """Columns: node coordinates, weight, coefficient real/imag parts."""
    dim = signal.spectrum.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"node_{i}" for i in range(dim)] + ["weight", "re", "im"])
        for node, w, c in zip(signal.grid.nodes, signal.grid.weights, signal.coeffs):
            writer.writerow(list(node) + [w, c.real, c.imag])


def signal_from_csv(path, spectrum: SpectrumSet) -> BandlimitedSignal:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        for row in reader:
            rows.append([float(c) for c in row])
    arr = np.asarray(rows, dtype=float)
    dim = spectrum.dim
    grid = SpectralGrid(nodes=arr[:, :dim], weights=arr[:, dim], spectrum=spectrum)
    return BandlimitedSignal(grid=grid, coeffs=arr[:, dim + 1] + 1j * arr[:, dim + 2])
