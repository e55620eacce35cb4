"""Truncated matrices of composition operators and their singular values.

In the orthonormal basis ``e_n = z**n / sqrt(omega_n)`` the operator
``C_phi f = f o phi`` has entries ``M[m, n] = sqrt(omega_m / omega_n) [z^m] phi^n``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError
from .symbol import SymbolSpec, normalize, taylor_powers
from .weight import WeightProfile, moments


@dataclass
class CompositionMatrix:
    entries: np.ndarray
    truncation: int
    tail_mass: np.ndarray  # per column, mass of rows m > N through the extended degree
    weight_label: str = ""
    symbol_label: str = ""

    @property
    def column_norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.entries) ** 2, axis=0)


@dataclass
class SingularSpectrum:
    values: np.ndarray
    truncation: int

    def __getitem__(self, k):
        return self.values[k]


def build_matrix(phi: SymbolSpec, w: WeightProfile, N: int, extended: int | None = None) -> CompositionMatrix:
    """``(N+1) x (N+1)`` matrix of ``C_phi``; column tails are measured up to ``extended``."""
    if int(N) != N or N < 0:
        raise InvalidInputError("N must be a non-negative integer")
    N = int(N)
    ext = int(extended) if extended is not None else 2 * N + 2
    if ext < N:
        raise InvalidInputError("extended degree must be at least N")
    powers = taylor_powers(phi, N, ext)
    om = moments(w, max(ext, 1)).values[: ext + 1]
    scale = np.sqrt(om[:, None] / om[None, : N + 1])
    full = powers * scale
    entries = full[: N + 1]
    tail = np.sum(np.abs(full[N + 1:]) ** 2, axis=0)
    return CompositionMatrix(entries, N, tail, w.label, phi.label)


def singular_values(M: CompositionMatrix) -> SingularSpectrum:
    """All singular values, non-increasing.

    The bidiagonal QR driver keeps small singular values of graded
    matrices (e.g. ``diag(r**n)``) to high relative accuracy.
    """
    s = scipy.linalg.svd(M.entries, compute_uv=False, lapack_driver="gesvd", check_finite=True)
    return SingularSpectrum(np.sort(s)[::-1], M.truncation)


@dataclass
class TrendReport:
    classification: str  # "decaying", "plateau", "inconclusive"
    N_list: tuple
    probe_index: tuple   # k used at each N
    probes: tuple        # s_k(N)
    s0: float
    spectra: dict = field(default_factory=dict)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["N", "k", "s_k"])
            for N in self.N_list:
                for k, s in enumerate(self.spectra[N]):
                    out.writerow([int(N), k, repr(float(s))])
        return path


DEFAULT_N_LIST = (64, 128, 256)


def classify_trend(probes, s0: float) -> str:
    last, prev = probes[-1], probes[-2]
    if last < 0.1 * s0 and last <= 0.5 * prev:
        return "decaying"
    if abs(last - prev) < 0.05 * max(abs(prev), 1e-300) and last > 0.3 * s0:
        return "plateau"
    return "inconclusive"


def compactness_trend(phi: SymbolSpec, w: WeightProfile, N_list=DEFAULT_N_LIST,
                      k_probe=None, normalized: bool = True) -> TrendReport:
    """Classify the behaviour of ``s_k`` as the truncation grows.

    ``k_probe`` is a fixed index, ``"half"`` for ``k = N // 2``, or ``None``
    for ``k = isqrt(N)``.  For a non-compact operator the number of
    truncated singular values near the essential norm grows only slowly
    with N, so ``N // 2`` decays even then; ``isqrt(N)`` stays on the
    plateau.  The symbol is normalized first (``phi(0) = 0``), which keeps
    compactness and makes the truncation exact on the basis range.
    """
    if normalized:
        phi = normalize(phi)
    N_list = tuple(int(n) for n in N_list)
    if len(N_list) < 2 or any(b <= a for a, b in zip(N_list, N_list[1:])) or N_list[0] < 2:
        raise InvalidInputError("N_list must hold at least two increasing truncations >= 2")
    spectra, probes, ks = {}, [], []
    for N in N_list:
        s = singular_values(build_matrix(phi, w, N)).values
        spectra[N] = s
        if k_probe is None:
            k = math.isqrt(N)
        elif k_probe == "half":
            k = N // 2
        else:
            k = int(k_probe)
        if not 0 <= k <= N:
            raise InvalidInputError("k_probe outside the spectrum")
        ks.append(k)
        probes.append(float(s[k]))
    s0 = float(spectra[N_list[-1]][0])
    cls = classify_trend(probes, s0) if s0 > 0 else "decaying"
    return TrendReport(cls, N_list, tuple(ks), tuple(probes), s0, spectra)
