"""Irreducible character degrees by the Burnside-Dixon method.

The class-multiplication matrices of G commute and are simultaneously
diagonalisable over a prime field F_l with l = 1 (mod exponent(G)). Their
common eigenvectors are the central characters
omega_chi(C_k) = |C_k| chi(g_k) / chi(1), and column orthogonality gives
chi(1)^2 = |G| / sum_k omega(C_k) omega(C_k^-1) / |C_k|, which is lifted from
F_l to the unique integer in (0, sqrt|G|].
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf, gf_sqf_part

from .conjugacy import ConjugacyTable, conjugacy_classes
from .groups import FiniteGroup, is_prime

PRIME_SEARCH_LIMIT = 2**31
MAX_CLASSES = 200
CACHE_ENV = "QRLAB_CACHE_DIR"
SCHEMA_VERSION = 1


class CharacterError(RuntimeError):
    pass


class _Unbounded:
    """Quasirandomness degree of the trivial group (no non-trivial irreducibles)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "unbounded"


UNBOUNDED = _Unbounded()


@dataclass(frozen=True)
class CharacterTable:
    descriptor: str
    order: int
    class_count: int
    degrees: tuple[int, ...]

    @property
    def quasirandomness_degree(self) -> int | _Unbounded:
        nontrivial = sorted(self.degrees)[1:]
        return nontrivial[0] if nontrivial else UNBOUNDED

    def sum_of_squares(self) -> int:
        return sum(d * d for d in self.degrees)

    def to_json(self) -> dict:
        D = self.quasirandomness_degree
        return {
            "schema_version": SCHEMA_VERSION,
            "descriptor": self.descriptor,
            "order": self.order,
            "class_count": self.class_count,
            "degrees": list(self.degrees),
            "D": D if isinstance(D, int) else str(D),
        }


# -- structure constants -------------------------------------------------------

def class_structure_constants(classes: ConjugacyTable) -> np.ndarray:
    """a[i, j, k] = #{(x, y) in C_i x C_j : xy = z_k} for a fixed z_k in C_k."""
    G = classes.group
    r = classes.class_count
    a = np.zeros((r, r, r), dtype=np.int64)
    ci = classes.class_of
    for k, z in enumerate(classes.representatives):
        y = G.right(z)[G.inverse]          # y = x^-1 z for every x
        cj = classes.class_of[y]
        a[:, :, k] = np.bincount(ci * r + cj, minlength=r * r).reshape(r, r)
    return a


def dixon_prime(order: int, exponent: int, limit: int = PRIME_SEARCH_LIMIT) -> int:
    """Smallest prime l = 1 (mod exponent) with l > 2 sqrt(order)."""
    l = exponent + 1
    while l * l <= 4 * order or not is_prime(l):
        l += exponent
        if l > limit:
            raise CharacterError(f"no prime = 1 mod {exponent} below {limit}")
    return l


# -- linear algebra mod p --------------------------------------------------------

def _rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    A = A.copy() % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if len(others):
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def _nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {v : A v = 0} over F_p."""
    R, pivots = _rref(A, p)
    n = A.shape[1]
    free = [c for c in range(n) if c not in pivots]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        N[f, t] = 1
        for row, pc in enumerate(pivots):
            N[pc, t] = (-R[row, f]) % p
    return N


def _charpoly(M: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial (leading coefficient first) via Hessenberg form."""
    H = M.copy() % p
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(H[j + 1:, j])
        if len(nz) == 0:
            continue
        i = j + 1 + nz[0]
        if i != j + 1:
            H[[i, j + 1]] = H[[j + 1, i]]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        inv = pow(int(H[j + 1, j]), -1, p)
        for k in range(j + 2, n):
            if H[k, j]:
                t = int(H[k, j]) * inv % p
                H[k] = (H[k] - t * H[j + 1]) % p
                H[:, j + 1] = (H[:, j + 1] + t * H[:, k]) % p
    h = [[int(v) for v in row] for row in H]
    # polys[m] = charpoly of the leading m x m block, lowest degree first
    polys = [[1]]
    for m in range(1, n + 1):
        mm = m - 1
        prev = polys[-1]
        cur = [0] + prev
        for d, c in enumerate(prev):
            cur[d] = (cur[d] - h[mm][mm] * c) % p
        prod = 1
        for i in range(mm - 1, -1, -1):
            prod = prod * h[i + 1][i] % p
            if prod == 0:
                break
            coef = h[i][mm] * prod % p
            for d, c in enumerate(polys[i]):
                cur[d] = (cur[d] - coef * c) % p
        polys.append(cur)
    return polys[-1][::-1]


def _roots(poly: list[int], p: int) -> list[int]:
    sqf = gf_sqf_part([c % p for c in poly], p, ZZ)
    _, factors = gf_factor_sqf(sqf, p, ZZ)
    roots = []
    for f in factors:
        if len(f) == 2:
            roots.append(int(-f[1] * pow(int(f[0]), -1, p) % p))
    return sorted(roots)


def _normalise(B: np.ndarray, p: int) -> np.ndarray:
    R, _ = _rref(B.T, p)
    return R[: B.shape[1]].T.copy()


def _split(B: np.ndarray, M: np.ndarray, p: int) -> list[np.ndarray]:
    """Split the M-invariant span of B's columns into M-eigenspaces."""
    _, pivots = _rref(B.T, p)
    MB = M @ B % p
    R = MB[pivots]                    # B[pivots] is the identity after _normalise
    s = B.shape[1]
    eigvals = _roots(_charpoly(R, p), p)
    pieces = []
    for lam in eigvals:
        N = _nullspace((R - lam * np.eye(s, dtype=np.int64)) % p, p)
        if N.shape[1]:
            pieces.append(_normalise(B @ N % p, p))
    if sum(piece.shape[1] for piece in pieces) != s:
        raise CharacterError("class-algebra matrix is not diagonalisable over F_l")
    return pieces


def central_characters(a: np.ndarray, p: int, seed: int = 0) -> list[np.ndarray]:
    """Common eigenvectors of the class matrices M_i[j, k] = a[i, j, k] mod p,
    scaled so the identity-class entry is 1."""
    r = a.shape[0]
    mats = [a[i] % p for i in range(r)]
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(0, p, size=r)
    combo = sum(int(c) * m for c, m in zip(coeffs, mats)) % p
    spaces = _split(np.eye(r, dtype=np.int64), combo, p)
    for M in mats[1:]:
        if len(spaces) == r:
            break
        refined = []
        for B in spaces:
            refined.extend(_split(B, M, p) if B.shape[1] > 1 else [B])
        spaces = refined
    if len(spaces) != r:
        raise CharacterError("eigenspaces of the class algebra did not separate")
    out = []
    for B in spaces:
        v = B[:, 0] % p
        if v[0] == 0:
            raise CharacterError("central character vanishes on the identity class")
        out.append(v * pow(int(v[0]), -1, p) % p)
    return out


def _lift_degree(omega: np.ndarray, classes: ConjugacyTable, p: int) -> int:
    n = classes.group.order
    inv_cls = classes.inverse_class
    total = 0
    for k, size in enumerate(classes.class_sizes):
        total = (total + int(omega[k]) * int(omega[inv_cls[k]]) * pow(size, -1, p)) % p
    d_sq = n * pow(total, -1, p) % p
    for d in range(1, math.isqrt(n) + 1):
        if d * d % p == d_sq:
            return d
    raise CharacterError("character degree does not lift to an integer <= sqrt|G|")


def character_degrees(G: FiniteGroup, classes: ConjugacyTable | None = None,
                      seed: int = 0) -> CharacterTable:
    classes = classes or conjugacy_classes(G)
    r = classes.class_count
    if r > MAX_CLASSES:
        raise CharacterError(f"{r} classes exceeds the class-algebra cap {MAX_CLASSES}")
    p = dixon_prime(G.order, G.exponent)
    omegas = central_characters(class_structure_constants(classes), p, seed)
    degrees = tuple(sorted(_lift_degree(w, classes, p) for w in omegas))
    return CharacterTable(G.descriptor, G.order, r, degrees)


def quasirandomness_degree(G: FiniteGroup, classes: ConjugacyTable | None = None):
    """Smallest degree of a non-trivial irreducible; UNBOUNDED for the trivial group."""
    return character_degrees(G, classes).quasirandomness_degree


# -- content-addressed cache -------------------------------------------------------

def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "qrlab"))


def _cache_path(descriptor: str, directory: Path) -> Path:
    key = hashlib.sha256(descriptor.encode()).hexdigest()[:32]
    return directory / f"chartab-{key}.json"


def _valid_entry(data: dict, G: FiniteGroup) -> bool:
    try:
        degrees = [int(d) for d in data["degrees"]]
        return (data["descriptor"] == G.descriptor
                and int(data["order"]) == G.order
                and len(degrees) == int(data["class_count"])
                and sum(d * d for d in degrees) == G.order
                and all(d >= 1 and G.order % d == 0 for d in degrees))
    except (KeyError, TypeError, ValueError):
        return False


def cached_character_degrees(G: FiniteGroup, directory: Path | None = None,
                             classes: ConjugacyTable | None = None) -> CharacterTable:
    """character_degrees backed by a JSON cache; bad entries are recomputed."""
    directory = Path(directory) if directory is not None else cache_dir()
    path = _cache_path(G.descriptor, directory)
    if path.exists():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            data = None
        if isinstance(data, dict) and _valid_entry(data, G):
            return CharacterTable(G.descriptor, G.order, int(data["class_count"]),
                                  tuple(sorted(int(d) for d in data["degrees"])))
    table = character_degrees(G, classes)
    directory.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".tmp{os.getpid()}")
    tmp.write_text(json.dumps(table.to_json(), sort_keys=True))
    os.replace(tmp, path)
    return table
