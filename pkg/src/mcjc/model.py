"""Lattice problem definition for the multiconnected Jaynes-Cummings chain.

A lattice of ``L`` unit cells is stored as a chain of ``2L`` sites in the
order ``[qubit_1, cavity_1, qubit_2, cavity_2, ...]``, so that every
qubit-cavity coupling is nearest-neighbour on the chain (the single
wrap-around bond excepted, for periodic boundaries).  Each site carries a
polariton charge label per basis state (qubit: down=0/up=1, cavity: photon
number), and the total charge is conserved by every Hamiltonian term.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

BOUNDARIES = ("open", "periodic")

# Qubit basis order: index 0 = down, 1 = up.  Cavity basis order: photon
# number 0..n_max.  With these orders the local basis index equals the local
# polariton charge on both site kinds, and "lexicographic in local charges"
# coincides with plain mixed-radix state enumeration.


@dataclass(frozen=True)
class ModelParams:
    """Physical and numerical specification of one lattice problem.

    Energies are dimensionless; the natural convention is omega_c = 1.
    The detuning ``delta = omega_z - omega_c`` is derived, never stored.
    """

    L: int
    omega_c: float = 1.0
    omega_z: float = 1.0
    g_l: float = 0.015
    g_r: float = 0.015
    n_max: int = 5
    boundary: str = "open"

    def __post_init__(self):
        if self.L < 2:
            raise ValueError(f"L must be >= 2, got {self.L}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")
        if self.g_l < 0 or self.g_r < 0:
            raise ValueError("couplings g_l, g_r must be non-negative")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def delta(self) -> float:
        return self.omega_z - self.omega_c

    @property
    def n_sites(self) -> int:
        return 2 * self.L

    @property
    def max_charge(self) -> int:
        return self.L * (self.n_max + 1)

    def site_basis(self, site: int) -> "SiteBasis":
        if not 0 <= site < self.n_sites:
            raise IndexError(f"site {site} out of range for chain of {self.n_sites} sites")
        return qubit_basis() if site % 2 == 0 else cavity_basis(self.n_max)

    def site_bases(self) -> list["SiteBasis"]:
        return [self.site_basis(s) for s in range(self.n_sites)]

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown ModelParams keys: {sorted(unknown)}")
        missing = {"L"} - set(data)
        if missing:
            raise ValueError(f"missing ModelParams keys: {sorted(missing)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("ModelParams JSON must be a flat object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class SiteBasis:
    """Local basis of one chain site with per-state polariton charges."""

    kind: str  # "qubit" or "cavity"
    dim: int
    charge_of_state: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("qubit", "cavity"):
            raise ValueError(f"unknown site kind {self.kind!r}")
        if len(self.charge_of_state) != self.dim:
            raise ValueError("charge_of_state length must equal dim")
        if any(q < 0 for q in self.charge_of_state):
            raise ValueError("charges must be non-negative")


def qubit_basis() -> SiteBasis:
    return SiteBasis(kind="qubit", dim=2, charge_of_state=(0, 1))


def cavity_basis(n_max: int) -> SiteBasis:
    return SiteBasis(kind="cavity", dim=n_max + 1, charge_of_state=tuple(range(n_max + 1)))


# ---------------------------------------------------------------------------
# Charge-sector layouts and blocked operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SectorLayout:
    """Ordered list of (charge, dimension) sectors of a basis."""

    sectors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        charges = [c for c, _ in self.sectors]
        if charges != sorted(charges) or len(set(charges)) != len(charges):
            raise ValueError("sectors must have strictly increasing charges")
        if any(d <= 0 for _, d in self.sectors):
            raise ValueError("sector dimensions must be positive")

    def __iter__(self):
        return iter(self.sectors)

    def __len__(self):
        return len(self.sectors)

    @property
    def charges(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.sectors)

    @property
    def total_dim(self) -> int:
        return sum(d for _, d in self.sectors)

    def dim(self, charge: int) -> int:
        for c, d in self.sectors:
            if c == charge:
                return d
        return 0

    def offset(self, charge: int) -> int:
        """Offset of a sector in the charge-sorted dense ordering."""
        off = 0
        for c, d in self.sectors:
            if c == charge:
                return off
            off += d
        raise KeyError(f"no sector with charge {charge}")


def site_layout(basis: SiteBasis) -> SectorLayout:
    # One state per charge on both site kinds.
    return SectorLayout(tuple((q, 1) for q in basis.charge_of_state))


@dataclass
class BlockedOperator:
    """Charge-conserving-up-to-shift operator stored as dense sector blocks.

    ``blocks`` is keyed by (row charge, col charge); every stored block must
    satisfy row charge = col charge + charge_shift.  The adjoint of a
    shift-q operator has shift -q.
    """

    row_sectors: SectorLayout
    col_sectors: SectorLayout
    charge_shift: int
    blocks: dict[tuple[int, int], np.ndarray]

    def __post_init__(self):
        for (rc, cc), mat in self.blocks.items():
            if rc - cc != self.charge_shift:
                raise ValueError(
                    f"block ({rc},{cc}) inconsistent with charge shift {self.charge_shift}"
                )
            if mat.shape != (self.row_sectors.dim(rc), self.col_sectors.dim(cc)):
                raise ValueError(f"block ({rc},{cc}) has shape {mat.shape}, layout disagrees")

    def block(self, col_charge: int):
        return self.blocks.get((col_charge + self.charge_shift, col_charge))

    def adjoint(self) -> "BlockedOperator":
        blocks = {(cc, rc): mat.T.copy() for (rc, cc), mat in self.blocks.items()}
        return BlockedOperator(
            row_sectors=self.col_sectors,
            col_sectors=self.row_sectors,
            charge_shift=-self.charge_shift,
            blocks=blocks,
        )

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.row_sectors.total_dim, self.col_sectors.total_dim))
        for (rc, cc), mat in self.blocks.items():
            r0 = self.row_sectors.offset(rc)
            c0 = self.col_sectors.offset(cc)
            out[r0 : r0 + mat.shape[0], c0 : c0 + mat.shape[1]] = mat
        return out

    @classmethod
    def identity(cls, layout: SectorLayout) -> "BlockedOperator":
        blocks = {(c, c): np.eye(d) for c, d in layout}
        return cls(layout, layout, 0, blocks)


# Dense single-site operators, basis order as documented above.


def _qubit_ops() -> dict[str, np.ndarray]:
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # sigma^+ = |up><down|
    return {
        "sigma_plus": sp,
        "sigma_minus": sp.T.copy(),
        "sigma_z": np.diag([-1.0, 1.0]),
        "number": np.diag([0.0, 1.0]),  # sigma^+ sigma^-
    }


def _cavity_ops(n_max: int) -> dict[str, np.ndarray]:
    n = np.arange(n_max + 1, dtype=float)
    a = np.diag(np.sqrt(n[1:]), k=1)
    return {
        "a": a,
        "a_dagger": a.T.copy(),
        "number": np.diag(n),
    }


_OP_SHIFTS = {
    "sigma_plus": +1,
    "sigma_minus": -1,
    "sigma_z": 0,
    "a": -1,
    "a_dagger": +1,
    "number": 0,
}


def site_operator_dense(basis: SiteBasis, name: str) -> np.ndarray:
    ops = _qubit_ops() if basis.kind == "qubit" else _cavity_ops(basis.dim - 1)
    if name not in ops:
        raise KeyError(f"operator {name!r} not defined on a {basis.kind} site")
    return ops[name]

def operator_charge_shift(name: str) -> int:
    return _OP_SHIFTS[name]


def site_operator(basis: SiteBasis, name: str) -> BlockedOperator:
    """Single-site operator as a BlockedOperator over the site's charge layout."""
    dense = site_operator_dense(basis, name)
    shift = operator_charge_shift(name)
    layout = site_layout(basis)
    blocks = {}
    charges = basis.charge_of_state
    for col, qc in enumerate(charges):
        for row, qr in enumerate(charges):
            if dense[row, col] != 0.0:
                if qr - qc != shift:
                    raise AssertionError("site operator violates its declared charge shift")
                blocks[(qr, qc)] = np.array([[dense[row, col]]])
    return BlockedOperator(layout, layout, shift, blocks)


# ---------------------------------------------------------------------------
# Hamiltonian terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalTerm:
    """One term of the lattice Hamiltonian.

    One-site terms are Hermitian as stored.  Two-site terms stand for
    ``coefficient * (ops[0]_i ops[1]_j + h.c.)`` with sites in chain order
    (the wrap-around bond is stored as (last site, 0)); ops[0] lowers the
    left site's charge and ops[1] raises the right site's charge.
    """

    sites: tuple[int, ...]
    coefficient: float
    ops: tuple[str, ...]

    def __post_init__(self):
        if len(self.sites) != len(self.ops) or len(self.sites) not in (1, 2):
            raise ValueError("a term couples one or two sites")


def build_local_terms(params: ModelParams) -> list[LocalTerm]:
    """All Hamiltonian terms: on-site qubit/cavity energies plus g_l/g_r bonds."""
    terms: list[LocalTerm] = []
    for i in range(params.L):
        q, c = 2 * i, 2 * i + 1
        terms.append(LocalTerm((q,), params.omega_z / 2.0, ("sigma_z",)))
        terms.append(LocalTerm((c,), params.omega_c, ("number",)))
    for i in range(params.L):
        # intra-cell bond, qubit_i -- cavity_i
        terms.append(LocalTerm((2 * i, 2 * i + 1), params.g_r, ("sigma_minus", "a_dagger")))
    for i in range(params.L - 1):
        # inter-cell bond, cavity_i -- qubit_{i+1}
        terms.append(LocalTerm((2 * i + 1, 2 * i + 2), params.g_l, ("a", "sigma_plus")))
    if params.boundary == "periodic":
        terms.append(LocalTerm((params.n_sites - 1, 0), params.g_l, ("a", "sigma_plus")))
    return terms


# ---------------------------------------------------------------------------
# Basis enumeration (full and fixed-charge)
# ---------------------------------------------------------------------------

DEFAULT_DIMENSION_CAP = 200_000


def full_dimension(params: ModelParams) -> int:
    return 2**params.L * (params.n_max + 1) ** params.L


def enumerate_sector_states(params: ModelParams, n_total: int) -> np.ndarray:
    """Product states with total charge ``n_total``, lexicographic in local charges.

    Returns an integer array of shape (dim, 2L); row order is the documented
    canonical sector order (site 0 most significant).
    """
    if n_total < 0 or n_total > params.max_charge:
        raise ValueError(
            f"sector N={n_total} outside [0, {params.max_charge}] for these params"
        )
    bases = params.site_bases()
    maxima = [b.dim - 1 for b in bases]
    # max charge attainable by sites k..end, used to prune the search
    tail_max = np.concatenate([np.cumsum(maxima[::-1])[::-1], [0]])
    states: list[tuple[int, ...]] = []
    state = [0] * len(bases)

    def fill(k: int, remaining: int):
        if k == len(bases):
            states.append(tuple(state))
            return
        lo = max(0, remaining - int(tail_max[k + 1]))
        hi = min(maxima[k], remaining)
        for v in range(lo, hi + 1):
            state[k] = v
            fill(k + 1, remaining - v)
        state[k] = 0

    fill(0, n_total)
    return np.array(states, dtype=np.int64).reshape(len(states), len(bases))


def _state_codes(digits: np.ndarray, dims: list[int]) -> np.ndarray:
    """Mixed-radix encoding (site 0 most significant) of rows of ``digits``."""
    codes = np.zeros(len(digits), dtype=np.int64)
    for k, d in enumerate(dims):
        codes = codes * d + digits[:, k]
    return codes


def term_matrix_elements(
    term: LocalTerm,
    params: ModelParams,
    digits: np.ndarray,
    include_adjoint: bool = True,
):
    """Matrix elements of a term over an enumerated basis.

    Returns (rows, cols, vals) index arrays relative to the row order of
    ``digits``; for two-site terms the Hermitian-conjugate bond partner is
    included when ``include_adjoint``.  Target states outside the enumerated
    set (possible only if the basis is not charge-complete) are dropped.
    """
    bases = params.site_bases()
    dims = [b.dim for b in bases]
    codes = _state_codes(digits, dims)
    order = np.argsort(codes, kind="stable")
    sorted_codes = codes[order]

    # mixed-radix weight of each site
    weights = np.ones(len(dims), dtype=np.int64)
    for k in range(len(dims) - 2, -1, -1):
        weights[k] = weights[k + 1] * dims[k + 1]

    mats = [site_operator_dense(bases[s], op) for s, op in zip(term.sites, term.ops)]
    pairs = [list(zip(*np.nonzero(m))) for m in mats]

    variants = [(mats, term.sites)]
    if len(term.sites) == 2 and include_adjoint:
        variants.append(([m.T for m in mats], term.sites))

    rows_out, cols_out, vals_out = [], [], []
    for vmats, vsites in variants:
        vpairs = [list(zip(*np.nonzero(m))) for m in vmats]
        if len(vsites) == 1:
            (s0,) = vsites
            for r0, c0 in vpairs[0]:
                mask = digits[:, s0] == c0
                if not mask.any():
                    continue
                src = np.nonzero(mask)[0]
                tgt_codes = codes[src] + (r0 - c0) * weights[s0]
                pos = np.searchsorted(sorted_codes, tgt_codes)
                ok = (pos < len(sorted_codes)) & (sorted_codes[np.minimum(pos, len(sorted_codes) - 1)] == tgt_codes)
                rows_out.append(order[pos[ok]])
                cols_out.append(src[ok])
                vals_out.append(np.full(ok.sum(), term.coefficient * vmats[0][r0, c0]))
        else:
            s0, s1 = vsites
            for r0, c0 in vpairs[0]:
                for r1, c1 in vpairs[1]:
                    mask = (digits[:, s0] == c0) & (digits[:, s1] == c1)
                    if not mask.any():
                        continue
                    src = np.nonzero(mask)[0]
                    tgt_codes = (
                        codes[src]
                        + (r0 - c0) * weights[s0]
                        + (r1 - c1) * weights[s1]
                    )
                    pos = np.searchsorted(sorted_codes, tgt_codes)
                    ok = (pos < len(sorted_codes)) & (
                        sorted_codes[np.minimum(pos, len(sorted_codes) - 1)] == tgt_codes
                    )
                    val = term.coefficient * vmats[0][r0, c0] * vmats[1][r1, c1]
                    rows_out.append(order[pos[ok]])
                    cols_out.append(src[ok])
                    vals_out.append(np.full(ok.sum(), val))

    if not rows_out:
        z = np.zeros(0, dtype=np.int64)
        return z, z, np.zeros(0)
    return (
        np.concatenate(rows_out),
        np.concatenate(cols_out),
        np.concatenate(vals_out),
    )


def build_dense_hamiltonian(
    params: ModelParams,
    sector: int | None = None,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> np.ndarray:
    """Materialize H as a dense Hermitian matrix, optionally in one charge sector."""
    if sector is None:
        dim = full_dimension(params)
        if dim > dimension_cap:
            raise ValueError(f"full dimension {dim} exceeds cap {dimension_cap}")
        bases = params.site_bases()
        dims = [b.dim for b in bases]
        digits = np.zeros((dim, len(dims)), dtype=np.int64)
        idx = np.arange(dim)
        for k in range(len(dims) - 1, -1, -1):
            digits[:, k] = idx % dims[k]
            idx //= dims[k]
    else:
        digits = enumerate_sector_states(params, sector)
        if len(digits) > dimension_cap:
            raise ValueError(f"sector dimension {len(digits)} exceeds cap {dimension_cap}")

    dim = len(digits)
    h = np.zeros((dim, dim))
    for term in build_local_terms(params):
        rows, cols, vals = term_matrix_elements(term, params, digits)
        np.add.at(h, (rows, cols), vals)
    return h


def total_number_operator(params: ModelParams) -> BlockedOperator:
    """Total polariton number over the full product basis, blocked by charge.

    Diagonal in the charge-labelled basis with eigenvalue equal to the
    sector charge; commutes with every Hamiltonian term.
    """
    counts: dict[int, int] = {}
    bases = params.site_bases()

    # number of product states per total charge, by convolution
    dist = {0: 1}
    for b in bases:
        new: dict[int, int] = {}
        for c, m in dist.items():
            for q in b.charge_of_state:
                new[c + q] = new.get(c + q, 0) + m
        dist = new
    counts = dist

    layout = SectorLayout(tuple(sorted((c, m) for c, m in counts.items())))
    blocks = {(c, c): float(c) * np.eye(d) for c, d in layout}
    return BlockedOperator(layout, layout, 0, blocks)


def total_number_dense(params: ModelParams, digits: np.ndarray) -> np.ndarray:
    """Diagonal of N_t over an enumerated basis (charges summed per state)."""
    charges = np.zeros(len(digits), dtype=np.int64)
    for k, b in enumerate(params.site_bases()):
        charges += np.asarray(b.charge_of_state)[digits[:, k]]
    return charges.astype(float)
