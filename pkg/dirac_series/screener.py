"""Non-unitarity screening: the Dirac inequality along Vogan pencils, the Helgason-Johnson type bound on nu,
and the enumeration of the candidate infinitesimal characters."""
import logging
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from dirac_series import norms, rootdata
from dirac_series.file_utils import rational_from_str, rational_to_str, read_json
from dirac_series.norms import KTypeWeight, calculator
from dirac_series.rootdata import AMBIENT_DIM, RANK, Frame, Weight, dot, mat_vec

logger = logging.getLogger(__name__)

NU_BOUND = Fraction(157, 2)  # strict upper bound on |nu|^2 for FS-scattered members
LAMBDA_GAP = NU_BOUND  # spin^2 - lambda^2 threshold defining the Certs set
# zeta-coordinate pairs of which at least one coordinate must be positive
POSITIVE_PAIRS = ((0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6))
PHI_MAX_COORD = 12
DEFAULT_PENCIL_CAP = 50


@dataclass(frozen=True)
class InfChar:
    zeta_coords: Tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.zeta_coords)
        if len(coords) != RANK:
            raise ValueError("an infinitesimal character has %d zeta coordinates, got %r" % (RANK, list(coords)))
        object.__setattr__(self, 'zeta_coords', coords)

    @property
    def integral(self) -> bool:
        return all(c >= 0 and c.denominator == 1 for c in self.zeta_coords)

    @classmethod
    def parse(cls, text: str) -> 'InfChar':
        text = text.strip().lstrip('[').rstrip(']')
        try:
            return cls(tuple(rational_from_str(part) for part in text.split(',')))
        except ValueError as e:
            raise ValueError("cannot read an infinitesimal character from %r: %s" % (text, e))

    def weight(self) -> Weight:
        return Weight(self.zeta_coords, Frame.ZETA)

    def norm_sq(self) -> Fraction:
        return rootdata.norm_sq(self.weight())

    def __iter__(self):
        return iter(self.zeta_coords)

    def __str__(self):
        return str(self.weight())

    def to_json(self):
        return [rational_to_str(c) for c in self.zeta_coords]


def _check_g_dominant(inf_char: InfChar):
    if any(c < 0 for c in inf_char.zeta_coords):
        raise ValueError("infinitesimal character %s is not dominant for g" % inf_char)


# ---------------------------------------------------------------- involutions

class InvolutionError(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__("involution #%d: %s" % (index, reason))
        self.index = index


@dataclass(frozen=True)
class InvolutionMatrix:
    matrix: rootdata.Matrix
    source_tag: str = ''

    def validate(self, index: int = 0) -> 'InvolutionMatrix':
        m = self.matrix
        if len(m) != AMBIENT_DIM or any(len(row) != AMBIENT_DIM for row in m):
            raise InvolutionError(index, "expected an %dx%d matrix" % (AMBIENT_DIM, AMBIENT_DIM))
        identity = tuple(tuple(Fraction(int(i == j)) for j in range(AMBIENT_DIM)) for i in range(AMBIENT_DIM))
        columns = tuple(zip(*m))
        if tuple(tuple(dot(row, col) for col in columns) for row in m) != identity:
            raise InvolutionError(index, "matrix does not square to the identity")
        if tuple(tuple(dot(a, b) for b in columns) for a in columns) != identity:
            raise InvolutionError(index, "matrix does not preserve the form B")
        tables = rootdata.build_e7_tables()
        if any(mat_vec(m, r) not in tables.root_set for r in tables.g_roots):
            raise InvolutionError(index, "matrix does not permute the roots")
        return self

    def act_zeta(self, labels: Sequence) -> rootdata.Vector:
        return rootdata.ambient_to_zeta(mat_vec(self.matrix, rootdata.zeta_to_ambient(labels)))

    def to_json(self):
        return {'matrix': [[rational_to_str(v) for v in row] for row in self.matrix], 'tag': self.source_tag}


def load_involutions(path: str) -> List[InvolutionMatrix]:
    data = read_json(path)
    if not isinstance(data, list):
        raise InvolutionError(0, "the involution file must hold a JSON array")
    result = []
    for index, item in enumerate(data):
        try:
            matrix = tuple(tuple(rational_from_str(v) for v in row) for row in item['matrix'])
        except (KeyError, TypeError, ValueError) as e:
            raise InvolutionError(index, "unreadable entry (%s)" % e)
        result.append(InvolutionMatrix(matrix, item.get('tag', '')).validate(index))
    logger.info('loaded %d involutions from %s', len(result), path)
    return result


# ---------------------------------------------------------------- Dirac inequality and pencils

class ScreenStatus(Enum):
    PASSES_EQUALITY = 'PassesEquality'
    PASSES_STRICT = 'PassesStrict'
    FAILS_DIRAC_INEQUALITY = 'FailsDiracInequality'
    FAILS_HJ_BOUND = 'FailsHJBound'
    INCONCLUSIVE = 'Inconclusive'


@dataclass(frozen=True)
class ScreenVerdict:
    status: ScreenStatus
    inf_char_norm_sq: Fraction
    witness: Optional[Tuple[KTypeWeight, int, Fraction]] = None  # (K-type, pencil index, spin norm^2)

    def to_json(self):
        result = {'status': self.status.value, 'inf_char_norm_sq': self.inf_char_norm_sq}
        if self.witness is not None:
            mu, n, spin = self.witness
            result['witness'] = {'ktype': mu.to_json(), 'n': n, 'spin_norm_sq': spin}
        return result


def dirac_inequality_check(mu: KTypeWeight, inf_char: InfChar) -> ScreenVerdict:
    _check_g_dominant(inf_char)
    spin, _ = norms.spin_norm_sq(mu)
    target = inf_char.norm_sq()
    if spin == target:
        status = ScreenStatus.PASSES_EQUALITY
    elif spin > target:
        status = ScreenStatus.PASSES_STRICT
    else:
        status = ScreenStatus.FAILS_DIRAC_INEQUALITY
    return ScreenVerdict(status, target, (mu, 0, spin))


def screen(mu: KTypeWeight, inf_char: InfChar, involutions: Optional[Sequence[InvolutionMatrix]] = None,
           cap: int = DEFAULT_PENCIL_CAP) -> ScreenVerdict:
    """Screens an infinite-dimensional module with infinitesimal character `inf_char` that contains mu.

    Such a module contains the whole pencil mu + n beta, so it fails as soon as one member has spin norm
    below |Lambda|. The nu-bound runs first when involutions are supplied. The witness is the member of
    smallest spin norm; a scan that reaches `cap` without a violation is inconclusive.
    """
    target = inf_char.norm_sq()
    if involutions is not None and not hj_filter(inf_char, involutions):
        return ScreenVerdict(ScreenStatus.FAILS_HJ_BOUND, target)
    _check_g_dominant(inf_char)
    pencil = pencil_min_spin(mu, inf_char, cap=cap)
    witness = (mu.shifted(pencil.n_star), pencil.n_star, pencil.min_spin_norm_sq)
    if pencil.min_spin_norm_sq < target:
        status = ScreenStatus.FAILS_DIRAC_INEQUALITY
    elif not pencil.conclusive:
        status = ScreenStatus.INCONCLUSIVE
    elif pencil.min_spin_norm_sq == target:
        status = ScreenStatus.PASSES_EQUALITY
    else:
        status = ScreenStatus.PASSES_STRICT
    return ScreenVerdict(status, target, witness)


@dataclass(frozen=True)
class PencilResult:
    ktype: KTypeWeight
    n_star: int
    min_spin_norm_sq: Fraction
    profile: Tuple[Fraction, ...]
    conclusive: bool
    equality_ns: Tuple[int, ...]

    def to_json(self):
        return {
            'ktype': self.ktype.to_json(),
            'n_star': self.n_star,
            'min_spin_norm_sq': self.min_spin_norm_sq,
            'profile': list(self.profile),
            'conclusive': self.conclusive,
            'equality_ns': list(self.equality_ns),
        }


def pencil_min_spin(mu: KTypeWeight, inf_char: InfChar, cap: int = DEFAULT_PENCIL_CAP, early_stop: bool = True) -> PencilResult:
    """Spin norms along the pencil mu + n beta, n = 0..cap.

    The scan stops at the first n whose value strictly exceeds both the running minimum and |Lambda|^2;
    past that point the profile only grows. A scan that reaches `cap` first is inconclusive.
    """
    if cap < 0:
        raise ValueError("pencil cap must be non-negative, got %d" % cap)
    target = inf_char.norm_sq()
    calc = calculator()
    profile = []
    conclusive = False
    for n in range(cap + 1):
        value, _ = calc.spin_norm_sq(mu.shifted(n).varpi_coords)
        if early_stop and profile and value > min(profile) and value > target:
            profile.append(value)
            conclusive = True
            break
        profile.append(value)
    minimum = min(profile)
    return PencilResult(
        ktype=mu,
        n_star=profile.index(minimum),
        min_spin_norm_sq=minimum,
        profile=tuple(profile),
        conclusive=conclusive,
        equality_ns=tuple(n for n, v in enumerate(profile) if v == target),
    )


# ---------------------------------------------------------------- nu bounds

def nu_norm_sq(nu: Sequence) -> Fraction:
    return rootdata.norm_sq(Weight(tuple(nu), Frame.ZETA))


def hj_filter(inf_char: InfChar, involutions: Optional[Sequence[InvolutionMatrix]] = None) -> bool:
    """Whether some involution theta leaves |(Lambda - theta Lambda)/2|^2 < 157/2.

    Without an involution list every involution of W(g) is allowed; the identity gives nu = 0, so the
    filter passes everything and only bounds the exact filter from above.
    """
    _check_g_dominant(inf_char)
    if involutions is None:
        return True
    labels = inf_char.zeta_coords
    for theta in involutions:
        nu = [(a - b) / 2 for a, b in zip(labels, theta.act_zeta(labels))]
        if nu_norm_sq(nu) < NU_BOUND:
            return True
    return False


def _nu_forms(involutions: Sequence[InvolutionMatrix]) -> List[Tuple[np.ndarray, int]]:
    # |nu|^2 < 157/2  <=>  Lambda^T (G - G_theta) Lambda < 157, scaled to integers by the common denominator
    tables = rootdata.build_e7_tables()
    forms = []
    for theta in involutions:
        images = [mat_vec(theta.matrix, z) for z in tables.fw_g]
        q = [[tables.gram_zeta[i][k] - dot(tables.fw_g[i], images[k]) for k in range(RANK)] for i in range(RANK)]
        denominator = lcm(*(v.denominator for row in q for v in row))
        forms.append((np.array([[int(v * denominator) for v in row] for row in q], dtype=np.int64), denominator))
    return forms


def _phi_block(max_coord: int, first: int, forms=None) -> np.ndarray:
    axes = np.arange(max_coord + 1, dtype=np.int16)
    rest = np.stack(np.meshgrid(*([axes] * (RANK - 1)), indexing='ij'), axis=-1).reshape(-1, RANK - 1)
    grid = np.concatenate([np.full((rest.shape[0], 1), first, dtype=np.int16), rest], axis=1)
    keep = (grid.max(axis=1) == max_coord) & (grid.min(axis=1) == 0)
    for i, j in POSITIVE_PAIRS:
        keep &= (grid[:, i] + grid[:, j]) > 0
    grid = grid[keep]
    if forms is not None:
        wide = grid.astype(np.int64)
        passes = np.zeros(grid.shape[0], dtype=bool)
        for q, denominator in forms:
            passes |= np.einsum('ni,ij,nj->n', wide, q, wide) < 157 * denominator
        grid = grid[passes]
    return grid


def enumerate_inf_chars(max_coord: int, involutions: Optional[Sequence[InvolutionMatrix]] = None) -> List[InfChar]:
    '''Integral infinitesimal characters with largest zeta coordinate `max_coord` that pass the
    coefficient conditions (and the nu-bound when involutions are given).'''
    if max_coord < 1:
        raise ValueError("max_coord must be at least 1, got %d" % max_coord)
    forms = _nu_forms(involutions) if involutions is not None else None
    rows = [row for first in range(max_coord + 1) for row in _phi_block(max_coord, first, forms).tolist()]
    return [InfChar(tuple(row)) for row in sorted(rows)]


def phi_counts(max_coord_limit: int = PHI_MAX_COORD,
               involutions: Optional[Sequence[InvolutionMatrix]] = None, progress: bool = True) -> Dict[int, int]:
    forms = _nu_forms(involutions) if involutions is not None else None
    counts = {}
    for k in tqdm(range(1, max_coord_limit + 1), disable=not progress):
        counts[k] = sum(int(_phi_block(k, first, forms).shape[0]) for first in range(k + 1))
    logger.info('#Phi by largest coordinate: %s (total %d)', counts, sum(counts.values()))
    return counts


def lemma_vanishing_check(inf_char: InfChar) -> bool:
    '''True when every w^(j) Lambda has a vanishing varpi coordinate, so that no gamma + rho_c can equal it.'''
    labels = inf_char.zeta_coords
    if not any(labels[i] == 0 and labels[j] == 0 for i, j in POSITIVE_PAIRS):
        logger.debug('%s has no vanishing coordinate pair', inf_char)
    for matrix in calculator().zeta_matrices:
        if all(c != 0 for c in rootdata.zeta_to_varpi(mat_vec(matrix, labels))):
            return False
    return True


# ---------------------------------------------------------------- Certs census

@dataclass(frozen=True)
class CertsMember:
    ktype: KTypeWeight
    spin_norm_sq: Fraction
    lambda_norm_sq: Fraction

    @property
    def gap(self) -> Fraction:
        return self.spin_norm_sq - self.lambda_norm_sq

    def to_json(self):
        return {'ktype': self.ktype.to_json(), 'spin_norm_sq': self.spin_norm_sq,
                'lambda_norm_sq': self.lambda_norm_sq}


def _certs_chunk(chunk: Sequence[Tuple[int, ...]]) -> List[Tuple[Tuple[int, ...], Fraction, Fraction]]:
    calc = calculator()
    found = []
    for p in chunk:
        spin, _ = calc.spin_norm_sq(p)
        lam = calc.lambda_norm_sq(p)
        if spin - lam >= LAMBDA_GAP:
            found.append((p, spin, lam))
    return found


def certs_census(ktypes: Optional[Sequence[KTypeWeight]] = None, threads: int = 1,
                 progress: bool = True) -> List[CertsMember]:
    '''u-small K-types whose spin and lambda norms are at least 157/2 apart.'''
    start = time.time()
    if ktypes is None:
        ktypes = norms.enumerate_usmall_ktypes(threads=threads, progress=progress)
    coords = [mu.varpi_coords for mu in ktypes]
    chunks = [coords[i:i + 1000] for i in range(0, len(coords), 1000)]
    if threads > 1:
        from multiprocessing.pool import Pool
        with Pool(threads, initializer=norms.init_worker, initargs=(calculator(),)) as p:
            results = list(tqdm(p.imap(_certs_chunk, chunks), total=len(chunks), disable=not progress))
    else:
        results = [_certs_chunk(c) for c in tqdm(chunks, disable=not progress)]
    members = [CertsMember(KTypeWeight(p), spin, lam) for block in results for p, spin, lam in block]
    logger.info('%d of %d K-types have spin^2 - lambda^2 >= %s (%.1fs)', len(members), len(coords),
                rational_to_str(LAMBDA_GAP), time.time() - start)
    return members
