"""Spin norm, lambda norm and u-small membership of K-types.

K-types are given by their highest weights in varpi coordinates. K = SU(8), so W(k) = S_8 acts on the
epsilon coordinates x_i = p_i + ... + p_7 (x_8 = 0) by permutations; sorting x gives the dominant
conjugate and |p|^2 = sum(x_i^2) - (sum x_i)^2 / 8. Everything here is integer or Fraction arithmetic.
"""
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from tqdm import tqdm

from dirac_series import rootdata
from dirac_series.rootdata import RANK, Frame, Weight, dot, mat_vec
from dirac_series.simplex import box_feasible

logger = logging.getLogger(__name__)

BETA = (0, 0, 0, 1, 0, 0, 0)  # highest weight of p as a k-module
RHO_C_ZETA = (1, -4, 1, 1, 1, 1, 1)
RHO_C_EPS = (7, 6, 5, 4, 3, 2, 1, 0)
# 8 * (varpi_i, varpi_k) for A7
VARPI_GRAM8 = tuple(tuple(min(i, k) * (8 - max(i, k)) for k in range(1, RANK + 1)) for i in range(1, RANK + 1))


@dataclass(frozen=True, order=True)
class KTypeWeight:
    varpi_coords: Tuple[int, ...]

    def __post_init__(self):
        coords = tuple(self.varpi_coords)
        if len(coords) != RANK:
            raise ValueError("a k-type has %d coordinates, got %r" % (RANK, list(coords)))
        if any(isinstance(c, bool) or Fraction(c).denominator != 1 for c in coords):
            raise ValueError("k-type coordinates must be integers, got %r" % (list(coords),))
        coords = tuple(int(c) for c in coords)
        if any(c < 0 for c in coords):
            raise ValueError("%r is not dominant for k" % (list(coords),))
        object.__setattr__(self, 'varpi_coords', coords)

    @property
    def is_Ktype(self) -> bool:
        a, _, c, _, e, _, g = self.varpi_coords
        return (a + c + e + g) % 2 == 0

    @classmethod
    def parse(cls, text: str) -> 'KTypeWeight':
        text = text.strip().lstrip('[').rstrip(']')
        try:
            return cls(tuple(int(part) for part in text.split(',')))
        except ValueError as e:
            raise ValueError("cannot read a k-type from %r: %s" % (text, e))

    def shifted(self, n: int) -> 'KTypeWeight':
        '''mu + n beta, the n-th member of the pencil through mu.'''
        return KTypeWeight(tuple(c + n * b for c, b in zip(self.varpi_coords, BETA)))

    def weight(self) -> Weight:
        return Weight(self.varpi_coords, Frame.VARPI)

    def __iter__(self):
        return iter(self.varpi_coords)

    def __str__(self):
        return '[%s]' % ','.join(str(c) for c in self.varpi_coords)

    def to_json(self):
        return list(self.varpi_coords)


KTypeLike = Union[KTypeWeight, Weight, Sequence[int]]


def ktype_coords(mu: KTypeLike) -> Tuple:
    if isinstance(mu, KTypeWeight):
        return mu.varpi_coords
    if isinstance(mu, Weight):
        return rootdata.convert(mu, Frame.VARPI).coords
    return tuple(mu)


# ---------------------------------------------------------------- su(8) helpers

def eps_coords(p: Sequence) -> List:
    x = [0] * (RANK + 1)
    running = 0
    for i in range(RANK - 1, -1, -1):
        running += p[i]
        x[i] = running
    return x


def eps_to_labels(x: Sequence) -> Tuple:
    return tuple(x[i] - x[i + 1] for i in range(RANK))


def norm_sq8(x: Sequence) -> int:
    return 8 * sum(v * v for v in x) - sum(x) ** 2


def k_dominant_labels(p: Sequence) -> Tuple:
    '''Dominant W(k)-conjugate of a weight given in varpi coordinates.'''
    x = eps_coords(p)
    x.sort(reverse=True)
    return eps_to_labels(x)


def ktype_norm_sq(p: KTypeLike) -> Fraction:
    return Fraction(norm_sq8(eps_coords(ktype_coords(p))), 8)


def prv_component(mu: KTypeLike, nu: KTypeLike) -> Tuple:
    '''Highest weight of the PRV component E_{mu + w0 nu} of E_mu (x) E_nu; w0 of su(8) is
    minus the coordinate reversal.'''
    mu, nu = ktype_coords(mu), ktype_coords(nu)
    return k_dominant_labels([a - b for a, b in zip(mu, reversed(nu))])


# ---------------------------------------------------------------- dominant-cone projection

def _face_inverses(cartan) -> Dict[Tuple[int, ...], Tuple[Tuple[Fraction, ...], ...]]:
    faces = {}
    for size in range(1, RANK + 1):
        for face in combinations(range(RANK), size):
            block = sympy.Matrix([[cartan[a][b] for b in face] for a in face]).inv()
            faces[face] = tuple(tuple(Fraction(str(block[r, s])) for s in range(size)) for r in range(size))
    return faces


class NormCalculator(object):
    """Chamber data needed by every norm evaluation, flattened to tuples so that the calculator can be
    shipped to worker processes."""

    def __init__(self):
        tables = rootdata.build_e7_tables()
        chamber_list = rootdata.chambers()
        self.rho_n = tuple(c.rho_n_j.as_ints() for c in chamber_list)
        self.lengths = tuple(c.length for c in chamber_list)
        self.zeta_matrices = tuple(c.zeta_matrix for c in chamber_list)
        self.inverse_zeta_matrices = tuple(c.inverse_zeta_matrix for c in chamber_list)
        self.cartan = tables.cartan_g
        self.gram_zeta = tables.gram_zeta
        self.varpi_to_zeta = tables.varpi_to_zeta
        self.faces = _face_inverses(self.cartan)
        self.face_order = tuple(sorted(self.faces, key=lambda f: (len(f), f)))

    # spin norm

    def spin_norm_sq(self, p: Sequence) -> Tuple[Fraction, Tuple[int, ...]]:
        best, achieving = None, []
        for j, r in enumerate(self.rho_n):
            x = eps_coords([a - b for a, b in zip(p, r)])
            x.sort(reverse=True)
            value = norm_sq8([v + s for v, s in zip(x, RHO_C_EPS)])
            if best is None or value < best:
                best, achieving = value, [j]
            elif value == best:
                achieving.append(j)
        return Fraction(best, 8), tuple(achieving)

    def spin_gamma(self, p: Sequence, j: int) -> Tuple:
        '''{mu - rho_n^(j)}, the k-type of the spin module part hit by chamber j.'''
        return k_dominant_labels([a - b for a, b in zip(p, self.rho_n[j])])

    # lambda norm

    def xi(self, p: Sequence) -> Tuple[Fraction, ...]:
        '''mu + 2 rho_c in zeta coordinates.'''
        return tuple(c + 2 * r for c, r in zip(mat_vec(self.varpi_to_zeta, p), RHO_C_ZETA))

    def admissible_chambers(self, p: Sequence) -> Tuple[int, ...]:
        xi = self.xi(p)
        return tuple(j for j, m in enumerate(self.inverse_zeta_matrices) if all(v >= 0 for v in mat_vec(m, xi)))

    def _try_face(self, x: Sequence[Fraction], face: Tuple[int, ...]) -> Optional[Tuple[Tuple, Tuple]]:
        if not face:
            if all(v >= 0 for v in x):
                return tuple(x), (Fraction(0),) * RANK
            return None
        inv = self.faces[face]
        x_face = [x[l] for l in face]
        d_face = [-dot(row, x_face) for row in inv]
        if any(v < 0 for v in d_face):
            return None
        d = [Fraction(0)] * RANK
        for l, v in zip(face, d_face):
            d[l] = v
        labels = []
        for k in range(RANK):
            if k in face:
                labels.append(Fraction(0))
                continue
            c = x[k] + sum((self.cartan[l][k] * d[l] for l in face), Fraction(0))
            if c < 0:
                return None
            labels.append(c)
        return tuple(labels), tuple(d)

    def project_fundamental_cone(self, x: Sequence) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
        """Nearest point of the cone sum c_i zeta_i (c_i >= 0) to x, both in zeta labels.

        Returns the labels of the projection P and the coefficients d >= 0 of the residual
        x - P = -sum d_l alpha_l. A face pair (S, N) certifies the projection when d_N = -C_NN^{-1} x_N >= 0
        and the labels of P on S are non-negative; then the residual pairs non-positively with every zeta_i
        and is orthogonal to P.
        """
        x = tuple(Fraction(v) for v in x)
        guess = tuple(i for i, v in enumerate(x) if v < 0)
        result = self._try_face(x, guess)
        if result is not None:
            return result
        for face in ((),) + self.face_order:
            result = self._try_face(x, face)
            if result is not None:
                return result
        raise AssertionError("no face of the dominant cone certifies the projection of %s" % (x,))

    def lambda_labels(self, p: Sequence, j: Optional[int] = None) -> Tuple[int, Tuple[Fraction, ...]]:
        '''Chamber j and the labels of P0((w^(j))^{-1} xi - rho); lambda_a is w^(j) applied to them.'''
        xi = self.xi(p)
        candidates = range(len(self.inverse_zeta_matrices)) if j is None else [j]
        for k in candidates:
            local = mat_vec(self.inverse_zeta_matrices[k], xi)
            if all(v >= 0 for v in local):
                labels, _ = self.project_fundamental_cone([v - 1 for v in local])
                return k, labels
        raise ValueError("chamber %s does not contain mu + 2 rho_c for mu = %s" % (j, list(p)))

    def lambda_a(self, p: Sequence, j: Optional[int] = None) -> Weight:
        j, labels = self.lambda_labels(p, j)
        return Weight(mat_vec(self.zeta_matrices[j], labels), Frame.ZETA)

    def lambda_norm_sq(self, p: Sequence) -> Fraction:
        _, labels = self.lambda_labels(p)
        return dot(labels, mat_vec(self.gram_zeta, labels))


_calculator = None
_oracle = None


def calculator() -> NormCalculator:
    global _calculator
    if _calculator is None:
        _calculator = NormCalculator()
    return _calculator


def project_dominant_cone(weight: Weight, j: int = 0) -> Weight:
    '''Projection of `weight` onto the closed cone spanned by w^(j) zeta_1, ..., w^(j) zeta_7.'''
    calc = calculator()
    if not 0 <= j < rootdata.NUM_CHAMBERS:
        raise ValueError("chamber index must be in [0, %d), got %r" % (rootdata.NUM_CHAMBERS, j))
    xi = rootdata.to_zeta(weight)
    labels, _ = calc.project_fundamental_cone(mat_vec(calc.inverse_zeta_matrices[j], xi))
    image = Weight(mat_vec(calc.zeta_matrices[j], labels), Frame.ZETA)
    return rootdata.convert(image, weight.frame)


def admissible_chambers(mu: KTypeLike) -> Tuple[int, ...]:
    return calculator().admissible_chambers(ktype_coords(mu))


def lambda_a(mu: KTypeLike, j: Optional[int] = None) -> Weight:
    return calculator().lambda_a(ktype_coords(mu), j)


def lambda_norm_sq(mu: KTypeLike) -> Fraction:
    return calculator().lambda_norm_sq(ktype_coords(mu))


def spin_norm_sq(mu: KTypeLike) -> Tuple[Fraction, Tuple[int, ...]]:
    return calculator().spin_norm_sq(ktype_coords(mu))


def lowest_ktypes(ktypes: Sequence[KTypeLike]) -> List[KTypeLike]:
    '''The members of `ktypes` of minimal lambda norm.'''
    if not ktypes:
        return []
    values = [lambda_norm_sq(mu) for mu in ktypes]
    return [mu for mu, v in zip(ktypes, values) if v == min(values)]


def spin_lowest_ktypes(ktypes: Sequence[KTypeLike]) -> List[KTypeLike]:
    if not ktypes:
        return []
    values = [spin_norm_sq(mu)[0] for mu in ktypes]
    return [mu for mu, v in zip(ktypes, values) if v == min(values)]


# ---------------------------------------------------------------- u-small K-types

class UsmallOracle(object):
    """Membership in the zonotope {sum c_alpha alpha : c in [-1, 1]} over the 35 positive noncompact roots,
    for k-dominant weights in varpi coordinates.

    Two exact prefilters settle most weights: mu below some vertex 2 rho_n^(j) in the dominance order is
    inside, and mu beyond the support function in a varpi_i direction is outside. The rest go to the
    exact LP.
    """

    def __init__(self, calc: Optional[NormCalculator] = None):
        calc = calc or calculator()
        tables = rootdata.build_e7_tables()
        self.roots = tuple(tuple(int(dot(r, g)) for g in tables.simple_k) for r in tables.positive_p)
        self.vertices = tuple(tuple(2 * v for v in r) for r in calc.rho_n)
        self.root_sum = tuple(sum(col) for col in zip(*self.roots))
        self.support8 = tuple(
            sum(abs(sum(a[k] * VARPI_GRAM8[k][i] for k in range(RANK))) for a in self.roots) for i in range(RANK)
        )
        self.lp_calls = 0

    def _pair8(self, p: Sequence) -> Tuple:
        return tuple(sum(p[k] * VARPI_GRAM8[k][i] for k in range(RANK)) for i in range(RANK))

    def below_vertex(self, p: Sequence) -> bool:
        for v in self.vertices:
            if all(x >= 0 for x in self._pair8([a - b for a, b in zip(v, p)])):
                return True
        return False

    def within_support(self, p: Sequence) -> bool:
        return all(x <= h for x, h in zip(self._pair8(p), self.support8))

    def lp_coefficients(self, p: Sequence) -> Optional[List[Fraction]]:
        '''Coefficients c in [-1, 1] with sum c_alpha alpha = p, or None.'''
        self.lp_calls += 1
        A = [[root[i] for root in self.roots] for i in range(RANK)]
        b = [(Fraction(x) + s) / 2 for x, s in zip(p, self.root_sum)]
        t = box_feasible(A, b, [1] * len(self.roots))
        if t is None:
            return None
        return [2 * v - 1 for v in t]

    def __contains__(self, p: Sequence) -> bool:
        if self.below_vertex(p):
            return True
        if not self.within_support(p):
            return False
        return self.lp_coefficients(p) is not None

    def caps(self) -> Tuple[int, ...]:
        caps = []
        for i in range(RANK):
            along_gamma = sum(abs(root[i]) for root in self.roots)
            along_varpi = Fraction(self.support8[i], VARPI_GRAM8[i][i])
            caps.append(int(min(Fraction(along_gamma), along_varpi)))
        return tuple(caps)


def usmall_oracle() -> UsmallOracle:
    global _oracle
    if _oracle is None:
        _oracle = UsmallOracle()
    return _oracle


def is_usmall(mu: KTypeLike) -> bool:
    p = ktype_coords(mu)
    if any(c < 0 for c in p):
        raise ValueError("%r is not dominant for k" % (list(p),))
    return p in usmall_oracle()


def usmall_caps() -> Tuple[int, ...]:
    '''Per-coordinate bounds on dominant u-small weights, from the zonotope support function at the
    k simple coroots and at the varpi_i.'''
    return usmall_oracle().caps()


def init_worker(calc: NormCalculator, oracle: Optional[UsmallOracle] = None):
    '''Pool initializer: installs the parent's precomputed tables instead of rebuilding them per process.'''
    global _calculator, _oracle
    _calculator = calc
    if oracle is not None:
        _oracle = oracle


def _usmall_block(first: int) -> List[Tuple[int, ...]]:
    # the dominant weights of the zonotope are closed under mu -> mu - varpi_i, so each coordinate is
    # scanned upwards until the first miss
    oracle = usmall_oracle()
    start = (first,) + (0,) * (RANK - 1)
    if start not in oracle:
        return []
    found = []

    def visit(prefix):
        if len(prefix) == RANK:
            a, _, c, _, e, _, g = prefix
            if (a + c + e + g) % 2 == 0:
                found.append(prefix)
            return
        padding = (0,) * (RANK - len(prefix) - 1)
        value = 0
        while value == 0 or prefix + (value,) + padding in oracle:
            visit(prefix + (value,))
            value += 1

    visit((first,))
    return found


def enumerate_usmall_ktypes(threads: int = 1, progress: bool = True) -> List[KTypeWeight]:
    '''All u-small K-types, sorted.'''
    start_time = time.time()
    oracle = usmall_oracle()
    firsts = list(range(oracle.caps()[0] + 1))
    if threads > 1:
        from multiprocessing.pool import Pool
        with Pool(threads, initializer=init_worker, initargs=(calculator(), oracle)) as p:
            blocks = list(tqdm(p.imap(_usmall_block, firsts), total=len(firsts), disable=not progress))
    else:
        blocks = [_usmall_block(f) for f in tqdm(firsts, disable=not progress)]
    result = sorted(KTypeWeight(p) for block in blocks for p in block)
    logger.info('found %d u-small K-types with caps %s in %.1fs', len(result), list(oracle.caps()),
                time.time() - start_time)
    return result


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class NormReport:
    ktype: KTypeWeight
    lambda_a: Weight
    lambda_norm_sq: Fraction
    spin_norm_sq: Fraction
    achieving_chambers: Tuple[int, ...]
    usmall: bool

    def to_json(self):
        return {
            'ktype': self.ktype.to_json(),
            'is_Ktype': self.ktype.is_Ktype,
            'lambda_a': self.lambda_a.to_json(),
            'lambda_norm_sq': self.lambda_norm_sq,
            'spin_norm_sq': self.spin_norm_sq,
            'achieving_chambers': list(self.achieving_chambers),
            'usmall': self.usmall,
        }


def norm_report(mu: KTypeWeight) -> NormReport:
    calc = calculator()
    spin, achieving = calc.spin_norm_sq(mu.varpi_coords)
    return NormReport(
        ktype=mu,
        lambda_a=calc.lambda_a(mu.varpi_coords),
        lambda_norm_sq=calc.lambda_norm_sq(mu.varpi_coords),
        spin_norm_sq=spin,
        achieving_chambers=achieving,
        usmall=is_usmall(mu),
    )
