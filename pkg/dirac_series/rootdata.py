"""Exact root data of the split real form E7(7).

Coordinates follow the usual E7 realisation inside R^8: the roots span the hyperplane
orthogonal to e7 + e8, all roots have squared length 2 and the simple roots are

    alpha_1 = 1/2 (1, -1, -1, -1, -1, -1, -1, 1),  alpha_2 = e1 + e2,
    alpha_i = e_{i-1} - e_{i-2}   (3 <= i <= 7).

K = SU(8) has the simple roots gamma_1 = alpha_1, gamma_i = alpha_{i+1} (2 <= i <= 6) and
gamma_7 = alpha_1 + 2 alpha_2 + 2 alpha_3 + 3 alpha_4 + 2 alpha_5 + alpha_6.

Weights are carried in one of four frames:
    AMBIENT  coordinates in R^8
    ZETA     coefficients on the fundamental weights zeta_i of g (Dynkin labels)
    VARPI    coefficients on the fundamental weights varpi_i of k
    ATLAS_K  K-type coordinates printed against the distinguished KGB element 71; numerically
             these are zeta coordinates, and `atlas_k_shift` turns them into varpi coordinates.
"""
import logging
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache, cached_property
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from dirac_series.file_utils import rational_to_str

logger = logging.getLogger(__name__)

RANK = 7
AMBIENT_DIM = 8
NUM_POSITIVE_ROOTS = 63
ORBIT_SIZE = 2903040
WEYL_K_ORDER = 40320
NUM_CHAMBERS = 72
NONCOMPACT_SIMPLE_INDEX = 1  # alpha_2, 0-based

# simple-root coefficients of gamma_1..gamma_7; row i is also the zeta -> varpi change of basis
GAMMA_IN_ALPHA = (
    (1, 0, 0, 0, 0, 0, 0),
    (0, 0, 1, 0, 0, 0, 0),
    (0, 0, 0, 1, 0, 0, 0),
    (0, 0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 0, 1, 0),
    (0, 0, 0, 0, 0, 0, 1),
    (1, 2, 2, 3, 2, 1, 0),
)

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Tuple[Fraction, ...], ...]
IntMatrix = Tuple[Tuple[int, ...], ...]


class SpanViolationError(ValueError):
    pass


class Frame(Enum):
    AMBIENT = 'ambient'
    ZETA = 'zeta'
    VARPI = 'varpi'
    ATLAS_K = 'atlas_k'


def vector(values) -> Vector:
    return tuple(Fraction(v) for v in values)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def reflect(v: Vector, root: Vector) -> Vector:
    '''s_root(v) for a root of squared length 2.'''
    c = dot(v, root)
    return tuple(a - c * r for a, r in zip(v, root))


def mat_vec(matrix: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(dot(row, v) for row in matrix)


def _to_fraction(x) -> Fraction:
    return Fraction(str(x))


def _inverse(matrix: Sequence[Sequence]) -> Matrix:
    inv = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in matrix]).inv()
    return tuple(tuple(_to_fraction(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows))


def _freeze(array) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in array)


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return _freeze(np.array(a, dtype=object).dot(np.array(b, dtype=object)))


def _reflection_matrix(root: Vector) -> Matrix:
    n = len(root)
    return tuple(tuple(Fraction(int(i == j)) - root[i] * root[j] for j in range(n)) for i in range(n))


def _identity(n: int = AMBIENT_DIM) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class Weight:
    coords: Vector
    frame: Frame = Frame.ZETA

    def __post_init__(self):
        coords = vector(self.coords)
        expected = AMBIENT_DIM if self.frame is Frame.AMBIENT else RANK
        if len(coords) != expected:
            raise ValueError("a %s weight has %d coordinates, got %d" % (self.frame.value, expected, len(coords)))
        object.__setattr__(self, 'coords', coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def as_ints(self) -> Tuple[int, ...]:
        assert self.is_integral(), "weight %s is not integral" % self
        return tuple(c.numerator for c in self.coords)

    def _check_frame(self, other: 'Weight'):
        if self.frame is not other.frame:
            raise ValueError("cannot combine a %s weight with a %s weight" % (self.frame.value, other.frame.value))

    def __add__(self, other: 'Weight') -> 'Weight':
        self._check_frame(other)
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)), self.frame)

    def __sub__(self, other: 'Weight') -> 'Weight':
        self._check_frame(other)
        return Weight(tuple(a - b for a, b in zip(self.coords, other.coords)), self.frame)

    def __neg__(self) -> 'Weight':
        return Weight(tuple(-a for a in self.coords), self.frame)

    def scaled(self, factor) -> 'Weight':
        return Weight(tuple(Fraction(factor) * a for a in self.coords), self.frame)

    def __str__(self):
        return '[%s]' % ','.join(rational_to_str(c) for c in self.coords)

    def to_json(self):
        return [rational_to_str(c) for c in self.coords]


@dataclass(frozen=True)
class RootSystemTables:
    simple_g: Tuple[Vector, ...]
    simple_k: Tuple[Vector, ...]
    g_roots: Tuple[Vector, ...]
    k_roots: Tuple[Vector, ...]
    p_roots: Tuple[Vector, ...]
    positive_g: Tuple[Vector, ...]
    positive_k: Tuple[Vector, ...]
    positive_p: Tuple[Vector, ...]
    fw_g: Tuple[Vector, ...]
    fw_k: Tuple[Vector, ...]
    rho: Weight
    rho_c: Weight
    cartan_g: IntMatrix
    cartan_k: IntMatrix
    gram_zeta: Matrix
    gram_varpi: Matrix
    varpi_to_zeta: Matrix

    @cached_property
    def root_set(self) -> FrozenSet[Vector]:
        return frozenset(self.g_roots)

    @cached_property
    def positive_set(self) -> FrozenSet[Vector]:
        return frozenset(self.positive_g)

    def root_coefficients(self, root: Vector) -> Tuple[int, ...]:
        '''Coefficients of a root on alpha_1..alpha_7.'''
        return tuple(dot(root, z).numerator for z in self.fw_g)


def _close_under_reflections(simple: Sequence[Vector]) -> List[Vector]:
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        found = []
        for r in frontier:
            for a in simple:
                s = reflect(r, a)
                if s not in roots:
                    roots.add(s)
                    found.append(s)
        frontier = found
    return sorted(roots)


def _dual_basis(simple: Sequence[Vector], cartan: IntMatrix) -> Tuple[Vector, ...]:
    inv = _inverse(cartan)
    return tuple(
        tuple(sum((inv[i][j] * simple[j][k] for j in range(RANK)), Fraction(0)) for k in range(AMBIENT_DIM))
        for i in range(RANK)
    )


@lru_cache(maxsize=None)
def build_e7_tables() -> RootSystemTables:
    half = Fraction(1, 2)
    simple_g = [vector([half, -half, -half, -half, -half, -half, -half, half]), vector([1, 1, 0, 0, 0, 0, 0, 0])]
    for i in range(3, RANK + 1):
        e = [0] * AMBIENT_DIM
        e[i - 2] = 1  # e_{i-1}
        e[i - 3] = -1  # e_{i-2}
        simple_g.append(vector(e))
    simple_g = tuple(simple_g)

    g_roots = _close_under_reflections(simple_g)
    cartan_g = tuple(tuple(dot(a, b).numerator for b in simple_g) for a in simple_g)
    fw_g = _dual_basis(simple_g, cartan_g)
    for i in range(RANK):
        for j in range(RANK):
            assert dot(fw_g[i], simple_g[j]) == int(i == j), "zeta_%d is not dual to alpha_%d" % (i + 1, j + 1)

    def coefficients(root):
        return [dot(root, z) for z in fw_g]

    positive_g = tuple(r for r in g_roots if all(c >= 0 for c in coefficients(r)))
    k_roots = tuple(r for r in g_roots if coefficients(r)[NONCOMPACT_SIMPLE_INDEX] % 2 == 0)
    p_roots = tuple(r for r in g_roots if coefficients(r)[NONCOMPACT_SIMPLE_INDEX] % 2 != 0)
    positive_k = tuple(r for r in positive_g if r in set(k_roots))
    positive_p = tuple(r for r in positive_g if r in set(p_roots))

    simple_k = tuple(
        tuple(sum((c * a[k] for c, a in zip(row, simple_g)), Fraction(0)) for k in range(AMBIENT_DIM))
        for row in GAMMA_IN_ALPHA
    )
    cartan_k = tuple(tuple(dot(a, b).numerator for b in simple_k) for a in simple_k)
    fw_k = _dual_basis(simple_k, cartan_k)

    rho = tuple(sum(col, Fraction(0)) for col in zip(*fw_g))
    rho_c = tuple(sum(col, Fraction(0)) / 2 for col in zip(*positive_k))

    assert len(g_roots) == 126, "expected 126 roots, got %d" % len(g_roots)
    assert len(positive_g) == NUM_POSITIVE_ROOTS
    assert len(k_roots) == 56 and len(p_roots) == 70, (len(k_roots), len(p_roots))
    assert len(positive_k) == 28 and len(positive_p) == 35
    assert all(dot(r, r) == 2 for r in g_roots)
    assert all(g in set(positive_k) for g in simple_k), "gamma_i must be positive compact roots"
    for i in range(RANK):
        for j in range(RANK):
            expected = 2 if i == j else (-1 if abs(i - j) == 1 else 0)
            assert cartan_k[i][j] == expected, "k is not of type A7 in the chosen order"
            assert dot(fw_k[i], simple_k[j]) == int(i == j)
    assert rho_c == tuple(sum(col, Fraction(0)) for col in zip(*fw_k)), "rho_c is not the sum of the varpi_i"
    assert dot(rho, rho) == Fraction(399, 2), dot(rho, rho)
    assert dot(rho_c, rho_c) == 42, dot(rho_c, rho_c)

    tables = RootSystemTables(
        simple_g=simple_g,
        simple_k=simple_k,
        g_roots=tuple(g_roots),
        k_roots=k_roots,
        p_roots=p_roots,
        positive_g=positive_g,
        positive_k=positive_k,
        positive_p=positive_p,
        fw_g=fw_g,
        fw_k=fw_k,
        rho=Weight(rho, Frame.AMBIENT),
        rho_c=Weight(rho_c, Frame.AMBIENT),
        cartan_g=cartan_g,
        cartan_k=cartan_k,
        gram_zeta=tuple(tuple(dot(a, b) for b in fw_g) for a in fw_g),
        gram_varpi=tuple(tuple(dot(a, b) for b in fw_k) for a in fw_k),
        varpi_to_zeta=_inverse(GAMMA_IN_ALPHA),
    )
    logger.debug('built E7 tables: %d roots, %d compact, %d noncompact', len(g_roots), len(k_roots), len(p_roots))
    return tables


# ---------------------------------------------------------------- frame conversions

def zeta_to_varpi(c: Sequence) -> Vector:
    return mat_vec(GAMMA_IN_ALPHA, c)


def varpi_to_zeta(p: Sequence) -> Vector:
    return mat_vec(build_e7_tables().varpi_to_zeta, p)


def zeta_to_ambient(c: Sequence) -> Vector:
    fw_g = build_e7_tables().fw_g
    return tuple(sum((Fraction(ci) * z[k] for ci, z in zip(c, fw_g)), Fraction(0)) for k in range(AMBIENT_DIM))


def ambient_to_zeta(x: Sequence) -> Vector:
    tables = build_e7_tables()
    x = vector(x)
    c = tuple(dot(x, a) for a in tables.simple_g)
    if zeta_to_ambient(c) != x:
        raise SpanViolationError("ambient vector (%s) is not in the span of the roots"
                                 % ', '.join(rational_to_str(v) for v in x))
    return c


def to_zeta(weight: Weight) -> Vector:
    if weight.frame is Frame.AMBIENT:
        return ambient_to_zeta(weight.coords)
    if weight.frame is Frame.VARPI:
        return varpi_to_zeta(weight.coords)
    return weight.coords


def _from_zeta(c: Vector, target: Frame) -> Vector:
    if target is Frame.AMBIENT:
        return zeta_to_ambient(c)
    if target is Frame.VARPI:
        return zeta_to_varpi(c)
    return c


def convert(weight: Weight, target: Frame) -> Weight:
    if weight.frame is target:
        return weight
    return Weight(_from_zeta(to_zeta(weight), target), target)


def atlas_k_shift(y: Sequence[int]) -> Weight:
    '''K-type coordinates printed against KGB element 71 -> varpi coordinates.'''
    result = convert(Weight(tuple(y), Frame.ATLAS_K), Frame.VARPI)
    if not is_k_dominant(result):
        logger.debug('atlas coordinates %s give the non-dominant k-weight %s', list(y), result)
    return result


def is_k_dominant(weight: Weight) -> bool:
    return all(c >= 0 for c in convert(weight, Frame.VARPI).coords)


def norm_sq(weight: Weight) -> Fraction:
    if weight.frame is Frame.AMBIENT:
        ambient_to_zeta(weight.coords)
        return dot(weight.coords, weight.coords)
    if weight.frame is Frame.VARPI:
        gram = build_e7_tables().gram_varpi
        c = weight.coords
    else:
        gram = build_e7_tables().gram_zeta
        c = weight.coords
    return dot(c, mat_vec(gram, c))


def pairing(u: Weight, v: Weight) -> Fraction:
    return dot(convert(u, Frame.AMBIENT).coords, convert(v, Frame.AMBIENT).coords)


def reverse_ktype(p: Sequence) -> Tuple:
    '''Highest weight of the contragredient k-type: -w0^K acts on varpi coordinates by reversal.'''
    return tuple(reversed(tuple(p)))


# ---------------------------------------------------------------- Weyl group

@dataclass(frozen=True)
class WeylElement:
    matrix: Matrix
    word: Optional[Tuple[int, ...]] = None  # (i1, ..., ik) stands for s_{i1} s_{i2} ... s_{ik}

    @classmethod
    def identity(cls) -> 'WeylElement':
        return cls(_identity(), ())

    @classmethod
    def from_word(cls, word: Sequence[int]) -> 'WeylElement':
        simple_g = build_e7_tables().simple_g
        matrix = _identity()
        for i in word:
            matrix = _matmul(matrix, _reflection_matrix(simple_g[i - 1]))
        return cls(matrix, tuple(word))

    def __matmul__(self, other: 'WeylElement') -> 'WeylElement':
        word = self.word + other.word if self.word is not None and other.word is not None else None
        return WeylElement(_matmul(self.matrix, other.matrix), word)

    def inverse(self) -> 'WeylElement':
        word = tuple(reversed(self.word)) if self.word is not None else None
        return WeylElement(tuple(zip(*self.matrix)), word)

    def act_ambient(self, v: Sequence) -> Vector:
        return mat_vec(self.matrix, v)

    def act(self, weight: Weight) -> Weight:
        image = Weight(self.act_ambient(convert(weight, Frame.AMBIENT).coords), Frame.AMBIENT)
        return convert(image, weight.frame)

    @cached_property
    def zeta_matrix(self) -> IntMatrix:
        '''Action on zeta coordinates; column l holds the labels of w zeta_l.'''
        tables = build_e7_tables()
        columns = []
        for z in tables.fw_g:
            image = self.act_ambient(z)
            columns.append([dot(image, a) for a in tables.simple_g])
        assert all(x.denominator == 1 for col in columns for x in col), "not an element of W(g)"
        return tuple(tuple(int(columns[l][k]) for l in range(RANK)) for k in range(RANK))

    def act_zeta(self, c: Sequence) -> Vector:
        return mat_vec(self.zeta_matrix, c)


def weyl_length(w: WeylElement) -> int:
    '''Number of positive roots sent to negative roots.'''
    tables = build_e7_tables()
    length = 0
    for root in tables.positive_g:
        image = w.act_ambient(root)
        if image not in tables.root_set:
            raise ValueError("matrix does not permute the roots of E7")
        if image not in tables.positive_set:
            length += 1
    return length


# ---------------------------------------------------------------- chambers

@dataclass(frozen=True)
class Chamber:
    index: int
    w: WeylElement
    rho_j: Weight  # zeta frame
    rho_n_j: Weight  # varpi frame
    length: int

    @cached_property
    def simple_roots(self) -> Tuple[Vector, ...]:
        return tuple(self.w.act_ambient(a) for a in build_e7_tables().simple_g)

    @cached_property
    def zeta_matrix(self) -> IntMatrix:
        return self.w.zeta_matrix

    @cached_property
    def inverse_zeta_matrix(self) -> IntMatrix:
        return self.w.inverse().zeta_matrix

    def noncompact_positive_roots(self) -> Tuple[Vector, ...]:
        rho_j = zeta_to_ambient(self.rho_j.coords)
        return tuple(r for r in build_e7_tables().p_roots if dot(r, rho_j) > 0)

    def to_json(self):
        return {
            'j': self.index,
            'length': self.length,
            'rho_n_varpi': self.rho_n_j.to_json(),
            'rho_n_ambient': convert(self.rho_n_j, Frame.AMBIENT).to_json(),
        }


def _raise_labels(v):
    '''Yields s_i v for each i with a positive label of v; every step adds one to the length.'''
    a, b, c, d, e, f, g = v
    if a > 0:
        yield (-a, b, c + a, d, e, f, g)
    if b > 0:
        yield (a, -b, c, d + b, e, f, g)
    if c > 0:
        yield (a + c, b, -c, d + c, e, f, g)
    if d > 0:
        yield (a, b + d, c + d, -d, e + d, f, g)
    if e > 0:
        yield (a, b, c, d + e, -e, f + e, g)
    if f > 0:
        yield (a, b, c, d, e + f, -f, g + f)
    if g > 0:
        yield (a, b, c, d, e, f + g, -g)


def _reflect_labels(v: Sequence, i: int, cartan: IntMatrix) -> Tuple:
    vi = v[i]
    return tuple(x - vi * r for x, r in zip(v, cartan[i]))


def _is_k_dominant_labels(v) -> bool:
    a, b, c, d, e, f, g = v
    return a >= 0 and c >= 0 and d >= 0 and e >= 0 and f >= 0 and g >= 0 and a + 2 * b + 2 * c + 3 * d + 2 * e + f >= 0


def descend_labels(v: Sequence, cartan: IntMatrix) -> Tuple[Tuple, Tuple[int, ...]]:
    '''Reflect on the first negative label until dominant. Returns the dominant labels and the
    0-based reflection indices in the order they were applied.'''
    v = tuple(v)
    steps = []
    while True:
        for i, x in enumerate(v):
            if x < 0:
                v = _reflect_labels(v, i, cartan)
                steps.append(i)
                break
        else:
            return v, tuple(steps)


@lru_cache(maxsize=None)
def _traverse_rho_orbit() -> Tuple[Tuple[int, ...], Tuple[Tuple[int, Tuple[int, ...]], ...]]:
    tables = build_e7_tables()
    rho = (1,) * RANK
    assert set(_raise_labels(rho)) == {_reflect_labels(rho, i, tables.cartan_g) for i in range(RANK)}, \
        "hard-coded E7 reflections disagree with the Cartan matrix"

    start = time.time()
    layer_sizes = []
    hits = []
    layer = {rho}
    length = 0
    while layer:
        layer_sizes.append(len(layer))
        for v in layer:
            if _is_k_dominant_labels(v):
                hits.append((length, v))
        upper = set()
        for v in layer:
            upper.update(_raise_labels(v))
        layer = upper
        length += 1
    logger.info('traversed the W(g)-orbit of rho: %d points in %d layers, %d k-dominant (%.1fs)',
                sum(layer_sizes), len(layer_sizes), len(hits), time.time() - start)
    return tuple(layer_sizes), tuple(hits)


def orbit_layer_sizes() -> Tuple[int, ...]:
    '''Sizes of the length layers of the W(g)-orbit of rho.'''
    return _traverse_rho_orbit()[0]


@lru_cache(maxsize=None)
def chambers() -> Tuple[Chamber, ...]:
    tables = build_e7_tables()
    layer_sizes, hits = _traverse_rho_orbit()
    assert sum(layer_sizes) == ORBIT_SIZE, "orbit of rho has %d points, expected %d" % (sum(layer_sizes), ORBIT_SIZE)
    assert len(hits) == NUM_CHAMBERS, "found %d k-dominant points, expected %d" % (len(hits), NUM_CHAMBERS)

    records = []
    for length, labels in hits:
        dominant, steps = descend_labels(labels, tables.cartan_g)
        assert dominant == (1,) * RANK and len(steps) == length
        rho_n = tuple(p - 1 for p in zeta_to_varpi(labels))
        records.append((length, rho_n, labels, tuple(i + 1 for i in steps)))
    records.sort(key=lambda r: (r[0], r[1]))

    result = []
    for index, (length, rho_n, labels, word) in enumerate(records):
        # the descent applied s_{i1} first, so labels = s_{i1} ... s_{ik} rho
        w = WeylElement.from_word(word)
        result.append(Chamber(index=index, w=w, rho_j=Weight(labels, Frame.ZETA),
                              rho_n_j=Weight(rho_n, Frame.VARPI), length=length))
    assert result[0].length == 0 and sum(1 for c in result if c.length == 0) == 1
    return tuple(result)


def chamber_by_rho_n(rho_n: Sequence[int]) -> Optional[Chamber]:
    rho_n = vector(rho_n)
    for chamber in chambers():
        if chamber.rho_n_j.coords == rho_n:
            return chamber
    return None


def dominant_representative(weight: Weight, system: Union[str, int] = 'k') -> Tuple[Weight, WeylElement]:
    '''Dominant conjugate of `weight` for the k positive system (`system='k'`) or for the g positive
    system of chamber j (`system=j`, `'g'` meaning chamber 0). The returned element maps the input
    to the output.'''
    tables = build_e7_tables()
    v = convert(weight, Frame.AMBIENT).coords
    ambient_to_zeta(v)
    if system == 'k':
        simple = tables.simple_k
    elif system == 'g' or system == 0:
        simple = tables.simple_g
    elif isinstance(system, int) and 0 <= system < NUM_CHAMBERS:
        simple = chambers()[system].simple_roots
    else:
        raise ValueError("system must be 'k', 'g' or a chamber index in [0, %d), got %r" % (NUM_CHAMBERS, system))

    steps = []
    while True:
        for i, root in enumerate(simple):
            if dot(v, root) < 0:
                v = reflect(v, root)
                steps.append(i)
                break
        else:
            break

    matrix = _identity()
    for i in steps:
        matrix = _matmul(_reflection_matrix(simple[i]), matrix)
    word = tuple(i + 1 for i in reversed(steps)) if simple is tables.simple_g else None
    element = WeylElement(matrix, word)
    return convert(Weight(v, Frame.AMBIENT), weight.frame), element
