"""su(8) representation arithmetic and the Dirac cohomology bookkeeping built on it.

Highest weights of k-types are varpi coordinates. Weight multiplicities follow Freudenthal's recursion on
the dominant weights below the highest weight; tensor products follow Klimyk's formula (Brauer's
alternation over the weights of the small factor). All inner products are carried multiplied by 8 so that
the arithmetic stays in the integers.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.utilities.iterables import multiset_permutations

from dirac_series import rootdata
from dirac_series.norms import (RHO_C_EPS, VARPI_GRAM8, KTypeLike, calculator, eps_coords, eps_to_labels,
                                k_dominant_labels, ktype_coords, norm_sq8)
from dirac_series.rootdata import RANK, Frame, Weight, mat_vec

logger = logging.getLogger(__name__)

DEFAULT_KLIMYK_CAP = 10 ** 5

# positive roots eps_a - eps_b (a < b) of su(8) in varpi coordinates
_POSITIVE_ROOTS = tuple(
    tuple(int(i == a) - int(i + 1 == a) - int(i == b) + int(i + 1 == b) for i in range(RANK))
    for a in range(RANK + 1) for b in range(a + 1, RANK + 1)
)


class KlimykCapError(ValueError):
    pass


def _inner8(p: Sequence, q: Sequence) -> int:
    x, y = eps_coords(p), eps_coords(q)
    return 8 * sum(a * b for a, b in zip(x, y)) - sum(x) * sum(y)


def _check_dominant(p: Sequence) -> Tuple[int, ...]:
    p = tuple(p)
    if len(p) != RANK or any(Fraction(c).denominator != 1 for c in p):
        raise ValueError("%r is not an integral k-weight" % (list(p),))
    p = tuple(int(c) for c in p)
    if any(c < 0 for c in p):
        raise ValueError("%r is not dominant for k" % (list(p),))
    return p


def weyl_dim(highest: KTypeLike) -> int:
    '''Dimension of the k-type with the given dominant highest weight.'''
    p = _check_dominant(ktype_coords(highest))
    x = [v + s for v, s in zip(eps_coords(p), RHO_C_EPS)]
    numerator, denominator = 1, 1
    for a in range(RANK + 1):
        for b in range(a + 1, RANK + 1):
            numerator *= x[a] - x[b]
            denominator *= b - a
    assert numerator % denominator == 0
    return numerator // denominator


def _level(top: Sequence, p: Sequence) -> int:
    '''Height of top - p as a sum of simple roots (assumed to lie in the root lattice).'''
    diff = [a - b for a, b in zip(top, p)]
    total8 = sum(sum(diff[k] * VARPI_GRAM8[k][i] for k in range(RANK)) for i in range(RANK))
    assert total8 % 8 == 0
    return total8 // 8


def _dominant_weights_below(top: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    # every dominant weight below top is reached by subtracting positive roots without leaving the chamber
    found = {top}
    frontier = [top]
    while frontier:
        upcoming = []
        for p in frontier:
            for root in _POSITIVE_ROOTS:
                q = tuple(a - b for a, b in zip(p, root))
                if all(c >= 0 for c in q) and q not in found:
                    found.add(q)
                    upcoming.append(q)
        frontier = upcoming
    return sorted(found, key=lambda q: (_level(top, q), q))


def _orbit(p: Sequence) -> List[Tuple]:
    return [eps_to_labels(x) for x in multiset_permutations(eps_coords(p))]


@dataclass(frozen=True)
class WeightMultiplicities:
    highest: Tuple[int, ...]
    dominant: Tuple[Tuple[Tuple[int, ...], int], ...]
    complete: bool

    def as_dict(self) -> Dict[Tuple[int, ...], int]:
        '''Every weight (not only the dominant ones) with its multiplicity.'''
        result = {}
        for p, m in self.dominant:
            for q in _orbit(p):
                result[q] = m
        return result

    def total(self) -> int:
        return sum(m * len(_orbit(p)) for p, m in self.dominant)


@lru_cache(maxsize=256)
def _freudenthal(top: Tuple[int, ...], depth_cap: Optional[int]) -> WeightMultiplicities:
    dominant = _dominant_weights_below(top)
    rho = (1,) * RANK
    top_rho = norm_sq8(eps_coords(tuple(a + b for a, b in zip(top, rho))))
    mult = {top: 1}
    complete = True
    for p in dominant[1:]:
        if depth_cap is not None and _level(top, p) > depth_cap:
            complete = False
            break
        total = 0
        for root in _POSITIVE_ROOTS:
            k = 1
            while True:
                q = tuple(a + k * b for a, b in zip(p, root))
                m = mult.get(k_dominant_labels(q), 0)
                if m == 0:
                    break
                total += 2 * m * _inner8(q, root)
                k += 1
        gap = top_rho - norm_sq8(eps_coords(tuple(a + b for a, b in zip(p, rho))))
        assert gap > 0 and total % gap == 0, "Freudenthal recursion is not integral at %s" % (p,)
        if total:
            mult[p] = total // gap
    result = WeightMultiplicities(top, tuple((p, mult[p]) for p in dominant if p in mult), complete)
    if complete:
        assert result.total() == weyl_dim(top), "weights of %s do not add up to its dimension" % (list(top),)
    return result


def freudenthal_weights(highest: KTypeLike, depth_cap: Optional[int] = None) -> WeightMultiplicities:
    """Weight multiplicities of the k-type `highest`.

    Args:
        depth_cap: largest height (number of simple roots subtracted from the highest weight) evaluated.
            When some dominant weight lies deeper, the result is returned with `complete=False`.
    """
    return _freudenthal(_check_dominant(ktype_coords(highest)), depth_cap)


@dataclass(frozen=True)
class IrrepDecomposition:
    terms: Tuple[Tuple[Tuple[int, ...], int], ...]

    def as_dict(self) -> Dict[Tuple[int, ...], int]:
        return dict(self.terms)

    def multiplicity(self, highest: Sequence[int]) -> int:
        return self.as_dict().get(tuple(highest), 0)

    def dimension(self) -> int:
        return sum(m * weyl_dim(p) for p, m in self.terms)

    def to_json(self):
        return [{'highest_weight': list(p), 'multiplicity': m, 'dim': weyl_dim(p)} for p, m in self.terms]


def _sort_with_sign(x: List[int]) -> Tuple[int, List[int]]:
    inversions = sum(1 for a in range(len(x)) for b in range(a + 1, len(x)) if x[a] < x[b])
    return (-1) ** inversions, sorted(x, reverse=True)


def klimyk_tensor(small: KTypeLike, other: KTypeLike, cap: int = DEFAULT_KLIMYK_CAP) -> IrrepDecomposition:
    '''Decomposition of E_small (x) E_other. The weights of `small` are iterated, so it has to be the
    factor of small dimension.'''
    small, other = _check_dominant(ktype_coords(small)), _check_dominant(ktype_coords(other))
    dim_small = weyl_dim(small)
    if dim_small > cap:
        raise KlimykCapError("the small factor %s has dimension %d, above the cap %d" % (list(small), dim_small, cap))

    terms = Counter()
    for weight, m in freudenthal_weights(small).as_dict().items():
        x = [v + s for v, s in zip(eps_coords([a + b for a, b in zip(other, weight)]), RHO_C_EPS)]
        if len(set(x)) < len(x):
            continue
        sign, x = _sort_with_sign(x)
        terms[tuple(c - 1 for c in eps_to_labels(x))] += sign * m

    result = IrrepDecomposition(tuple(sorted((p, m) for p, m in terms.items() if m != 0)))
    assert all(m > 0 for _, m in result.terms), "negative multiplicity left after cancellation"
    assert result.dimension() == dim_small * weyl_dim(other), "dimension is not conserved"
    return result


# ---------------------------------------------------------------- spin module

def spin_module_parts() -> List[Tuple[Tuple[int, ...], int]]:
    '''The 72 k-types rho_n^(j) of the spin module with the sign (-1)^{l(w^(j))} of their half.'''
    calc = calculator()
    return [(r, (-1) ** length) for r, length in zip(calc.rho_n, calc.lengths)]


def spin_module_dimension() -> Dict[str, int]:
    dims = {'total': 0, 'plus': 0, 'minus': 0}
    for r, parity in spin_module_parts():
        d = weyl_dim(r)
        dims['total'] += d
        dims['plus' if parity > 0 else 'minus'] += d
    return dims


# ---------------------------------------------------------------- Dirac cohomology candidates

class NotSpinLKTError(ValueError):
    pass


@dataclass(frozen=True)
class DiracCandidate:
    gamma: Tuple[int, ...]
    chambers: Tuple[int, ...]
    lengths: Tuple[int, ...]

    @property
    def parity(self) -> int:
        '''Parity of the shortest chamber solution.'''
        return (-1) ** min(self.lengths)

    @property
    def parities(self) -> Tuple[int, ...]:
        return tuple((-1) ** length for length in self.lengths)

    @property
    def signed_count(self) -> int:
        return sum(self.parities)

    def to_json(self):
        return {
            'gamma': list(self.gamma),
            'chambers': list(self.chambers),
            'lengths': list(self.lengths),
            'parity': self.parity,
            'parities': list(self.parities),
        }


def _inf_char(inf_char: Sequence) -> Tuple[Fraction, ...]:
    labels = tuple(Fraction(c) for c in inf_char)
    if len(labels) != RANK:
        raise ValueError("an infinitesimal character has %d zeta coordinates, got %r" % (RANK, list(inf_char)))
    if any(c < 0 for c in labels):
        raise ValueError("infinitesimal character %s is not dominant for g" % (Weight(labels),))
    return labels


def dirac_candidate_ktypes(inf_char: Sequence, spin_lkts: Optional[Sequence[KTypeLike]] = None) -> List[DiracCandidate]:
    """K~-types gamma with gamma + rho_c conjugate to the infinitesimal character under W(g).

    The k-dominant points of the orbit are w^(j) Lambda, so gamma = w^(j) Lambda - rho_c whenever that is
    k-dominant and integral. Chambers hitting the same gamma (singular Lambda) are merged into one candidate
    that keeps every chamber solution.

    With `spin_lkts` the solutions come from the given spin LKTs instead: chamber j solves for gamma when it
    achieves the spin norm of some mu and {mu - rho_n^(j)} = gamma. A K-type without equality in the Dirac
    inequality raises `NotSpinLKTError`.
    """
    labels = _inf_char(inf_char)
    calc = calculator()
    hits = {}
    if spin_lkts is None:
        for j, matrix in enumerate(calc.zeta_matrices):
            varpi = rootdata.zeta_to_varpi(mat_vec(matrix, labels))
            gamma = tuple(c - 1 for c in varpi)
            if any(c < 0 or c.denominator != 1 for c in gamma):
                continue
            hits.setdefault(tuple(int(c) for c in gamma), []).append(j)
    else:
        for contribution in _spin_contributions(spin_lkts, labels):
            for part in contribution.parts:
                if part.conjugate:
                    hits.setdefault(part.gamma, []).append(part.chamber)
    hits = {gamma: sorted(set(js)) for gamma, js in hits.items()}
    return [DiracCandidate(gamma, tuple(js), tuple(calc.lengths[j] for j in js)) for gamma, js in sorted(hits.items())]


def _g_dominant(varpi: Sequence) -> Tuple:
    zeta = rootdata.varpi_to_zeta(varpi)
    dominant, _ = rootdata.descend_labels(zeta, rootdata.build_e7_tables().cartan_g)
    return dominant


@dataclass(frozen=True)
class ChamberContribution:
    chamber: int
    gamma: Tuple[int, ...]
    parity: int
    conjugate: bool  # gamma + rho_c lies in the W(g)-orbit of the infinitesimal character


@dataclass(frozen=True)
class SpinContribution:
    ktype: Tuple[int, ...]
    spin_norm_sq: Fraction
    parts: Tuple[ChamberContribution, ...]

    @property
    def gammas(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(sorted({part.gamma for part in self.parts if part.conjugate}))

    @property
    def parities(self) -> Tuple[int, ...]:
        return tuple(part.parity for part in self.parts if part.conjugate)

    def satisfies_conjugacy(self) -> bool:
        return any(part.conjugate for part in self.parts)

    def to_json(self):
        return {
            'ktype': list(self.ktype),
            'spin_norm_sq': self.spin_norm_sq,
            'parts': [{'j': p.chamber, 'gamma': list(p.gamma), 'parity': p.parity, 'conjugate': p.conjugate}
                      for p in self.parts],
        }


def spin_contribution(mu: KTypeLike, inf_char: Sequence) -> Optional[SpinContribution]:
    '''The K~-types that a spin LKT mu contributes to Dirac cohomology, or None when the Dirac inequality
    is strict for mu.'''
    labels = _inf_char(inf_char)
    calc = calculator()
    p = ktype_coords(mu)
    spin, achieving = calc.spin_norm_sq(p)
    if spin != rootdata.norm_sq(Weight(labels, Frame.ZETA)):
        return None
    target = tuple(labels)
    parts = []
    for j in achieving:
        gamma = calc.spin_gamma(p, j)
        conjugate = _g_dominant([c + 1 for c in gamma]) == target
        parts.append(ChamberContribution(j, tuple(int(c) for c in gamma), (-1) ** calc.lengths[j], conjugate))
    return SpinContribution(tuple(p), spin, tuple(parts))


def _spin_contributions(spin_lkts: Sequence[KTypeLike], inf_char: Sequence) -> List[SpinContribution]:
    result = []
    for mu in spin_lkts:
        contribution = spin_contribution(mu, inf_char)
        if contribution is None:
            raise NotSpinLKTError("%s is not a spin lowest K-type for %s"
                                  % (list(ktype_coords(mu)), Weight(tuple(inf_char))))
        result.append(contribution)
    return result


def dirac_index(spin_lkts: Sequence[KTypeLike], inf_char: Sequence,
                multiplicities: Optional[Sequence[int]] = None) -> Dict[Tuple[int, ...], int]:
    '''H_D^+ - H_D^- as a map gamma -> signed multiplicity; entries that cancel are dropped.'''
    labels = _inf_char(inf_char)
    if multiplicities is None:
        multiplicities = [1] * len(spin_lkts)
    index = Counter()
    for contribution, m in zip(_spin_contributions(spin_lkts, labels), multiplicities):
        for part in contribution.parts:
            if part.conjugate:
                index[part.gamma] += m * part.parity
    return {gamma: v for gamma, v in sorted(index.items()) if v != 0}
