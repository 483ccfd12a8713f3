"""The fully supported scattered Dirac series of E7(7) as a machine-readable table, and a harness that
re-derives every checkable claim about them from the norm, representation and screening code.

Rows whose dual partner differs only by reversing the spin LKTs are stored once with a `dual` field and
expanded at load time.
"""
import dataclasses
import logging
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from dirac_series import norms, reptheory, screener
from dirac_series.file_utils import rational_from_str, rational_to_str, read_json
from dirac_series.norms import KTypeWeight, calculator, usmall_oracle
from dirac_series.rootdata import RANK, Frame, Weight, norm_sq, reverse_ktype

logger = logging.getLogger(__name__)

BUNDLED_DATASET = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', 'fs_scattered.json')
RHO_ZETA = (1,) * RANK
MULTIPLICITY_TWO_KGB = frozenset([9650, 9648])

_REQUIRED_KEYS = {'kgb', 'inf_char', 'lambda', 'nu', 'spin_lkts'}
_OPTIONAL_KEYS = {'dual', 'star', 'club', 'lkt_marked', 'multiplicity_two', 'facts', 'nu_alternatives'}


class DatasetSchemaError(ValueError):
    def __init__(self, message: str, kgb: Optional[int] = None, inf_char: Optional[Sequence] = None):
        if kgb is not None:
            message = 'entry kgb %s at %s: %s' % (kgb, list(inf_char) if inf_char is not None else '?', message)
        super().__init__(message)
        self.kgb = kgb
        self.inf_char = inf_char


@dataclass(frozen=True)
class TableEntry:
    kgb: int
    inf_char: Tuple[int, ...]
    lambda_coords: Tuple[int, ...]
    nu: Tuple[Fraction, ...]
    spin_lkts: Tuple[KTypeWeight, ...]
    star: bool = False
    club: bool = False
    dual_of: Optional[int] = None
    lkt_marked: Optional[int] = None
    multiplicity_two: bool = False
    nu_alternatives: Tuple[Tuple[Fraction, ...], ...] = ()
    facts: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return self.kgb, self.inf_char

    @property
    def is_trivial(self) -> bool:
        return self.inf_char == RHO_ZETA and tuple(self.nu) == RHO_ZETA

    def multiplicities(self) -> List[int]:
        '''Table-asserted multiplicities of the spin LKTs (atlas branching, not derived here).'''
        return [2 if self.multiplicity_two else 1] * len(self.spin_lkts)

    def inf_char_weight(self) -> Weight:
        return Weight(self.inf_char, Frame.ZETA)

    def describe(self) -> str:
        return 'kgb %d at %s' % (self.kgb, list(self.inf_char))

    def to_json(self):
        data = {
            'kgb': self.kgb,
            'inf_char': list(self.inf_char),
            'lambda': list(self.lambda_coords),
            'nu': [rational_to_str(c) for c in self.nu],
            'spin_lkts': [mu.to_json() for mu in self.spin_lkts],
            'star': self.star,
            'club': self.club,
            'multiplicity_two': self.multiplicity_two,
        }
        if self.dual_of is not None:
            data['dual_of'] = self.dual_of
        if self.lkt_marked is not None:
            data['lkt_marked'] = self.lkt_marked
        if self.facts:
            data['facts'] = self.facts
        return data


def dual_entry(entry: TableEntry) -> TableEntry:
    '''The dual partner row: same parameters, spin LKTs reversed (contragredient K-types).'''
    if entry.dual_of is None:
        raise ValueError('%s has no dual partner' % entry.describe())
    return dataclasses.replace(
        entry,
        kgb=entry.dual_of,
        dual_of=entry.kgb,
        spin_lkts=tuple(KTypeWeight(reverse_ktype(mu.varpi_coords)) for mu in entry.spin_lkts),
    )


@dataclass(frozen=True)
class SummaryStats:
    nu_norm_multiset: Dict[Fraction, int] = field(default_factory=dict)
    string_counts: Dict[str, Any] = field(default_factory=dict)
    totals: Dict[str, Any] = field(default_factory=dict)
    spin_norm_table: Tuple[Tuple[KTypeWeight, Fraction], ...] = ()
    phi1: Tuple[Tuple[int, ...], ...] = ()
    nu_exceptions: Tuple[Tuple[Tuple[int, ...], Tuple[Fraction, ...], Fraction], ...] = ()

    @classmethod
    def from_json(cls, raw: Dict[str, Any]) -> 'SummaryStats':
        if not isinstance(raw, dict):
            raise DatasetSchemaError('stats must be an object, got %r' % (raw,))
        try:
            multiset = {rational_from_str(k): int(v) for k, v in raw.get('nu_norm_multiset', {}).items()}
            table = tuple((KTypeWeight(tuple(row['ktype'])), rational_from_str(row['spin_norm_sq']))
                          for row in raw.get('spin_norm_table', []))
            phi1 = tuple(tuple(int(c) for c in v) for v in raw.get('phi1', []))
            exceptions = tuple(
                (tuple(int(c) for c in row['inf_char']), tuple(rational_from_str(c) for c in row['nu']),
                 rational_from_str(row['nu_norm_sq']))
                for row in raw.get('nu_exceptions', [])
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetSchemaError('malformed stats block: %s' % e)
        totals = dict(raw.get('totals', {}))
        return cls(multiset, dict(raw.get('string_counts', {})), totals, table, phi1, exceptions)


def _parse_entry(raw: Dict[str, Any]) -> TableEntry:
    if not isinstance(raw, dict):
        raise DatasetSchemaError('entries must be objects, got %r' % (raw,))
    kgb, inf_char = raw.get('kgb'), raw.get('inf_char')
    missing = _REQUIRED_KEYS - set(raw)
    if missing:
        raise DatasetSchemaError('missing fields %s' % sorted(missing), kgb, inf_char)
    unknown = set(raw) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise DatasetSchemaError('unknown fields %s' % sorted(unknown), kgb, inf_char)
    try:
        entry = TableEntry(
            kgb=int(kgb),
            inf_char=tuple(int(c) for c in inf_char),
            lambda_coords=tuple(int(c) for c in raw['lambda']),
            nu=tuple(rational_from_str(c) for c in raw['nu']),
            spin_lkts=tuple(KTypeWeight(tuple(mu)) for mu in raw['spin_lkts']),
            star=bool(raw.get('star', False)),
            club=bool(raw.get('club', False)),
            dual_of=raw.get('dual'),
            lkt_marked=raw.get('lkt_marked'),
            multiplicity_two=bool(raw.get('multiplicity_two', False)),
            nu_alternatives=tuple(tuple(rational_from_str(c) for c in nu) for nu in raw.get('nu_alternatives', [])),
            facts=dict(raw.get('facts', {})),
        )
    except (TypeError, ValueError) as e:
        raise DatasetSchemaError(str(e), kgb, inf_char)

    for name, coords in [('inf_char', entry.inf_char), ('lambda', entry.lambda_coords), ('nu', entry.nu)] + \
            [('nu alternative', nu) for nu in entry.nu_alternatives]:
        if len(coords) != RANK:
            raise DatasetSchemaError('%s needs %d coordinates, got %d' % (name, RANK, len(coords)), kgb, inf_char)
    if any(c < 0 for c in entry.inf_char):
        raise DatasetSchemaError('infinitesimal character is not dominant', kgb, inf_char)
    if not entry.spin_lkts:
        raise DatasetSchemaError('no spin LKTs', kgb, inf_char)
    for mu in entry.spin_lkts:
        if not mu.is_Ktype:
            raise DatasetSchemaError('spin LKT %s violates the K-type parity rule' % mu, kgb, inf_char)
    if entry.lkt_marked is not None and not 0 <= entry.lkt_marked < len(entry.spin_lkts):
        raise DatasetSchemaError('lkt_marked %r is not an LKT index' % entry.lkt_marked, kgb, inf_char)
    return entry


def expand_duals(entries: Sequence[TableEntry]) -> List[TableEntry]:
    expanded = []
    for entry in entries:
        expanded.append(entry)
        if entry.dual_of is not None:
            expanded.append(dual_entry(entry))
    return expanded


def load_dataset(path: Optional[str] = None) -> Tuple[List[TableEntry], SummaryStats]:
    path = path or BUNDLED_DATASET
    try:
        raw = read_json(path)
    except ValueError as e:
        raise DatasetSchemaError('%s is not valid JSON: %s' % (path, e))
    if not isinstance(raw, dict) or not isinstance(raw.get('entries'), list):
        raise DatasetSchemaError('%s must hold an object with an "entries" list' % path)
    unknown = set(raw) - {'entries', 'stats', 'source_version'}
    if unknown:
        raise DatasetSchemaError('unknown top-level fields %s in %s' % (sorted(unknown), path))

    stored = [_parse_entry(e) for e in raw['entries']]
    entries = expand_duals(stored)
    seen = set()
    for entry in entries:
        if entry.key in seen:
            raise DatasetSchemaError('duplicate row', entry.kgb, entry.inf_char)
        seen.add(entry.key)
    stats = SummaryStats.from_json(raw.get('stats', {}))
    expected = stats.totals.get('fs_scattered')
    if expected is not None and len(entries) != int(expected):
        raise DatasetSchemaError('%d stored rows expand to %d entries, expected %s'
                                 % (len(stored), len(entries), expected))
    logger.info('loaded %d entries (%d stored rows) from %s', len(entries), len(stored), path)
    return entries, stats


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class CheckResult:
    check: str
    passed: bool
    subject: str = ''
    expected: Any = None
    actual: Any = None

    def to_json(self):
        return {'check': self.check, 'passed': self.passed, 'subject': self.subject,
                'expected': self.expected, 'actual': self.actual}


@dataclass(frozen=True)
class VerificationReport:
    section: str
    results: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def merged(self, other: 'VerificationReport') -> 'VerificationReport':
        return VerificationReport(self.section, self.results + other.results)

    def to_json(self):
        return {'section': self.section, 'passed': self.passed, 'checked': len(self.results),
                'failures': [r.to_json() for r in self.failures]}


def _nu_exempt(entry: TableEntry, nu: Sequence[Fraction], stats: Optional[SummaryStats]) -> bool:
    if entry.is_trivial:
        return True
    exceptions = stats.nu_exceptions if stats is not None else ()
    return any(entry.inf_char == inf_char and tuple(nu) == exc_nu for inf_char, exc_nu, _ in exceptions)


def _verify_facts(entry: TableEntry, contributions: Dict[KTypeWeight, reptheory.SpinContribution]) -> List[CheckResult]:
    results = []
    outer = entry.facts.get('ktilde_outer', [])
    if outer:
        found = {g for c in contributions.values() if c is not None for g in c.gammas}
        for gamma in outer:
            results.append(CheckResult('ktilde_outer', tuple(gamma) in found,
                                       '%s, K~-type %s' % (entry.describe(), list(gamma)),
                                       'a PRV gamma of a spin LKT', sorted(list(g) for g in found)))
    inner = entry.facts.get('ktilde_inner', [])
    if inner:
        candidates = {c.gamma for c in reptheory.dirac_candidate_ktypes(entry.inf_char)}
        for gamma in inner:
            results.append(CheckResult('ktilde_candidate', tuple(gamma) in candidates,
                                       '%s, K~-type %s' % (entry.describe(), list(gamma))))
    return results


def verify_entry(entry: TableEntry, stats: Optional[SummaryStats] = None) -> VerificationReport:
    """Re-derives the per-row claims: every spin LKT mu has spin norm |Lambda|, contributes a K~-type
    gamma with gamma + rho_c conjugate to Lambda, and is u-small; |nu|^2 < 157/2 unless the row is one
    of the named exceptions."""
    target = norm_sq(entry.inf_char_weight())
    calc = calculator()
    oracle = usmall_oracle()
    results = []
    contributions = {}
    for mu in entry.spin_lkts:
        subject = '%s, mu %s' % (entry.describe(), mu)
        spin, _ = calc.spin_norm_sq(mu.varpi_coords)
        results.append(CheckResult('spin_norm', spin == target, subject, target, spin))
        contribution = reptheory.spin_contribution(mu, entry.inf_char)
        contributions[mu] = contribution
        results.append(CheckResult('conjugacy', contribution is not None and contribution.satisfies_conjugacy(),
                                   subject, 'gamma + rho_c in W(g) Lambda',
                                   None if contribution is None else [list(g) for g in contribution.gammas]))
        results.append(CheckResult('usmall', mu.varpi_coords in oracle, subject))

    readings = (entry.nu,) + entry.nu_alternatives
    values = [screener.nu_norm_sq(nu) for nu in readings]
    ok = any(v < screener.NU_BOUND or _nu_exempt(entry, nu, stats) for nu, v in zip(readings, values))
    results.append(CheckResult('nu_bound', ok, entry.describe(), '< %s' % screener.NU_BOUND,
                               values[0] if len(values) == 1 else values))
    results.extend(_verify_facts(entry, contributions))
    return VerificationReport('entry', tuple(results))


def _verify_entry_worker(args):
    return verify_entry(*args)


def verify_entries(entries: Sequence[TableEntry], stats: Optional[SummaryStats] = None, threads: int = 1,
                   progress: bool = True) -> VerificationReport:
    start = time.time()
    ordered = sorted(entries, key=lambda e: (e.kgb, e.inf_char))
    jobs = [(e, stats) for e in ordered]
    if threads > 1:
        from multiprocessing.pool import Pool
        with Pool(threads, initializer=norms.init_worker, initargs=(calculator(), usmall_oracle())) as p:
            reports = list(tqdm(p.imap(_verify_entry_worker, jobs), total=len(jobs), disable=not progress))
    else:
        reports = [verify_entry(*job) for job in tqdm(jobs, disable=not progress)]
    report = VerificationReport('entry', tuple(r for rep in reports for r in rep.results))
    logger.info('verified %d entries: %d checks, %d failures (%.1fs)', len(ordered), len(report.results),
                len(report.failures), time.time() - start)
    return report


def _multiset_results(actual: Counter, expected: Dict[Fraction, int]) -> List[CheckResult]:
    results = []
    for value in sorted(set(actual) | set(expected)):
        results.append(CheckResult('nu_norm_multiset', actual.get(value, 0) == expected.get(value, 0),
                                   '|nu|^2 = %s' % rational_to_str(value), expected.get(value, 0),
                                   actual.get(value, 0)))
    return results


def _census_results(stats: SummaryStats, threads: int, involutions) -> List[CheckResult]:
    totals = stats.totals
    results = []
    usmall = norms.enumerate_usmall_ktypes(threads=threads)
    if 'usmall_ktypes' in totals:
        results.append(CheckResult('usmall_count', len(usmall) == int(totals['usmall_ktypes']), 'u-small K-types',
                                   int(totals['usmall_ktypes']), len(usmall)))
    certs = screener.certs_census(usmall, threads=threads)
    if 'certs' in totals:
        results.append(CheckResult('certs_count', len(certs) == int(totals['certs']), 'Certs',
                                   int(totals['certs']), len(certs)))
    if 'certs_max_lambda_norm_sq' in totals and certs:
        expected = rational_from_str(totals['certs_max_lambda_norm_sq'])
        actual = max(m.lambda_norm_sq for m in certs)
        results.append(CheckResult('certs_max_lambda', actual == expected, 'Certs', expected, actual))
    if 'phi_counts' in totals:
        expected = {int(k): int(v) for k, v in totals['phi_counts'].items()}
        counts = screener.phi_counts(max(expected), involutions)
        for k in sorted(expected):
            # without involution data the filter over-approximates
            ok = counts[k] == expected[k] if involutions is not None else counts[k] >= expected[k]
            results.append(CheckResult('phi_count', ok, 'Phi_%d' % k, expected[k], counts[k]))
    return results


def verify_statistics(entries: Sequence[TableEntry], stats: SummaryStats, censuses: bool = False, threads: int = 1,
                      involutions=None) -> VerificationReport:
    """Recomputes the summary statistics that follow from the table and compares them exactly.

    Only the statistics present in `stats` are checked. The u-small, Certs and Phi censuses take minutes
    and run only with `censuses=True`.
    """
    results = _multiset_results(Counter(screener.nu_norm_sq(e.nu) for e in entries), stats.nu_norm_multiset)

    totals = stats.totals
    if 'fs_scattered' in totals:
        results.append(CheckResult('fs_scattered', len(entries) == int(totals['fs_scattered']), 'entries',
                                   int(totals['fs_scattered']), len(entries)))
    if 'starred' in totals:
        starred = sum(1 for e in entries if e.star)
        results.append(CheckResult('starred', starred == int(totals['starred']), 'starred entries',
                                   int(totals['starred']), starred))
    if entries:
        off_grid = [e.describe() for e in entries if any(c not in (0, 1) for c in e.inf_char)]
        results.append(CheckResult('inf_char_range', not off_grid, 'infinitesimal characters in {0,1}^7',
                                   [], off_grid))
        doubled = sorted({e.kgb for e in entries if e.multiplicity_two})
        results.append(CheckResult('multiplicity_two', set(doubled) == MULTIPLICITY_TWO_KGB, 'multiplicity two',
                                   sorted(MULTIPLICITY_TWO_KGB), doubled))

    strings = stats.string_counts
    if strings:
        n = [int(v) for v in strings['N']]
        results.append(CheckResult('string_total', sum(n) == int(strings['total']), 'sum of N_i',
                                   int(strings['total']), sum(n)))
        if 'strings' in totals:
            results.append(CheckResult('string_total', int(totals['strings']) == sum(n), 'strings total',
                                       int(totals['strings']), sum(n)))
        by_support = strings.get('N6_by_support', {})
        if by_support:
            support_sum = sum(int(v) for v in by_support.values())
            results.append(CheckResult('string_supports', support_sum == n[-1], 'N_6 by support', n[-1], support_sum))

    calc = calculator()
    for mu, expected in stats.spin_norm_table:
        actual, _ = calc.spin_norm_sq(mu.varpi_coords)
        results.append(CheckResult('spin_norm_table', actual == expected, 'mu %s' % mu, expected, actual))

    if stats.phi1:
        phi1 = [tuple(int(c) for c in v) for v in screener.enumerate_inf_chars(1)]
        results.append(CheckResult('phi1', sorted(phi1) == sorted(stats.phi1), 'Phi_1',
                                   len(stats.phi1), len(phi1)))
    if 'phi_total' in totals and 'phi_counts' in totals:
        total = sum(int(v) for v in totals['phi_counts'].values())
        results.append(CheckResult('phi_total', total == int(totals['phi_total']), 'sum of #Phi_i',
                                   int(totals['phi_total']), total))

    for inf_char, nu, expected in stats.nu_exceptions:
        actual = screener.nu_norm_sq(nu)
        present = any(e.inf_char == inf_char and tuple(e.nu) == nu for e in entries)
        results.append(CheckResult('nu_exception', actual == expected and actual >= screener.NU_BOUND and present,
                                   'nu %s' % [rational_to_str(c) for c in nu], expected, actual))

    if censuses:
        results.extend(_census_results(stats, threads, involutions))
    report = VerificationReport('stats', tuple(results))
    logger.info('statistics: %d checks, %d failures', len(report.results), len(report.failures))
    return report


def verify_cancellations(entries: Sequence[TableEntry], stats: Optional[SummaryStats] = None) -> VerificationReport:
    '''The Dirac index of every starred entry vanishes.'''
    results = []
    starred = [e for e in entries if e.star]
    for entry in starred:
        try:
            index = reptheory.dirac_index(entry.spin_lkts, entry.inf_char, entry.multiplicities())
        except reptheory.NotSpinLKTError as e:
            results.append(CheckResult('dirac_index', False, entry.describe(), {}, str(e)))
            continue
        results.append(CheckResult('dirac_index', not index, entry.describe(), {},
                                   {str(list(g)): v for g, v in index.items()}))
    if stats is not None and 'starred' in stats.totals:
        results.append(CheckResult('starred', len(starred) == int(stats.totals['starred']), 'starred entries',
                                   int(stats.totals['starred']), len(starred)))
    return VerificationReport('cancellation', tuple(results))
