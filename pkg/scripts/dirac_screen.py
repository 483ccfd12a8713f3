import argparse
import csv
import json
import logging
import sys

from dirac_series import dataset, norms, reptheory, rootdata, screener
from dirac_series.config import OUTPUT_FORMATS, DiracScreenConfig
from dirac_series.file_utils import dumps, to_jsonable
from dirac_series.norms import KTypeWeight
from dirac_series.screener import InfChar

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3


def _plain_value(key, value):
    if key.endswith('norm_sq') and isinstance(value, str):
        return '%s  (norm sqrt(%s))' % (value, value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def emit(result, output_format: str, stream=None):
    '''Writes a result to stdout: sorted-key JSON, one CSV row per record, or "key: value" lines.'''
    stream = stream or sys.stdout
    data = to_jsonable(result)
    if output_format == 'json':
        stream.write(dumps(data) + '\n')
        return
    rows = data if isinstance(data, list) else [data]
    rows = [row if isinstance(row, dict) else {'value': row} for row in rows]
    if output_format == 'csv':
        fields = sorted({k for row in rows for k in row})
        writer = csv.DictWriter(stream, fieldnames=fields, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({k: v if isinstance(v, str) else json.dumps(v, sort_keys=True) for k, v in row.items()})
        return
    for i, row in enumerate(rows):
        if i:
            stream.write('\n')
        for key in sorted(row):
            stream.write('%s: %s\n' % (key, _plain_value(key, row[key])))


# ---------------------------------------------------------------- subcommands

def run_chambers(args, config):
    return [chamber.to_json() for chamber in rootdata.chambers()], EXIT_OK


def run_norm(args, config):
    return norms.norm_report(KTypeWeight.parse(args.ktype)), EXIT_OK


def run_usmall(args, config):
    if args.ktype is not None:
        mu = KTypeWeight.parse(args.ktype)
        return {'ktype': mu, 'usmall': norms.is_usmall(mu)}, EXIT_OK
    if args.caps:
        return {'caps': list(norms.usmall_caps())}, EXIT_OK
    ktypes = norms.enumerate_usmall_ktypes(threads=config.threads, progress=not args.quiet)
    if args.list:
        return ktypes, EXIT_OK
    return {'usmall_ktypes': len(ktypes)}, EXIT_OK


def _involutions(config):
    if config.involutions_path is None:
        return None
    return screener.load_involutions(config.involutions_path)


def run_screen(args, config):
    verdict = screener.screen(KTypeWeight.parse(args.ktype), InfChar.parse(args.inf_char), _involutions(config),
                              cap=config.pencil_cap)
    if verdict.status is screener.ScreenStatus.INCONCLUSIVE:
        logger.warning('pencil through %s did not settle within n <= %d', args.ktype, config.pencil_cap)
        return verdict, EXIT_INCONCLUSIVE
    return verdict, EXIT_OK


def run_pencil(args, config):
    result = screener.pencil_min_spin(KTypeWeight.parse(args.ktype), InfChar.parse(args.inf_char),
                                      cap=config.pencil_cap, early_stop=not args.full_scan)
    if args.full_scan or result.conclusive:
        return result, EXIT_OK
    logger.warning('pencil through %s did not settle within n <= %d', result.ktype, config.pencil_cap)
    return result, EXIT_INCONCLUSIVE


def run_enumerate_phi(args, config):
    involutions = _involutions(config)
    if args.counts:
        counts = screener.phi_counts(args.max_coord, involutions, progress=not args.quiet)
        return {'counts': counts, 'total': sum(counts.values()), 'exact': involutions is not None}, EXIT_OK
    return screener.enumerate_inf_chars(args.max_coord, involutions), EXIT_OK


def run_certs(args, config):
    members = screener.certs_census(threads=config.threads, progress=not args.quiet)
    return members, EXIT_OK


def run_dirac_candidates(args, config):
    inf_char = InfChar.parse(args.inf_char)
    spin_lkts = None
    if args.spin_lkts is not None:
        spin_lkts = [KTypeWeight.parse(text) for text in args.spin_lkts.split(';')]
    candidates = reptheory.dirac_candidate_ktypes(inf_char.zeta_coords, spin_lkts)
    if args.gamma is not None:
        gamma = KTypeWeight.parse(args.gamma).varpi_coords
        candidates = [c for c in candidates if c.gamma == gamma]
    return candidates, EXIT_OK


def run_tensor(args, config):
    small, other = KTypeWeight.parse(args.small), KTypeWeight.parse(args.other)
    decomposition = reptheory.klimyk_tensor(small, other, cap=config.klimyk_cap)
    return {
        'small': small,
        'other': other,
        'dimension': decomposition.dimension(),
        'terms': decomposition,
        'prv': list(norms.prv_component(small, other)),
    }, EXIT_OK


def run_verify(args, config):
    entries, stats = dataset.load_dataset(config.dataset_path)
    reports = []
    if args.only in (None, 'entry'):
        reports.append(dataset.verify_entries(entries, stats, threads=config.threads, progress=not args.quiet))
    if args.only in (None, 'stats'):
        reports.append(dataset.verify_statistics(entries, stats, censuses=args.censuses, threads=config.threads,
                                                 involutions=_involutions(config)))
    if args.only in (None, 'cancellation'):
        reports.append(dataset.verify_cancellations(entries, stats))
    for report in reports:
        for failure in report.failures:
            logger.error('%s check %s failed for %s: expected %s, got %s', report.section, failure.check,
                         failure.subject, failure.expected, failure.actual)
    passed = all(r.passed for r in reports)
    return reports, EXIT_OK if passed else EXIT_INVALID


COMMANDS = {
    'chambers': run_chambers,
    'norm': run_norm,
    'usmall': run_usmall,
    'screen': run_screen,
    'pencil': run_pencil,
    'enumerate-phi': run_enumerate_phi,
    'certs': run_certs,
    'dirac-candidates': run_dirac_candidates,
    'tensor': run_tensor,
    'verify': run_verify,
}


def add_args(parser):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", type=str, default='json', choices=OUTPUT_FORMATS)
    common.add_argument("--threads", type=int, default=None,
                        help="Worker processes for the censuses. Defaults to $DIRAC_SCREEN_THREADS or 1")
    common.add_argument("--quiet", action='store_true', help="Only log warnings and errors, no progress bars")

    sub = parser.add_subparsers(dest='command')
    sub.required = True
    sub.add_parser('chambers', parents=[common], help="the 72 chambers containing the compact positive roots")

    p = sub.add_parser('norm', parents=[common], help="lambda norm, spin norm and u-smallness of a K-type")
    p.add_argument("--ktype", type=str, required=True, help="varpi coordinates a,b,c,d,e,f,g")

    p = sub.add_parser('usmall', parents=[common], help="u-small K-types")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--count", action='store_true', help="number of u-small K-types (default)")
    group.add_argument("--list", action='store_true', help="all u-small K-types")
    group.add_argument("--caps", action='store_true', help="per-coordinate bounds of the census box")
    group.add_argument("--ktype", type=str, default=None, help="membership of a single K-type")

    for name, help_text in [('screen', "Dirac inequality along the pencil through a K-type (after the nu bound)"),
                            ('pencil', "spin norms along the pencil mu + n beta")]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--inf-char", dest='inf_char', type=str, required=True, help="zeta coordinates")
        p.add_argument("--ktype", type=str, required=True)
        p.add_argument("--cap", dest='pencil_cap', type=int, default=screener.DEFAULT_PENCIL_CAP,
                       help="largest n scanned along the pencil")
        if name == 'screen':
            p.add_argument("--involutions", type=str, default=None, help="JSON file of involution matrices")
        else:
            p.add_argument("--full-scan", dest='full_scan', action='store_true', help="disable the early stop")

    p = sub.add_parser('enumerate-phi', parents=[common], help="candidate infinitesimal characters")
    p.add_argument("--max-coord", dest='max_coord', type=int, required=True)
    p.add_argument("--involutions", type=str, default=None,
                   help="JSON file of involution matrices; without it the nu bound is not applied")
    p.add_argument("--counts", action='store_true', help="#Phi_k for k = 1..max-coord instead of the list")

    sub.add_parser('certs', parents=[common], help="u-small K-types with spin^2 - lambda^2 >= 157/2")

    p = sub.add_parser('dirac-candidates', parents=[common], help="K~-types gamma with gamma + rho_c ~ Lambda")
    p.add_argument("--inf-char", dest='inf_char', type=str, required=True)
    p.add_argument("--gamma", type=str, default=None, help="restrict to one K~-type")
    p.add_argument("--spin-lkts", dest='spin_lkts', type=str, default=None,
                   help="semicolon separated spin LKTs; keep only the chamber solutions they reach")

    p = sub.add_parser('tensor', parents=[common], help="Klimyk decomposition of a tensor product of k-types")
    p.add_argument("--small", type=str, required=True)
    p.add_argument("--other", type=str, required=True)
    p.add_argument("--klimyk-cap", dest='klimyk_cap', type=int, default=10 ** 5)

    p = sub.add_parser('verify', parents=[common], help="check the bundled Dirac series tables")
    p.add_argument("--dataset", type=str, default=None, help="dataset JSON (default: the bundled file)")
    p.add_argument("--only", type=str, default=None, choices=['entry', 'stats', 'cancellation'])
    p.add_argument("--involutions", type=str, default=None)
    p.add_argument("--censuses", action='store_true',
                   help="also recompute the u-small, Certs and Phi censuses (slow)")
    return parser


def main(args, stream=None) -> int:
    config = DiracScreenConfig.from_args(args)
    logger.info('%s with %s', args.command, config)
    result, code = COMMANDS[args.command](args, config)
    emit(result, config.output_format, stream)
    return code


def cli_main(argv=None) -> int:
    parser = add_args(argparse.ArgumentParser(prog='dirac-screen', description="E7(7) Dirac series toolkit"))
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO)
    try:
        code = main(args)
    except (ValueError, OSError) as e:
        logger.error('%s', e)
        code = EXIT_INVALID
    except Exception:
        logger.exception('internal error')
        code = EXIT_FAILED
    return code


if __name__ == "__main__":
    sys.exit(cli_main())
