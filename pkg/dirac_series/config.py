import os
from typing import Optional

THREADS_ENV_VAR = 'DIRAC_SCREEN_THREADS'
OUTPUT_FORMATS = ['json', 'csv', 'plain']


def default_threads() -> int:
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None or value.strip() == '':
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ValueError("%s must be a positive integer, got %r" % (THREADS_ENV_VAR, value))
    if threads < 1:
        raise ValueError("%s must be a positive integer, got %r" % (THREADS_ENV_VAR, value))
    return threads


class DiracScreenConfig(object):
    def __init__(self, output_format: str = 'json', threads: Optional[int] = None, pencil_cap: int = 50,
                 klimyk_cap: int = 10 ** 5, dataset_path: Optional[str] = None,
                 involutions_path: Optional[str] = None):
        """
        Args:
            output_format: 'json' for sorted-key JSON with "p/q" rationals, 'csv' for one record per line,
                'plain' for a human readable dump (square roots rendered as `sqrt(p/q)`)
            threads: worker processes used by the censuses. `None` reads `DIRAC_SCREEN_THREADS` (default 1)
            pencil_cap: largest n scanned along a pencil mu + n*beta before the scan is declared inconclusive;
                0 looks at mu alone
            klimyk_cap: largest Weyl dimension allowed for the small factor of a tensor product
            dataset_path: FS-scattered dataset file. `None` uses the file bundled with the package
            involutions_path: optional JSON file of involution matrices for the exact nu-bound mode
        """
        self.output_format = output_format
        self.threads = default_threads() if threads is None else threads
        self.pencil_cap = pencil_cap
        self.klimyk_cap = klimyk_cap
        self.dataset_path = dataset_path
        self.involutions_path = involutions_path
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError("output format must be one of %s, got %r" % (OUTPUT_FORMATS, self.output_format))
        for name in ['threads', 'klimyk_cap']:
            if getattr(self, name) < 1:
                raise ValueError("%s must be positive, got %d" % (name, getattr(self, name)))
        if self.pencil_cap < 0:
            raise ValueError("pencil_cap must be non-negative, got %d" % self.pencil_cap)

    @classmethod
    def from_args(cls, args) -> 'DiracScreenConfig':
        return cls(
            output_format=args.format,
            threads=args.threads,
            pencil_cap=getattr(args, 'pencil_cap', 50),
            klimyk_cap=getattr(args, 'klimyk_cap', 10 ** 5),
            dataset_path=getattr(args, 'dataset', None),
            involutions_path=getattr(args, 'involutions', None),
        )

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, ', '.join('%s=%r' % kv for kv in sorted(vars(self).items())))
