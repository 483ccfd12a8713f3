from dirac_series.rootdata import Frame, Weight, build_e7_tables, chambers, convert, atlas_k_shift
from dirac_series.norms import KTypeWeight, is_usmall, lambda_norm_sq, spin_norm_sq
from dirac_series.screener import InfChar, screen, pencil_min_spin
from dirac_series.dataset import load_dataset, verify_entry, verify_statistics, verify_cancellations
from dirac_series.config import DiracScreenConfig
