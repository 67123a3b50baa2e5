from .losses import BalanceReport, balance_report, component_mse, composite_loss, residuals, weight_matrix
from .residuals import ResidualTerm, TermKind, as_points
from .scaling import UNIT_SCALES, ScaleSet, compute_scales
