"""Hilbert-Kunz type multiplicities of monomial ideals and p-families over F_p."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionMismatch, HKError, InclusionError, InfiniteColengthError, ParseError,
    PreconditionError,
)
from .staircase import (  # noqa: E402
    Colength, MonomialIdeal, Ring, bracket_power, colength, colon, intersect, make_ideal,
    relative_colength, saturation,
)
from .parse import parse_ideal  # noqa: E402
from .pfamily import (  # noqa: E402
    PFamily, check_pc, colon_family, custom_family, find_min_pc, frobenius_family,
    saturated_family,
)
from .limits import a_F, bbl_check, e_ghk, e_hk, estimate_limit, ghk_via_amao  # noqa: E402
from .geometry import HalfSpace  # noqa: E402
from .pbody import (  # noqa: E402
    exact_truncated_volume_frobenius, monte_carlo_volume, verify_cone_theorem,
)
