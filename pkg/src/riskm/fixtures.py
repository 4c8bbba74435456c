"""Named worked examples used by the tests, the self-test and the docs.

Cells of the diversification example on Omega = [0, 1]:
D = [0, 0.85], C = (0.85, 0.9), B = (0.9, 0.95), A = (0.95, 1].
"""

from __future__ import annotations

from .indexsets import ClosedSet, MonoFn
from .randvar import PLRV

# weight and crossing pair of the explicit non-additivity example
WEIGHT_G = MonoFn(((0.0, 2 / 3, 0.0, 0.0), (2 / 3, 5 / 6, 1.5, 3.0), (5 / 6, 1.0, 3.0, 3.0)))
X = PLRV(((0.0, 2 / 3, 0.0, 0.0), (2 / 3, 5 / 6, 1.5, 3.0), (5 / 6, 1.0, 3.0, 3.0)))
Y = PLRV(((0.0, 2 / 3, 0.0, 0.0), (2 / 3, 5 / 6, 7.5 - 6.0, 0.0), (5 / 6, 1.0, 3.0, 3.0)))
K_TWO_BLOCKS = ClosedSet([(0.0, 0.25), (0.75, 1.0)])

# diversification example
_CELLS = [0.85, 0.9, 0.95]
X_FIX = PLRV(
    (
        (0.0, 0.85, 0.0, 0.0),
        (0.85, 0.9, 0.5, 1.5),
        (0.9, 0.95, 1.5, 2.5),
        (0.95, 1.0, 2.5, 3.5),
    )
)
X1_FIX = PLRV.steps(_CELLS, [0.0, 1.0, 2.0, 3.0])
X2_FIX = PLRV.steps(_CELLS, [0.0, 1.0, 3.0, 2.0])
X3_FIX = PLRV.steps(_CELLS, [0.0, 2.0, 1.0, 3.0])
K_CATASTROPHE = ClosedSet.points(0.9, 0.95)
# half ES_0.9 plus half ES_0.95
HALF_HALF_LEVELS = (0.0, 5.0, 15.0)
HALF_HALF_BREAKS = (0.9, 0.95)
