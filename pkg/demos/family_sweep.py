"""Gap reports across a parameter grid, written as CSV.

The same table comes out of ``anoncontract sweep --family spread --params Q=2,4,8,16 n=4``.
"""

import sys

from anoncontract import sweep

sys.stdout.write(sweep("spread", {"Q": ["2", "4", "8", "16"], "n": ["4"]}))
sys.stdout.write(sweep("random", {"n": ["4", "6"], "seed": ["1", "2"]}))
