"""layoutjudge: decide which of two layouts of the same graph looks better.

The package builds synthetic corpora of graphs with good and bad layouts,
summarizes each layout by order-free statistical features (principal axes,
angular spectra, edge lengths, radial distribution functions, tension), and
trains a small Siamese ranking network on labeled layout pairs.  Stress-based
and combined-quality-metric discriminators serve as baselines.
"""

__version__ = "0.1.0"

from .errors import LayoutJudgeError  # noqa: F401
from .graph import Graph, Layout  # noqa: F401
