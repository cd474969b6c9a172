"""Evolutionary search for multi-agent trajectory prediction heuristics.

The package couples a population loop driven by a code-generating LLM with
classical prediction baselines and a best-of-K displacement benchmark
harness for the ETH-UCY and SDD pedestrian datasets.
"""

__version__ = "0.1.0"
