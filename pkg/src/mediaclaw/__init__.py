"""MediaClaw: a deterministic multimodal capability middle layer.

Unified tool pool over pluggable providers, three-level routing, a skill
workflow engine with artifact lineage, and an HTTP/CLI gateway.
"""

__version__ = "0.1.0"
