"""Worked-example templates (five renderfarms, seven QoS attributes)."""

from pathlib import Path

FIXTURE_DIR = Path(__file__).parent
HIERARCHY = FIXTURE_DIR / "hierarchy.json"
OFFERINGS = FIXTURE_DIR / "offerings.json"
REQUIREMENTS = FIXTURE_DIR / "requirements.json"
PRINTED_VECTORS = FIXTURE_DIR / "printed_sub_vectors.json"
