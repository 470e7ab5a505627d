"""Capability handler implementations: deterministic mock, HTTP adapter, local tools."""
