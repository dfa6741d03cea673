"""Timing- and resource-aware mapping of quantum circuits onto constrained processors."""
