"""Framed TCP key exchange with a passive tap."""
