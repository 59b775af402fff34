"""Stringkex HTTP lab API."""
