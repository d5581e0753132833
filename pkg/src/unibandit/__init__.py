"""Unimodal multi-armed bandit simulations: IMED-UB, KLUCB-UB, d-IMED-UB, OSUB and IMED."""

__version__ = "0.1.0"
