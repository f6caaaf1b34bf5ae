"""Certificates for contact forms, Liouville pairs and cotamed structures."""

__version__ = "0.1.0"
