"""Relative partial combinatory algebras: certificates, assemblies, slices and density."""

from .outcome import Verdict, conjoin
from .pca import Budget, FilterCertificate, GenRef, Pca, filter_member, make_backend, synthesize
from .realizers import Family, RealizerSet

__all__ = [
    "Budget",
    "Family",
    "FilterCertificate",
    "GenRef",
    "Pca",
    "RealizerSet",
    "Verdict",
    "conjoin",
    "filter_member",
    "make_backend",
    "synthesize",
]
