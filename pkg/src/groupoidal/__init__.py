"""Desk-scale workbench for discrete groupoid convolution algebras."""

from groupoidal.core.constants import ARTIFACT_VERSION

__version__ = ARTIFACT_VERSION
