"""Thin adapter exposing the pretrained SONAR text encoder/decoder through
the external coder protocol: batch files in, batch files out, never linked
into the caller's process."""

__version__ = "0.1.0"
