"""Fourier analysis of affine IFS measures and determinantal measures.

Submodules: ``algebraic`` (Pisot numbers and traces), ``ifs`` (affine
systems and sampling), ``fourier`` (infinite products and Erdős scans),
``detmeasure`` (determinantal measures on sequence space), ``induced``
(their transforms on the line) and ``chaos`` (translation bounds).
"""
__version__ = "0.1.0"
